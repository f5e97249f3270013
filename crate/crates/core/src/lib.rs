//! Exact-arithmetic toolkit for many-to-one job-matching markets with
//! salaries: substitutes conditions on firm utilities, the efficient
//! matching, VCG payments, and stability checks.

pub mod cli;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod model;
pub mod necessity;
pub mod rational;
pub mod report;
pub mod selftest;
pub mod setfn;
pub mod stability;
pub mod subset;
pub mod surplus;
pub mod vcg;

pub use error::{Error, Result, MAX_WORKERS};
pub use model::{FirmId, Market, Matching, Outcome, Profile, SetFunction, WorkerId};
pub use rational::Rational;
pub use subset::Subset;
