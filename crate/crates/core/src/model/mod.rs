//! Domain types: set functions, markets, type profiles, matchings and outcomes.

mod condition;
pub mod file;
mod market;
mod matching;
mod set_function;

pub use condition::ConditionReport;
pub use market::{
    ubar, validate_market, validate_market_with, validate_profile, DomainPolicy, Firm, FirmId, Market,
    MarketViolation, Profile, WorkerId,
};
pub use matching::{Matching, Outcome};
pub use set_function::SetFunction;
