//! The three worked markets used throughout the tests, the CLI golden files
//! and the self-test.

use std::sync::Arc;

use crate::model::{Firm, Market, Profile, SetFunction};
use crate::rational::{rat, Rational};
use crate::subset::Subset;

pub fn universe(n: usize) -> Arc<[String]> {
    (1..=n).map(|i| format!("w{i}")).collect()
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// One firm worth 10 with both workers and 0 otherwise.
pub fn complements_utility() -> SetFunction {
    SetFunction::from_fn(universe(2), |s| if s.len() == 2 { int(10) } else { int(0) }).unwrap()
}

/// Single firm `f` with [`complements_utility`] and disutilities `(d1, d2)`.
pub fn example1(d1: Rational, d2: Rational) -> Market {
    Market::new(
        universe(2).to_vec(),
        vec![Firm {
            name: "f".into(),
            utility: complements_utility(),
        }],
        Profile::new(vec![vec![d1], vec![d2]]).unwrap(),
    )
    .unwrap()
}

/// Three workers: 2 on singletons and pairs, 3 on the full set. Satisfies
/// weak substitutes but is not submodular.
pub fn example2_h() -> SetFunction {
    SetFunction::from_fn(universe(3), |s| match s.len() {
        0 => int(0),
        1 | 2 => int(2),
        _ => int(3),
    })
    .unwrap()
}

/// [`example2_h`] as the utility of a single firm `f` with zero disutilities.
pub fn example2_market() -> Market {
    Market::new(
        universe(3).to_vec(),
        vec![Firm {
            name: "f".into(),
            utility: example2_h(),
        }],
        Profile::zeros(3, 1),
    )
    .unwrap()
}

/// Firm 1: `min(2, v(S))` with `v = (1, 1, 2)`; submodular, not gross substitutes.
pub fn example3_u1() -> SetFunction {
    SetFunction::budget_additive(universe(3), int(2), &[int(1), int(1), int(2)]).unwrap()
}

/// Firm 2: additive with every worker worth 1.
pub fn example3_u2() -> SetFunction {
    SetFunction::additive(universe(3), &[int(1), int(1), int(1)]).unwrap()
}

/// Two firms over three workers; `w1`, `w2` dislike firm 2 by `d1`, `d2`,
/// every other disutility is zero.
pub fn example3(d1: Rational, d2: Rational) -> Market {
    Market::new(
        universe(3).to_vec(),
        vec![
            Firm {
                name: "f1".into(),
                utility: example3_u1(),
            },
            Firm {
                name: "f2".into(),
                utility: example3_u2(),
            },
        ],
        Profile::new(vec![
            vec![int(0), d1],
            vec![int(0), d2],
            vec![int(0), int(0)],
        ])
        .unwrap(),
    )
    .unwrap()
}

/// Prices `(0, 1/2, 1/2)` at which firm 1 demands three bundles.
pub fn example3_prices_low() -> Vec<Rational> {
    vec![int(0), rat(1, 2), rat(1, 2)]
}

/// Prices `(1, 1/2, 1/2)`: only `w1` got dearer, yet `w2` drops out of demand.
pub fn example3_prices_high() -> Vec<Rational> {
    vec![int(1), rat(1, 2), rat(1, 2)]
}

pub fn subset(indices: &[usize]) -> Subset {
    Subset::from_indices(indices.iter().copied())
}
