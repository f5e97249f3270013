//! Seeded random markets for property suites and the `gen` command.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result, MAX_WORKERS};
use crate::model::{Firm, Market, Profile, SetFunction};
use crate::rational::Rational;
use crate::setfn::is_submodular;
use crate::subset::Subset;

pub const RANDOM_SUBMODULAR_MAX_WORKERS: usize = 12;

/// Number of steps of the disutility grid `{0, ū/G, …, ū}` used by the
/// generators.
pub const PROFILE_GRID: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum GeneratorKind {
    Additive,
    BudgetAdditive,
    UnitDemand,
    /// Concave function of a weighted count plus a coverage function.
    RandomSubmodular,
    /// Strictly increasing, otherwise unstructured.
    RandomMonotone,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Additive,
        GeneratorKind::BudgetAdditive,
        GeneratorKind::UnitDemand,
        GeneratorKind::RandomSubmodular,
        GeneratorKind::RandomMonotone,
    ];

    pub fn max_workers(self) -> usize {
        match self {
            GeneratorKind::RandomSubmodular => RANDOM_SUBMODULAR_MAX_WORKERS,
            _ => MAX_WORKERS,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

fn int(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    Rational::from_integer(rng.gen_range(lo..=hi))
}

/// Draws one utility of the given family over `workers`.
pub fn random_utility(kind: GeneratorKind, workers: &Arc<[String]>, rng: &mut impl Rng) -> Result<SetFunction> {
    let n = workers.len();
    if n > kind.max_workers() {
        return Err(Error::Capacity {
            what: "generator worker count",
            got: n,
            limit: kind.max_workers(),
        });
    }
    let ints: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=4)).collect();
    let weights: Vec<Rational> = ints.iter().map(|&v| Rational::from_integer(v)).collect();
    match kind {
        GeneratorKind::Additive => SetFunction::additive(workers.clone(), &weights),
        GeneratorKind::UnitDemand => SetFunction::unit_demand(workers.clone(), &weights),
        GeneratorKind::BudgetAdditive => {
            let budget = int(rng, 1, ints.iter().sum::<i64>().max(1));
            SetFunction::budget_additive(workers.clone(), budget, &weights)
        }
        GeneratorKind::RandomSubmodular => loop {
            let h = random_submodular(workers, rng)?;
            if is_submodular(&h).verdict {
                return Ok(h);
            }
        },
        GeneratorKind::RandomMonotone => {
            let mut values = vec![Rational::zero(); 1 << n];
            for s in Subset::all(n).skip(1) {
                let below = s
                    .iter()
                    .map(|w| &values[s.without(w).index()])
                    .max()
                    .cloned()
                    .unwrap_or_else(Rational::zero);
                values[s.index()] = below + int(rng, 1, 3);
            }
            SetFunction::from_table(workers.clone(), values)
        }
    }
}

// g(Σ a_w) for a random concave piecewise-linear g, plus the weight of the
// union of random item sets.
fn random_submodular(workers: &Arc<[String]>, rng: &mut impl Rng) -> Result<SetFunction> {
    let n = workers.len();
    let sizes: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
    let mut lines = vec![(3i64, 0i64)];
    let mut offset = 0;
    for slope in [2i64, 1, 0] {
        offset += rng.gen_range(1..=4);
        lines.push((slope, offset));
    }
    let items = rng.gen_range(3..=6);
    let item_weight: Vec<i64> = (0..items).map(|_| rng.gen_range(1..=3)).collect();
    let covers: Vec<u32> = (0..n).map(|_| rng.gen_range(0..1u32 << items)).collect();
    SetFunction::from_fn(workers.clone(), |s| {
        let x: i64 = s.iter().map(|w| sizes[w]).sum();
        let concave = lines.iter().map(|(a, b)| a * x + b).min().unwrap();
        let union = s.iter().fold(0u32, |acc, w| acc | covers[w]);
        let coverage: i64 = (0..items).filter(|i| union >> i & 1 == 1).map(|i| item_weight[i]).sum();
        Rational::from_integer(concave + coverage)
    })
}

/// A profile with every entry on the grid `{0, ū/grid, …, ū}`.
pub fn random_profile(m: &Market, grid: u32, rng: &mut impl Rng) -> Profile {
    let step = m.ubar() / &Rational::from(grid.max(1) as i64);
    let rows = (0..m.n())
        .map(|_| {
            (0..m.m())
                .map(|_| &step * &Rational::from(rng.gen_range(0..=grid) as i64))
                .collect()
        })
        .collect();
    Profile::new(rows).expect("rectangular")
}

fn assemble(workers: Arc<[String]>, utilities: Vec<SetFunction>, rng: &mut impl Rng) -> Result<Market> {
    let n = workers.len();
    let m = utilities.len();
    let firms = names("f", m)
        .into_iter()
        .zip(utilities)
        .map(|(name, utility)| Firm { name, utility })
        .collect();
    let market = Market::new(workers.to_vec(), firms, Profile::zeros(n, m))?;
    let profile = random_profile(&market, PROFILE_GRID, rng);
    market.with_disutilities(profile)
}

/// A market of `m` firms drawn from one family over workers `w1..wn`, with
/// disutilities on the generator grid. Deterministic in `seed`.
pub fn generate(kind: GeneratorKind, n: usize, m: usize, seed: u64) -> Result<Market> {
    if m == 0 {
        return Err(Error::Precondition("a market needs at least one firm".into()));
    }
    let mut rng = rng(seed);
    let workers: Arc<[String]> = names("w", n).into();
    let utilities = (0..m)
        .map(|_| random_utility(kind, &workers, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    assemble(workers, utilities, &mut rng)
}

/// A market whose firms each draw their family at random, with between 2
/// and `max_n` workers and 1 to `max_m` firms.
pub fn mixed_market(max_n: usize, max_m: usize, seed: u64) -> Result<Market> {
    let mut rng = rng(seed);
    let n = rng.gen_range(2..=max_n.max(2));
    let m = rng.gen_range(1..=max_m.max(1));
    let workers: Arc<[String]> = names("w", n).into();
    let utilities = (0..m)
        .map(|_| {
            let kind = *GeneratorKind::ALL.choose(&mut rng).expect("non-empty");
            random_utility(kind, &workers, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(workers, utilities, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_market;
    use crate::setfn::{is_gross_substitutes, is_weak_substitutes};

    #[test]
    fn deterministic_in_seed() {
        for kind in GeneratorKind::ALL {
            assert_eq!(generate(kind, 4, 2, 9).unwrap(), generate(kind, 4, 2, 9).unwrap());
        }
        assert_ne!(
            generate(GeneratorKind::RandomMonotone, 4, 2, 1).unwrap(),
            generate(GeneratorKind::RandomMonotone, 4, 2, 2).unwrap()
        );
    }

    #[test]
    fn families_pass_their_checkers() {
        for seed in 0..20 {
            let m = generate(GeneratorKind::RandomSubmodular, 5, 2, seed).unwrap();
            assert!(m.firms().iter().all(|f| is_submodular(&f.utility).verdict));
            let m = generate(GeneratorKind::BudgetAdditive, 4, 2, seed).unwrap();
            assert!(m.firms().iter().all(|f| is_submodular(&f.utility).verdict));
            let m = generate(GeneratorKind::Additive, 4, 3, seed).unwrap();
            assert!(m.firms().iter().all(|f| is_gross_substitutes(&f.utility).unwrap().verdict));
            let m = generate(GeneratorKind::RandomMonotone, 3, 1, seed).unwrap();
            assert!(validate_market(&m).verdict);
        }
    }

    #[test]
    fn random_monotone_is_strictly_increasing_and_often_not_ws() {
        let mut failures = 0;
        for seed in 0..20 {
            let m = generate(GeneratorKind::RandomMonotone, 4, 1, seed).unwrap();
            let h = m.utility(0);
            for s in Subset::all(4) {
                for w in s.iter() {
                    assert!(h.value(s.without(w)) < h.value(s));
                }
            }
            failures += usize::from(!is_weak_substitutes(h).verdict);
        }
        assert!(failures > 0);
    }

    #[test]
    fn disutilities_lie_on_the_grid() {
        let m = mixed_market(5, 3, 4).unwrap();
        let step = m.ubar() / &Rational::from(PROFILE_GRID as i64);
        for w in 0..m.n() {
            for f in 0..m.m() {
                let d = m.disutilities().get(w, f);
                assert!(!d.is_negative() && d <= m.ubar());
                if !step.is_zero() {
                    assert!((d / &step).is_integer());
                }
            }
        }
    }

    #[test]
    fn caps() {
        assert!(generate(GeneratorKind::RandomSubmodular, 13, 1, 0).is_err());
        assert!(generate(GeneratorKind::Additive, 21, 1, 0).is_err());
        assert!(generate(GeneratorKind::Additive, 3, 0, 0).is_err());
    }
}
