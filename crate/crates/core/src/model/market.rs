use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use super::condition::ConditionReport;
use super::set_function::SetFunction;
use crate::error::{Error, Result, MAX_WORKERS};
use crate::rational::Rational;
use crate::subset::Subset;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FirmId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WorkerId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Firm {
    pub name: String,
    pub utility: SetFunction,
}

/// A type profile: one row of disutilities `u_w(f)` per worker, one column per firm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Profile {
    rows: Vec<Vec<Rational>>,
}

impl Profile {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        if let Some(first) = rows.first() {
            let m = first.len();
            if rows.iter().any(|r| r.len() != m) {
                return Err(Error::Malformed("ragged disutility matrix".into()));
            }
        }
        Ok(Profile { rows })
    }

    pub fn zeros(n: usize, m: usize) -> Self {
        Profile {
            rows: vec![vec![Rational::zero(); m]; n],
        }
    }

    /// `n × m` profile with every entry equal to `value`.
    pub fn constant(n: usize, m: usize, value: Rational) -> Self {
        Profile {
            rows: vec![vec![value; m]; n],
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, w: usize, f: usize) -> &Rational {
        &self.rows[w][f]
    }

    pub fn row(&self, w: usize) -> &[Rational] {
        &self.rows[w]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn set(&mut self, w: usize, f: usize, value: Rational) {
        self.rows[w][f] = value;
    }

    /// Copy of the profile with worker `w`'s report replaced.
    pub fn with_row(&self, w: usize, row: Vec<Rational>) -> Profile {
        let mut p = self.clone();
        p.rows[w] = row;
        p
    }

    /// Column `f`: each worker's disutility for firm `f`.
    pub fn column(&self, f: usize) -> Vec<Rational> {
        self.rows.iter().map(|r| r[f].clone()).collect()
    }

    /// `Σ_{w∈S} u_w(f)`.
    pub fn cost(&self, f: usize, s: Subset) -> Rational {
        s.iter().map(|w| &self.rows[w][f]).sum()
    }
}

/// Which type profiles are admissible: the box `[0, ū]^m` per worker, or any
/// non-negative profile.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DomainPolicy {
    #[default]
    Box,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Market {
    workers: Arc<[String]>,
    firms: Vec<Firm>,
    disutilities: Profile,
    ubar: Rational,
}

impl Market {
    pub fn new(workers: Vec<String>, firms: Vec<Firm>, disutilities: Profile) -> Result<Self> {
        if workers.len() > MAX_WORKERS {
            return Err(Error::Capacity {
                what: "worker count",
                got: workers.len(),
                limit: MAX_WORKERS,
            });
        }
        let mut seen = HashSet::new();
        if let Some(dup) = workers.iter().find(|w| !seen.insert(w.as_str())) {
            return Err(Error::Malformed(format!("duplicate worker {dup:?}")));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = firms.iter().find(|f| !seen.insert(f.name.as_str())) {
            return Err(Error::Malformed(format!("duplicate firm {:?}", dup.name)));
        }
        let workers: Arc<[String]> = workers.into();
        for f in &firms {
            if **f.utility.workers() != *workers {
                return Err(Error::Malformed(format!(
                    "utility of firm {:?} is defined over a different worker universe",
                    f.name
                )));
            }
        }
        Self::check_shape(&disutilities, workers.len(), firms.len())?;
        let ubar = firms
            .iter()
            .map(|f| f.utility.value(Subset::full(workers.len())).clone())
            .max()
            .unwrap_or_else(Rational::zero);
        Ok(Market {
            workers,
            firms,
            disutilities,
            ubar,
        })
    }

    fn check_shape(p: &Profile, n: usize, m: usize) -> Result<()> {
        if p.n() != n || p.rows().iter().any(|r| r.len() != m) {
            return Err(Error::Malformed(format!(
                "disutility matrix must be {n} workers × {m} firms"
            )));
        }
        Ok(())
    }

    pub fn workers(&self) -> &Arc<[String]> {
        &self.workers
    }

    pub fn firms(&self) -> &[Firm] {
        &self.firms
    }

    pub fn firm(&self, f: FirmId) -> &Firm {
        &self.firms[f.0]
    }

    pub fn utility(&self, f: usize) -> &SetFunction {
        &self.firms[f].utility
    }

    pub fn n(&self) -> usize {
        self.workers.len()
    }

    pub fn m(&self) -> usize {
        self.firms.len()
    }

    pub fn all_workers(&self) -> Subset {
        Subset::full(self.n())
    }

    /// The profile embedded in the market description.
    pub fn disutilities(&self) -> &Profile {
        &self.disutilities
    }

    /// `ū = max_f u_f(W)`, zero for a market without firms.
    pub fn ubar(&self) -> &Rational {
        &self.ubar
    }

    pub fn firm_index(&self, name: &str) -> Result<FirmId> {
        self.firms
            .iter()
            .position(|f| f.name == name)
            .map(FirmId)
            .ok_or_else(|| Error::UnknownFirm(name.to_string()))
    }

    pub fn worker_index(&self, name: &str) -> Result<WorkerId> {
        self.workers
            .iter()
            .position(|w| w == name)
            .map(WorkerId)
            .ok_or_else(|| Error::UnknownWorker(name.to_string()))
    }

    pub fn names(&self, s: Subset) -> Vec<String> {
        s.iter().map(|i| self.workers[i].clone()).collect()
    }

    /// Same firms with a different embedded profile.
    pub fn with_disutilities(&self, p: Profile) -> Result<Market> {
        Self::check_shape(&p, self.n(), self.m())?;
        Ok(Market {
            disutilities: p,
            ..self.clone()
        })
    }

    /// Checks that `u` has the market's shape.
    pub fn check_profile(&self, u: &Profile) -> Result<()> {
        Self::check_shape(u, self.n(), self.m())
    }

    /// Relabels workers consistently in utilities and disutilities: worker
    /// `i` moves to position `perm[i]`.
    pub fn permute_workers(&self, perm: &[usize]) -> Result<Market> {
        let n = self.n();
        let mut sorted = perm.to_vec();
        sorted.sort_unstable();
        if sorted != (0..n).collect::<Vec<_>>() {
            return Err(Error::Precondition("not a permutation of the workers".into()));
        }
        let mut names = vec![String::new(); n];
        let mut rows = vec![Vec::new(); n];
        for i in 0..n {
            names[perm[i]] = self.workers[i].clone();
            rows[perm[i]] = self.disutilities.row(i).to_vec();
        }
        let universe: Arc<[String]> = names.clone().into();
        let firms = self
            .firms
            .iter()
            .map(|f| Firm {
                name: f.name.clone(),
                utility: f.utility.permuted(perm, universe.clone()),
            })
            .collect();
        Market::new(names, firms, Profile::new(rows)?)
    }
}

/// The first violated market invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MarketViolation {
    /// `u_f(smaller) > u_f(larger)` with `smaller ⊂ larger`.
    NotMonotone {
        firm: FirmId,
        smaller: Subset,
        larger: Subset,
    },
    NegativeDisutility {
        worker: WorkerId,
        firm: FirmId,
        value: Rational,
    },
    /// A disutility above `ū` under [`DomainPolicy::Box`].
    OutsideDomain {
        worker: WorkerId,
        firm: FirmId,
        value: Rational,
        ubar: Rational,
    },
}

/// Checks monotonicity of every utility and that the embedded profile is
/// admissible under the default box domain.
pub fn validate_market(m: &Market) -> ConditionReport<MarketViolation> {
    validate_market_with(m, DomainPolicy::Box)
}

pub fn validate_market_with(m: &Market, policy: DomainPolicy) -> ConditionReport<MarketViolation> {
    for (f, firm) in m.firms.iter().enumerate() {
        if let Some((smaller, larger)) = firm.utility.monotonicity_violation() {
            return ConditionReport::fail(
                MarketViolation::NotMonotone {
                    firm: FirmId(f),
                    smaller,
                    larger,
                },
                format!(
                    "u_{}({:?}) = {} > u_{}({:?}) = {}",
                    firm.name,
                    m.names(smaller),
                    firm.utility.value(smaller),
                    firm.name,
                    m.names(larger),
                    firm.utility.value(larger)
                ),
            );
        }
    }
    let report = validate_profile(m, &m.disutilities, policy);
    if !report.verdict {
        return report;
    }
    ConditionReport::pass(format!(
        "{} firms monotone, {} workers, profile admissible, ū = {}",
        m.m(),
        m.n(),
        m.ubar
    ))
}

/// Checks a type profile for non-negativity and, under [`DomainPolicy::Box`],
/// the upper bound `ū`.
pub fn validate_profile(m: &Market, u: &Profile, policy: DomainPolicy) -> ConditionReport<MarketViolation> {
    for w in 0..u.n() {
        for (f, value) in u.row(w).iter().enumerate() {
            if value.is_negative() {
                return ConditionReport::fail(
                    MarketViolation::NegativeDisutility {
                        worker: WorkerId(w),
                        firm: FirmId(f),
                        value: value.clone(),
                    },
                    format!("u_{}({}) = {value} < 0", m.workers[w], m.firms[f].name),
                );
            }
            if policy == DomainPolicy::Box && value > &m.ubar {
                return ConditionReport::fail(
                    MarketViolation::OutsideDomain {
                        worker: WorkerId(w),
                        firm: FirmId(f),
                        value: value.clone(),
                        ubar: m.ubar.clone(),
                    },
                    format!(
                        "u_{}({}) = {value} exceeds ū = {}",
                        m.workers[w], m.firms[f].name, m.ubar
                    ),
                );
            }
        }
    }
    ConditionReport::pass("profile admissible".to_string())
}

/// `ū = max_f u_f(W)`.
pub fn ubar(m: &Market) -> Rational {
    m.ubar.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rational::rat;

    #[test]
    fn example_markets_are_valid() {
        let m = fixtures::example1(rat(3, 1), rat(4, 1));
        assert!(validate_market(&m).verdict);
        assert_eq!(ubar(&m), rat(10, 1));
        let m3 = fixtures::example3(rat(1, 4), rat(1, 4));
        assert!(validate_market(&m3).verdict);
        assert_eq!(ubar(&m3), rat(3, 1));
    }

    #[test]
    fn non_monotone_utility_is_reported() {
        let w: Arc<[String]> = vec!["w1".to_string(), "w2".to_string()].into();
        let h = SetFunction::from_table(w, vec![rat(0, 1), rat(5, 1), rat(0, 1), rat(3, 1)]).unwrap();
        let m = Market::new(
            vec!["w1".into(), "w2".into()],
            vec![Firm { name: "f".into(), utility: h }],
            Profile::zeros(2, 1),
        )
        .unwrap();
        let r = validate_market(&m);
        assert!(!r.verdict);
        assert_eq!(
            r.witness,
            Some(MarketViolation::NotMonotone {
                firm: FirmId(0),
                smaller: Subset::from_indices([0]),
                larger: Subset::from_indices([0, 1]),
            })
        );
    }

    #[test]
    fn empty_worker_set_is_valid_with_zero_ubar() {
        let h = SetFunction::from_table(Arc::from(Vec::<String>::new()), vec![Rational::zero()]).unwrap();
        let m = Market::new(vec![], vec![Firm { name: "f".into(), utility: h }], Profile::zeros(0, 1)).unwrap();
        assert!(validate_market(&m).verdict);
        assert_eq!(ubar(&m), Rational::zero());
    }

    #[test]
    fn negative_and_out_of_box_disutilities() {
        let m = fixtures::example1(rat(-1, 1), rat(4, 1));
        let r = validate_market(&m);
        assert!(matches!(r.witness, Some(MarketViolation::NegativeDisutility { .. })));

        let m = fixtures::example1(rat(11, 1), rat(4, 1));
        assert!(matches!(
            validate_market(&m).witness,
            Some(MarketViolation::OutsideDomain { .. })
        ));
        assert!(validate_market_with(&m, DomainPolicy::Unbounded).verdict);
    }

    #[test]
    fn structural_errors() {
        let m = fixtures::example1(rat(3, 1), rat(4, 1));
        assert!(m.with_disutilities(Profile::zeros(3, 1)).is_err());
        assert!(matches!(m.firm_index("nope"), Err(Error::UnknownFirm(_))));
    }

    #[test]
    fn ubar_invariant_under_worker_relabelling() {
        let m = fixtures::example3(rat(1, 4), rat(3, 4));
        let p = m.permute_workers(&[2, 0, 1]).unwrap();
        assert_eq!(ubar(&p), ubar(&m));
        assert_eq!(p.workers()[2], "w1");
        assert_eq!(p.disutilities().row(0), m.disutilities().row(1));
        let s = Subset::from_indices([0, 2]);
        let moved = Subset::from_indices([2, 1]);
        assert_eq!(p.utility(0).value(moved), m.utility(0).value(s));
    }
}
