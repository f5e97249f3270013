//! Maximum surplus: per-firm tables `V_f`, the efficient matching, surplus
//! with excluded workers, and an exhaustive oracle.
//!
//! The partition optimizer is a dynamic program over (firm suffix, worker
//! pool): `best[k][P]` is the largest surplus firms `k..m` can extract from
//! pool `P`. One pass costs `O(m · 3^n)` and yields `V(W \ S)` for every `S`
//! at once, which is what the payment rule and the marginal-ordering check consume.

use crate::error::{Error, Result, MAX_WORKERS};
use crate::model::{ConditionReport, FirmId, Market, Matching, Profile, SetFunction};
use crate::rational::Rational;
use crate::setfn::{is_submodular, SetFamily};
use crate::subset::Subset;

/// `V_f(S)` and membership of `S` in `S^f` for every subset `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirmSurplusTable {
    pub firm: FirmId,
    values: Vec<Rational>,
    in_sf: Vec<bool>,
}

impl FirmSurplusTable {
    /// `V_f(S) = max_{T⊆S} [u_f(T) − Σ_{w∈T} u_w(f)]`.
    pub fn value(&self, s: Subset) -> &Rational {
        &self.values[s.index()]
    }

    /// Whether hiring all of `S` attains `V_f(S)`.
    pub fn in_sf(&self, s: Subset) -> bool {
        self.in_sf[s.index()]
    }

    /// `S^f` as a set family.
    pub fn sf(&self) -> SetFamily {
        SetFamily::from_predicate(self.n(), |s| self.in_sf(s))
    }

    pub fn n(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    /// Smallest member of `S^f` inside `s` that attains `V_f(s)`, in canonical order.
    pub fn shrink(&self, s: Subset) -> Subset {
        if self.in_sf(s) {
            return s;
        }
        s.subsets()
            .filter(|&t| self.in_sf(t) && self.value(t) == self.value(s))
            .min_by(|a, b| a.canonical_cmp(*b))
            .expect("V_f(s) is attained by some subset")
    }
}

/// Builds `V_f` for a single utility against the column of disutilities
/// workers have for that firm.
pub fn surplus_table(h: &SetFunction, costs: &[Rational], firm: FirmId) -> FirmSurplusTable {
    let n = h.n();
    let mut values = Vec::with_capacity(1 << n);
    let mut in_sf = Vec::with_capacity(1 << n);
    let mut raw_cost = vec![Rational::zero(); 1 << n];
    for s in Subset::all(n) {
        if let Some(low) = s.iter().next() {
            raw_cost[s.index()] = &raw_cost[s.without(low).index()] + &costs[low];
        }
        let raw = h.value(s) - &raw_cost[s.index()];
        let best_sub = s
            .iter()
            .map(|w| &values[s.without(w).index()])
            .max()
            .cloned();
        match best_sub {
            Some(b) if b > raw => {
                values.push(b);
                in_sf.push(false);
            }
            _ => {
                values.push(raw);
                in_sf.push(true);
            }
        }
    }
    FirmSurplusTable { firm, values, in_sf }
}

/// Firm `f`'s surplus table under profile `u`.
pub fn firm_surplus(m: &Market, f: FirmId, u: &Profile) -> Result<FirmSurplusTable> {
    if f.0 >= m.m() {
        return Err(Error::UnknownFirm(format!("#{}", f.0)));
    }
    m.check_profile(u)?;
    Ok(surplus_table(m.utility(f.0), &u.column(f.0), f))
}

/// An efficient matching with every firm's set in `S^f`, and its total surplus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EfficientSolution {
    pub matching: Matching,
    pub total: Rational,
    /// Whether more than one maximizer existed at some firm and the
    /// canonical tie-break decided.
    pub tie_broken: bool,
}

/// Deliberate solver defects for mutation testing of the self-test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DpFault {
    /// The DP never lets a firm take the entire remaining pool.
    SkipFullPool,
}

/// Surplus tables and the suffix DP for one market and profile.
#[derive(Clone, Debug)]
pub struct SurplusSolver {
    n: usize,
    tables: Vec<FirmSurplusTable>,
    best: Vec<Vec<Rational>>,
}

impl SurplusSolver {
    pub fn new(m: &Market, u: &Profile) -> Result<Self> {
        Self::build(m, u, None)
    }

    #[doc(hidden)]
    pub fn with_fault(m: &Market, u: &Profile, fault: Option<DpFault>) -> Result<Self> {
        Self::build(m, u, fault)
    }

    fn build(m: &Market, u: &Profile, fault: Option<DpFault>) -> Result<Self> {
        let n = m.n();
        if n > MAX_WORKERS {
            return Err(Error::Capacity {
                what: "worker count",
                got: n,
                limit: MAX_WORKERS,
            });
        }
        m.check_profile(u)?;
        let tables: Vec<FirmSurplusTable> = (0..m.m())
            .map(|f| surplus_table(m.utility(f), &u.column(f), FirmId(f)))
            .collect();
        let mut best = vec![vec![Rational::zero(); 1 << n]; m.m() + 1];
        for k in (0..m.m()).rev() {
            let (head, tail) = best.split_at_mut(k + 1);
            let next = &tail[0];
            let cur = &mut head[k];
            for pool in Subset::all(n) {
                let mut top = next[pool.index()].clone();
                for t in pool.subsets().skip(1) {
                    if fault == Some(DpFault::SkipFullPool) && t == pool {
                        continue;
                    }
                    let v = tables[k].value(t) + &next[pool.difference(t).index()];
                    if v > top {
                        top = v;
                    }
                }
                cur[pool.index()] = top;
            }
        }
        Ok(SurplusSolver { n, tables, best })
    }

    pub fn table(&self, f: FirmId) -> &FirmSurplusTable {
        &self.tables[f.0]
    }

    pub fn tables(&self) -> &[FirmSurplusTable] {
        &self.tables
    }

    /// `V(W)`.
    pub fn total(&self) -> &Rational {
        &self.best[0][Subset::full(self.n).index()]
    }

    /// `V(P)`: the maximum surplus using only workers in `pool`.
    pub fn value_of_pool(&self, pool: Subset) -> &Rational {
        &self.best[0][pool.index()]
    }

    /// `V(W \ S)`.
    pub fn excluding(&self, excluded: Subset) -> &Rational {
        self.value_of_pool(Subset::full(self.n).difference(excluded))
    }

    /// Reconstructs the canonical efficient matching: firms in declared
    /// order each take the fewest workers, then the lexicographically
    /// smallest set, consistent with an optimal completion.
    pub fn efficient_matching(&self) -> EfficientSolution {
        let m = self.tables.len();
        let mut pool = Subset::full(self.n);
        let mut sets = Vec::with_capacity(m);
        let mut tie_broken = false;
        for k in 0..m {
            let target = &self.best[k][pool.index()];
            let next = &self.best[k + 1];
            let mut chosen: Option<Subset> = None;
            let mut count = 0;
            for t in pool.subsets() {
                let v = self.tables[k].value(t) + &next[pool.difference(t).index()];
                if &v == target {
                    count += 1;
                    if chosen.is_none_or(|c| t.canonical_cmp(c).is_lt()) {
                        chosen = Some(t);
                    }
                }
            }
            tie_broken |= count > 1;
            let t = self.tables[k].shrink(chosen.expect("optimum is attained"));
            pool = pool.difference(t);
            sets.push(t);
        }
        let total: Rational = sets
            .iter()
            .zip(&self.tables)
            .map(|(s, t)| t.value(*s).clone())
            .sum();
        EfficientSolution {
            matching: Matching::from_firm_sets(self.n, &sets).expect("disjoint by construction"),
            total,
            tie_broken,
        }
    }
}

/// The canonical efficient matching `μ*` and `V(W)`.
pub fn efficient_matching(m: &Market, u: &Profile) -> Result<EfficientSolution> {
    Ok(SurplusSolver::new(m, u)?.efficient_matching())
}

/// Maximum total surplus when every worker in `excluded` stays unmatched.
pub fn max_surplus_excluding(m: &Market, u: &Profile, excluded: Subset) -> Result<Rational> {
    if !excluded.is_subset_of(m.all_workers()) {
        return Err(Error::Precondition(format!(
            "excluded set {excluded:?} is not a subset of the workers"
        )));
    }
    Ok(SurplusSolver::new(m, u)?.excluding(excluded).clone())
}

pub const BRUTE_FORCE_MAX_WORKERS: usize = 8;
pub const BRUTE_FORCE_MAX_FIRMS: usize = 4;

/// Enumerates all `(m+1)^n` assignments and scores each by
/// `Σ_f [u_f(μ(f)) − Σ_{w∈μ(f)} u_w(f)]`.
pub fn brute_force_matching(m: &Market, u: &Profile) -> Result<EfficientSolution> {
    if m.n() > BRUTE_FORCE_MAX_WORKERS {
        return Err(Error::Capacity {
            what: "brute-force worker count",
            got: m.n(),
            limit: BRUTE_FORCE_MAX_WORKERS,
        });
    }
    if m.m() > BRUTE_FORCE_MAX_FIRMS {
        return Err(Error::Capacity {
            what: "brute-force firm count",
            got: m.m(),
            limit: BRUTE_FORCE_MAX_FIRMS,
        });
    }
    m.check_profile(u)?;
    let n = m.n();
    let base = m.m() + 1;
    // u_f(S) − Σ_{w∈S} u_w(f) for every firm and set
    let raw: Vec<Vec<Rational>> = (0..m.m())
        .map(|f| Subset::all(n).map(|s| m.utility(f).value(s) - u.cost(f, s)).collect())
        .collect();
    let combos = base.pow(n as u32);
    let mut best: Option<(Rational, Vec<Subset>)> = None;
    let mut ties = 0usize;
    for code in 0..combos {
        let mut sets = vec![Subset::EMPTY; m.m()];
        let mut rest = code;
        for w in 0..n {
            let slot = rest % base;
            rest /= base;
            if slot > 0 {
                sets[slot - 1] = sets[slot - 1].with(w);
            }
        }
        let score: Rational = sets.iter().zip(&raw).map(|(s, r)| &r[s.index()]).sum();
        match &best {
            Some((b, _)) if &score < b => {}
            Some((b, _)) if &score == b => ties += 1,
            _ => {
                best = Some((score, sets));
                ties = 0;
            }
        }
    }
    let (total, sets) = best.expect("at least the empty matching");
    Ok(EfficientSolution {
        matching: Matching::from_firm_sets(n, &sets)?,
        total,
        tie_broken: ties > 0,
    })
}

/// A firm and a subset `S ⊆ μ*(f)` with `∂_S[V(W)] > ∂_S[V_f(μ*(f))]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma1Witness {
    pub firm: FirmId,
    pub set: Subset,
    pub market_marginal: Rational,
    pub firm_marginal: Rational,
}

/// `∂_S[V(W)]` and `∂_S[V_f(μ*(f))]` for `S ⊆ μ*(f)`.
pub fn lemma1_marginals(solver: &SurplusSolver, mu: &Matching, f: FirmId, s: Subset) -> (Rational, Rational) {
    let assigned = mu.workers_of(f);
    let table = solver.table(f);
    let market = solver.total() - solver.excluding(s);
    let firm = table.value(assigned) - table.value(assigned.difference(s));
    (market, firm)
}

/// Checks `∂_S[V(W)] ≤ ∂_S[V_f(μ*(f))]` for every firm and every `S ⊆ μ*(f)`.
pub fn check_lemma1(m: &Market, u: &Profile) -> Result<ConditionReport<Lemma1Witness>> {
    let solver = SurplusSolver::new(m, u)?;
    let sol = solver.efficient_matching();
    let mut checked = 0usize;
    for f in (0..m.m()).map(FirmId) {
        for s in sol.matching.workers_of(f).subsets() {
            let (market, firm) = lemma1_marginals(&solver, &sol.matching, f, s);
            checked += 1;
            if market > firm {
                let details = format!(
                    "firm {}: ∂_S V(W) = {market} > ∂_S V_f = {firm} for S = {:?}",
                    m.firm(f).name,
                    m.names(s)
                );
                return Ok(ConditionReport::fail(
                    Lemma1Witness {
                        firm: f,
                        set: s,
                        market_marginal: market,
                        firm_marginal: firm,
                    },
                    details,
                ));
            }
        }
    }
    Ok(ConditionReport::pass(format!("{checked} (firm, subset) pairs satisfy the ordering")))
}

/// Outcome of the downward-closure check on `S^f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma3Report {
    /// Whether the utility is submodular. When it is not, the implication
    /// holds vacuously and `report.verdict` is true.
    pub premise_holds: bool,
    /// Whether `S^f` is downward closed, regardless of the premise.
    pub downward_closed: bool,
    /// Witness `(S, T)`: `S ∈ S^f`, `T ⊂ S`, `T ∉ S^f`.
    pub report: ConditionReport<(Subset, Subset)>,
}

/// If `h` is submodular, `S^f` (for the given column of disutilities) must
/// be downward closed.
pub fn check_lemma3(h: &SetFunction, costs: &[Rational]) -> Lemma3Report {
    let table = surplus_table(h, costs, FirmId(0));
    let family = table.sf();
    let violation = family.downward_closure_violation();
    let premise_holds = is_submodular(h).verdict;
    let downward_closed = violation.is_none();
    let report = match (premise_holds, violation) {
        (false, v) => ConditionReport::pass(match v {
            Some((s, t)) => format!("premise false: not submodular ({s:?} ∈ S^f, {t:?} ∉ S^f)"),
            None => "premise false: not submodular (S^f happens to be downward closed)".to_string(),
        }),
        (true, None) => ConditionReport::pass(format!("S^f is downward closed ({} sets)", family.len())),
        (true, Some((s, t))) => ConditionReport::fail((s, t), format!("{s:?} ∈ S^f but {t:?} ∉ S^f")),
    };
    Lemma3Report {
        premise_holds,
        downward_closed,
        report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, subset};
    use crate::rational::rat;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn firm_surplus_example1() {
        let m = fixtures::example1(r(3), r(4));
        let t = firm_surplus(&m, FirmId(0), m.disutilities()).unwrap();
        assert_eq!(t.value(subset(&[0, 1])), &r(3));
        let sf: Vec<Subset> = t.sf().iter().collect();
        assert_eq!(sf, vec![Subset::EMPTY, subset(&[0, 1])]);
        assert!(matches!(firm_surplus(&m, FirmId(3), m.disutilities()), Err(Error::UnknownFirm(_))));
    }

    #[test]
    fn firm_surplus_example3() {
        let m = fixtures::example3(rat(1, 4), rat(1, 4));
        let t = firm_surplus(&m, FirmId(1), m.disutilities()).unwrap();
        assert_eq!(t.value(subset(&[0, 1, 2])), &rat(5, 2));
    }

    #[test]
    fn prohibitive_disutilities_leave_everyone_unmatched() {
        let m = fixtures::example3(r(0), r(0));
        let u = Profile::constant(3, 2, r(4));
        for f in 0..2 {
            let t = firm_surplus(&m, FirmId(f), &u).unwrap();
            assert!(Subset::all(3).all(|s| t.value(s).is_zero()));
            assert_eq!(t.sf().iter().collect::<Vec<_>>(), vec![Subset::EMPTY]);
        }
        let sol = efficient_matching(&m, &u).unwrap();
        assert_eq!(sol.matching.unmatched_workers(), m.all_workers());
        assert!(sol.total.is_zero());
    }

    #[test]
    fn efficient_matching_example3_low() {
        let m = fixtures::example3(rat(1, 4), rat(1, 4));
        let sol = efficient_matching(&m, m.disutilities()).unwrap();
        assert_eq!(sol.total, rat(7, 2));
        assert_eq!(sol.matching.workers_of(FirmId(0)), subset(&[2]));
        assert_eq!(sol.matching.workers_of(FirmId(1)), subset(&[0, 1]));
    }

    #[test]
    fn efficient_matching_example3_high() {
        let m = fixtures::example3(rat(3, 4), rat(3, 4));
        let sol = efficient_matching(&m, m.disutilities()).unwrap();
        assert_eq!(sol.total, r(3));
        assert_eq!(sol.matching.workers_of(FirmId(0)), subset(&[0, 1]));
        assert_eq!(sol.matching.workers_of(FirmId(1)), subset(&[2]));
        assert!(!sol.tie_broken);
    }

    #[test]
    fn efficient_matching_example1() {
        let m = fixtures::example1(r(3), r(4));
        let sol = efficient_matching(&m, m.disutilities()).unwrap();
        assert_eq!(sol.total, r(3));
        assert_eq!(sol.matching.workers_of(FirmId(0)), subset(&[0, 1]));
        assert_eq!(brute_force_matching(&m, m.disutilities()).unwrap().total, r(3));
    }

    #[test]
    fn exclusion_values() {
        let m = fixtures::example3(rat(1, 4), rat(1, 4));
        let u = m.disutilities();
        assert_eq!(max_surplus_excluding(&m, u, subset(&[0])).unwrap(), rat(11, 4));
        assert_eq!(max_surplus_excluding(&m, u, m.all_workers()).unwrap(), r(0));
        let hi = fixtures::example3(rat(3, 4), rat(3, 4));
        assert_eq!(max_surplus_excluding(&hi, hi.disutilities(), subset(&[2])).unwrap(), r(2));
        assert!(max_surplus_excluding(&m, u, subset(&[5])).is_err());
    }

    #[test]
    fn brute_force_cases() {
        let m = fixtures::example3(rat(1, 4), rat(1, 4));
        assert_eq!(brute_force_matching(&m, m.disutilities()).unwrap().total, rat(7, 2));

        let h = SetFunction::additive(fixtures::universe(1), &[r(5)]).unwrap();
        let single = Market::new(
            vec!["w1".into()],
            vec![crate::model::Firm { name: "f".into(), utility: h }],
            Profile::new(vec![vec![r(7)]]).unwrap(),
        )
        .unwrap();
        let sol = brute_force_matching(&single, single.disutilities()).unwrap();
        assert_eq!(sol.total, r(0));
        assert_eq!(sol.matching.firm_of(0), None);
    }

    #[test]
    fn brute_force_caps() {
        let h = SetFunction::from_fn(fixtures::universe(9), |_| r(0)).unwrap();
        let big = Market::new(
            fixtures::universe(9).to_vec(),
            vec![crate::model::Firm { name: "f".into(), utility: h }],
            Profile::zeros(9, 1),
        )
        .unwrap();
        assert!(matches!(
            brute_force_matching(&big, big.disutilities()),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn marginal_ordering_on_fixtures() {
        let m = fixtures::example3(rat(1, 4), rat(1, 4));
        assert!(check_lemma1(&m, m.disutilities()).unwrap().verdict);
        let m = fixtures::example1(r(3), r(4));
        assert!(check_lemma1(&m, m.disutilities()).unwrap().verdict);
    }

    #[test]
    fn downward_closure_on_fixtures() {
        let u1 = fixtures::example3_u1();
        for a in 0..=4 {
            for b in 0..=4 {
                let rep = check_lemma3(&u1, &[rat(a, 4), rat(b, 4), r(0)]);
                assert!(rep.premise_holds && rep.report.verdict && rep.downward_closed);
            }
        }
        let rep = check_lemma3(&fixtures::complements_utility(), &[r(3), r(4)]);
        assert!(!rep.premise_holds);
        assert!(rep.report.verdict);
        assert!(!rep.downward_closed);
        assert!(rep.report.details.contains("premise false"));

        let add = fixtures::example3_u2();
        let rep = check_lemma3(&add, &[r(0), r(0), r(0)]);
        assert!(rep.report.verdict);
        let t = surplus_table(&add, &[r(0), r(0), r(0)], FirmId(0));
        assert_eq!(t.sf().len(), 8);
    }

    #[test]
    fn fault_changes_the_optimum() {
        let m = fixtures::example1(r(3), r(4));
        let bad = SurplusSolver::with_fault(&m, m.disutilities(), Some(DpFault::SkipFullPool)).unwrap();
        assert_ne!(bad.total(), &r(3));
    }
}
