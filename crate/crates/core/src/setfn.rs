//! Set-function calculus: marginal products, the weak-substitutes,
//! submodularity, strong-substitutes and gross-substitutes checkers, and
//! demand sets at linear prices.
//!
//! Every checker scans candidates in a fixed order (subsets by bit pattern,
//! workers by index) and reports the first violation, so witnesses are
//! deterministic. Each witness type can re-evaluate its defining inequality
//! against the function it was produced from.

use crate::error::{Error, Result};
use crate::model::{ConditionReport, SetFunction};
use crate::rational::{rat, Rational};
use crate::subset::Subset;

/// `∂_w[h(S)] = h(S) − h(S \ {w})`.
pub fn marginal(h: &SetFunction, s: Subset, w: usize) -> Result<Rational> {
    if !s.contains(w) {
        return Err(Error::Precondition(format!("worker {w} is not in {s:?}")));
    }
    Ok(h.value(s) - h.value(s.without(w)))
}

/// `∂_{S'}[h(S)] = h(S) − h(S \ S')`.
pub fn marginal_set(h: &SetFunction, s: Subset, removed: Subset) -> Result<Rational> {
    if !removed.is_subset_of(s) {
        return Err(Error::Precondition(format!("{removed:?} is not a subset of {s:?}")));
    }
    Ok(h.value(s) - h.value(s.difference(removed)))
}

fn marginal_unchecked(h: &SetFunction, s: Subset, w: usize) -> Rational {
    h.value(s) - h.value(s.without(w))
}

/// Sum of last-worker marginals `Σ_{w∈S'} ∂_w[h(S)]`.
pub fn marginal_sum(h: &SetFunction, s: Subset, over: Subset) -> Rational {
    over.iter().map(|w| marginal_unchecked(h, s, w)).sum()
}

/// A marginal-product query `∂_{removed}[h(base)]` with `removed ⊆ base`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MarginalQuery {
    base: Subset,
    removed: Subset,
}

impl MarginalQuery {
    pub fn new(base: Subset, removed: Subset) -> Result<Self> {
        if !removed.is_subset_of(base) {
            return Err(Error::Precondition(format!("{removed:?} is not a subset of {base:?}")));
        }
        Ok(MarginalQuery { base, removed })
    }

    pub fn eval(&self, h: &SetFunction) -> Rational {
        h.value(self.base) - h.value(self.base.difference(self.removed))
    }
}

/// Non-negative linear prices, one per worker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceVector(Vec<Rational>);

impl PriceVector {
    pub fn new(prices: Vec<Rational>) -> Result<Self> {
        if let Some(p) = prices.iter().find(|p| p.is_negative()) {
            return Err(Error::Precondition(format!("negative price {p}")));
        }
        Ok(PriceVector(prices))
    }

    pub fn get(&self, w: usize) -> &Rational {
        &self.0[w]
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.0
    }

    pub fn total(&self, s: Subset) -> Rational {
        s.iter().map(|w| &self.0[w]).sum()
    }

    /// Componentwise `self ≤ other`.
    pub fn le(&self, other: &PriceVector) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

/// A family of subsets of the universe, stored as a membership table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFamily {
    n: usize,
    members: Vec<bool>,
}

impl SetFamily {
    pub fn all(n: usize) -> Self {
        SetFamily {
            n,
            members: vec![true; 1 << n],
        }
    }

    pub fn from_predicate(n: usize, pred: impl Fn(Subset) -> bool) -> Self {
        SetFamily {
            n,
            members: Subset::all(n).map(pred).collect(),
        }
    }

    pub fn from_sets(n: usize, sets: &[Subset]) -> Self {
        let mut members = vec![false; 1 << n];
        for s in sets {
            members[s.index()] = true;
        }
        SetFamily { n, members }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members[s.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = Subset> + '_ {
        Subset::all(self.n).filter(|&s| self.contains(s))
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// First `(S, S \ {w})` with `S` a member and `S \ {w}` not; `None` when
    /// the family is downward closed.
    pub fn downward_closure_violation(&self) -> Option<(Subset, Subset)> {
        self.iter().find_map(|s| {
            s.iter()
                .map(|w| s.without(w))
                .find(|t| !self.contains(*t))
                .map(|t| (s, t))
        })
    }

    pub fn is_downward_closed(&self) -> bool {
        self.downward_closure_violation().is_none()
    }
}

/// A set `S` with `h(S) < Σ_{w∈S} ∂_w[h(S)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakSubstitutesWitness {
    pub set: Subset,
    pub value: Rational,
    pub marginal_sum: Rational,
}

impl WeakSubstitutesWitness {
    pub fn is_violation(&self, h: &SetFunction) -> bool {
        h.value(self.set) < &marginal_sum(h, self.set, self.set)
    }
}

/// Weak substitutes on `2^W`: `h(S) ≥ Σ_{w∈S} ∂_w[h(S)]` for every `S`.
pub fn is_weak_substitutes(h: &SetFunction) -> ConditionReport<WeakSubstitutesWitness> {
    is_weak_substitutes_on(h, &SetFamily::all(h.n()))
}

/// Weak substitutes restricted to the members of `family`.
pub fn is_weak_substitutes_on(h: &SetFunction, family: &SetFamily) -> ConditionReport<WeakSubstitutesWitness> {
    for s in family.iter() {
        let sum = marginal_sum(h, s, s);
        if h.value(s) < &sum {
            let details = format!("h({s:?}) = {} < {sum} = sum of marginals", h.value(s));
            return ConditionReport::fail(
                WeakSubstitutesWitness {
                    set: s,
                    value: h.value(s).clone(),
                    marginal_sum: sum,
                },
                details,
            );
        }
    }
    ConditionReport::pass(format!("weak substitutes holds on {} sets", family.len()))
}

/// `T ⊂ S`, `w ∈ T` with `∂_w[h(T)] < ∂_w[h(S)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubmodularityWitness {
    pub smaller: Subset,
    pub larger: Subset,
    pub worker: usize,
    pub smaller_marginal: Rational,
    pub larger_marginal: Rational,
}

impl SubmodularityWitness {
    pub fn is_violation(&self, h: &SetFunction) -> bool {
        self.smaller.is_proper_subset_of(self.larger)
            && self.smaller.contains(self.worker)
            && marginal_unchecked(h, self.smaller, self.worker) < marginal_unchecked(h, self.larger, self.worker)
    }
}

/// Submodularity on `2^W`.
pub fn is_submodular(h: &SetFunction) -> ConditionReport<SubmodularityWitness> {
    submodular_scan(h, &SetFamily::all(h.n()))
}

/// Submodularity on a downward-closed family.
pub fn is_submodular_on(h: &SetFunction, family: &SetFamily) -> Result<ConditionReport<SubmodularityWitness>> {
    if let Some((s, t)) = family.downward_closure_violation() {
        return Err(Error::Precondition(format!(
            "family is not downward closed: contains {s:?} but not {t:?}"
        )));
    }
    Ok(submodular_scan(h, family))
}

// Adjacent-pair form: for every base B and workers a < b outside B with
// B ∪ {a, b} in the family, h(B+a) + h(B+b) ≥ h(B+a+b) + h(B). A failure is
// reported as T = B+b, S = B+a+b, w = b.
fn submodular_scan(h: &SetFunction, family: &SetFamily) -> ConditionReport<SubmodularityWitness> {
    let n = h.n();
    for base in Subset::all(n) {
        if !family.contains(base) {
            continue;
        }
        for a in (0..n).filter(|&a| !base.contains(a)) {
            for b in (a + 1..n).filter(|&b| !base.contains(b)) {
                let top = base.with(a).with(b);
                if !family.contains(top) {
                    continue;
                }
                let lhs = h.value(base.with(a)) + h.value(base.with(b));
                let rhs = h.value(top) + h.value(base);
                if lhs < rhs {
                    let smaller = base.with(b);
                    let w = SubmodularityWitness {
                        smaller,
                        larger: top,
                        worker: b,
                        smaller_marginal: marginal_unchecked(h, smaller, b),
                        larger_marginal: marginal_unchecked(h, top, b),
                    };
                    let details = format!(
                        "∂_{b}[h({smaller:?})] = {} < ∂_{b}[h({top:?})] = {}",
                        w.smaller_marginal, w.larger_marginal
                    );
                    return ConditionReport::fail(w, details);
                }
            }
        }
    }
    ConditionReport::pass("marginal products are non-increasing")
}

/// `S' ⊆ S` with `h(S) − h(S \ S') < Σ_{w∈S'} ∂_w[h(S)]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrongSubstitutesWitness {
    pub set: Subset,
    pub removed: Subset,
    pub joint_marginal: Rational,
    pub marginal_sum: Rational,
}

impl StrongSubstitutesWitness {
    pub fn is_violation(&self, h: &SetFunction) -> bool {
        self.removed.is_subset_of(self.set)
            && h.value(self.set) - h.value(self.set.difference(self.removed))
                < marginal_sum(h, self.set, self.removed)
    }
}

/// Strong substitutes on `2^W`: `h(S) − h(S \ S') ≥ Σ_{w∈S'} ∂_w[h(S)]` for
/// every `S' ⊆ S`.
pub fn is_strong_substitutes(h: &SetFunction) -> ConditionReport<StrongSubstitutesWitness> {
    is_strong_substitutes_on(h, &SetFamily::all(h.n()))
}

pub fn is_strong_substitutes_on(h: &SetFunction, family: &SetFamily) -> ConditionReport<StrongSubstitutesWitness> {
    for s in family.iter() {
        let marginals: Vec<Rational> = (0..h.n())
            .map(|w| {
                if s.contains(w) {
                    marginal_unchecked(h, s, w)
                } else {
                    Rational::zero()
                }
            })
            .collect();
        for removed in s.subsets() {
            let joint = h.value(s) - h.value(s.difference(removed));
            let sum: Rational = removed.iter().map(|w| &marginals[w]).sum();
            if joint < sum {
                let details = format!("h({s:?}) − h({s:?} \\ {removed:?}) = {joint} < {sum}");
                return ConditionReport::fail(
                    StrongSubstitutesWitness {
                        set: s,
                        removed,
                        joint_marginal: joint,
                        marginal_sum: sum,
                    },
                    details,
                );
            }
        }
    }
    ConditionReport::pass("joint marginals dominate sums of marginals")
}

/// Cross-check of the two characterizations: passes iff the submodularity
/// and strong-substitutes verdicts agree. The witness carries both verdicts.
pub fn check_lemma2_equivalence(h: &SetFunction) -> ConditionReport<(bool, bool)> {
    let sub = is_submodular(h).verdict;
    let strong = is_strong_substitutes(h).verdict;
    if sub == strong {
        ConditionReport::pass(format!("submodular = strong substitutes = {sub}"))
    } else {
        ConditionReport::fail(
            (sub, strong),
            format!("submodular = {sub} but strong substitutes = {strong}"),
        )
    }
}

/// `argmax_S [h(S) − Σ_{w∈S} p(w)]`, all maximizers in bit-pattern order.
pub fn demand_set(h: &SetFunction, p: &PriceVector) -> Vec<Subset> {
    let mut best: Option<Rational> = None;
    let mut argmax = Vec::new();
    for s in Subset::all(h.n()) {
        let payoff = h.value(s) - p.total(s);
        match best.as_ref().map(|b| payoff.cmp(b)) {
            Some(std::cmp::Ordering::Less) => {}
            Some(std::cmp::Ordering::Equal) => argmax.push(s),
            _ => {
                best = Some(payoff);
                argmax.clear();
                argmax.push(s);
            }
        }
    }
    argmax
}

/// `(S, T, w)` with `w ∈ S \ T` where no single exchange restores
/// `h(S) + h(T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrossSubstitutesWitness {
    pub first: Subset,
    pub second: Subset,
    pub worker: usize,
}

impl GrossSubstitutesWitness {
    pub fn is_violation(&self, h: &SetFunction) -> bool {
        self.first.contains(self.worker)
            && !self.second.contains(self.worker)
            && exchange_fails(h, self.first, self.second, self.worker)
    }
}

fn exchange_fails(h: &SetFunction, s: Subset, t: Subset, w: usize) -> bool {
    let target = h.value(s) + h.value(t);
    if h.value(s.without(w)) + h.value(t.with(w)) >= target {
        return false;
    }
    !t.difference(s).iter().any(|x| {
        h.value(s.without(w).with(x)) + h.value(t.with(w).without(x)) >= target
    })
}

/// Gross substitutes via the exchange characterization: for all `S`, `T` and
/// `w ∈ S \ T`, `h(S) + h(T)` is at most `h(S−w) + h(T+w)` or
/// `h(S−w+x) + h(T+w−x)` for some `x ∈ T \ S`. Requires a monotone `h`.
pub fn is_gross_substitutes(h: &SetFunction) -> Result<ConditionReport<GrossSubstitutesWitness>> {
    if let Some((a, b)) = h.monotonicity_violation() {
        return Err(Error::Precondition(format!(
            "gross substitutes needs a weakly increasing function; h({a:?}) > h({b:?})"
        )));
    }
    let n = h.n();
    for s in Subset::all(n) {
        for t in Subset::all(n) {
            for w in s.difference(t).iter() {
                if exchange_fails(h, s, t, w) {
                    let details = format!(
                        "h({s:?}) + h({t:?}) exceeds every exchange of worker {w}"
                    );
                    return Ok(ConditionReport::fail(
                        GrossSubstitutesWitness {
                            first: s,
                            second: t,
                            worker: w,
                        },
                        details,
                    ));
                }
            }
        }
    }
    Ok(ConditionReport::pass("every exchange condition holds"))
}

/// Prices `low ≤ high` differing only in `raised`, where `dropped` keeps its
/// price, belongs to `demanded` in the demand at `low`, and belongs to no
/// bundle demanded at `high`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PriceRefutation {
    pub low: PriceVector,
    pub high: PriceVector,
    pub raised: usize,
    pub dropped: usize,
    pub demanded: Subset,
}

/// Checks whether `(low, high)` refutes gross substitutes for `h`, returning
/// the first worker whose price is unchanged yet falls out of demand.
pub fn verify_price_refutation(h: &SetFunction, low: &PriceVector, high: &PriceVector) -> Option<PriceRefutation> {
    if !low.le(high) {
        return None;
    }
    let raised = (0..h.n()).find(|&w| low.get(w) != high.get(w))?;
    let before = demand_set(h, low);
    let after = demand_set(h, high);
    (0..h.n())
        .filter(|&k| low.get(k) == high.get(k))
        .find_map(|k| {
            let demanded = *before.iter().find(|a| a.contains(k))?;
            if after.iter().any(|b| b.contains(k)) {
                None
            } else {
                Some(PriceRefutation {
                    low: low.clone(),
                    high: high.clone(),
                    raised,
                    dropped: k,
                    demanded,
                })
            }
        })
}

/// Largest universe for which [`find_price_refutation`] searches.
pub const PRICE_SEARCH_MAX_WORKERS: usize = 4;

/// Upper bound on the number of price pairs [`find_price_refutation`] tries.
pub const PRICE_SEARCH_BUDGET: usize = 1 << 20;

/// Searches for a single-price-increase refutation on a grid built from the
/// function's own marginal values and their halves. Returns `None` when the
/// grid holds no refutation or the search would exceed
/// [`PRICE_SEARCH_BUDGET`] price pairs.
pub fn find_price_refutation(h: &SetFunction) -> Option<PriceRefutation> {
    let n = h.n();
    if n == 0 || n > PRICE_SEARCH_MAX_WORKERS {
        return None;
    }
    let mut grid: Vec<Rational> = vec![Rational::zero()];
    for s in Subset::all(n) {
        for w in s.iter() {
            let d = marginal_unchecked(h, s, w);
            if d.is_positive() {
                grid.push(&d * &rat(1, 2));
                grid.push(d);
            }
        }
    }
    grid.sort();
    grid.dedup();
    let c = grid.len();
    let total = c.checked_pow(n as u32)?;
    if total.saturating_mul(n * c) > PRICE_SEARCH_BUDGET {
        return None;
    }
    for code in 0..total {
        let mut idx = vec![0usize; n];
        let mut rest = code;
        for slot in idx.iter_mut().rev() {
            *slot = rest % c;
            rest /= c;
        }
        let low = PriceVector(idx.iter().map(|&i| grid[i].clone()).collect());
        for (j, &at) in idx.iter().enumerate() {
            for level in &grid[at + 1..] {
                let mut high = low.clone();
                high.0[j] = level.clone();
                if let Some(r) = verify_price_refutation(h, &low, &high) {
                    return Some(r);
                }
            }
        }
    }
    None
}
