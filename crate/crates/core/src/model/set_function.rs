use std::sync::Arc;

use crate::error::{Error, Result, MAX_WORKERS};
use crate::rational::Rational;
use crate::subset::Subset;

/// A normalized set function `h : 2^W -> Q` stored as an exhaustive table
/// indexed by subset bit pattern.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SetFunction {
    workers: Arc<[String]>,
    values: Vec<Rational>,
}

fn check_universe(n: usize) -> Result<()> {
    if n > MAX_WORKERS {
        return Err(Error::Capacity {
            what: "worker universe",
            got: n,
            limit: MAX_WORKERS,
        });
    }
    Ok(())
}

impl SetFunction {
    /// Builds a set function from a full table. The table must have `2^n`
    /// entries and assign zero to the empty set.
    pub fn from_table(workers: Arc<[String]>, values: Vec<Rational>) -> Result<Self> {
        check_universe(workers.len())?;
        let expected = 1usize << workers.len();
        if values.len() != expected {
            return Err(Error::Malformed(format!(
                "set function table has {} entries, expected {expected}",
                values.len()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::Malformed(format!(
                "set function must vanish on the empty set, got {}",
                values[0]
            )));
        }
        Ok(SetFunction { workers, values })
    }

    /// Tabulates `f` over every subset. `f(∅)` must be zero.
    pub fn from_fn(workers: Arc<[String]>, f: impl Fn(Subset) -> Rational) -> Result<Self> {
        check_universe(workers.len())?;
        let values = Subset::all(workers.len()).map(f).collect();
        Self::from_table(workers, values)
    }

    /// `h(S) = Σ_{w∈S} v_w`.
    pub fn additive(workers: Arc<[String]>, weights: &[Rational]) -> Result<Self> {
        Self::check_weights(&workers, weights)?;
        Self::from_fn(workers, |s| s.iter().map(|i| &weights[i]).sum())
    }

    /// `h(S) = min(budget, Σ_{w∈S} v_w)`.
    pub fn budget_additive(workers: Arc<[String]>, budget: Rational, weights: &[Rational]) -> Result<Self> {
        Self::check_weights(&workers, weights)?;
        if budget.is_negative() {
            return Err(Error::Malformed(format!("negative budget {budget}")));
        }
        Self::from_fn(workers, |s| {
            let total: Rational = s.iter().map(|i| &weights[i]).sum();
            total.min(budget.clone())
        })
    }

    /// `h(S) = max_{w∈S} v_w`, zero on the empty set.
    pub fn unit_demand(workers: Arc<[String]>, weights: &[Rational]) -> Result<Self> {
        Self::check_weights(&workers, weights)?;
        if let Some(w) = weights.iter().find(|w| w.is_negative()) {
            return Err(Error::Malformed(format!("unit-demand value {w} is negative")));
        }
        Self::from_fn(workers, |s| {
            s.iter()
                .map(|i| weights[i].clone())
                .max()
                .unwrap_or_else(Rational::zero)
        })
    }

    fn check_weights(workers: &[String], weights: &[Rational]) -> Result<()> {
        check_universe(workers.len())?;
        if workers.len() != weights.len() {
            return Err(Error::Malformed(format!(
                "{} weights for {} workers",
                weights.len(),
                workers.len()
            )));
        }
        Ok(())
    }

    pub fn workers(&self) -> &Arc<[String]> {
        &self.workers
    }

    pub fn n(&self) -> usize {
        self.workers.len()
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n())
    }

    pub fn value(&self, s: Subset) -> &Rational {
        &self.values[s.index()]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// Relabels workers: worker `i` of `self` becomes worker `perm[i]`.
    pub fn permuted(&self, perm: &[usize], workers: Arc<[String]>) -> SetFunction {
        let values = Subset::all(self.n())
            .map(|t| {
                // t is in the new labelling; pull back to the old one
                let old = Subset::from_indices(
                    (0..self.n()).filter(|&i| t.contains(perm[i])),
                );
                self.value(old).clone()
            })
            .collect();
        SetFunction { workers, values }
    }

    /// First adjacent pair `(S, S ∪ {w})` with `h(S) > h(S ∪ {w})`, in
    /// bit-pattern order of `S` then worker order.
    pub fn monotonicity_violation(&self) -> Option<(Subset, Subset)> {
        for s in Subset::all(self.n()) {
            for w in (0..self.n()).filter(|&w| !s.contains(w)) {
                let t = s.with(w);
                if self.value(s) > self.value(t) {
                    return Some((s, t));
                }
            }
        }
        None
    }

    pub fn is_monotone(&self) -> bool {
        self.monotonicity_violation().is_none()
    }

    /// Worker names of a subset, in universe order.
    pub fn names(&self, s: Subset) -> Vec<String> {
        s.iter().map(|i| self.workers[i].clone()).collect()
    }
}
