use super::market::{FirmId, Market, Profile};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::Subset;

/// A many-to-one matching: each worker is assigned to at most one firm.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    assignment: Vec<Option<FirmId>>,
}

impl Matching {
    pub fn unmatched(n: usize) -> Self {
        Matching {
            assignment: vec![None; n],
        }
    }

    pub fn from_assignment(assignment: Vec<Option<FirmId>>) -> Self {
        Matching { assignment }
    }

    /// Builds a matching from per-firm worker sets, which must be disjoint.
    pub fn from_firm_sets(n: usize, sets: &[Subset]) -> Result<Self> {
        let mut assignment = vec![None; n];
        for (f, s) in sets.iter().enumerate() {
            for w in s.iter() {
                if w >= n {
                    return Err(Error::Precondition(format!("worker index {w} out of range")));
                }
                if assignment[w].is_some() {
                    return Err(Error::Precondition(format!(
                        "worker {w} assigned to more than one firm"
                    )));
                }
                assignment[w] = Some(FirmId(f));
            }
        }
        Ok(Matching { assignment })
    }

    /// `μ(w)`.
    pub fn firm_of(&self, w: usize) -> Option<FirmId> {
        self.assignment[w]
    }

    /// `μ(f) = {w : μ(w) = f}`.
    pub fn workers_of(&self, f: FirmId) -> Subset {
        Subset::from_indices(
            self.assignment
                .iter()
                .enumerate()
                .filter(|(_, a)| **a == Some(f))
                .map(|(w, _)| w),
        )
    }

    pub fn firm_sets(&self, m: usize) -> Vec<Subset> {
        (0..m).map(|f| self.workers_of(FirmId(f))).collect()
    }

    pub fn unmatched_workers(&self) -> Subset {
        Subset::from_indices(
            self.assignment
                .iter()
                .enumerate()
                .filter(|(_, a)| a.is_none())
                .map(|(w, _)| w),
        )
    }

    pub fn n(&self) -> usize {
        self.assignment.len()
    }

    pub fn assignment(&self) -> &[Option<FirmId>] {
        &self.assignment
    }
}

/// A matching together with a salary for every worker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    matching: Matching,
    salaries: Vec<Rational>,
}

impl Outcome {
    /// Unmatched workers must be paid zero.
    pub fn new(matching: Matching, salaries: Vec<Rational>) -> Result<Self> {
        if salaries.len() != matching.n() {
            return Err(Error::Malformed(format!(
                "{} salaries for {} workers",
                salaries.len(),
                matching.n()
            )));
        }
        for (w, p) in salaries.iter().enumerate() {
            if matching.firm_of(w).is_none() && !p.is_zero() {
                return Err(Error::Precondition(format!(
                    "unmatched worker {w} has non-zero salary {p}"
                )));
            }
        }
        Ok(Outcome { matching, salaries })
    }

    pub fn matching(&self) -> &Matching {
        &self.matching
    }

    pub fn salaries(&self) -> &[Rational] {
        &self.salaries
    }

    pub fn salary(&self, w: usize) -> &Rational {
        &self.salaries[w]
    }

    /// `u_f(μ(f)) − Σ_{w∈μ(f)} p(w)`.
    pub fn firm_payoff(&self, m: &Market, f: FirmId) -> Rational {
        let s = self.matching.workers_of(f);
        m.utility(f.0).value(s) - self.salary_sum(s)
    }

    /// `p(w) − u_w(μ(w))`, zero for an unmatched worker.
    pub fn worker_payoff(&self, u: &Profile, w: usize) -> Rational {
        match self.matching.firm_of(w) {
            Some(f) => &self.salaries[w] - u.get(w, f.0),
            None => self.salaries[w].clone(),
        }
    }

    pub fn salary_sum(&self, s: Subset) -> Rational {
        s.iter().map(|w| &self.salaries[w]).sum()
    }

    pub fn firm_payoffs(&self, m: &Market) -> Vec<Rational> {
        (0..m.m()).map(|f| self.firm_payoff(m, FirmId(f))).collect()
    }

    pub fn worker_payoffs(&self, u: &Profile) -> Vec<Rational> {
        (0..self.matching.n()).map(|w| self.worker_payoff(u, w)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn firm_and_worker_views_agree() {
        let sets = [Subset::from_indices([0, 2]), Subset::from_indices([3])];
        let mu = Matching::from_firm_sets(5, &sets).unwrap();
        for f in 0..2 {
            for w in 0..5 {
                assert_eq!(mu.workers_of(FirmId(f)).contains(w), mu.firm_of(w) == Some(FirmId(f)));
            }
        }
        assert_eq!(mu.unmatched_workers(), Subset::from_indices([1, 4]));
    }

    #[test]
    fn overlapping_sets_rejected() {
        let sets = [Subset::from_indices([0, 1]), Subset::from_indices([1])];
        assert!(Matching::from_firm_sets(2, &sets).is_err());
    }

    #[test]
    fn unmatched_workers_must_earn_nothing() {
        let mu = Matching::unmatched(1);
        assert!(Outcome::new(mu.clone(), vec![Rational::one()]).is_err());
        assert!(Outcome::new(mu, vec![Rational::zero()]).is_ok());
    }
}
