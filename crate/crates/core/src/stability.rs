//! Blocking coalitions of one firm and a set of workers.
//!
//! With quasilinear payoffs a coalition `(f, S)` can block iff it can split
//! its surplus so that nobody loses and someone gains. Payments must be
//! non-negative, so worker `w` needs at least `L_w = max(0, π_w + u_w(f))`
//! and the firm keeps `e = u_f(S) − π_f − Σ L_w`. The coalition blocks iff
//! `e > 0`, or `e = 0` and some worker's floor is strictly above what it
//! needs.

use crate::model::{ConditionReport, FirmId, Market, Outcome, Profile};
use crate::rational::Rational;
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub firm: FirmId,
    pub coalition: Subset,
    /// `p̂(w)` for each worker of the coalition, in worker order.
    pub payments: Vec<(usize, Rational)>,
    /// Total gain of the coalition over its current payoffs.
    pub slack: Rational,
}

impl Block {
    pub fn payment(&self, w: usize) -> Option<&Rational> {
        self.payments.iter().find(|(x, _)| *x == w).map(|(_, p)| p)
    }

    /// Re-checks the blocking inequalities by substitution: payments are
    /// non-negative, nobody in the coalition is worse off, somebody is
    /// strictly better off.
    pub fn verify(&self, m: &Market, u: &Profile, o: &Outcome) -> bool {
        let f = self.firm;
        let paid: Rational = self.payments.iter().map(|(_, p)| p).sum();
        let firm_gain = m.utility(f.0).value(self.coalition) - &paid - o.firm_payoff(m, f);
        if firm_gain.is_negative() || self.payments.len() != self.coalition.len() {
            return false;
        }
        let mut strict = firm_gain.is_positive();
        for (w, p) in &self.payments {
            if !self.coalition.contains(*w) || p.is_negative() {
                return false;
            }
            let gain = p - u.get(*w, f.0) - o.worker_payoff(u, *w);
            if gain.is_negative() {
                return false;
            }
            strict |= gain.is_positive();
        }
        strict
    }
}

struct Payoffs {
    firms: Vec<Rational>,
    workers: Vec<Rational>,
}

fn coalition_block(m: &Market, u: &Profile, pi: &Payoffs, f: FirmId, s: Subset) -> Option<Block> {
    let pi_f = &pi.firms[f.0];
    let value = m.utility(f.0).value(s);
    let mut floors = Vec::with_capacity(s.len());
    let mut clipped = false;
    let mut need = Rational::zero();
    let mut slack = value - pi_f;
    for w in s.iter() {
        let reservation = &pi.workers[w] + u.get(w, f.0);
        slack -= &reservation;
        if reservation.is_negative() {
            clipped = true;
            floors.push((w, Rational::zero()));
        } else {
            need += &reservation;
            floors.push((w, reservation));
        }
    }
    let excess = value - pi_f - &need;
    if !(excess.is_positive() || (excess.is_zero() && clipped)) {
        return None;
    }
    // split the excess evenly between the firm and the workers
    let share = if s.is_empty() {
        Rational::zero()
    } else {
        &excess / &Rational::from(2 * s.len())
    };
    let payments = floors.into_iter().map(|(w, l)| (w, l + &share)).collect();
    Some(Block {
        firm: f,
        coalition: s,
        payments,
        slack,
    })
}

fn search(
    m: &Market,
    u: &Profile,
    o: &Outcome,
    admissible: impl Fn(FirmId) -> Subset,
) -> Option<Block> {
    let pi = Payoffs {
        firms: o.firm_payoffs(m),
        workers: o.worker_payoffs(u),
    };
    (0..m.m()).map(FirmId).find_map(|f| {
        admissible(f)
            .subsets()
            .find_map(|s| coalition_block(m, u, &pi, f, s))
    })
}

/// The first blocking coalition in firm order, then bit-pattern order of
/// the worker set, with payments that make every inequality strict where
/// possible.
pub fn find_block(m: &Market, u: &Profile, o: &Outcome) -> Option<Block> {
    let all = m.all_workers();
    search(m, u, o, |_| all)
}

/// Like [`find_block`], but firm `f` may only recruit among its own workers
/// and the unmatched ones.
pub fn find_weak_block(m: &Market, u: &Profile, o: &Outcome) -> Option<Block> {
    let free = o.matching().unmatched_workers();
    search(m, u, o, |f| o.matching().workers_of(f).union(free))
}

fn report(m: &Market, block: Option<Block>, what: &str) -> ConditionReport<Block> {
    match block {
        Some(b) => {
            let details = format!(
                "firm {} with {:?} blocks, gaining {}",
                m.firm(b.firm).name,
                m.names(b.coalition),
                b.slack
            );
            ConditionReport::fail(b, details)
        }
        None => ConditionReport::pass(format!("no {what} coalition has positive excess")),
    }
}

pub fn is_stable(m: &Market, u: &Profile, o: &Outcome) -> ConditionReport<Block> {
    report(m, find_block(m, u, o), "blocking")
}

pub fn is_weakly_stable(m: &Market, u: &Profile, o: &Outcome) -> ConditionReport<Block> {
    report(m, find_weak_block(m, u, o), "admissible blocking")
}
