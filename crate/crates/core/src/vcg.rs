//! VCG salaries: each worker is paid its externality on the rest of the
//! market, so its payoff is its marginal product `V(W) − V(W \ w)`.

use crate::error::{Error, Result};
use crate::model::{ConditionReport, FirmId, Market, Matching, Outcome, Profile};
use crate::rational::Rational;
use crate::subset::Subset;
use crate::surplus::{DpFault, SurplusSolver};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcgResult {
    pub outcome: Outcome,
    pub worker_payoffs: Vec<Rational>,
    pub firm_payoffs: Vec<Rational>,
    /// `V(W)`.
    pub v_total: Rational,
    /// `V(W \ w)` for each worker.
    pub v_excluding: Vec<Rational>,
    /// Whether the efficient matching was picked among several by the
    /// canonical tie-break.
    pub tie_broken: bool,
}

impl VcgResult {
    pub fn matching(&self) -> &Matching {
        self.outcome.matching()
    }

    pub fn salaries(&self) -> &[Rational] {
        self.outcome.salaries()
    }
}

/// Runs the mechanism on the reported profile `u`.
pub fn vcg(m: &Market, u: &Profile) -> Result<VcgResult> {
    vcg_with_fault(m, u, None)
}

#[doc(hidden)]
pub fn vcg_with_fault(m: &Market, u: &Profile, fault: Option<DpFault>) -> Result<VcgResult> {
    let solver = SurplusSolver::with_fault(m, u, fault)?;
    Ok(from_solver(m, u, &solver))
}

pub(crate) fn from_solver(m: &Market, u: &Profile, solver: &SurplusSolver) -> VcgResult {
    let sol = solver.efficient_matching();
    let v_total = solver.total().clone();
    let v_excluding: Vec<Rational> = (0..m.n())
        .map(|w| solver.excluding(Subset::singleton(w)).clone())
        .collect();
    let salaries = (0..m.n())
        .map(|w| match sol.matching.firm_of(w) {
            Some(f) => &v_total - &v_excluding[w] + u.get(w, f.0),
            None => Rational::zero(),
        })
        .collect();
    let outcome = Outcome::new(sol.matching, salaries).expect("unmatched workers are paid zero");
    VcgResult {
        worker_payoffs: outcome.worker_payoffs(u),
        firm_payoffs: outcome.firm_payoffs(m),
        outcome,
        v_total,
        v_excluding,
        tie_broken: sol.tie_broken,
    }
}

/// An agent with a negative payoff.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IrWitness {
    Firm { firm: FirmId, payoff: Rational },
    Worker { worker: usize, payoff: Rational },
}

/// All firm and worker payoffs are non-negative. Firms are checked first.
pub fn check_ir(r: &VcgResult) -> ConditionReport<IrWitness> {
    if let Some((f, p)) = r.firm_payoffs.iter().enumerate().find(|(_, p)| p.is_negative()) {
        return ConditionReport::fail(
            IrWitness::Firm {
                firm: FirmId(f),
                payoff: p.clone(),
            },
            format!("firm #{f} has payoff {p}"),
        );
    }
    if let Some((w, p)) = r.worker_payoffs.iter().enumerate().find(|(_, p)| p.is_negative()) {
        return ConditionReport::fail(
            IrWitness::Worker {
                worker: w,
                payoff: p.clone(),
            },
            format!("worker #{w} has payoff {p}"),
        );
    }
    ConditionReport::pass("all payoffs are non-negative")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SirWitness {
    /// A worker is worse off than unmatched. Firm losses show up as
    /// `Dismissal` with an empty kept set instead.
    Worker { worker: usize, payoff: Rational },
    /// Firm `firm` gains `improvement` by keeping only `kept ⊂ μ(firm)` at
    /// unchanged salaries.
    Dismissal {
        firm: FirmId,
        kept: Subset,
        improvement: Rational,
    },
}

/// No firm gains by dismissing some of its workers, and no worker has a
/// negative payoff. Subsets are scanned firm by firm in bit-pattern order.
pub fn check_sir(r: &VcgResult, m: &Market) -> ConditionReport<SirWitness> {
    if let Some((w, p)) = r.worker_payoffs.iter().enumerate().find(|(_, p)| p.is_negative()) {
        return ConditionReport::fail(
            SirWitness::Worker {
                worker: w,
                payoff: p.clone(),
            },
            format!("worker #{w} has payoff {p}"),
        );
    }
    for f in (0..m.m()).map(FirmId) {
        let assigned = r.matching().workers_of(f);
        let h = m.utility(f.0);
        let current = &r.firm_payoffs[f.0];
        for kept in assigned.subsets().filter(|&s| s != assigned) {
            let alt = h.value(kept) - r.outcome.salary_sum(kept);
            if &alt > current {
                let improvement = &alt - current;
                let details = format!(
                    "firm {} gains {improvement} by keeping only {:?}",
                    m.firm(f).name,
                    m.names(kept)
                );
                return ConditionReport::fail(
                    SirWitness::Dismissal {
                        firm: f,
                        kept,
                        improvement,
                    },
                    details,
                );
            }
        }
    }
    ConditionReport::pass("no firm gains by dismissing workers")
}

/// A misreport that beats truth-telling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprovingMisreport {
    pub worker: usize,
    pub report: Vec<Rational>,
    pub truthful_payoff: Rational,
    pub misreport_payoff: Rational,
}

/// Evaluates every report `û_w ∈ {0, ū/k, …, ū}^m` for worker `w` with the
/// others truthful, scoring each by `w`'s true payoff.
pub fn check_strategy_proofness(
    m: &Market,
    u: &Profile,
    w: usize,
    k: u32,
) -> Result<ConditionReport<ImprovingMisreport>> {
    if k == 0 {
        return Err(Error::Precondition("grid density k must be at least 1".into()));
    }
    if w >= m.n() {
        return Err(Error::UnknownWorker(format!("#{w}")));
    }
    let truthful = SurplusSolver::new(m, u)?;
    let v_without = truthful.excluding(Subset::singleton(w)).clone();
    let truthful_payoff = truthful.total() - &v_without;

    let step = m.ubar() / &Rational::from(k as i64);
    let grid: Vec<Rational> = (0..=k).map(|i| &step * &Rational::from(i as i64)).collect();
    let points = (k as usize + 1).pow(m.m() as u32);
    let mut digits = vec![0usize; m.m()];
    for _ in 0..points {
        let report: Vec<Rational> = digits.iter().map(|&i| grid[i].clone()).collect();
        let lied = u.with_row(w, report.clone());
        let solver = SurplusSolver::new(m, &lied)?;
        let payoff = match solver.efficient_matching().matching.firm_of(w) {
            // salary computed from the report, disutility from the truth
            Some(f) => solver.total() - &v_without + lied.get(w, f.0) - u.get(w, f.0),
            None => Rational::zero(),
        };
        if payoff > truthful_payoff {
            let details = format!("report {report:?} yields {payoff} > truthful {truthful_payoff}");
            return Ok(ConditionReport::fail(
                ImprovingMisreport {
                    worker: w,
                    report,
                    truthful_payoff,
                    misreport_payoff: payoff,
                },
                details,
            ));
        }
        for d in digits.iter_mut() {
            *d += 1;
            if *d <= k as usize {
                break;
            }
            *d = 0;
        }
    }
    Ok(ConditionReport::pass(format!(
        "{points} grid reports never beat the truthful payoff {truthful_payoff}"
    )))
}
