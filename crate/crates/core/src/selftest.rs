//! Seeded invariant corpus run by the `selftest` command.

use std::fmt::Display;

use crate::error::Result;
use crate::generate::{mixed_market, random_profile, rng, PROFILE_GRID};
use crate::model::{FirmId, Market, Profile};
use crate::necessity::{ir_violation_for, sir_violation_for};
use crate::setfn::{check_lemma2_equivalence, is_gross_substitutes, is_submodular, is_weak_substitutes};
use crate::stability::find_block;
use crate::surplus::{brute_force_matching, check_lemma1, check_lemma3, DpFault, SurplusSolver};
use crate::vcg::{check_ir, check_sir, check_strategy_proofness, vcg_with_fault};

pub const MAX_CORPUS_WORKERS: usize = 6;
pub const MAX_CORPUS_FIRMS: usize = 3;
/// Random profiles per market in addition to the embedded one.
pub const EXTRA_PROFILES: usize = 4;

#[derive(Clone, Debug)]
pub struct SelftestConfig {
    pub trials: usize,
    pub seed: u64,
    /// Misreport grid density for the strategy-proofness check.
    pub grid: u32,
    pub fault: Option<DpFault>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tally {
    pub property: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub first_failure: Option<String>,
}

impl Tally {
    fn new(property: &'static str) -> Self {
        Tally {
            property,
            checked: 0,
            failed: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(context());
            }
        }
    }

    fn record_result<T, E: Display>(&mut self, r: std::result::Result<T, E>, trial: u64, ok: impl FnOnce(T) -> bool) {
        match r {
            Ok(v) => {
                let passed = ok(v);
                self.record(passed, || format!("market seed {trial}"));
            }
            Err(e) => self.record(false, || format!("market seed {trial}: {e}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelftestReport {
    pub trials: usize,
    pub seed: u64,
    pub tallies: Vec<Tally>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.tallies.iter().all(|t| t.failed == 0)
    }
}

const PROPERTIES: [&str; 12] = [
    "oracle_equivalence",
    "marginal_ordering",
    "submodular_strong_equivalence",
    "downward_closure",
    "strategy_proofness",
    "ir_sufficiency",
    "ir_necessity",
    "sir_sufficiency",
    "sir_necessity",
    "inclusion_chain",
    "core_sir_ir_chain",
    "block_soundness",
];

fn profiles(m: &Market, seed: u64) -> Vec<Profile> {
    let mut r = rng(seed ^ 0x5eed_cafe);
    let mut out = vec![m.disutilities().clone()];
    out.extend((0..EXTRA_PROFILES).map(|_| random_profile(m, PROFILE_GRID, &mut r)));
    out
}

/// Market seed of trial `i`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_add(i as u64)
}

pub fn run_selftest(cfg: &SelftestConfig) -> Result<SelftestReport> {
    let mut t: Vec<Tally> = PROPERTIES.iter().map(|p| Tally::new(p)).collect();
    for i in 0..cfg.trials {
        let s = trial_seed(cfg.seed, i);
        let m = mixed_market(MAX_CORPUS_WORKERS, MAX_CORPUS_FIRMS, s)?;
        run_trial(&m, s, cfg, &mut t);
    }
    Ok(SelftestReport {
        trials: cfg.trials,
        seed: cfg.seed,
        tallies: t,
    })
}

fn run_trial(m: &Market, s: u64, cfg: &SelftestConfig, t: &mut [Tally]) {
    let firms: Vec<FirmId> = (0..m.m()).map(FirmId).collect();
    let ws: Vec<bool> = firms.iter().map(|f| is_weak_substitutes(m.utility(f.0)).verdict).collect();
    let sm: Vec<bool> = firms.iter().map(|f| is_submodular(m.utility(f.0)).verdict).collect();

    for u in profiles(m, s) {
        let fast = SurplusSolver::with_fault(m, &u, cfg.fault).map(|x| x.total().clone());
        let slow = brute_force_matching(m, &u).map(|x| x.total);
        t[0].record(fast.is_ok() && fast == slow, || format!("market seed {s}"));
        t[1].record_result(check_lemma1(m, &u), s, |r| r.verdict);
        for f in &firms {
            let rep = check_lemma3(m.utility(f.0), &u.column(f.0));
            t[3].record(rep.report.verdict, || format!("market seed {s}, firm {}", f.0));
        }
        let res = match vcg_with_fault(m, &u, cfg.fault) {
            Ok(r) => r,
            Err(e) => {
                t[5].record(false, || format!("market seed {s}: {e}"));
                continue;
            }
        };
        let ir = check_ir(&res).verdict;
        let sir = check_sir(&res, m).verdict;
        if ws.iter().all(|&x| x) {
            t[5].record(ir, || format!("market seed {s}"));
        }
        if sm.iter().all(|&x| x) {
            t[7].record(sir, || format!("market seed {s}"));
        }
        let block = find_block(m, &u, &res.outcome);
        let stable = block.is_none();
        t[10].record((!stable || sir) && (!sir || ir), || format!("market seed {s}"));
        if let Some(b) = block {
            t[11].record(b.verify(m, &u, &res.outcome), || format!("market seed {s}"));
        }
    }
    for f in &firms {
        let h = m.utility(f.0);
        t[2].record(check_lemma2_equivalence(h).verdict, || format!("market seed {s}, firm {}", f.0));
        let gs = is_gross_substitutes(h).map(|r| r.verdict).unwrap_or(false);
        let (sub, weak) = (sm[f.0], ws[f.0]);
        t[9].record((!gs || sub) && (!sub || weak), || format!("market seed {s}, firm {}", f.0));
        if !weak {
            t[6].record_result(ir_violation_for(m, *f), s, |r| r.is_some());
        }
        if !sub {
            t[8].record_result(sir_violation_for(m, *f), s, |r| r.is_some());
        }
    }
    let w = (s as usize) % m.n();
    t[4].record_result(check_strategy_proofness(m, m.disutilities(), w, cfg.grid), s, |r| r.verdict);
}
