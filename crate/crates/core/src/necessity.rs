//! Adversarial type profiles: when a firm's utility fails weak substitutes
//! (submodularity), a 0/ū profile makes the VCG outcome violate IR (SIR).
//!
//! Workers in the target set `X` report 0 for the target firm and ū for every
//! other firm; everyone else reports the reverse. Each construction is
//! checked against the mechanism after the fact, since ties in the
//! efficient matching can defeat it for utilities with zero marginals.

use crate::error::{Error, Result};
use crate::model::{FirmId, Market, Profile, SetFunction};
use crate::rational::Rational;
use crate::setfn::{is_submodular, is_weak_substitutes, marginal_sum};
use crate::subset::Subset;
use crate::vcg::{check_ir, check_sir, vcg, VcgResult};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdversarialProfile {
    pub firm: FirmId,
    /// `S` from the violated inequality.
    pub set: Subset,
    /// `(w_ℓ, w_κ)` for the SIR construction.
    pub pair: Option<(usize, usize)>,
    pub profile: Profile,
}

impl AdversarialProfile {
    /// Workers whose reports favour the target firm.
    pub fn target(&self) -> Subset {
        match self.pair {
            Some((l, k)) => self.set.with(l).with(k),
            None => self.set,
        }
    }
}

/// The 0/ū profile concentrating `target` on firm `f`.
pub fn zero_ubar_profile(m: &Market, f: FirmId, target: Subset) -> Profile {
    let ubar = m.ubar();
    let rows = (0..m.n())
        .map(|w| {
            (0..m.m())
                .map(|g| {
                    if (g == f.0) != target.contains(w) {
                        ubar.clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    Profile::new(rows).expect("rectangular")
}

/// First `S` (bit-pattern order) with `h(S) < Σ_{w∈S} ∂_w[h(S)]`.
pub fn find_ws_violation(h: &SetFunction) -> Option<Subset> {
    is_weak_substitutes(h).witness.map(|w| w.set)
}

/// Every weak-substitutes violation, in bit-pattern order.
pub fn ws_violations(h: &SetFunction) -> impl Iterator<Item = Subset> + '_ {
    Subset::all(h.n()).filter(move |&s| h.value(s) < &marginal_sum(h, s, s))
}

/// First `(S, w_ℓ, w_κ)` with
/// `h(S+w_ℓ+w_κ) − h(S+w_κ) > h(S+w_ℓ) − h(S)`.
pub fn find_submodularity_violation(h: &SetFunction) -> Option<(Subset, usize, usize)> {
    is_submodular(h).witness.map(|w| {
        let base = w.smaller.without(w.worker);
        let other = w.larger.difference(w.smaller).iter().next().expect("larger has one extra worker");
        (base, w.worker, other)
    })
}

/// Every submodularity violation, in the order the checker scans them.
pub fn submodularity_violations(h: &SetFunction) -> Vec<(Subset, usize, usize)> {
    let n = h.n();
    let mut out = Vec::new();
    for base in Subset::all(n) {
        for a in (0..n).filter(|&a| !base.contains(a)) {
            for b in (a + 1..n).filter(|&b| !base.contains(b)) {
                if is_submodularity_violation(h, base, b, a) {
                    out.push((base, b, a));
                }
            }
        }
    }
    out
}

fn is_submodularity_violation(h: &SetFunction, s: Subset, l: usize, k: usize) -> bool {
    l != k
        && !s.contains(l)
        && !s.contains(k)
        && h.value(s.with(l).with(k)) - h.value(s.with(k)) > h.value(s.with(l)) - h.value(s)
}

fn check_firm(m: &Market, f: FirmId) -> Result<()> {
    if f.0 >= m.m() {
        return Err(Error::UnknownFirm(format!("#{}", f.0)));
    }
    Ok(())
}

fn unverified(what: &str, detail: String) -> Error {
    Error::Unverified(format!("{what}: {detail}"))
}

fn check_payments(m: &Market, f: FirmId, r: &VcgResult, target: Subset, workers: Subset) -> Result<()> {
    let h = m.utility(f.0);
    for w in workers.iter() {
        let expected = h.value(target) - h.value(target.without(w));
        if r.salaries()[w] != expected {
            return Err(unverified(
                "payment",
                format!("worker #{w} paid {} instead of {expected}", r.salaries()[w]),
            ));
        }
    }
    Ok(())
}

/// A profile under which firm `f` is assigned `S` and loses
/// `Σ_{w∈S} ∂_w[u_f(S)] − u_f(S)`.
pub fn construct_ir_violation(m: &Market, f: FirmId, s: Subset) -> Result<AdversarialProfile> {
    check_firm(m, f)?;
    let h = m.utility(f.0);
    let sum = marginal_sum(h, s, s);
    if !s.is_subset_of(m.all_workers()) || h.value(s) >= &sum {
        return Err(Error::Precondition(format!(
            "{:?} does not violate weak substitutes for firm {}",
            m.names(s),
            m.firm(f).name
        )));
    }
    let ap = AdversarialProfile {
        firm: f,
        set: s,
        pair: None,
        profile: zero_ubar_profile(m, f, s),
    };
    verify_ir_violation(m, &ap)?;
    Ok(ap)
}

/// Re-runs the mechanism on an IR construction and checks every claim.
pub fn verify_ir_violation(m: &Market, ap: &AdversarialProfile) -> Result<VcgResult> {
    let (f, s) = (ap.firm, ap.set);
    let r = vcg(m, &ap.profile)?;
    let assigned = r.matching().workers_of(f);
    if assigned != s {
        return Err(unverified(
            "assignment",
            format!("firm was assigned {:?} instead of {:?}", m.names(assigned), m.names(s)),
        ));
    }
    check_payments(m, f, &r, s, s)?;
    let h = m.utility(f.0);
    let expected = h.value(s) - marginal_sum(h, s, s);
    if r.firm_payoffs[f.0] != expected || !expected.is_negative() || check_ir(&r).verdict {
        return Err(unverified(
            "firm payoff",
            format!("got {}, expected negative {expected}", r.firm_payoffs[f.0]),
        ));
    }
    Ok(r)
}

/// A profile under which firm `f` is assigned `S+w_ℓ+w_κ` and would rather
/// dismiss `w_ℓ` and `w_κ`.
pub fn construct_sir_violation(m: &Market, f: FirmId, s: Subset, wl: usize, wk: usize) -> Result<AdversarialProfile> {
    check_firm(m, f)?;
    let h = m.utility(f.0);
    let in_range = wl < m.n() && wk < m.n() && s.is_subset_of(m.all_workers());
    if !in_range || !is_submodularity_violation(h, s, wl, wk) {
        return Err(Error::Precondition(format!(
            "({:?}, {wl}, {wk}) is not a submodularity violation for firm {}",
            m.names(s),
            m.firm(f).name
        )));
    }
    let target = s.with(wl).with(wk);
    let ap = AdversarialProfile {
        firm: f,
        set: s,
        pair: Some((wl, wk)),
        profile: zero_ubar_profile(m, f, target),
    };
    verify_sir_violation(m, &ap)?;
    Ok(ap)
}

/// Re-runs the mechanism on an SIR construction and checks every claim.
/// Returns the result and the firm's gain from dismissing the pair.
pub fn verify_sir_violation(m: &Market, ap: &AdversarialProfile) -> Result<(VcgResult, Rational)> {
    let (f, s) = (ap.firm, ap.set);
    let Some((l, k)) = ap.pair else {
        return Err(Error::Precondition("construction has no worker pair".into()));
    };
    let target = ap.target();
    let r = vcg(m, &ap.profile)?;
    let assigned = r.matching().workers_of(f);
    if assigned != target {
        return Err(unverified(
            "assignment",
            format!("firm was assigned {:?} instead of {:?}", m.names(assigned), m.names(target)),
        ));
    }
    check_payments(m, f, &r, target, Subset::singleton(l).with(k))?;
    let h = m.utility(f.0);
    let keep_all = h.value(target) - &r.salaries()[l] - &r.salaries()[k];
    let gain = h.value(s) - &keep_all;
    if !gain.is_positive() || check_sir(&r, m).verdict {
        return Err(unverified("dismissal", format!("dismissing the pair gains {gain}")));
    }
    Ok((r, gain))
}

/// The first weak-substitutes violation of firm `f` whose construction
/// verifies, or `None` when the utility satisfies weak substitutes.
pub fn ir_violation_for(m: &Market, f: FirmId) -> Result<Option<AdversarialProfile>> {
    check_firm(m, f)?;
    let mut last = None;
    for s in ws_violations(m.utility(f.0)) {
        match construct_ir_violation(m, f, s) {
            Ok(ap) => return Ok(Some(ap)),
            Err(e) => last = Some(e),
        }
    }
    last.map_or(Ok(None), Err)
}

/// As [`ir_violation_for`], for submodularity and SIR.
pub fn sir_violation_for(m: &Market, f: FirmId) -> Result<Option<AdversarialProfile>> {
    check_firm(m, f)?;
    let mut last = None;
    for (s, l, k) in submodularity_violations(m.utility(f.0)) {
        match construct_sir_violation(m, f, s, l, k) {
            Ok(ap) => return Ok(Some(ap)),
            Err(e) => last = Some(e),
        }
    }
    last.map_or(Ok(None), Err)
}
