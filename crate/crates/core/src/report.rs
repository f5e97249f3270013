//! Report documents shared by the CLI commands, and their JSON and text
//! renderings. Rationals are exact strings; subsets are lists of names.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::model::{file, FirmId, Market, Matching, Profile, SetFunction};
use crate::necessity::AdversarialProfile;
use crate::rational::Rational;
use crate::setfn::{
    find_price_refutation, is_gross_substitutes, is_strong_substitutes, is_submodular, is_weak_substitutes,
    PriceRefutation,
};
use crate::stability::Block;
use crate::subset::Subset;
use crate::vcg::{IrWitness, SirWitness, VcgResult};

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: Value,
    pub market_digest: Option<String>,
    pub results: Value,
}

impl Report {
    pub fn to_value(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("command".into(), self.command.clone());
        if let Some(d) = &self.market_digest {
            doc.insert("market_digest".into(), Value::String(d.clone()));
        }
        doc.insert("results".into(), self.results.clone());
        Value::Object(doc)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        render_text(&mut out, &self.to_value(), 0);
        out
    }
}

/// SHA-256 of the canonical market serialization, hex encoded.
pub fn market_digest(m: &Market) -> String {
    let digest = Sha256::digest(file::write_market(m).as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => Some(format!(
            "[{}]",
            items.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")
        )),
        _ => None,
    }
}

fn render_text(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, item) in map {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(out, item, depth + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match scalar(item) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(out, item, depth + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

pub fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn set(m: &Market, s: Subset) -> Value {
    json!(m.names(s))
}

fn set_of(h: &SetFunction, s: Subset) -> Value {
    json!(h.names(s))
}

fn worker(m: &Market, w: usize) -> Value {
    Value::String(m.workers()[w].clone())
}

/// `"(π_f1, …; π_w1, …)"`.
pub fn payoff_point(firms: &[Rational], workers: &[Rational]) -> String {
    let join = |v: &[Rational]| v.iter().map(Rational::to_string).collect::<Vec<_>>().join(", ");
    format!("({}; {})", join(firms), join(workers))
}

pub fn matching(m: &Market, mu: &Matching) -> Value {
    let mut map = Map::new();
    for (f, firm) in m.firms().iter().enumerate() {
        map.insert(firm.name.clone(), set(m, mu.workers_of(FirmId(f))));
    }
    json!({ "firms": map, "unmatched": set(m, mu.unmatched_workers()) })
}

fn per_worker(m: &Market, values: &[Rational]) -> Value {
    let map: Map<String, Value> = m.workers().iter().zip(values).map(|(w, v)| (w.clone(), rat(v))).collect();
    Value::Object(map)
}

fn per_firm(m: &Market, values: &[Rational]) -> Value {
    let map: Map<String, Value> = m.firms().iter().zip(values).map(|(f, v)| (f.name.clone(), rat(v))).collect();
    Value::Object(map)
}

pub fn profile(m: &Market, u: &Profile) -> Value {
    let map: Map<String, Value> = m
        .workers()
        .iter()
        .enumerate()
        .map(|(w, name)| (name.clone(), per_firm(m, u.row(w))))
        .collect();
    Value::Object(map)
}

fn prices(h: &SetFunction, p: &[Rational]) -> Value {
    let map: Map<String, Value> = h.workers().iter().zip(p).map(|(w, v)| (w.clone(), rat(v))).collect();
    Value::Object(map)
}

fn price_refutation(h: &SetFunction, r: &PriceRefutation) -> Value {
    json!({
        "low_prices": prices(h, r.low.as_slice()),
        "high_prices": prices(h, r.high.as_slice()),
        "raised": h.workers()[r.raised],
        "dropped": h.workers()[r.dropped],
        "demanded_at_low": set_of(h, r.demanded),
    })
}

fn verdict(ok: bool, witness: Option<Value>) -> Value {
    match witness {
        Some(w) if !ok => json!({ "holds": false, "witness": w }),
        _ => json!({ "holds": ok }),
    }
}

/// Verdicts of every substitutes condition for one utility.
pub fn classify(h: &SetFunction) -> Value {
    let mut out = Map::new();
    match h.monotonicity_violation() {
        Some((a, b)) => {
            out.insert(
                "monotone".into(),
                verdict(false, Some(json!({ "smaller": set_of(h, a), "larger": set_of(h, b) }))),
            );
        }
        None => {
            out.insert("monotone".into(), verdict(true, None));
        }
    }
    let ws = is_weak_substitutes(h);
    out.insert(
        "weak_substitutes".into(),
        verdict(
            ws.verdict,
            ws.witness.map(|w| {
                json!({ "set": set_of(h, w.set), "value": rat(&w.value), "marginal_sum": rat(&w.marginal_sum) })
            }),
        ),
    );
    let sm = is_submodular(h);
    out.insert(
        "submodular".into(),
        verdict(
            sm.verdict,
            sm.witness.map(|w| {
                json!({
                    "smaller": set_of(h, w.smaller),
                    "larger": set_of(h, w.larger),
                    "worker": h.workers()[w.worker],
                    "smaller_marginal": rat(&w.smaller_marginal),
                    "larger_marginal": rat(&w.larger_marginal),
                })
            }),
        ),
    );
    let ss = is_strong_substitutes(h);
    out.insert(
        "strong_substitutes".into(),
        verdict(
            ss.verdict,
            ss.witness.map(|w| {
                json!({
                    "set": set_of(h, w.set),
                    "removed": set_of(h, w.removed),
                    "joint_marginal": rat(&w.joint_marginal),
                    "marginal_sum": rat(&w.marginal_sum),
                })
            }),
        ),
    );
    match is_gross_substitutes(h) {
        Ok(gs) => {
            let mut v = verdict(
                gs.verdict,
                gs.witness.map(|w| {
                    json!({ "first": set_of(h, w.first), "second": set_of(h, w.second), "worker": h.workers()[w.worker] })
                }),
            );
            if !gs.verdict {
                if let Some(r) = find_price_refutation(h) {
                    v["price_refutation"] = price_refutation(h, &r);
                }
            }
            out.insert("gross_substitutes".into(), v);
        }
        Err(e) => {
            out.insert("gross_substitutes".into(), json!({ "holds": Value::Null, "error": e.to_string() }));
        }
    }
    Value::Object(out)
}

pub fn ir_witness(m: &Market, w: &IrWitness) -> Value {
    match w {
        IrWitness::Firm { firm, payoff } => json!({ "firm": m.firm(*firm).name, "deficit": rat(payoff) }),
        IrWitness::Worker { worker: w, payoff } => json!({ "worker": worker(m, *w), "deficit": rat(payoff) }),
    }
}

pub fn sir_witness(m: &Market, w: &SirWitness) -> Value {
    match w {
        SirWitness::Worker { worker: w, payoff } => json!({ "worker": worker(m, *w), "payoff": rat(payoff) }),
        SirWitness::Dismissal {
            firm,
            kept,
            improvement,
        } => json!({ "firm": m.firm(*firm).name, "kept": set(m, *kept), "improvement": rat(improvement) }),
    }
}

/// Matching, salaries, payoffs and the surplus values behind them.
pub fn vcg(m: &Market, r: &VcgResult) -> Value {
    json!({
        "matching": matching(m, r.matching()),
        "tie_broken": r.tie_broken,
        "surplus": rat(&r.v_total),
        "surplus_without": per_worker(m, &r.v_excluding),
        "salaries": per_worker(m, r.salaries()),
        "firm_payoffs": per_firm(m, &r.firm_payoffs),
        "worker_payoffs": per_worker(m, &r.worker_payoffs),
        "payoff_point": payoff_point(&r.firm_payoffs, &r.worker_payoffs),
    })
}

pub fn block(m: &Market, b: &Block) -> Value {
    let payments: Map<String, Value> = b
        .payments
        .iter()
        .map(|(w, p)| (m.workers()[*w].clone(), rat(p)))
        .collect();
    json!({
        "firm": m.firm(b.firm).name,
        "coalition": set(m, b.coalition),
        "payments": payments,
        "slack": rat(&b.slack),
    })
}

pub fn adversarial(m: &Market, ap: &AdversarialProfile) -> Value {
    let mut v = json!({ "firm": m.firm(ap.firm).name, "set": set(m, ap.set) });
    if let Some((l, k)) = ap.pair {
        v["w_l"] = worker(m, l);
        v["w_k"] = worker(m, k);
    }
    v["profile"] = profile(m, &ap.profile);
    v
}
