//! JSON market and profile files.
//!
//! ```json
//! {
//!   "workers": ["w1", "w2"],
//!   "firms": [
//!     { "name": "f", "utility": { "type": "table", "values": { "": "0", "w1": "0", "w2": "0", "w1,w2": "10" } } }
//!   ],
//!   "disutilities": { "w1": { "f": "3" }, "w2": { "f": "4" } }
//! }
//! ```
//!
//! Utilities may also be given as `additive`, `budget_additive` (with a
//! `budget`) or `unit_demand` weight maps; all of them compile to a table.
//! Rationals are strings such as `"3"`, `"3/4"` or `"0.25"`.

use std::sync::Arc;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use super::market::{Firm, Market, Profile};
use super::set_function::SetFunction;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::subset::Subset;

type Disutilities = IndexMap<String, IndexMap<String, Rational>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarketDoc {
    workers: Vec<String>,
    firms: Vec<FirmDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    disutilities: Option<Disutilities>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FirmDoc {
    name: String,
    utility: UtilityDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum UtilityDoc {
    Table { values: IndexMap<String, Rational> },
    Additive { values: IndexMap<String, Rational> },
    BudgetAdditive { budget: Rational, values: IndexMap<String, Rational> },
    UnitDemand { values: IndexMap<String, Rational> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    disutilities: Disutilities,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Parses a market file; the file must carry its own disutilities.
pub fn read_market(json: &str) -> Result<Market> {
    let (market, has_profile) = read_market_skeleton(json)?;
    if !has_profile {
        return Err(Error::Malformed(
            "market file has no \"disutilities\"; supply a profile file".into(),
        ));
    }
    Ok(market)
}

/// Parses a market file. When the file has no disutilities the market gets
/// an all-zero placeholder profile and the flag is `false`.
pub fn read_market_skeleton(json: &str) -> Result<(Market, bool)> {
    let doc: MarketDoc = serde_json::from_str(json).map_err(json_error)?;
    let universe: Arc<[String]> = doc.workers.clone().into();
    let n = universe.len();
    let m = doc.firms.len();
    let firms = doc
        .firms
        .into_iter()
        .map(|f| {
            let utility = compile_utility(&universe, f.utility)
                .map_err(|e| Error::Malformed(format!("firm {:?}: {e}", f.name)))?;
            Ok(Firm { name: f.name, utility })
        })
        .collect::<Result<Vec<_>>>()?;
    let market = Market::new(doc.workers, firms, Profile::zeros(n, m))?;
    match doc.disutilities {
        Some(d) => {
            let p = compile_profile(&market, &d)?;
            Ok((market.with_disutilities(p)?, true))
        }
        None => Ok((market, false)),
    }
}

/// Parses a profile file `{ "disutilities": { worker: { firm: rational } } }`
/// against an existing market.
pub fn read_profile(json: &str, market: &Market) -> Result<Profile> {
    let doc: ProfileDoc = serde_json::from_str(json).map_err(json_error)?;
    compile_profile(market, &doc.disutilities)
}

fn weights(universe: &[String], values: &IndexMap<String, Rational>) -> Result<Vec<Rational>> {
    for k in values.keys() {
        if !universe.contains(k) {
            return Err(Error::UnknownWorker(k.clone()));
        }
    }
    universe
        .iter()
        .map(|w| {
            values
                .get(w)
                .cloned()
                .ok_or_else(|| Error::Malformed(format!("no value for worker {w:?}")))
        })
        .collect()
}

fn parse_key(universe: &[String], key: &str) -> Result<Subset> {
    let mut s = Subset::EMPTY;
    if key.trim().is_empty() {
        return Ok(s);
    }
    for name in key.split(',').map(str::trim) {
        let i = universe
            .iter()
            .position(|w| w == name)
            .ok_or_else(|| Error::Malformed(format!("table key {key:?}: unknown worker {name:?}")))?;
        if s.contains(i) {
            return Err(Error::Malformed(format!("table key {key:?} repeats worker {name:?}")));
        }
        s = s.with(i);
    }
    Ok(s)
}

fn compile_utility(universe: &Arc<[String]>, doc: UtilityDoc) -> Result<SetFunction> {
    match doc {
        UtilityDoc::Table { values } => {
            let n = universe.len();
            if n > crate::error::MAX_WORKERS {
                return Err(Error::Capacity {
                    what: "worker universe",
                    got: n,
                    limit: crate::error::MAX_WORKERS,
                });
            }
            let mut table: Vec<Option<Rational>> = vec![None; 1 << n];
            for (key, v) in values {
                let s = parse_key(universe, &key)?;
                if table[s.index()].replace(v).is_some() {
                    return Err(Error::Malformed(format!("table key {key:?} given twice")));
                }
            }
            // the empty set is pinned to zero and may be omitted
            let empty = table[0].get_or_insert_with(Rational::zero).clone();
            if !empty.is_zero() {
                return Err(Error::Malformed(format!("value of the empty set must be 0, got {empty}")));
            }
            let values = table
                .into_iter()
                .enumerate()
                .map(|(bits, v)| {
                    v.ok_or_else(|| {
                        let names: Vec<&str> =
                            Subset(bits as u32).iter().map(|i| universe[i].as_str()).collect();
                        Error::Malformed(format!("table has no entry for {:?}", names.join(",")))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            SetFunction::from_table(universe.clone(), values)
        }
        UtilityDoc::Additive { values } => SetFunction::additive(universe.clone(), &weights(universe, &values)?),
        UtilityDoc::BudgetAdditive { budget, values } => {
            SetFunction::budget_additive(universe.clone(), budget, &weights(universe, &values)?)
        }
        UtilityDoc::UnitDemand { values } => {
            SetFunction::unit_demand(universe.clone(), &weights(universe, &values)?)
        }
    }
}

fn compile_profile(market: &Market, d: &Disutilities) -> Result<Profile> {
    for w in d.keys() {
        market.worker_index(w)?;
    }
    let rows = market
        .workers()
        .iter()
        .map(|w| {
            let row = d
                .get(w)
                .ok_or_else(|| Error::Malformed(format!("no disutilities for worker {w:?}")))?;
            for f in row.keys() {
                market.firm_index(f)?;
            }
            market
                .firms()
                .iter()
                .map(|f| {
                    row.get(&f.name).cloned().ok_or_else(|| {
                        Error::Malformed(format!("no disutility of worker {w:?} for firm {:?}", f.name))
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Profile::new(rows)
}

fn table_key(universe: &[String], s: Subset) -> String {
    s.iter().map(|i| universe[i].as_str()).collect::<Vec<_>>().join(",")
}

fn profile_map(market: &Market, u: &Profile) -> Disutilities {
    market
        .workers()
        .iter()
        .enumerate()
        .map(|(w, name)| {
            let row = market
                .firms()
                .iter()
                .enumerate()
                .map(|(f, firm)| (firm.name.clone(), u.get(w, f).clone()))
                .collect();
            (name.clone(), row)
        })
        .collect()
}

/// Canonical serialization: every utility as an explicit table in
/// bit-pattern order, followed by the embedded profile.
pub fn write_market(market: &Market) -> String {
    let universe = market.workers();
    let doc = MarketDoc {
        workers: universe.to_vec(),
        firms: market
            .firms()
            .iter()
            .map(|f| FirmDoc {
                name: f.name.clone(),
                utility: UtilityDoc::Table {
                    values: Subset::all(universe.len())
                        .map(|s| (table_key(universe, s), f.utility.value(s).clone()))
                        .collect(),
                },
            })
            .collect(),
        disutilities: Some(profile_map(market, market.disutilities())),
    };
    serde_json::to_string_pretty(&doc).expect("market serializes")
}

pub fn write_profile(market: &Market, u: &Profile) -> String {
    let doc = ProfileDoc {
        disutilities: profile_map(market, u),
    };
    serde_json::to_string_pretty(&doc).expect("profile serializes")
}
