//! Command-line front end. [`run`] does all the work and returns the exit
//! code with the captured output, so tests can drive it in-process.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::generate::{generate, mixed_market, GeneratorKind};
use crate::model::{file, validate_market_with, validate_profile, DomainPolicy, FirmId, Market, Profile};
use crate::necessity::{ir_violation_for, sir_violation_for, verify_ir_violation, verify_sir_violation};
use crate::report::{self, Report};
use crate::selftest::{run_selftest, SelftestConfig};
use crate::stability::{find_block, find_weak_block};
use crate::surplus::{DpFault, SurplusSolver};
use crate::vcg::{check_ir, check_sir, check_strategy_proofness, vcg};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY_FAILURE: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "jobmatch", version, about = "Exact analysis of job-matching markets with VCG salaries")]
struct Cli {
    /// Emit the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Substitutes conditions of every firm's utility.
    Classify {
        /// Market file.
        market: PathBuf,
    },
    /// Efficient matching and its surplus.
    Solve {
        /// Market file.
        market: PathBuf,
        /// Disutility file replacing the market's own disutilities.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// VCG salaries, payoffs, and IR/SIR verdicts.
    Vcg {
        /// Market file.
        market: PathBuf,
        /// Disutility file replacing the market's own disutilities.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Also test every worker's misreports on a grid of this density.
        #[arg(long)]
        grid: Option<u32>,
    },
    /// Blocking coalitions against the VCG outcome.
    Stability {
        /// Market file.
        market: PathBuf,
        /// Disutility file replacing the market's own disutilities.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
    /// Adversarial profiles exposing IR/SIR failures.
    Necessity {
        /// Market file.
        market: PathBuf,
        /// Restrict to one firm.
        #[arg(long)]
        firm: Option<String>,
    },
    /// Print a random market file.
    Gen {
        /// Utility family; every firm draws its own family when omitted.
        #[arg(long, value_enum)]
        kind: Option<GeneratorKind>,
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long, default_value_t = 2)]
        firms: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the seeded invariant corpus.
    Selftest {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        grid: u32,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum Failure {
    Input(Error),
    Property(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Unverified(_) => Failure::Property(e),
            other => Failure::Input(other),
        }
    }
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput { code, stdout: String::new(), stderr: text }
            } else {
                CliOutput { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match execute(&cli) {
        Ok((text, code)) => CliOutput {
            code,
            stdout: text,
            stderr: String::new(),
        },
        Err(Failure::Input(e)) => CliOutput {
            code: EXIT_INPUT_ERROR,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
        Err(Failure::Property(e)) => CliOutput {
            code: EXIT_PROPERTY_FAILURE,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn file_label(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |n| n.to_string_lossy().into_owned())
}

fn read(p: &Path) -> Result<String, Error> {
    std::fs::read_to_string(p).map_err(|e| Error::Parse(format!("{}: {e}", p.display())))
}

fn with_path(p: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", p.display())),
        other => other,
    }
}

fn load_skeleton(p: &Path) -> Result<(Market, bool), Error> {
    let (m, has) = file::read_market_skeleton(&read(p)?).map_err(|e| with_path(p, e))?;
    Ok((m, has))
}

/// Market plus the profile to analyse: `--profile` wins over embedded
/// disutilities. Utilities must be monotone and disutilities non-negative.
fn load(market: &Path, profile: Option<&Path>) -> Result<(Market, Profile), Error> {
    let (m, has) = load_skeleton(market)?;
    let u = match profile {
        Some(p) => file::read_profile(&read(p)?, &m).map_err(|e| with_path(p, e))?,
        None if has => m.disutilities().clone(),
        None => {
            return Err(Error::Malformed(format!(
                "{} has no disutilities; pass --profile FILE",
                market.display()
            )))
        }
    };
    let checked = validate_market_with(&m, DomainPolicy::Unbounded);
    if !checked.verdict {
        return Err(Error::Malformed(checked.details));
    }
    let checked = validate_profile(&m, &u, DomainPolicy::Unbounded);
    if !checked.verdict {
        return Err(Error::Malformed(checked.details));
    }
    Ok((m, u))
}

fn command_echo(name: &str, market: &Path, profile: Option<&Path>) -> Map<String, Value> {
    let mut c = Map::new();
    c.insert("name".into(), json!(name));
    c.insert("market".into(), json!(file_label(market)));
    if let Some(p) = profile {
        c.insert("profile".into(), json!(file_label(p)));
    }
    c
}

fn render(cli: &Cli, rep: &Report) -> String {
    if cli.json {
        rep.to_json()
    } else {
        rep.to_text()
    }
}

fn execute(cli: &Cli) -> Result<(String, i32), Failure> {
    match &cli.command {
        Command::Classify { market } => {
            let (m, _) = load_skeleton(market)?;
            let firms: Map<String, Value> = m
                .firms()
                .iter()
                .map(|f| (f.name.clone(), report::classify(&f.utility)))
                .collect();
            let rep = Report {
                command: Value::Object(command_echo("classify", market, None)),
                market_digest: Some(report::market_digest(&m)),
                results: json!({ "firms": firms }),
            };
            Ok((render(cli, &rep), EXIT_OK))
        }
        Command::Solve { market, profile } => {
            let (m, u) = load(market, profile.as_deref())?;
            let solver = SurplusSolver::new(&m, &u)?;
            let sol = solver.efficient_matching();
            let without: Map<String, Value> = m
                .workers()
                .iter()
                .enumerate()
                .map(|(w, name)| (name.clone(), report::rat(solver.excluding(crate::Subset::singleton(w)))))
                .collect();
            let rep = Report {
                command: Value::Object(command_echo("solve", market, profile.as_deref())),
                market_digest: Some(report::market_digest(&m)),
                results: json!({
                    "matching": report::matching(&m, &sol.matching),
                    "surplus": report::rat(&sol.total),
                    "tie_broken": sol.tie_broken,
                    "surplus_without": without,
                    "profile_in_domain": validate_profile(&m, &u, DomainPolicy::Box).verdict,
                }),
            };
            Ok((render(cli, &rep), EXIT_OK))
        }
        Command::Vcg { market, profile, grid } => {
            let (m, u) = load(market, profile.as_deref())?;
            let r = vcg(&m, &u)?;
            let mut results = report::vcg(&m, &r);
            let ir = check_ir(&r);
            let sir = check_sir(&r, &m);
            results["ir"] = match &ir.witness {
                Some(w) => json!({ "holds": false, "witness": report::ir_witness(&m, w) }),
                None => json!({ "holds": true }),
            };
            results["sir"] = match &sir.witness {
                Some(w) => json!({ "holds": false, "witness": report::sir_witness(&m, w) }),
                None => json!({ "holds": true }),
            };
            let mut echo = command_echo("vcg", market, profile.as_deref());
            if let Some(k) = grid {
                echo.insert("grid".into(), json!(k));
                let mut sp = Map::new();
                for w in 0..m.n() {
                    let rep = check_strategy_proofness(&m, &u, w, *k)?;
                    let entry = match rep.witness {
                        Some(x) => json!({
                            "holds": false,
                            "report": x.report.iter().map(report::rat).collect::<Vec<_>>(),
                            "misreport_payoff": report::rat(&x.misreport_payoff),
                            "truthful_payoff": report::rat(&x.truthful_payoff),
                        }),
                        None => json!({ "holds": true }),
                    };
                    sp.insert(m.workers()[w].clone(), entry);
                }
                results["strategy_proofness"] = Value::Object(sp);
            }
            let rep = Report {
                command: Value::Object(echo),
                market_digest: Some(report::market_digest(&m)),
                results,
            };
            Ok((render(cli, &rep), EXIT_OK))
        }
        Command::Stability { market, profile } => {
            let (m, u) = load(market, profile.as_deref())?;
            let r = vcg(&m, &u)?;
            let o = &r.outcome;
            let block = find_block(&m, &u, o);
            let weak = find_weak_block(&m, &u, o);
            let mut results = json!({
                "matching": report::matching(&m, r.matching()),
                "payoff_point": report::payoff_point(&r.firm_payoffs, &r.worker_payoffs),
                "sir": check_sir(&r, &m).verdict,
                "stable": block.is_none(),
                "weakly_stable": weak.is_none(),
            });
            if let Some(b) = &block {
                results["block"] = report::block(&m, b);
            }
            if let Some(b) = &weak {
                results["weak_block"] = report::block(&m, b);
            }
            let rep = Report {
                command: Value::Object(command_echo("stability", market, profile.as_deref())),
                market_digest: Some(report::market_digest(&m)),
                results,
            };
            Ok((render(cli, &rep), EXIT_OK))
        }
        Command::Necessity { market, firm } => {
            let (m, _) = load_skeleton(market)?;
            let targets: Vec<FirmId> = match firm {
                Some(name) => vec![m.firm_index(name)?],
                None => (0..m.m()).map(FirmId).collect(),
            };
            let mut firms = Map::new();
            for f in targets {
                firms.insert(m.firm(f).name.clone(), necessity_entry(&m, f)?);
            }
            let mut echo = command_echo("necessity", market, None);
            if let Some(name) = firm {
                echo.insert("firm".into(), json!(name));
            }
            let rep = Report {
                command: Value::Object(echo),
                market_digest: Some(report::market_digest(&m)),
                results: json!({ "firms": firms }),
            };
            Ok((render(cli, &rep), EXIT_OK))
        }
        Command::Gen {
            kind,
            workers,
            firms,
            seed,
        } => {
            let m = match kind {
                Some(k) => generate(*k, *workers, *firms, *seed)?,
                None => mixed_market(*workers, *firms, *seed)?,
            };
            let mut text = file::write_market(&m);
            text.push('\n');
            Ok((text, EXIT_OK))
        }
        Command::Selftest {
            trials,
            seed,
            grid,
            inject_fault,
        } => {
            if *grid == 0 {
                return Err(Failure::Input(Error::Precondition("--grid must be at least 1".into())));
            }
            let cfg = SelftestConfig {
                trials: *trials,
                seed: *seed,
                grid: *grid,
                fault: inject_fault.then_some(DpFault::SkipFullPool),
            };
            let st = run_selftest(&cfg)?;
            let properties: Vec<Value> = st
                .tallies
                .iter()
                .map(|t| {
                    let mut v = json!({ "property": t.property, "checked": t.checked, "failed": t.failed });
                    if let Some(f) = &t.first_failure {
                        v["first_failure"] = json!(f);
                    }
                    v
                })
                .collect();
            let rep = Report {
                command: json!({ "name": "selftest", "trials": trials, "seed": seed, "grid": grid }),
                market_digest: None,
                results: json!({ "passed": st.passed(), "properties": properties }),
            };
            let code = if st.passed() { EXIT_OK } else { EXIT_PROPERTY_FAILURE };
            Ok((render(cli, &rep), code))
        }
    }
}

fn necessity_entry(m: &Market, f: FirmId) -> Result<Value, Error> {
    let mut entry = Map::new();
    match ir_violation_for(m, f)? {
        Some(ap) => {
            let r = verify_ir_violation(m, &ap)?;
            let mut v = report::adversarial(m, &ap);
            v["firm_payoff"] = report::rat(&r.firm_payoffs[f.0]);
            v["ir"] = json!(check_ir(&r).verdict);
            entry.insert("ir_violation".into(), v);
        }
        None => {
            entry.insert("ir_violation".into(), json!("weak substitutes holds: no IR construction"));
        }
    }
    match sir_violation_for(m, f)? {
        Some(ap) => {
            let (r, gain) = verify_sir_violation(m, &ap)?;
            let (l, k) = ap.pair.expect("SIR construction has a pair");
            let mut v = report::adversarial(m, &ap);
            v["payment_w_l"] = report::rat(&r.salaries()[l]);
            v["payment_w_k"] = report::rat(&r.salaries()[k]);
            v["dismissal_gain"] = report::rat(&gain);
            v["sir"] = json!(check_sir(&r, m).verdict);
            entry.insert("sir_violation".into(), v);
        }
        None => {
            entry.insert("sir_violation".into(), json!("submodular: no SIR construction"));
        }
    }
    Ok(Value::Object(entry))
}
