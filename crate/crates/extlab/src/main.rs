use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use extlab::report::{to_sorted_json, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_INPUT};
use extlab::serial::ModuleSpec;
use extlab::stock::stock_ring;
use extlab::suites::{replay, run_suite, SuiteConfig, SUITES};
use extlab::{emit_report, HarnessError, Report, Result, Verdict, Witness, Workspace};
use extlab_core::homology::{ext_dims, minimal_resolution_with_budget, poincare_truncation, tor_dims, DEFAULT_BUDGET};
use extlab_core::module::{injective_envelope_of_residue, is_free, is_injective, residue_module};
use extlab_core::{FiniteAlgebra, FiniteModule};
use serde_json::{json, Value};

/// Exact Ext/Tor computations over finite local algebras and verification suites.
#[derive(Parser)]
#[command(name = "extlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Workspace file defining rings and modules.
    #[arg(long, global = true)]
    workspace: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named suite (or a suite configured in the workspace) and report.
    Verify {
        suite: String,
        #[command(flatten)]
        common: Common,
        #[arg(long = "ring")]
        rings: Vec<String>,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        bound: Option<usize>,
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        budget: Option<usize>,
        /// Force the specialization point (integer encoding of a field element).
        #[arg(long)]
        alpha: Option<u32>,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimal free resolution of a module: Betti numbers and differentials.
    Resolve {
        module: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
    /// dim Ext^i(M, N) for i <= bound.
    Ext {
        m: String,
        n: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
    /// dim Tor_i(M, N) for i <= bound.
    Tor {
        m: String,
        n: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
    /// Truncated Poincaré series of a module.
    Poincare {
        module: String,
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 6)]
        bound: usize,
    },
    /// Local factors of a ring.
    Decompose {
        ring: String,
        #[command(flatten)]
        common: Common,
    },
    /// Matlis dual of a module.
    Dual {
        module: String,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute the cases of a witness file, or every witness of a report.
    Replay { file: PathBuf },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

fn load(common: &Common) -> Result<Option<Workspace>> {
    common.workspace.as_deref().map(|p| Workspace::parse(&read(p)?)).transpose()
}

fn ring(ws: Option<&Workspace>, name: &str) -> Result<Arc<FiniteAlgebra>> {
    match ws {
        Some(ws) => ws.ring(name),
        None => stock_ring(name).ok_or_else(|| HarnessError::Validation(format!("unknown ring `{name}`")))?,
    }
}

/// A workspace module, or `k@R`, `A@R`, `E@R` for the residue field, the ring itself and the
/// injective envelope of the residue field over `R`.
fn module(ws: Option<&Workspace>, name: &str) -> Result<FiniteModule> {
    if let Some((kind, r)) = name.split_once('@') {
        let r = ring(ws, r)?;
        return Ok(match kind {
            "k" => residue_module(&r)?,
            "A" => FiniteModule::regular(&r),
            "E" => injective_envelope_of_residue(&r)?,
            _ => return Err(HarnessError::Validation(format!("unknown module form `{kind}@`, expected k@, A@ or E@"))),
        });
    }
    match ws {
        Some(ws) => ws.module(name),
        None => Err(HarnessError::Validation(format!("module `{name}` needs a workspace"))),
    }
}

fn print(v: &Value) {
    println!("{}", to_sorted_json(v));
}

fn summary_line(r: &Report) -> String {
    let s = &r.summary;
    format!(
        "{}: {:?} (pass {}, fail {}, skip {}, inconclusive {}, vacuous pass {})",
        r.suite, r.verdict, s.pass, s.fail, s.skip, s.inconclusive, s.vacuous_pass
    )
}

fn replay_file(path: &Path) -> Result<i32> {
    let v: Value = serde_json::from_str(&read(path)?)
        .map_err(|e| HarnessError::Parse { location: format!("line {}, column {}", e.line(), e.column()), message: e.to_string() })?;
    let witnesses: Vec<Witness> = if v.get("case").is_some() {
        vec![serde_json::from_value(v).map_err(|e| HarnessError::Validation(format!("not a witness: {e}")))?]
    } else {
        let report: Report = serde_json::from_value(v).map_err(|e| HarnessError::Validation(format!("not a witness or report: {e}")))?;
        report.cases.into_iter().filter_map(|c| c.witness).collect()
    };
    let mut verdicts = Vec::new();
    for w in &witnesses {
        let o = replay(w);
        println!("{}: {:?}{}", w.suite, o.verdict, o.reason.as_deref().map(|r| format!(" ({r})")).unwrap_or_default());
        verdicts.push(o.verdict);
    }
    Ok(if verdicts.contains(&Verdict::Fail) {
        EXIT_FAIL
    } else if !verdicts.is_empty() && verdicts.iter().all(|&v| v == Verdict::Inconclusive) {
        EXIT_INCONCLUSIVE
    } else {
        0
    })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Verify { suite, common, rings, trials, bound, window, seed, budget, alpha, out } => {
            let ws = load(&common)?;
            let mut config = match ws.as_ref().and_then(|w| w.suite(&suite)) {
                Some(c) => c.clone(),
                None if SUITES.contains(&suite.as_str()) => SuiteConfig::new(&suite),
                None => return Err(HarnessError::UnknownSuite(suite)),
            };
            if !rings.is_empty() {
                config.rings = rings;
            }
            config.trials = trials.unwrap_or(config.trials);
            config.bound = bound.unwrap_or(config.bound);
            config.window = window.unwrap_or(config.window);
            config.seed = seed.unwrap_or(config.seed);
            config.budget = budget.unwrap_or(config.budget);
            config.alpha = alpha.or(config.alpha);
            let report = run_suite(&config, &|name| ring(ws.as_ref(), name))?;
            eprintln!("{}", summary_line(&report));
            match out {
                Some(path) => emit_report(&report, &path)?,
                None => println!("{}", report.to_json()),
            }
            Ok(report.exit_code())
        }
        Command::Resolve { module: name, common, bound, budget } => {
            let ws = load(&common)?;
            let m = module(ws.as_ref(), &name)?;
            let res = minimal_resolution_with_budget(&m, bound, budget)?;
            let alg = res.algebra().clone();
            let differentials: Vec<Vec<Vec<String>>> = (1..=res.length())
                .map(|i| {
                    (0..res.betti(i - 1).unwrap_or(0))
                        .map(|row| {
                            (0..res.betti(i).unwrap_or(0))
                                .map(|col| alg.format_element(&res.differential_entry(i, row, col)))
                                .collect()
                        })
                        .collect()
                })
                .collect();
            print(&json!({
                "module": name,
                "betti": res.betti_numbers(),
                "terminated": res.terminated(),
                "differentials": differentials,
                "verified": true,
            }));
            Ok(0)
        }
        Command::Ext { m, n, common, bound } => {
            let ws = load(&common)?;
            let t = ext_dims(&module(ws.as_ref(), &m)?, &module(ws.as_ref(), &n)?, bound)?;
            print(&json!({ "kind": "Ext", "m": m, "n": n, "dims": t.dims }));
            Ok(0)
        }
        Command::Tor { m, n, common, bound } => {
            let ws = load(&common)?;
            let t = tor_dims(&module(ws.as_ref(), &m)?, &module(ws.as_ref(), &n)?, bound)?;
            print(&json!({ "kind": "Tor", "m": m, "n": n, "dims": t.dims }));
            Ok(0)
        }
        Command::Poincare { module: name, common, bound } => {
            let ws = load(&common)?;
            let p = poincare_truncation(&module(ws.as_ref(), &name)?, bound)?;
            print(&json!({ "module": name, "series": p.to_string(), "coefficients": p.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>() }));
            Ok(0)
        }
        Command::Decompose { ring: name, common } => {
            let ws = load(&common)?;
            let r = ring(ws.as_ref(), &name)?;
            let factors: Vec<Value> = r
                .local_decompose()
                .iter()
                .map(|f| {
                    json!({
                        "dim": f.algebra.dim(),
                        "idempotent": r.format_element(&f.idempotent),
                        "residue_degree": f.algebra.residue_degree().ok(),
                        "gorenstein": f.algebra.is_gorenstein().ok(),
                    })
                })
                .collect();
            print(&json!({ "ring": name, "dim": r.dim(), "local": r.is_local(), "factors": factors }));
            Ok(0)
        }
        Command::Dual { module: name, common } => {
            let ws = load(&common)?;
            let m = module(ws.as_ref(), &name)?;
            let d = m.matlis_dual();
            print(&json!({
                "module": name,
                "dim": m.dim(),
                "free": is_free(&m)?,
                "injective": is_injective(&m)?,
                "dual": ModuleSpec::of(&d),
            }));
            Ok(0)
        }
        Command::Replay { file } => replay_file(&file),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            let code = match &e {
                e if e.is_input_error() => EXIT_INPUT,
                HarnessError::Core(extlab_core::Error::BudgetExceeded(_)) => EXIT_INCONCLUSIVE,
                _ => EXIT_FAIL,
            };
            ExitCode::from(code as u8)
        }
    }
}
