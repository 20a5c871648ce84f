//! `hlgt`: command-line driver for the verification harness.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hlgt::cellcomplex::{Cell, Chain, LatticeBox, OrientedCell};
use hlgt::couplings::write_event_log;
use hlgt::gibbs::{parse_beta, wilson_line, ExactMeasure, Params};
use hlgt::harness::checks::{run_acceptance, run_property_suite, AcceptanceOptions};
use hlgt::harness::config::{ConfigFile, ExperimentConfig, ExperimentKind, Overrides};
use hlgt::harness::experiments::{run_cluster_events, run_experiment};
use hlgt::harness::report::Report;
use hlgt::mc::init_thread_pool;
use hlgt::spinmodel::h_kappa_exact;
use hlgt::theory;

#[derive(Parser, Debug)]
#[command(name = "hlgt", version, about = "Abelian lattice Higgs model: samplers, oracles and acceptance checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration file; the built-in experiments are used otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Experiment id in the configuration.
    #[arg(long, global = true)]
    experiment: Option<String>,
    /// Base seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sweeps per chain override.
    #[arg(long, global = true)]
    sweeps: Option<usize>,
    /// Chain count override.
    #[arg(long, global = true)]
    chains: Option<usize>,
    /// Output file; `.csv` writes CSV, anything else JSON.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Runs the acceptance suite.
    Verify {
        /// Comma-separated criterion ids; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
    },
    /// Runs Monte Carlo experiments and writes their reports.
    Sample,
    /// Runs a cluster-event experiment of the couplings.
    Couple {
        /// CSV file for the per-sample event log.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Exact values on a tiny box by enumeration.
    Oracle {
        #[arg(long, value_enum, default_value_t = TinyBox::Cube)]
        lattice: TinyBox,
        #[arg(long, default_value_t = 2)]
        n: u8,
        /// Gauge coupling; `inf` is accepted.
        #[arg(long, default_value = "1.0")]
        beta: String,
        #[arg(long, default_value_t = 1.8)]
        kappa: f64,
    },
    /// Theory values: theta, alphas, constants and bounds.
    Predict {
        #[arg(long, default_value_t = 2)]
        n: u8,
        #[arg(long, default_value = "1.0")]
        beta: String,
        #[arg(long, default_value_t = 1.7)]
        kappa: f64,
        /// Edges in the path support.
        #[arg(long)]
        supp: Option<usize>,
        /// Edges in the support of the non-corner part of the path.
        #[arg(long)]
        non_corner: Option<usize>,
        /// Central edge correlation for `Theta'`.
        #[arg(long)]
        edge_corr: Option<f64>,
        /// Rectangle sides for the main envelope.
        #[arg(long, num_args = 2, value_names = ["L1", "L2"])]
        sides: Option<Vec<usize>>,
    },
    /// Runs randomized property checks.
    Proptest {
        #[arg(long, default_value_t = 256)]
        cases: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TinyBox {
    /// The unit 3-cube with 12 edges; the path is one edge.
    Cube,
    /// The 3 x 2 square grid with 7 edges; the path is two collinear edges.
    Seven,
}

fn config_file(common: &Common) -> Result<ConfigFile> {
    match &common.config {
        Some(p) => ConfigFile::load(p).with_context(|| format!("reading {}", p.display())),
        None => Ok(ConfigFile::builtin()),
    }
}

fn selected(common: &Common, keep: impl Fn(&ExperimentConfig) -> bool) -> Result<Vec<(String, ExperimentConfig)>> {
    let file = config_file(common)?;
    let overrides =
        Overrides { seed: common.seed, sweeps: common.sweeps, chains: common.chains, out: common.out.clone() };
    let mut out = Vec::new();
    for (id, mut cfg) in file.experiments {
        if common.experiment.as_ref().is_some_and(|e| e != &id) || (common.experiment.is_none() && !keep(&cfg)) {
            continue;
        }
        overrides.apply(&mut cfg);
        out.push((id, cfg));
    }
    if out.is_empty() {
        bail!("no matching experiment");
    }
    Ok(out)
}

fn write_value(value: &Value, out: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit(report: &Report, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => report.save(p)?,
        None => report.write_json(std::io::stdout().lock())?,
    }
    Ok(())
}

fn tiny(which: TinyBox) -> Result<(LatticeBox, Chain)> {
    Ok(match which {
        TinyBox::Cube => {
            (LatticeBox::unit_cube3(), Chain::from_cell(OrientedCell::positive(Cell::edge([0; 4], 0))))
        }
        TinyBox::Seven => {
            let mut g = Chain::zero(1);
            g.add_cell(Cell::edge([0; 4], 0), 1);
            g.add_cell(Cell::edge([1, 0, 0, 0], 0), 1);
            (LatticeBox::new([0; 4], [2, 1, 0, 0])?, g)
        }
    })
}

fn oracle(which: TinyBox, n: u8, beta: f64, kappa: f64) -> Result<Value> {
    let (lat, gamma) = tiny(which)?;
    let line = |b: f64| -> Result<Value> {
        let p = Params { n, half_width: 0, beta: b, kappa };
        let v = ExactMeasure::new(&lat, &p)?.expectation_complex(|s| wilson_line(s, &lat, &gamma).unwrap_or_default());
        Ok(json!({ "re": v.re, "im": v.im }))
    };
    let finite = if beta.is_finite() { line(beta)? } else { Value::Null };
    Ok(json!({
        "edges": lat.edge_slots().len(),
        "path_edges": gamma.len(),
        "n": n,
        "beta": if beta.is_finite() { json!(beta) } else { json!("inf") },
        "kappa": kappa,
        "line": finite,
        "line_infinite_beta": line(f64::INFINITY)?,
        "h_kappa": h_kappa_exact(&gamma, kappa, n, &lat)?,
    }))
}

fn predict(
    n: u8,
    beta: f64,
    kappa: f64,
    supp: Option<usize>,
    non_corner: Option<usize>,
    edge_corr: Option<f64>,
    sides: Option<Vec<usize>>,
) -> Result<Value> {
    let theta: Vec<Value> = (0..n)
        .map(|g| {
            let t = theory::theta(beta, kappa, g, n);
            json!({ "g": g, "re": t.re, "im": t.im })
        })
        .collect();
    let ok = |r: hlgt::Result<f64>| r.map(|v| json!(v)).unwrap_or_else(|e| json!(e.to_string()));
    let mut v = json!({
        "n": n,
        "beta": if beta.is_finite() { json!(beta) } else { json!("inf") },
        "kappa": kappa,
        "theta": theta,
        "alpha0_beta": theory::alpha0(beta, n),
        "alpha0_kappa": theory::alpha0(kappa, n),
        "alpha1_beta": theory::alpha1(beta, n),
        "alpha2": theory::alpha2(beta, kappa, n),
        "alpha3": theory::alpha3(beta, kappa, n),
        "alpha4": theory::alpha4(beta, kappa, n),
        "alpha5": ok(theory::alpha5(beta, kappa, n)),
        "alpha6": theory::alpha6(beta, kappa, n),
        "assumption_a": theory::assumption_a(kappa, n),
        "assumption_a_threshold": ok(theory::assumption_a_threshold(n)),
        "k": ok(theory::k(kappa, n)),
        "k_prime": theory::k_prime(kappa, n),
    });
    if let Some(s) = supp {
        v["short_line_bound"] = ok(theory::short_line_bound(s, beta, kappa, n));
        if let Some(c) = edge_corr {
            v["theta_prime"] = ok(theory::theta_prime(s, beta, kappa, c, n));
        }
        if let Some(lw) = sides.as_deref() {
            v["envelope"] = match theory::main_bound(s, lw[0], lw[1], beta, kappa) {
                Ok(env) => serde_json::to_value(env)?,
                Err(e) => json!(e.to_string()),
            };
        }
    }
    if let Some(c) = non_corner {
        v["upper_bound"] = ok(theory::upper_bound(c, beta, kappa, n));
    }
    Ok(v)
}

fn run(cli: Cli) -> Result<bool> {
    init_thread_pool();
    let common = &cli.common;
    let out = common.out.as_deref();
    match cli.command {
        Command::Verify { only } => {
            let results = run_acceptance(&AcceptanceOptions { only })?;
            for r in &results {
                println!("{r}");
            }
            if let Some(p) = out {
                write_value(&serde_json::to_value(&results)?, Some(p))?;
            }
            Ok(results.iter().all(|r| r.passed))
        }
        Command::Sample => {
            let mut all = true;
            for (id, cfg) in selected(common, |c| c.kind != ExperimentKind::ClusterEvents)? {
                let report = run_experiment(&id, &cfg)?;
                all &= report.passed();
                let target = cfg.out.clone();
                emit(&report, target.as_deref())?;
            }
            Ok(all)
        }
        Command::Couple { log } => {
            let mut all = true;
            for (id, cfg) in selected(common, |c| c.kind == ExperimentKind::ClusterEvents)? {
                if cfg.kind != ExperimentKind::ClusterEvents {
                    bail!("experiment {id} is not a cluster-event experiment");
                }
                let (mut report, rows) = run_cluster_events(&id, &cfg)?;
                report.metadata.insert("config_hash".into(), cfg.hash()?);
                all &= report.passed();
                if let Some(p) = &log {
                    write_event_log(&rows, std::io::BufWriter::new(std::fs::File::create(p)?))?;
                }
                emit(&report, cfg.out.as_deref())?;
            }
            Ok(all)
        }
        Command::Oracle { lattice, n, beta, kappa } => {
            write_value(&oracle(lattice, n, parse_beta(&beta)?, kappa)?, out)?;
            Ok(true)
        }
        Command::Predict { n, beta, kappa, supp, non_corner, edge_corr, sides } => {
            write_value(&predict(n, parse_beta(&beta)?, kappa, supp, non_corner, edge_corr, sides)?, out)?;
            Ok(true)
        }
        Command::Proptest { cases } => {
            let results = run_property_suite(common.seed.unwrap_or(1), cases)?;
            for r in &results {
                println!("{}: {} cases, {} failures", r.name, r.cases, r.failures);
            }
            if let Some(p) = out {
                write_value(&serde_json::to_value(&results)?, Some(p))?;
            }
            Ok(results.iter().all(|r| r.failures == 0))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
