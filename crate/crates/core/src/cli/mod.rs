//! Command-line front end: scenario files in, CSV and JSON reports out.

pub mod config;
mod example51;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::json;
use thiserror::Error;

use crate::cover::Theta;
use crate::estimate::{estimate_entropy, theta_sweep};
use crate::laws::{run_suite, SuiteOptions, Verdict};

pub use config::{LawsConfig, ScenarioConfig};
pub use example51::{run_example51, Example51Options};
pub use report::{write_curve_csv, Units, SCHEMA_VERSION};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(crate::Error),
    #[error("{0}")]
    Engine(crate::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0} law check(s) failed")]
    LawFailure(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::LawFailure(_) => 1,
            CliError::Engine(e) if e.is_resource_cap() => 3,
            CliError::Config(_) | CliError::Engine(_) | CliError::Io { .. } => 2,
        }
    }
}

fn engine(e: crate::Error) -> CliError {
    CliError::Engine(e)
}

#[derive(Debug, Parser)]
#[command(name = "theta-entropy", version, about = "Intermediate topological entropies of nonautonomous systems")]
struct Cli {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Report entropies in bits instead of nats.
    #[arg(long, global = true)]
    log2: bool,
    /// Substring selecting law ids.
    #[arg(long = "law", global = true)]
    law: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Per-(θ, N) root table for a scenario.
    Estimate,
    /// Tail statistics across the θ grid of a scenario.
    Sweep,
    /// Run the law suite on the shipped scenarios.
    Laws {
        #[arg(long, hide = true)]
        corrupt_windows: bool,
    },
    /// Reproduce the two-shift example.
    Example51 {
        /// θ value as "p/q"; repeat for a grid.
        #[arg(long = "theta")]
        theta: Vec<Theta>,
        /// Largest family index in the closure sweep.
        #[arg(long)]
        kmax: Option<i64>,
    },
}

/// Parses `args` and runs the command, printing a summary to `stdout`.
/// Returns the process exit code.
pub fn run_from<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let mut buf = Vec::new();
    let result = match cli.jobs {
        Some(0) => Err(CliError::Config(crate::Error::invalid("--jobs must be >= 1"))),
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(&cli, &mut buf)),
            Err(e) => Err(CliError::Config(crate::Error::invalid(format!("thread pool: {e}")))),
        },
        None => dispatch(&cli, &mut buf),
    };
    let _ = stdout.write_all(&buf).and_then(|_| stdout.flush());
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    let units = if cli.log2 { Units::Bits } else { Units::Nats };
    match &cli.command {
        Command::Estimate => cmd_estimate(cli, units, stdout),
        Command::Sweep => cmd_sweep(cli, units, stdout),
        Command::Laws { corrupt_windows } => cmd_laws(cli, *corrupt_windows, stdout),
        Command::Example51 { theta, kmax } => {
            let mut opts = Example51Options::default();
            if !theta.is_empty() {
                opts.thetas = theta.clone();
            }
            if let Some(k) = kmax {
                opts.k_max = *k;
            }
            let out = out_dir(cli, None)?;
            run_example51(&opts, &out, units, stdout)
        }
    }
}

fn scenario(cli: &Cli) -> Result<ScenarioConfig, CliError> {
    let path = cli.config.as_ref().ok_or_else(|| CliError::Config(crate::Error::invalid("--config is required")))?;
    ScenarioConfig::load(path).map_err(CliError::Config)
}

fn out_dir(cli: &Cli, configured: Option<&Path>) -> Result<PathBuf, CliError> {
    let dir = cli.out.clone().or_else(|| configured.map(Path::to_path_buf)).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    Ok(dir)
}

fn say(stdout: &mut dyn Write, line: impl AsRef<str>) -> Result<(), CliError> {
    writeln!(stdout, "{}", line.as_ref()).map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })
}

fn cmd_estimate(cli: &Cli, units: Units, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = scenario(cli)?;
    let out = out_dir(cli, cfg.output.dir.as_deref())?;
    let source = cfg.source().map_err(CliError::Config)?;
    let ns = cfg.ns();
    let estimates = cfg
        .grid()
        .iter()
        .map(|&t| estimate_entropy(&source, t, &ns, &cfg.caps, cfg.sweep.method).map(|e| units.estimate(&e)))
        .collect::<crate::Result<Vec<_>>>()
        .map_err(engine)?;
    let csv = out.join("estimate.csv");
    write_curve_csv(&csv, &estimates)?;
    let json_path = out.join("estimate.json");
    report::write_json(&json_path, "estimate", units, json!({ "config": cfg, "estimates": estimates }))?;
    for e in &estimates {
        say(stdout, format!("theta={} tail_lo={} tail_hi={} exact={}", e.theta, report::num(e.tail_lo), report::num(e.tail_hi), e.all_exact()))?;
    }
    say(stdout, format!("wrote {} and {}", csv.display(), json_path.display()))
}

fn cmd_sweep(cli: &Cli, units: Units, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = scenario(cli)?;
    let out = out_dir(cli, cfg.output.dir.as_deref())?;
    let source = cfg.source().map_err(CliError::Config)?;
    let curve = theta_sweep(&source, &cfg.grid(), &cfg.ns(), &cfg.caps, cfg.sweep.method).map_err(engine)?;
    let estimates: Vec<_> = curve.estimates.iter().map(|e| units.estimate(e)).collect();
    let monotone = estimates.windows(2).all(|w| w[0].tail_hi <= w[1].tail_hi + crate::laws::DEFAULT_TOL);
    let tails: Vec<_> = estimates
        .iter()
        .map(|e| json!({ "theta": e.theta, "tail_lo": e.tail_lo, "tail_hi": e.tail_hi, "exact": e.all_exact() }))
        .collect();
    let csv = out.join("sweep.csv");
    write_curve_csv(&csv, &estimates)?;
    let json_path = out.join("sweep.json");
    report::write_json(&json_path, "sweep", units, json!({ "config": cfg, "curve": tails, "nondecreasing_in_theta": monotone }))?;
    for e in &estimates {
        say(stdout, format!("theta={} tail_hi={}", e.theta, report::num(e.tail_hi)))?;
    }
    say(stdout, format!("wrote {} and {}", csv.display(), json_path.display()))
}

fn cmd_laws(cli: &Cli, corrupt_windows: bool, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = match &cli.config {
        Some(p) => LawsConfig::load(p).map_err(CliError::Config)?,
        None => LawsConfig::default(),
    };
    let out = out_dir(cli, cfg.output.dir.as_deref())?;
    let filter = cli.law.clone().or(cfg.laws.filter.clone());
    let opts = SuiteOptions { filter: filter.clone(), caps: cfg.caps, corrupt_windows };
    let reports = run_suite(&opts).map_err(engine)?;
    let count = |v: Verdict| reports.iter().filter(|r| r.verdict == v).count();
    let (pass, fail, skipped) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Skipped));
    let path = out.join("laws.json");
    report::write_json(
        &path,
        "laws",
        Units::Nats,
        json!({ "filter": filter, "summary": { "pass": pass, "fail": fail, "skipped": skipped }, "reports": reports }),
    )?;
    for r in &reports {
        let tag = match r.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIP",
        };
        say(stdout, format!("{tag} {} {}", r.law, r.instance))?;
    }
    say(stdout, format!("{pass} passed, {fail} failed, {skipped} skipped; wrote {}", path.display()))?;
    if fail > 0 {
        return Err(CliError::LawFailure(fail));
    }
    Ok(())
}
