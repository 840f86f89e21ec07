//! `perimetry`: dilation derivatives, Q-variations, covariograms, Boolean
//! model contact distributions and the invariant suites from the command
//! line.
//!
//! Exit codes: 0 success, 1 failed suite or I/O failure, 2 invalid input,
//! 3 budget or precision failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};
use perimetry_core::checks::{Fault, Level};
use serde_json::json;

use commands::Status;
use config::{CommandKind, ConfigError, ExperimentConfig, MethodName, Points};

const THREADS_ENV: &str = "PERIMETRY_THREADS";

/// Invalid user input (exit 2).
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

#[derive(Parser)]
#[command(name = "perimetry", version, about = "Perimeter, dilation and contact-distribution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Ratios G(rQ)/r of a shape and their limit as r → 0.
    Derivative {
        #[arg(long)]
        shape: Option<PathBuf>,
        /// Points of Q, e.g. "0,0;1,0".
        #[arg(long)]
        q: Option<String>,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// One-sided slope of the set covariogram along a unit direction.
    Covariogram {
        #[arg(long)]
        shape: Option<PathBuf>,
        /// Unit direction, e.g. "1,0".
        #[arg(long, value_parser = parse_coords)]
        u: Option<Coords>,
        #[command(flatten)]
        schedule: ScheduleArgs,
        #[command(flatten)]
        sampler: SamplerArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// The Q-variation of a shape and its ladder bounds.
    Qvariation {
        #[arg(long)]
        shape: Option<PathBuf>,
        #[arg(long)]
        q: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Contact distribution of a Boolean model and its slope at 0.
    Contact {
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        q: Option<String>,
        /// Radii, e.g. "0.002,0.001"; defaults scale with the grains.
        #[arg(long, value_parser = parse_coords)]
        r_values: Option<Coords>,
        #[arg(long)]
        realizations: Option<usize>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        shell_samples: Option<usize>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Ratios for the set whose dilation derivative exceeds its Q-variation.
    Counterexample {
        #[arg(long)]
        m_max: Option<usize>,
        /// Samples per radial stratum and radius.
        #[arg(long)]
        samples: Option<u64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs the invariant batteries.
    Suite {
        #[arg(value_parser = parse_level)]
        level: Option<Level>,
        #[arg(long, value_parser = parse_fault)]
        inject: Vec<Fault>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Runs whatever command a config file names.
    Run {
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// JSON config; its keys win over flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (PERIMETRY_THREADS caps this).
    #[arg(long)]
    threads: Option<usize>,
    /// Where `<command>.csv` and `<command>.json` go (default: current directory).
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ScheduleArgs {
    /// First radius of the geometric schedule.
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    ratio: Option<f64>,
    /// Number of radii.
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args)]
struct SamplerArgs {
    #[arg(long, value_parser = parse_method)]
    method: Option<MethodName>,
    /// Grid spacing for `--method grid`.
    #[arg(long)]
    h: Option<f64>,
    /// Monte Carlo samples per radius.
    #[arg(long)]
    samples: Option<u64>,
}

type Coords = Vec<f64>;

fn parse_coords(s: &str) -> std::result::Result<Coords, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"))).collect()
}

fn parse_kebab<T: serde::de::DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(json!(s)).map_err(|e| e.to_string())
}

fn parse_level(s: &str) -> std::result::Result<Level, String> {
    parse_kebab(s)
}

fn parse_fault(s: &str) -> std::result::Result<Fault, String> {
    parse_kebab(s)
}

fn parse_method(s: &str) -> std::result::Result<MethodName, String> {
    parse_kebab(s)
}

impl Cmd {
    /// Flags as a config, plus the config file path and the subcommand.
    fn into_flags(self) -> (ExperimentConfig, Option<PathBuf>, Option<CommandKind>) {
        let mut c = ExperimentConfig::default();
        let common = match self {
            Cmd::Derivative { shape, q, schedule, sampler, common } => {
                c.command = Some(CommandKind::Derivative);
                c.shape = shape;
                c.q = q.map(Points::Text);
                schedule.apply(&mut c);
                sampler.apply(&mut c);
                common
            }
            Cmd::Covariogram { shape, u, schedule, sampler, common } => {
                c.command = Some(CommandKind::Covariogram);
                c.shape = shape;
                c.u = u;
                schedule.apply(&mut c);
                sampler.apply(&mut c);
                common
            }
            Cmd::Qvariation { shape, q, common } => {
                c.command = Some(CommandKind::Qvariation);
                c.shape = shape;
                c.q = q.map(Points::Text);
                common
            }
            Cmd::Contact { spec, q, r_values, realizations, points, shell_samples, common } => {
                c.command = Some(CommandKind::Contact);
                c.spec = spec;
                c.q = q.map(Points::Text);
                c.r_values = r_values;
                c.realizations = realizations;
                c.points = points;
                c.shell_samples = shell_samples;
                common
            }
            Cmd::Counterexample { m_max, samples, common } => {
                c.command = Some(CommandKind::Counterexample);
                c.m_max = m_max;
                c.samples = samples;
                common
            }
            Cmd::Suite { level, inject, common } => {
                c.command = Some(CommandKind::Suite);
                c.level = level;
                c.inject = (!inject.is_empty()).then_some(inject);
                common
            }
            Cmd::Run { common } => common,
        };
        c.seed = common.seed;
        c.threads = common.threads;
        c.out_dir = common.out_dir;
        let sub = c.command;
        (c, common.config, sub)
    }
}

impl ScheduleArgs {
    fn apply(self, c: &mut ExperimentConfig) {
        c.r0 = self.r0;
        c.ratio = self.ratio;
        c.count = self.count;
    }
}

impl SamplerArgs {
    fn apply(self, c: &mut ExperimentConfig) {
        c.method = self.method;
        c.h = self.h;
        c.samples = self.samples;
    }
}

fn thread_count(requested: Option<usize>) -> Result<usize> {
    let mut n = requested.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let cap: usize = v.trim().parse().map_err(|_| Invalid(format!("{THREADS_ENV}={v} is not a thread count")))?;
        n = n.min(cap);
    }
    if n == 0 {
        return Err(Invalid("thread count must be at least 1".into()).into());
    }
    Ok(n)
}

fn run(cli: Cli) -> Result<Status> {
    let is_run = matches!(cli.command, Cmd::Run { .. });
    let (flags, config_path, sub) = cli.command.into_flags();
    let (merged, warnings) = match &config_path {
        Some(path) => {
            let file = ExperimentConfig::from_file(path)?;
            commands::check_command(sub, file.command)?;
            flags.merge_file(file)?
        }
        None if is_run => return Err(Invalid("`run` needs --config".into()).into()),
        None => (flags.normalized()?, Vec::new()),
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let (cfg, inputs) = commands::resolve(merged)?;
    let threads = thread_count(cfg.threads)?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;

    let command = cfg.command.expect("resolved");
    let seed = cfg.seed.expect("resolved");
    let hash = output::config_hash(&cfg, &inputs.doc);
    let outcome = commands::execute(&cfg, &inputs)?;

    let summary = json!({
        "command": command,
        "status": outcome.status.label(),
        "seed": seed,
        "config_sha256": hash,
        "config": cfg,
        "threads": threads,
        "inputs": inputs.doc,
        "warnings": warnings,
        "result": outcome.result,
    });
    let csv = outcome.table.to_csv(&hash, seed);
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = output::write_artifacts(&dir, &command.to_string(), &csv, &summary)?;
    if outcome.lines.is_empty() {
        println!("{}", serde_json::to_string_pretty(&summary["result"])?);
    } else {
        for l in &outcome.lines {
            println!("{l}");
        }
    }
    eprintln!("wrote {} and {}", files.csv.display(), files.json.display());
    Ok(outcome.status)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<Invalid>() || cause.is::<ConfigError>() {
            return 2;
        }
        if let Some(e) = cause.downcast_ref::<perimetry_core::Error>() {
            return match e {
                perimetry_core::Error::DegenerateConditioning { .. } | perimetry_core::Error::MemoryCap { .. } => 3,
                e if e.is_validation() => 2,
                _ => 1,
            };
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Flagged) => ExitCode::from(3),
        Ok(Status::Failed) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
