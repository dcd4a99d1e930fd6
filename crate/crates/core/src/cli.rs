//! The `fairsim` command line: `simulate`, `sweep` and `bandit`.
//!
//! Each subcommand reads one JSON config document (missing fields take their
//! defaults), writes its CSV outputs into `--out`, and finishes with a
//! `manifest.json` holding the fully resolved config and a SHA-256 digest of
//! every output. A manifest can be passed back as `--config` to reproduce the
//! outputs byte for byte.
//!
//! Exit codes: 0 on success, 2 for configuration errors, 3 for I/O failures.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::bandit::{export_actions, export_rewards, run_bandit, BanditConfig};
use crate::error::{ConfigError, Error, Result};
use crate::experiments::{export_outcomes, export_summary, run_sweep, summarize, RunOptions, SweepConfig};
use crate::justice::write_events_csv;
use crate::metrics::{measure_series, REPORT_COLUMNS};
use crate::output::{write_csv, write_with};
use crate::sim::SimConfig;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_IO: u8 = 3;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const EVENTS_FILE: &str = "events.csv";
pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const OUTCOMES_FILE: &str = "outcomes.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const BANDIT_REWARD_FILE: &str = "bandit_reward.csv";
pub const BANDIT_ACTIONS_FILE: &str = "bandit_actions.csv";

const DEFAULT_MEASURE_EVERY: u64 = 50;

#[derive(Debug, Parser)]
#[command(name = "fairsim", version, about = "Stigma-driven policing simulator and fairness experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One run: event log, metric time series, manifest.
    Simulate(SimulateArgs),
    /// Replicate runs over a (theta, q0) grid: outcomes, summary, manifest.
    Sweep(CommonArgs),
    /// Epsilon-greedy search over theta: reward curve, action proportions, manifest.
    Bandit(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON config document, or a manifest from a previous run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config's seed (`seed` for simulate, `master_seed` otherwise).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the number of processors. Outputs do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Short profile: at most 1000 ticks per run and at most 30 sweep replicates.
    #[arg(long)]
    pub fast: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Metric sampling cadence in ticks [default: 50].
    #[arg(long)]
    pub measure_every: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

/// Written next to every output set; enough to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub artifact_version: String,
    pub master_seed: u64,
    /// Fully resolved config, flags and profile already applied.
    pub config: Value,
    /// Simulate only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure_every: Option<u64>,
    pub outputs: Vec<OutputDigest>,
}

struct Source {
    config: Value,
    measure_every: Option<u64>,
}

fn read_source(path: Option<&Path>, subcommand: &str) -> Result<Source> {
    let Some(path) = path else {
        return Ok(Source { config: Value::Object(Default::default()), measure_every: None });
    };
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
    if value.get("subcommand").is_some() && value.get("outputs").is_some() {
        let manifest: RunManifest = serde_json::from_value(value)
            .map_err(|e| Error::ConfigParse(format!("{}: bad manifest: {e}", path.display())))?;
        if manifest.subcommand != subcommand {
            return Err(ConfigError::new(
                "subcommand",
                format!("manifest is for `{}`, not `{subcommand}`", manifest.subcommand),
            )
            .into());
        }
        return Ok(Source { config: manifest.config, measure_every: manifest.measure_every });
    }
    Ok(Source { config: value, measure_every: None })
}

fn parse_config<T: DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::ConfigParse(e.to_string()))
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn options(args: &CommonArgs) -> RunOptions {
    RunOptions { workers: args.workers.unwrap_or(0), progress: true }
}

fn digest(dir: &Path, files: &[&str]) -> Result<Vec<OutputDigest>> {
    files
        .iter()
        .map(|f| {
            let path = dir.join(f);
            let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
            Ok(OutputDigest { file: f.to_string(), sha256: hex::encode(Sha256::digest(&bytes)) })
        })
        .collect()
}

fn finish<C: Serialize>(
    dir: &Path,
    subcommand: &str,
    master_seed: u64,
    config: &C,
    measure_every: Option<u64>,
    files: &[&str],
) -> Result<RunManifest> {
    let manifest = RunManifest {
        subcommand: subcommand.to_string(),
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        master_seed,
        config: serde_json::to_value(config).expect("configs serialize"),
        measure_every,
        outputs: digest(dir, files)?,
    };
    let path = dir.join(MANIFEST_FILE);
    write_with(&path, |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        w.write_all(b"\n")
    })?;
    Ok(manifest)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<RunManifest> {
    let common = &args.common;
    let source = read_source(common.config.as_deref(), "simulate")?;
    let mut config: SimConfig = parse_config(source.config)?;
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if common.fast {
        config.max_ticks = config.max_ticks.min(1000);
    }
    let every = args.measure_every.or(source.measure_every).unwrap_or(DEFAULT_MEASURE_EVERY);
    if every == 0 {
        return Err(ConfigError::new("measure_every", "must be at least 1").into());
    }
    config.validate()?;
    prepare_out(&common.out)?;

    let (run, series) = measure_series(config.clone(), every)?;
    let events_path = common.out.join(EVENTS_FILE);
    write_with(&events_path, |w| write_events_csv(&run.events, w).map_err(std::io::Error::other))?;

    let mut header = vec!["tick".to_string()];
    header.extend(REPORT_COLUMNS.iter().map(|s| s.to_string()));
    let rows = series.iter().map(|(tick, m)| {
        let mut row = vec![tick.to_string()];
        row.extend(m.csv_row());
        row
    });
    write_csv(&common.out.join(TIMESERIES_FILE), &header, rows)?;

    finish(&common.out, "simulate", config.seed, &config, Some(every), &[EVENTS_FILE, TIMESERIES_FILE])
}

pub fn cmd_sweep(args: &CommonArgs) -> Result<RunManifest> {
    let source = read_source(args.config.as_deref(), "sweep")?;
    let mut config: SweepConfig = parse_config(source.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if args.fast {
        config = config.fast();
    }
    config.validate()?;
    prepare_out(&args.out)?;

    let records = run_sweep(&config, options(args))?;
    export_outcomes(&records, &config.eps_tols, &args.out.join(OUTCOMES_FILE))?;
    export_summary(&summarize(&records, &config.eps_tols), &args.out.join(SUMMARY_FILE))?;
    finish(&args.out, "sweep", config.master_seed, &config, None, &[OUTCOMES_FILE, SUMMARY_FILE])
}

pub fn cmd_bandit(args: &CommonArgs) -> Result<RunManifest> {
    let source = read_source(args.config.as_deref(), "bandit")?;
    let mut config: BanditConfig = parse_config(source.config)?;
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if args.fast {
        config.episode.max_ticks = config.episode.max_ticks.min(1000);
    }
    config.validate()?;
    prepare_out(&args.out)?;

    let outcome = run_bandit(&config, options(args))?;
    export_rewards(&outcome, &args.out.join(BANDIT_REWARD_FILE))?;
    export_actions(&outcome, &args.out.join(BANDIT_ACTIONS_FILE))?;
    finish(&args.out, "bandit", config.master_seed, &config, None, &[BANDIT_REWARD_FILE, BANDIT_ACTIONS_FILE])
}

pub fn run(cli: &Cli) -> Result<RunManifest> {
    match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bandit(a) => cmd_bandit(a),
    }
}

pub fn exit_code(err: &Error) -> u8 {
    if err.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_IO
    }
}

/// Parses `args` (including the program name) and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(_) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
