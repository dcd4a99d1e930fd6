//! Intervention sweeps.
//!
//! Each `(theta, q0)` grid cell fixes the stigma-following probability and the
//! initial cop split, then runs independent replicates. The spread of the
//! final-tick outcomes across replicates estimates the outcome distribution
//! under that intervention.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Error, Result};
use crate::metrics::{fairness_indicator, report, MetricsReport, Variant};
use crate::output::{fmt_f64, fmt_opt, write_csv};
use crate::seed::derive_seed;
use crate::sim::{run_sim, SimConfig};

fn default_replicates() -> usize {
    60
}

fn default_eps_tols() -> Vec<f64> {
    vec![0.1, 0.5, 1.0, 2.0]
}

/// Sweep over the `(theta, q0)` grid. `theta_grid` and `q0_grid` are required in JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub theta_grid: Vec<f64>,
    pub q0_grid: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    /// Parameters shared by every run; `stigma_follow`, `cop_bias` and `seed` are overridden per run.
    #[serde(default)]
    pub base: SimConfig,
    #[serde(default = "default_eps_tols")]
    pub eps_tols: Vec<f64>,
    #[serde(default)]
    pub master_seed: u64,
}

impl SweepConfig {
    /// Five `theta` values by two `q0` values with 60 replicates of 5000 ticks.
    pub fn standard_grid() -> Self {
        Self {
            theta_grid: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            q0_grid: vec![0.5, 0.8],
            replicates: default_replicates(),
            base: SimConfig::default(),
            eps_tols: default_eps_tols(),
            master_seed: 0,
        }
    }

    /// The CI profile: at most 30 replicates of at most 1000 ticks.
    pub fn fast(mut self) -> Self {
        self.replicates = self.replicates.min(30);
        self.base.max_ticks = self.base.max_ticks.min(1000);
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.theta_grid.is_empty() {
            return Err(ConfigError::new("theta_grid", "must not be empty"));
        }
        if self.q0_grid.is_empty() {
            return Err(ConfigError::new("q0_grid", "must not be empty"));
        }
        if self.replicates < 1 {
            return Err(ConfigError::new("replicates", "must be at least 1"));
        }
        if let Some(t) = self.eps_tols.iter().find(|t| !(t.is_finite() && **t > 0.0)) {
            return Err(ConfigError::new("eps_tols", format!("{t} is not a positive tolerance")));
        }
        self.base.validate().map_err(|e| ConfigError::new(format!("base.{}", e.field), e.reason))
    }

    /// Per-run config for one grid cell and replicate.
    pub fn run_config(&self, theta_idx: usize, q0_idx: usize, replicate: usize) -> SimConfig {
        SimConfig {
            stigma_follow: self.theta_grid[theta_idx],
            cop_bias: self.q0_grid[q0_idx],
            seed: derive_seed(self.master_seed, &[theta_idx as u64, q0_idx as u64, replicate as u64]),
            ..self.base.clone()
        }
    }

    pub fn len(&self) -> usize {
        self.theta_grid.len() * self.q0_grid.len() * self.replicates
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Final-tick outcome of one replicate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub theta: f64,
    pub q0: f64,
    pub replicate: usize,
    pub seed: u64,
    pub report: MetricsReport,
    /// Indicator per tolerance, arrested variant, in `eps_tols` order.
    pub y_a: Vec<u8>,
    /// Indicator per tolerance, population variant.
    pub y_p: Vec<u8>,
}

impl SweepRecord {
    pub fn indicators(&self, variant: Variant) -> &[u8] {
        match variant {
            Variant::Arrested => &self.y_a,
            Variant::Population => &self.y_p,
        }
    }
}

/// Execution options shared by the sweep and bandit harnesses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RunOptions {
    /// Worker threads; 0 means one per available processor.
    pub workers: usize,
    /// Report progress on standard error.
    pub progress: bool,
}

impl RunOptions {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers, progress: false }
    }

    pub(crate) fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if self.workers > 0 {
            builder = builder.num_threads(self.workers);
        }
        match builder.build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

pub(crate) struct Progress {
    label: &'static str,
    total: usize,
    done: AtomicUsize,
    enabled: bool,
}

impl Progress {
    pub(crate) fn new(label: &'static str, total: usize, enabled: bool) -> Self {
        Self { label, total, done: AtomicUsize::new(0), enabled }
    }

    pub(crate) fn tick(&self) {
        let done = self.done.fetch_add(1, Ordering::Relaxed) + 1;
        let step = (self.total / 20).max(1);
        if self.enabled && (done.is_multiple_of(step) || done == self.total) {
            eprintln!("{}: {done}/{}", self.label, self.total);
        }
    }
}

fn run_one(config: &SweepConfig, ti: usize, qi: usize, replicate: usize) -> Result<SweepRecord> {
    let sim = config.run_config(ti, qi, replicate);
    let seed = sim.seed;
    let run = run_sim(sim)?;
    let report = report(&run.events, &run.state.civilians)?;
    let ind = |v| config.eps_tols.iter().map(|&t| fairness_indicator(report.tau1(v), t)).collect();
    Ok(SweepRecord {
        theta: config.theta_grid[ti],
        q0: config.q0_grid[qi],
        replicate,
        seed,
        y_a: ind(Variant::Arrested),
        y_p: ind(Variant::Population),
        report,
    })
}

/// Runs every `(theta, q0, replicate)` job. Records come back ordered by
/// `(theta, q0, replicate)` whatever the worker count.
pub fn run_sweep(config: &SweepConfig, opts: RunOptions) -> Result<Vec<SweepRecord>> {
    config.validate()?;
    for ti in 0..config.theta_grid.len() {
        for qi in 0..config.q0_grid.len() {
            config.run_config(ti, qi, 0).validate().map_err(|e| Error::SweepCell {
                theta: config.theta_grid[ti],
                q0: config.q0_grid[qi],
                source: Box::new(e.into()),
            })?;
        }
    }
    let (nt, nq, nr) = (config.theta_grid.len(), config.q0_grid.len(), config.replicates);
    let progress = Progress::new("sweep", config.len(), opts.progress);
    opts.install(|| {
        (0..nt * nq * nr)
            .into_par_iter()
            .map(|job| {
                let (ti, qi, r) = (job / (nq * nr), (job / nr) % nq, job % nr);
                let rec = run_one(config, ti, qi, r).map_err(|e| Error::SweepCell {
                    theta: config.theta_grid[ti],
                    q0: config.q0_grid[qi],
                    source: Box::new(e),
                });
                progress.tick();
                rec
            })
            .collect()
    })
}

/// Mean, sample standard deviation and standard error over the defined values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub n: usize,
    pub nulls: usize,
    pub mean: Option<f64>,
    pub sd: Option<f64>,
    pub se: Option<f64>,
}

impl Stat {
    pub fn of(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let mut defined = Vec::new();
        let mut nulls = 0;
        for v in values {
            match v {
                Some(x) => defined.push(x),
                None => nulls += 1,
            }
        }
        let n = defined.len();
        let mean = (n > 0).then(|| defined.iter().sum::<f64>() / n as f64);
        let sd = match (mean, n) {
            (Some(m), n) if n > 1 => {
                Some((defined.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt())
            }
            _ => None,
        };
        Self { n, nulls, mean, sd, se: sd.map(|s| s / (n as f64).sqrt()) }
    }
}

/// Summary of one `(theta, q0)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub theta: f64,
    pub q0: f64,
    pub replicates: usize,
    pub tau1_a: Stat,
    pub tau1_p: Stat,
    pub tau_a: Stat,
    pub tau_p: Stat,
    pub arrest_ratio: Stat,
    /// Fraction of all replicates (undefined counted as unfair) with `Y = 1`, per tolerance.
    pub fair_a: Vec<f64>,
    pub fair_p: Vec<f64>,
}

impl CellSummary {
    pub fn tau1(&self, variant: Variant) -> &Stat {
        match variant {
            Variant::Arrested => &self.tau1_a,
            Variant::Population => &self.tau1_p,
        }
    }

    pub fn fair(&self, variant: Variant) -> &[f64] {
        match variant {
            Variant::Arrested => &self.fair_a,
            Variant::Population => &self.fair_p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub eps_tols: Vec<f64>,
    /// In order of first appearance in the records.
    pub cells: Vec<CellSummary>,
}

impl SweepSummary {
    pub fn cell(&self, theta: f64, q0: f64) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.theta == theta && c.q0 == q0)
    }
}

fn fair_fraction(records: &[&SweepRecord], eps_tol: f64, variant: Variant) -> f64 {
    let fair = records.iter().filter(|r| fairness_indicator(r.report.tau1(variant), eps_tol) == 1).count();
    fair as f64 / records.len() as f64
}

/// Per-cell statistics. Indicators are recomputed from the recorded `tau1`, so
/// `eps_tols` need not match the sweep's tolerances.
pub fn summarize(records: &[SweepRecord], eps_tols: &[f64]) -> SweepSummary {
    let mut keys: Vec<(f64, f64)> = Vec::new();
    for r in records {
        if !keys.iter().any(|&(t, q)| t == r.theta && q == r.q0) {
            keys.push((r.theta, r.q0));
        }
    }
    let cells = keys
        .into_iter()
        .map(|(theta, q0)| {
            let cell: Vec<&SweepRecord> = records.iter().filter(|r| r.theta == theta && r.q0 == q0).collect();
            let stat = |f: fn(&MetricsReport) -> Option<f64>| Stat::of(cell.iter().map(|r| f(&r.report)));
            CellSummary {
                theta,
                q0,
                replicates: cell.len(),
                tau1_a: stat(|m| m.tau1_a),
                tau1_p: stat(|m| m.tau1_p),
                tau_a: stat(|m| m.tau_a),
                tau_p: stat(|m| m.tau_p),
                arrest_ratio: stat(|m| m.arrest_ratio),
                fair_a: eps_tols.iter().map(|&t| fair_fraction(&cell, t, Variant::Arrested)).collect(),
                fair_p: eps_tols.iter().map(|&t| fair_fraction(&cell, t, Variant::Population)).collect(),
            }
        })
        .collect();
    SweepSummary { eps_tols: eps_tols.to_vec(), cells }
}

pub const OUTCOME_BASE_COLUMNS: [&str; 9] =
    ["theta", "q0", "replicate", "seed", "tau1_a", "tau1_p", "tau_a", "tau_p", "arrest_ratio"];

/// Outcome CSV header: the nine base columns, then `Y_a_<tol>,Y_p_<tol>` per tolerance.
pub fn outcome_header(eps_tols: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = OUTCOME_BASE_COLUMNS.iter().map(|s| s.to_string()).collect();
    for t in eps_tols {
        h.push(format!("Y_a_{}", fmt_f64(*t)));
        h.push(format!("Y_p_{}", fmt_f64(*t)));
    }
    h
}

pub fn outcome_row(r: &SweepRecord) -> Vec<String> {
    let m = &r.report;
    let mut row = vec![
        fmt_f64(r.theta),
        fmt_f64(r.q0),
        r.replicate.to_string(),
        r.seed.to_string(),
        fmt_opt(m.tau1_a),
        fmt_opt(m.tau1_p),
        fmt_opt(m.tau_a),
        fmt_opt(m.tau_p),
        fmt_opt(m.arrest_ratio),
    ];
    for (a, p) in r.y_a.iter().zip(&r.y_p) {
        row.push(a.to_string());
        row.push(p.to_string());
    }
    row
}

/// Writes one row per record; undefined values become empty fields.
pub fn export_outcomes(records: &[SweepRecord], eps_tols: &[f64], path: &Path) -> Result<()> {
    write_csv(path, &outcome_header(eps_tols), records.iter().map(outcome_row))
}

/// Summary CSV header.
pub fn summary_header(eps_tols: &[f64]) -> Vec<String> {
    let mut h: Vec<String> = vec!["theta".into(), "q0".into(), "replicates".into()];
    for name in ["tau1_a", "tau1_p", "tau_a", "tau_p", "arrest_ratio"] {
        for stat in ["mean", "sd", "se", "nulls"] {
            h.push(format!("{name}_{stat}"));
        }
    }
    for t in eps_tols {
        h.push(format!("fair_a_{}", fmt_f64(*t)));
        h.push(format!("fair_p_{}", fmt_f64(*t)));
    }
    h
}

pub fn export_summary(summary: &SweepSummary, path: &Path) -> Result<()> {
    let rows = summary.cells.iter().map(|c| {
        let mut row = vec![fmt_f64(c.theta), fmt_f64(c.q0), c.replicates.to_string()];
        for s in [&c.tau1_a, &c.tau1_p, &c.tau_a, &c.tau_p, &c.arrest_ratio] {
            row.extend([fmt_opt(s.mean), fmt_opt(s.sd), fmt_opt(s.se), s.nulls.to_string()]);
        }
        for (a, p) in c.fair_a.iter().zip(&c.fair_p) {
            row.push(fmt_f64(*a));
            row.push(fmt_f64(*p));
        }
        row
    });
    write_csv(path, &summary_header(&summary.eps_tols), rows)
}
