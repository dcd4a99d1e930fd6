//! Epsilon-greedy search over the stigma-following probability.
//!
//! Each action is a `theta` value. Pulling an action runs one fresh episode
//! with that `theta` and pays the fairness indicator of the episode's final
//! `tau1` outcome. Action values are plain running means of the rewards.

use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{ConfigError, Result};
use crate::experiments::{Progress, RunOptions};
use crate::metrics::{fairness_indicator, report, Variant};
use crate::output::{fmt_f64, fmt_opt, write_csv};
use crate::seed::{derive_seed, rng_from_seed};
use crate::sim::{run_sim, SimConfig};

/// Tag mixed into the master seed for the per-run action-selection stream.
const SELECTION_STREAM: u64 = 0x5E1E_C710_0000_0001;

fn default_epsilon() -> f64 {
    0.1
}
fn default_pulls() -> usize {
    200
}
fn default_runs() -> usize {
    30
}
fn default_eps_tol() -> f64 {
    1.0
}

/// Episode template: symmetric cop start, 1000 ticks.
pub fn default_episode() -> SimConfig {
    SimConfig { cop_bias: 0.5, max_ticks: 1000, ..SimConfig::default() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BanditConfig {
    /// Candidate `theta` values.
    pub actions: Vec<f64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_pulls")]
    pub pulls: usize,
    /// Independent bandit repetitions.
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_eps_tol")]
    pub eps_tol: f64,
    /// Which `tau1` outcome the reward is computed from.
    #[serde(default)]
    pub variant: Variant,
    #[serde(default)]
    pub master_seed: u64,
    /// Every field except `stigma_follow` and `seed` is used as given.
    /// Fields left out fall back to [`default_episode`], not [`SimConfig::default`].
    #[serde(default = "default_episode", deserialize_with = "episode_over_defaults")]
    pub episode: SimConfig,
}

fn episode_over_defaults<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<SimConfig, D::Error> {
    use serde::de::Error as _;
    let given = serde_json::Map::<String, serde_json::Value>::deserialize(d)?;
    let mut merged = match serde_json::to_value(default_episode()) {
        Ok(serde_json::Value::Object(m)) => m,
        _ => unreachable!("SimConfig serializes to an object"),
    };
    merged.extend(given);
    serde_json::from_value(serde_json::Value::Object(merged)).map_err(D::Error::custom)
}

impl BanditConfig {
    /// Five `theta` actions, `epsilon = 0.1`, `q0 = 0.5`, tolerance 1, 30 runs of 200 pulls.
    pub fn standard_setting() -> Self {
        Self {
            actions: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            epsilon: default_epsilon(),
            pulls: default_pulls(),
            runs: default_runs(),
            eps_tol: default_eps_tol(),
            variant: Variant::Population,
            master_seed: 0,
            episode: default_episode(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.actions.is_empty() {
            return Err(ConfigError::new("actions", "must not be empty"));
        }
        if let Some(a) = self.actions.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(ConfigError::new("actions", format!("{a} is not a probability in [0, 1]")));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(ConfigError::new("epsilon", format!("{} is not a probability in [0, 1]", self.epsilon)));
        }
        if self.pulls < 1 {
            return Err(ConfigError::new("pulls", "must be at least 1"));
        }
        if self.runs < 1 {
            return Err(ConfigError::new("runs", "must be at least 1"));
        }
        if !(self.eps_tol.is_finite() && self.eps_tol > 0.0) {
            return Err(ConfigError::new("eps_tol", "must be a positive tolerance"));
        }
        self.episode.validate().map_err(|e| ConfigError::new(format!("episode.{}", e.field), e.reason))
    }

    pub fn episode_seed(&self, run: usize, pull: usize) -> u64 {
        derive_seed(self.master_seed, &[run as u64, pull as u64])
    }
}

/// Action-value estimates for one bandit run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditState {
    pub values: Vec<f64>,
    pub counts: Vec<u64>,
    /// `(pull index, action index, reward)`
    pub history: Vec<(usize, usize, u8)>,
}

impl BanditState {
    pub fn new(n_actions: usize) -> Self {
        Self { values: vec![0.0; n_actions], counts: vec![0; n_actions], history: Vec::new() }
    }

    pub fn pulls(&self) -> usize {
        self.history.len()
    }

    /// Explores uniformly with probability `epsilon`, otherwise picks an argmax of
    /// the value estimates with ties broken uniformly.
    pub fn select_action<R: Rng + ?Sized>(&self, epsilon: f64, rng: &mut R) -> usize {
        let n = self.values.len();
        assert!(n > 0, "bandit needs at least one action");
        if rng.random_bool(epsilon) {
            return rng.random_range(0..n);
        }
        let best = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let ties: Vec<usize> = (0..n).filter(|&a| self.values[a] == best).collect();
        if ties.len() == 1 {
            ties[0]
        } else {
            ties[rng.random_range(0..ties.len())]
        }
    }

    /// Incremental mean update.
    pub fn update(&mut self, action: usize, reward: f64) {
        self.counts[action] += 1;
        self.values[action] += (reward - self.values[action]) / self.counts[action] as f64;
        self.history.push((self.history.len(), action, if reward > 0.0 { 1 } else { 0 }));
    }
}

/// Runs one episode at `theta` and returns its fairness indicator.
pub fn pull(theta: f64, episode: &SimConfig, eps_tol: f64, variant: Variant, seed: u64) -> Result<u8> {
    let cfg = SimConfig { stigma_follow: theta, seed, ..episode.clone() };
    let run = run_sim(cfg)?;
    let m = report(&run.events, &run.state.civilians)?;
    Ok(fairness_indicator(m.tau1(variant), eps_tol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditRun {
    pub run: usize,
    pub state: BanditState,
}

impl BanditRun {
    pub fn rewards(&self) -> impl Iterator<Item = u8> + '_ {
        self.state.history.iter().map(|h| h.2)
    }

    pub fn proportions(&self) -> Vec<f64> {
        let total = self.state.pulls() as f64;
        self.state.counts.iter().map(|&c| c as f64 / total).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditOutcome {
    pub actions: Vec<f64>,
    pub runs: Vec<BanditRun>,
    /// Mean reward across runs at each pull index.
    pub mean_reward: Vec<f64>,
    /// Standard error of that mean; `None` with a single run.
    pub se_reward: Vec<Option<f64>>,
    /// Fraction of all pulls, over all runs, that chose each action.
    pub proportions: Vec<f64>,
}

impl BanditOutcome {
    /// Mean reward over pull indices `range`.
    pub fn mean_reward_over(&self, range: std::ops::Range<usize>) -> f64 {
        let n = range.len() as f64;
        self.mean_reward[range].iter().sum::<f64>() / n
    }
}

fn run_one(config: &BanditConfig, run: usize, progress: &Progress) -> Result<BanditRun> {
    let mut rng = rng_from_seed(derive_seed(config.master_seed ^ SELECTION_STREAM, &[run as u64]));
    let mut state = BanditState::new(config.actions.len());
    for p in 0..config.pulls {
        let a = state.select_action(config.epsilon, &mut rng);
        let reward =
            pull(config.actions[a], &config.episode, config.eps_tol, config.variant, config.episode_seed(run, p))?;
        state.update(a, f64::from(reward));
        progress.tick();
    }
    Ok(BanditRun { run, state })
}

/// Runs `runs` independent bandits in parallel; pulls within a run are sequential.
pub fn run_bandit(config: &BanditConfig, opts: RunOptions) -> Result<BanditOutcome> {
    config.validate()?;
    let progress = Progress::new("bandit", config.runs * config.pulls, opts.progress);
    let runs: Vec<BanditRun> = opts
        .install(|| (0..config.runs).into_par_iter().map(|r| run_one(config, r, &progress)).collect::<Result<_>>())?;

    let n = runs.len() as f64;
    let mut mean_reward = Vec::with_capacity(config.pulls);
    let mut se_reward = Vec::with_capacity(config.pulls);
    for p in 0..config.pulls {
        let xs: Vec<f64> = runs.iter().map(|r| f64::from(r.state.history[p].2)).collect();
        let m = xs.iter().sum::<f64>() / n;
        mean_reward.push(m);
        se_reward.push((runs.len() > 1).then(|| {
            let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        }));
    }
    let total = (config.runs * config.pulls) as f64;
    let proportions =
        (0..config.actions.len()).map(|a| runs.iter().map(|r| r.state.counts[a]).sum::<u64>() as f64 / total).collect();
    Ok(BanditOutcome { actions: config.actions.clone(), runs, mean_reward, se_reward, proportions })
}

pub const REWARD_COLUMNS: [&str; 3] = ["pull", "mean_reward", "se"];
pub const ACTION_COLUMNS: [&str; 4] = ["scope", "theta", "count", "proportion"];

/// `bandit_reward.csv`: one row per pull index.
pub fn export_rewards(outcome: &BanditOutcome, path: &Path) -> Result<()> {
    let header: Vec<String> = REWARD_COLUMNS.iter().map(|s| s.to_string()).collect();
    let rows = outcome
        .mean_reward
        .iter()
        .zip(&outcome.se_reward)
        .enumerate()
        .map(|(p, (m, se))| vec![p.to_string(), fmt_f64(*m), fmt_opt(*se)]);
    write_csv(path, &header, rows)
}

/// `bandit_actions.csv`: one row per `(run, action)` with `scope` = run index,
/// followed by one `scope = aggregate` row per action.
pub fn export_actions(outcome: &BanditOutcome, path: &Path) -> Result<()> {
    let header: Vec<String> = ACTION_COLUMNS.iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for run in &outcome.runs {
        for (a, p) in run.proportions().into_iter().enumerate() {
            rows.push(vec![
                run.run.to_string(),
                fmt_f64(outcome.actions[a]),
                run.state.counts[a].to_string(),
                fmt_f64(p),
            ]);
        }
    }
    for (a, p) in outcome.proportions.iter().enumerate() {
        let count: u64 = outcome.runs.iter().map(|r| r.state.counts[a]).sum();
        rows.push(vec!["aggregate".into(), fmt_f64(outcome.actions[a]), count.to_string(), fmt_f64(*p)]);
    }
    write_csv(path, &header, rows)
}
