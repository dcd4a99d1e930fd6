use rand::Rng;

use super::world::{Cell, WorldGrid, MOORE};
use super::{Civilian, Cop, CopRule, Group, SimConfig};
use crate::error::ConfigError;
use crate::justice::{adjudicate, ArrestEvent};
use crate::seed::{rng_from_seed, SimRng};

/// A cop and the civilian it arrested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArrestPair {
    pub cop: u32,
    pub civilian: u32,
}

/// Complete state of one run. Owns its random stream, so a state is a
/// self-contained, `Send` unit of work.
#[derive(Debug, Clone)]
pub struct SimState {
    pub config: SimConfig,
    pub grid: WorldGrid,
    /// Indexed by civilian id: ids `0..n` are G1, `n..2n` are G2.
    pub civilians: Vec<Civilian>,
    pub cops: Vec<Cop>,
    /// Number of completed ticks.
    pub tick: u64,
    rng: SimRng,
}

/// Output of [`run_sim`].
#[derive(Debug, Clone)]
pub struct SimRun {
    pub events: Vec<ArrestEvent>,
    pub state: SimState,
}

fn random_cell_in<R: Rng>(rng: &mut R, cols: std::ops::Range<usize>, height: usize) -> Cell {
    let x = rng.random_range(cols);
    let y = rng.random_range(0..height);
    Cell::new(x, y)
}

impl SimState {
    /// Places civilians uniformly in their regions and cops according to `cop_bias`.
    pub fn new(config: SimConfig) -> Result<Self, ConfigError> {
        config.validate()?;
        let mut rng = rng_from_seed(config.seed);
        let grid = WorldGrid::new(config.grid_width, config.grid_height);
        let h = config.grid_height;

        let mut civilians = Vec::with_capacity(2 * config.n_per_group);
        for group in Group::ALL {
            let cols = grid.region_columns(group.region());
            for _ in 0..config.n_per_group {
                let id = civilians.len() as u32;
                let pos = random_cell_in(&mut rng, cols.clone(), h);
                civilians.push(Civilian::new(id, group, pos));
            }
        }

        let in_region1 = config.cops_in_region1();
        let cops = (0..config.n_cops)
            .map(|i| {
                let region = if i < in_region1 { Group::G1 } else { Group::G2 }.region();
                let pos = random_cell_in(&mut rng, grid.region_columns(region), h);
                Cop { id: i as u32, pos }
            })
            .collect();

        Ok(Self { config, grid, civilians, cops, tick: 0, rng })
    }

    pub fn is_finished(&self) -> bool {
        self.tick >= self.config.max_ticks
    }

    /// Moves every civilian to a random in-region Moore neighbor, then draws crimes.
    pub fn step_civilians(&mut self) {
        let mut options = [Cell::new(0, 0); 8];
        for c in &mut self.civilians {
            c.crime_flag = false;
            let region = c.group.region();
            let mut k = 0;
            for n in self.grid.neighbors(c.pos) {
                if self.grid.region(n) == region {
                    options[k] = n;
                    k += 1;
                }
            }
            if k > 0 {
                c.pos = options[self.rng.random_range(0..k)];
            }
        }
        let rate = self.config.crime_rate;
        for c in &mut self.civilians {
            c.crime_flag = self.rng.random_bool(rate);
        }
    }

    fn stigma_move(&mut self, from: Cell) -> Cell {
        let mut best: Vec<Cell> = Vec::with_capacity(8);
        let mut best_value = f64::NEG_INFINITY;
        for n in self.grid.neighbors(from) {
            let s = self.grid.stigma(n);
            if s > best_value {
                best_value = s;
                best.clear();
                best.push(n);
            } else if s == best_value {
                best.push(n);
            }
        }
        match best.len() {
            0 => from,
            1 => best[0],
            k => best[self.rng.random_range(0..k)],
        }
    }

    fn random_move(&mut self, from: Cell) -> Cell {
        let dir = MOORE[self.rng.random_range(0..MOORE.len())];
        let steps = if self.rng.random_bool(self.config.long_move_prob) { self.config.long_move_len } else { 1 };
        self.grid.offset_clamped(from, dir, steps)
    }

    /// Moves every cop once according to `cop_rule`. Cops ignore region boundaries.
    pub fn step_cops(&mut self) {
        let theta = self.config.stigma_follow;
        for i in 0..self.cops.len() {
            let mut pos = self.cops[i].pos;
            let follow = self.rng.random_bool(theta);
            match self.config.cop_rule {
                CopRule::Exclusive => {
                    pos = if follow { self.stigma_move(pos) } else { self.random_move(pos) };
                }
                CopRule::Sequential => {
                    if follow {
                        pos = self.stigma_move(pos);
                    }
                    pos = self.random_move(pos);
                }
            }
            self.cops[i].pos = pos;
        }
    }

    /// Each cop, in id order, tries to arrest every crime-flagged civilian within
    /// Chebyshev distance 1. A civilian is arrested at most once per tick and an
    /// arrest consumes its crime flag.
    pub fn sweep_arrests(&mut self) -> Vec<ArrestPair> {
        let flagged: Vec<usize> = (0..self.civilians.len()).filter(|&i| self.civilians[i].crime_flag).collect();
        let mut pairs = Vec::new();
        if flagged.is_empty() {
            return pairs;
        }
        let rate = self.config.arrest_rate;
        for cop in &self.cops {
            for &ci in &flagged {
                let civ = &mut self.civilians[ci];
                if civ.crime_flag && civ.pos.chebyshev(cop.pos) <= 1 && self.rng.random_bool(rate) {
                    civ.crime_flag = false;
                    pairs.push(ArrestPair { cop: cop.id, civilian: civ.id });
                }
            }
        }
        pairs
    }

    /// Advances one tick and returns the arrest events it produced.
    pub fn step(&mut self) -> Vec<ArrestEvent> {
        self.tick += 1;
        self.step_civilians();
        self.step_cops();
        let pairs = self.sweep_arrests();
        let classifier = self.config.classifier;
        let r0 = self.config.recidivism_rate;
        let (center, neighbor) = (self.config.stigma_bump_center, self.config.stigma_bump_neighbor);
        let mut events = Vec::with_capacity(pairs.len());
        for pair in pairs {
            let agent = &mut self.civilians[pair.civilian as usize];
            let (judged_positive, recidivated) = adjudicate(agent, &classifier, r0, &mut self.rng);
            let cell = agent.pos;
            events.push(ArrestEvent {
                tick: self.tick,
                agent_id: agent.id,
                group: agent.group,
                cell,
                judged_positive,
                recidivated,
            });
            self.grid.bump_stigma(cell, center, neighbor);
        }
        debug_assert!(self.civilians.iter().all(|c| self.grid.region(c.pos) == c.group.region()));
        events
    }

    /// Runs to `max_ticks`, calling `observe` after every tick with the state and the full log so far.
    pub fn run_observed<F>(&mut self, events: &mut Vec<ArrestEvent>, mut observe: F)
    where
        F: FnMut(&SimState, &[ArrestEvent]),
    {
        while !self.is_finished() {
            let new = self.step();
            events.extend(new);
            observe(self, events);
        }
    }
}

/// Runs a full simulation: `max_ticks` iterations of civilian moves, cop moves,
/// arrests, adjudication and stigma bumps.
pub fn run_sim(config: SimConfig) -> Result<SimRun, ConfigError> {
    let mut state = SimState::new(config)?;
    let mut events = Vec::new();
    state.run_observed(&mut events, |_, _| {});
    Ok(SimRun { events, state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::Region;

    fn small(seed: u64) -> SimConfig {
        SimConfig { max_ticks: 300, seed, ..Default::default() }
    }

    #[test]
    fn initial_placement() {
        let s = SimState::new(SimConfig { n_cops: 10, cop_bias: 0.8, ..Default::default() }).unwrap();
        let r1 = s.cops.iter().filter(|c| s.grid.region(c.pos) == Region::One).count();
        assert_eq!(r1, 8);
        for c in &s.civilians {
            assert_eq!(s.grid.region(c.pos), c.group.region());
        }
        assert_eq!(s.civilians.len(), 200);
        assert!(s.grid.stigma_field().iter().all(|&v| v == 0.0));
        assert_eq!(s.tick, 0);

        let s = SimState::new(SimConfig { n_cops: 10, cop_bias: 0.5, ..Default::default() }).unwrap();
        assert_eq!(s.cops.iter().filter(|c| s.grid.region(c.pos) == Region::One).count(), 5);
        let s = SimState::new(SimConfig { n_cops: 4, cop_bias: 1.0, ..Default::default() }).unwrap();
        assert_eq!(s.cops.iter().filter(|c| s.grid.region(c.pos) == Region::Two).count(), 0);
    }

    #[test]
    fn invalid_config_rejected() {
        let err = SimState::new(SimConfig { grid_width: 7, ..Default::default() }).unwrap_err();
        assert_eq!(err.field, "grid_width");
    }

    #[test]
    fn boundary_civilian_stays_in_region() {
        let mut s =
            SimState::new(SimConfig { grid_width: 4, grid_height: 3, n_per_group: 5, ..Default::default() }).unwrap();
        for c in &mut s.civilians {
            c.pos = if c.group == Group::G1 { Cell::new(1, 1) } else { Cell::new(2, 1) };
        }
        for _ in 0..200 {
            s.step_civilians();
            for c in &s.civilians {
                assert_eq!(s.grid.region(c.pos), c.group.region());
                assert!(c.pos.x < 4 && c.pos.y < 3);
            }
        }
    }

    #[test]
    fn civilian_moves_every_tick() {
        let mut s = SimState::new(small(3)).unwrap();
        let before: Vec<Cell> = s.civilians.iter().map(|c| c.pos).collect();
        s.step_civilians();
        for (c, b) in s.civilians.iter().zip(before) {
            assert_eq!(c.pos.chebyshev(b), 1);
        }
    }

    #[test]
    fn zero_crime_rate_no_flags_no_arrests() {
        let run = run_sim(SimConfig { crime_rate: 0.0, ..small(4) }).unwrap();
        assert!(run.events.is_empty());
        assert!(run.state.civilians.iter().all(|c| !c.crime_flag && c.arrest_count == 0));
    }

    #[test]
    fn crime_draw_count_matches_binomial() {
        let mut s = SimState::new(SimConfig { max_ticks: 5000, ..Default::default() }).unwrap();
        let mut crimes = 0u64;
        for _ in 0..5000 {
            s.step_civilians();
            crimes += s.civilians.iter().filter(|c| c.crime_flag).count() as u64;
        }
        let (n, p): (f64, f64) = (200.0 * 5000.0, 0.01);
        let sigma = (n * p * (1.0 - p)).sqrt();
        assert!((crimes as f64 - n * p).abs() < 3.0 * sigma, "crimes = {crimes}");
    }

    #[test]
    fn stigma_move_takes_unique_argmax() {
        let mut s = SimState::new(SimConfig { stigma_follow: 1.0, n_cops: 1, ..small(5) }).unwrap();
        for trial in 0..50 {
            s.grid = WorldGrid::new(50, 50);
            s.cops[0].pos = Cell::new(10, 10);
            let target = s.grid.neighbors(Cell::new(10, 10)).nth(trial % 8).unwrap();
            // A single bump with a vanishing neighbor share isolates the target.
            s.grid.bump_stigma(target, 2.0, 1e-9);
            let expected = target;
            s.step_cops();
            assert_eq!(s.cops[0].pos, expected);
        }
    }

    #[test]
    fn stigma_move_ties_are_uniform() {
        let mut s = SimState::new(SimConfig { stigma_follow: 1.0, n_cops: 1, ..small(6) }).unwrap();
        let mut counts = std::collections::HashMap::new();
        let n = 8000;
        for _ in 0..n {
            s.cops[0].pos = Cell::new(20, 20);
            s.step_cops();
            assert_eq!(s.cops[0].pos.chebyshev(Cell::new(20, 20)), 1);
            *counts.entry(s.cops[0].pos).or_insert(0u32) += 1;
        }
        assert_eq!(counts.len(), 8);
        // p = 1/8, 4 sigma band on 8000 draws.
        let sigma = (n as f64 * 0.125 * 0.875).sqrt();
        for &c in counts.values() {
            assert!((c as f64 - 1000.0).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn random_move_ignores_stigma_and_regions() {
        let mut s =
            SimState::new(SimConfig { stigma_follow: 0.0, n_cops: 1, long_move_prob: 0.0, ..small(7) }).unwrap();
        s.grid.bump_stigma(Cell::new(25, 26), 100.0, 1.0);
        let mut hit = 0;
        let mut crossed = false;
        for _ in 0..4000 {
            s.cops[0].pos = Cell::new(24, 25);
            s.step_cops();
            hit += (s.cops[0].pos == Cell::new(25, 26)) as u32;
            crossed |= s.cops[0].pos.x == 25;
        }
        assert!(crossed);
        assert!(hit > 350 && hit < 650, "hit = {hit}");
    }

    #[test]
    fn long_move_and_clamp() {
        let mut s = SimState::new(SimConfig {
            stigma_follow: 0.0,
            n_cops: 1,
            long_move_prob: 1.0,
            long_move_len: 3,
            ..small(8)
        })
        .unwrap();
        for _ in 0..200 {
            s.cops[0].pos = Cell::new(10, 10);
            s.step_cops();
            assert_eq!(s.cops[0].pos.chebyshev(Cell::new(10, 10)), 3);
            s.cops[0].pos = Cell::new(0, 0);
            s.step_cops();
            let p = s.cops[0].pos;
            assert!(p.x < 50 && p.y < 50);
        }
    }

    fn arrest_fixture(n_cops: usize, arrest_rate: f64) -> SimState {
        let mut s = SimState::new(SimConfig { n_per_group: 1, n_cops, arrest_rate, ..small(9) }).unwrap();
        s.civilians[0].pos = Cell::new(10, 10);
        s.civilians[0].crime_flag = true;
        s.civilians[1].pos = Cell::new(40, 40);
        for (i, cop) in s.cops.iter_mut().enumerate() {
            cop.pos = Cell::new(9 + i, 11);
        }
        s
    }

    #[test]
    fn adjacent_cop_arrests_once() {
        let mut s = arrest_fixture(1, 1.0);
        let pairs = s.sweep_arrests();
        assert_eq!(pairs, vec![ArrestPair { cop: 0, civilian: 0 }]);
        assert!(!s.civilians[0].crime_flag);
    }

    #[test]
    fn multiple_cops_dedupe() {
        let mut s = arrest_fixture(3, 1.0);
        assert_eq!(s.sweep_arrests().len(), 1);
    }

    #[test]
    fn zero_arrest_rate_never_arrests() {
        let mut s = arrest_fixture(3, 0.0);
        assert!(s.sweep_arrests().is_empty());
        let run = run_sim(SimConfig { arrest_rate: 0.0, ..small(10) }).unwrap();
        assert!(run.events.is_empty());
    }

    #[test]
    fn unflagged_or_distant_not_arrested() {
        let mut s = arrest_fixture(1, 1.0);
        s.civilians[0].crime_flag = false;
        assert!(s.sweep_arrests().is_empty());
        let mut s = arrest_fixture(1, 1.0);
        s.cops[0].pos = Cell::new(12, 10);
        assert!(s.sweep_arrests().is_empty());
    }

    #[test]
    fn empty_run() {
        let cfg = SimConfig { max_ticks: 0, ..small(11) };
        let run = run_sim(cfg.clone()).unwrap();
        let init = SimState::new(cfg).unwrap();
        assert!(run.events.is_empty());
        assert_eq!(run.state.civilians, init.civilians);
        assert_eq!(run.state.cops, init.cops);
        assert_eq!(run.state.tick, 0);
    }

    #[test]
    fn deterministic_event_log() {
        let a = run_sim(small(12)).unwrap();
        let b = run_sim(small(12)).unwrap();
        assert_eq!(a.events, b.events);
        assert_eq!(a.state.grid, b.state.grid);
        let c = run_sim(small(13)).unwrap();
        assert_ne!(a.state.civilians, c.state.civilians);
    }

    #[test]
    fn events_are_at_stigma_bumps() {
        let run = run_sim(SimConfig { max_ticks: 2000, ..small(14) }).unwrap();
        assert!(!run.events.is_empty());
        let centers: f64 = run.events.len() as f64 * 1.0;
        let total: f64 = run.state.grid.stigma_field().iter().sum();
        assert!(total >= centers + 0.5 * 3.0 * run.events.len() as f64);
        for e in &run.events {
            assert!(run.state.grid.stigma(e.cell) >= 1.0);
            assert_eq!(run.state.grid.region(e.cell), e.group.region());
        }
    }

    #[test]
    fn sequential_rule_runs() {
        let run = run_sim(SimConfig { cop_rule: CopRule::Sequential, stigma_follow: 1.0, ..small(15) }).unwrap();
        assert_eq!(run.state.tick, 300);
    }
}
