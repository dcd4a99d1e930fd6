use std::collections::HashSet;

use fairsim::metrics::{identity_check, report, tabulate, Variant};
use fairsim::sim::{run_sim, Group, SimConfig, SimState};

fn cfg(seed: u64) -> SimConfig {
    SimConfig { seed, ..Default::default() }
}

#[test]
fn per_tick_invariants() {
    for theta in [0.0, 0.5, 1.0] {
        let mut s = SimState::new(SimConfig { stigma_follow: theta, max_ticks: 1500, ..cfg(3) }).unwrap();
        let n_civ = s.civilians.len();
        let n_cops = s.cops.len();
        let mut prev = s.grid.stigma_field().to_vec();
        let mut n_events = 0;
        while !s.is_finished() {
            s.step_civilians();
            s.step_cops();
            let flagged: HashSet<u32> = s.civilians.iter().filter(|c| c.crime_flag).map(|c| c.id).collect();
            let cops = s.cops.clone();
            let pairs = s.sweep_arrests();
            let mut seen = HashSet::new();
            for p in &pairs {
                // arrests require a crime this tick and an adjacent cop, at most once per civilian
                assert!(flagged.contains(&p.civilian));
                assert!(seen.insert(p.civilian));
                let civ = &s.civilians[p.civilian as usize];
                assert!(civ.pos.chebyshev(cops[p.cop as usize].pos) <= 1);
                s.grid.bump_stigma(civ.pos, 1.0, 0.5);
            }
            n_events += pairs.len();
            s.tick += 1;

            for c in &s.civilians {
                assert_eq!(s.grid.region(c.pos), c.group.region());
            }
            for c in &s.cops {
                assert!(s.grid.contains(c.pos));
            }
            assert_eq!(s.civilians.len(), n_civ);
            assert_eq!(s.cops.len(), n_cops);
            let now = s.grid.stigma_field();
            assert!(now.iter().zip(&prev).all(|(a, b)| a >= b));
            prev = now.to_vec();
        }
        assert!(n_events > 0);
    }
}

#[test]
fn full_step_keeps_invariants() {
    let mut s = SimState::new(SimConfig { stigma_follow: 0.75, max_ticks: 2000, ..cfg(4) }).unwrap();
    let mut prev = s.grid.stigma_field().to_vec();
    let mut log = Vec::new();
    while !s.is_finished() {
        let evs = s.step();
        for e in &evs {
            assert_eq!(e.tick, s.tick);
            assert_eq!(s.civilians[e.agent_id as usize].group, e.group);
        }
        log.extend(evs);
        assert!(s.grid.stigma_field().iter().zip(&prev).all(|(a, b)| a >= b));
        prev = s.grid.stigma_field().to_vec();
    }
    let arrests: u32 = s.civilians.iter().map(|c| c.arrest_count).sum();
    assert_eq!(arrests as usize, log.len());
}

#[test]
fn arrests_in_both_regions_without_bias() {
    for seed in 0..30 {
        let run = run_sim(SimConfig { cop_bias: 0.5, stigma_follow: 0.0, ..cfg(seed) }).unwrap();
        let [g1, g2] = tabulate(&run.events, &run.state.civilians).unwrap();
        assert!(g1.arrests() >= 1 && g2.arrests() >= 1, "seed {seed}");
    }
}

#[test]
fn group_swap_symmetry() {
    let diffs: Vec<f64> = (0..60)
        .map(|seed| {
            let run =
                run_sim(SimConfig { cop_bias: 0.5, stigma_follow: 0.5, max_ticks: 2000, ..cfg(1000 + seed) }).unwrap();
            let g1 = run.events.iter().filter(|e| e.group == Group::G1).count() as f64;
            g1 - (run.events.len() as f64 - g1)
        })
        .collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 3.0 * sd / n.sqrt(), "mean {mean}, se {}", sd / n.sqrt());
}

#[test]
fn simulated_tables_satisfy_identity() {
    for seed in 0..10 {
        let run = run_sim(SimConfig { stigma_follow: seed as f64 / 10.0, max_ticks: 3000, ..cfg(seed) }).unwrap();
        for t in tabulate(&run.events, &run.state.civilians).unwrap() {
            for v in [Variant::Arrested, Variant::Population] {
                if let Ok(r) = identity_check(&t, v) {
                    assert!(r.abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn adjudication_independent_of_group() {
    // pooled 2x2x2 table over several runs: P(J), P(R) equal across groups within binomial noise
    let mut counts = [[0f64; 3]; 2];
    for seed in 0..20 {
        let run = run_sim(SimConfig { cop_bias: 0.8, ..cfg(seed) }).unwrap();
        for e in &run.events {
            let g = e.group.index();
            counts[g][0] += 1.0;
            counts[g][1] += f64::from(u8::from(e.judged_positive));
            counts[g][2] += f64::from(u8::from(e.recidivated));
        }
    }
    for (col, p) in [(1, 0.5), (2, 0.4)] {
        for g in &counts {
            let n = g[0];
            let band = 4.0 * (p * (1.0 - p) / n).sqrt();
            assert!((g[col] / n - p).abs() < band);
        }
    }
}

#[test]
fn arrested_metrics_converge_for_any_intervention() {
    // small world and long runs so every group logs at least 500 events
    for (i, (theta, q0)) in [(0.0, 0.5), (0.5, 0.8), (1.0, 0.8), (0.25, 0.5)].into_iter().enumerate() {
        let run = run_sim(SimConfig {
            grid_width: 24,
            grid_height: 24,
            max_ticks: 20_000,
            stigma_follow: theta,
            cop_bias: q0,
            ..cfg(40 + i as u64)
        })
        .unwrap();
        let m = report(&run.events, &run.state.civilians).unwrap();
        for g in [m.g1, m.g2] {
            assert!(g.arrests >= 500, "only {} events", g.arrests);
            assert!((g.ppv_a.unwrap() - 0.4).abs() < 0.07);
            assert!((g.fpr_a.unwrap() - 0.5).abs() < 0.07);
            assert!((g.fnr_a.unwrap() - 0.5).abs() < 0.07);
        }
    }
}

#[test]
fn deterministic_across_threads() {
    let handles: Vec<_> = (0..3).map(|_| std::thread::spawn(|| run_sim(cfg(77)).unwrap().events)).collect();
    let logs: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(logs.windows(2).all(|w| w[0] == w[1]));
}
