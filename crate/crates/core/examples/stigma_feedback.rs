//! How the stigma loop builds up: disparity measures sampled over time with
//! and without cops following stigma.
//!
//! ```text
//! cargo run --release --example stigma_feedback
//! ```

use fairsim::metrics::measure_series;
use fairsim::SimConfig;

fn main() -> fairsim::Result<()> {
    for theta in [0.0, 1.0] {
        let config = SimConfig { stigma_follow: theta, cop_bias: 0.8, seed: 7, ..SimConfig::default() };
        let (run, series) = measure_series(config, 500)?;
        println!("theta = {theta}");
        println!("  {:>5}  {:>7}  {:>7}  {:>7}  {:>7}", "tick", "tau_A", "tau_P", "tau1_P", "G1/G2");
        for (tick, m) in &series {
            let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.3}"));
            println!("  {tick:>5}  {:>7}  {:>7}  {:>7}  {:>7}", f(m.tau_a), f(m.tau_p), f(m.tau1_p), f(m.arrest_ratio));
        }

        let hottest = run.state.grid.stigma_field().iter().cloned().fold(0.0, f64::max);
        let total: f64 = run.state.grid.stigma_field().iter().sum();
        println!("  stigma: total {total}, hottest cell {hottest}\n");
    }
    Ok(())
}
