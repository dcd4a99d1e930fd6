//! Replicated runs over a (theta, q0) grid, summarized per cell and written as
//! `outcomes.csv` and `summary.csv`.
//!
//! ```text
//! cargo run --release --example intervention_sweep -- [out_dir] [replicates]
//! ```

use std::path::PathBuf;

use fairsim::experiments::{export_outcomes, export_summary, run_sweep, summarize, RunOptions, SweepConfig};
use fairsim::SimConfig;

fn main() -> fairsim::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "sweep-out".into()));
    let replicates = std::env::args().nth(2).map_or(10, |s| s.parse().expect("replicate count"));
    let config = SweepConfig {
        replicates,
        base: SimConfig { max_ticks: 2000, ..SimConfig::default() },
        ..SweepConfig::standard_grid()
    };
    config.validate()?;

    let records = run_sweep(&config, RunOptions { workers: 0, progress: true })?;
    let summary = summarize(&records, &config.eps_tols);

    println!(
        "{:>5} {:>4} {:>9} {:>9} {:>9} {:>7} {:>7}",
        "theta", "q0", "tau1_A", "tau1_P", "G1/G2", "fair_A", "fair_P"
    );
    let tol = config.eps_tols.iter().position(|&t| t == 1.0).unwrap();
    for c in &summary.cells {
        println!(
            "{:>5} {:>4} {:>9.3} {:>9.3} {:>9.3} {:>7.2} {:>7.2}",
            c.theta,
            c.q0,
            c.tau1_a.mean.unwrap_or(f64::NAN),
            c.tau1_p.mean.unwrap_or(f64::NAN),
            c.arrest_ratio.mean.unwrap_or(f64::NAN),
            c.fair_a[tol],
            c.fair_p[tol],
        );
    }

    std::fs::create_dir_all(&out).map_err(|e| fairsim::Error::io(&out, e))?;
    export_outcomes(&records, &config.eps_tols, &out.join("outcomes.csv"))?;
    export_summary(&summary, &out.join("summary.csv"))?;
    println!("wrote {}", out.display());
    Ok(())
}
