//! One run of the default world, then the final fairness report.
//!
//! ```text
//! cargo run --release --example simulate -- [theta] [q0] [seed]
//! ```

use fairsim::metrics::Variant;
use fairsim::{run_sim, SimConfig};

fn arg(i: usize, default: f64) -> f64 {
    std::env::args().nth(i).map_or(default, |s| s.parse().expect("numeric argument"))
}

fn main() -> fairsim::Result<()> {
    let config = SimConfig {
        stigma_follow: arg(1, 0.5),
        cop_bias: arg(2, 0.8),
        seed: arg(3, 0.0) as u64,
        ..SimConfig::default()
    };
    let run = run_sim(config.clone())?;
    let m = fairsim::metrics::report(&run.events, &run.state.civilians)?;

    println!(
        "theta={} q0={} seed={}: {} ticks, {} arrests",
        config.stigma_follow,
        config.cop_bias,
        config.seed,
        run.state.tick,
        run.events.len()
    );
    for g in [&m.g1, &m.g2] {
        println!(
            "  {}: {:>4} arrests, {:>3} never arrested | arrested PPV {:.3} FPR {:.3} FNR {:.3} | population FPR {:.4}",
            g.group,
            g.arrests,
            g.never_arrested,
            g.ppv_a.unwrap_or(f64::NAN),
            g.fpr_a.unwrap_or(f64::NAN),
            g.fnr_a.unwrap_or(f64::NAN),
            g.fpr_p.unwrap_or(f64::NAN),
        );
    }
    for v in [Variant::Arrested, Variant::Population] {
        let (tau, tau1) = match v {
            Variant::Arrested => (m.tau_a, m.tau1_a),
            Variant::Population => (m.tau_p, m.tau1_p),
        };
        println!(
            "  {v:?}: tau {tau:?}, tau1 {tau1:?}, fair at tolerance 1: {}",
            fairsim::metrics::fairness_indicator(tau1, 1.0)
        );
    }
    println!("  arrest ratio G1/G2: {:?}", m.arrest_ratio);
    Ok(())
}
