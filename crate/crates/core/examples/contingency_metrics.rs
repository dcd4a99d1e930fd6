//! The metric layer on hand-built contingency tables, no simulation involved.
//!
//! ```text
//! cargo run --example contingency_metrics
//! ```

use fairsim::metrics::{
    arrest_metrics, fairness_indicator, identity_check, population_metrics, tau, tau1, GroupTable, Variant,
};
use fairsim::sim::Group;

fn main() {
    let g1 = GroupTable { group: Group::G1, tp: 40, fp: 30, fn_: 25, tn: 35, never_arrested: 20 };
    let g2 = GroupTable { group: Group::G2, tp: 12, fp: 10, fn_: 9, tn: 11, never_arrested: 108 };

    for t in [&g1, &g2] {
        let a = arrest_metrics(t);
        let p = population_metrics(t);
        println!("{} ({} arrests, {} never arrested)", t.group, t.arrests(), t.never_arrested);
        println!("  arrested:   {:?}, prevalence {:?}", a.rates, a.prevalence);
        println!("  population: {:?}, prevalence {:?}, P(arrest) {:?}", p.rates, p.prevalence, p.arrest_prob);
        for v in [Variant::Arrested, Variant::Population] {
            match identity_check(t, v) {
                Ok(r) => println!("  FPR identity residual ({v:?}): {r:e}"),
                Err(e) => println!("  FPR identity ({v:?}) not applicable: {e}"),
            }
        }
    }

    for v in [Variant::Arrested, Variant::Population] {
        let (r1, r2) = (fairsim::metrics::rates(&g1, v), fairsim::metrics::rates(&g2, v));
        let t1 = tau1(r1.fpr, r2.fpr);
        println!("{v:?}: tau {:?}, tau1 {t1:?}", tau(&r1, &r2));
        for tol in [0.1, 0.5, 1.0, 2.0] {
            println!("  fair at tolerance {tol}: {}", fairness_indicator(t1, tol));
        }
    }
}
