//! Driving the engine tick by tick with an observer and exporting the
//! arrest log as CSV and JSON lines.
//!
//! ```text
//! cargo run --release --example event_log -- [out_dir]
//! ```

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use fairsim::justice::{write_events_csv, write_events_jsonl};
use fairsim::sim::{Group, SimState};
use fairsim::SimConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "event-log".into()));
    std::fs::create_dir_all(&out)?;

    let mut state = SimState::new(SimConfig { stigma_follow: 0.75, max_ticks: 3000, seed: 3, ..SimConfig::default() })?;
    let mut events = Vec::new();
    let mut per_1000 = [[0u32; 2]; 3];
    state.run_observed(&mut events, |s, log| {
        let bucket = ((s.tick - 1) / 1000) as usize;
        for e in log.iter().rev().take_while(|e| e.tick == s.tick) {
            per_1000[bucket][e.group.index()] += 1;
        }
    });

    for (i, [g1, g2]) in per_1000.iter().enumerate() {
        println!(
            "ticks {:>4}-{:>4}: {g1:>3} arrests in {}, {g2:>3} in {}",
            i * 1000 + 1,
            (i + 1) * 1000,
            Group::G1,
            Group::G2
        );
    }
    let repeat = state.civilians.iter().filter(|c| c.arrest_count > 1).count();
    println!("{} civilians arrested more than once", repeat);

    write_events_csv(&events, BufWriter::new(File::create(out.join("events.csv"))?))?;
    write_events_jsonl(&events, BufWriter::new(File::create(out.join("events.jsonl"))?))?;
    println!("wrote {} events to {}", events.len(), out.display());
    Ok(())
}
