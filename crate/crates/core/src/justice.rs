//! Adjudication of arrests.
//!
//! Each arrest is judged by a classifier with a hard 0/1 output `J`, and the
//! arrestee's true recidivism `R` is drawn independently with the recidivism
//! rate. Neither draw looks at the group.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::sim::{Cell, Civilian, Group};

/// Which classifier judges arrestees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClassifierSpec {
    /// Positive with fixed probability, ignoring the agent entirely.
    Random { sentencing_rate: f64 },
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec::Random { sentencing_rate: 0.5 }
    }
}

impl ClassifierSpec {
    /// Hard decision for one arrestee. The agent record is passed so that
    /// covariate-based classifiers can be added without touching the engine.
    pub fn judge<R: Rng + ?Sized>(&self, _agent: &Civilian, rng: &mut R) -> bool {
        match *self {
            ClassifierSpec::Random { sentencing_rate } => rng.random_bool(sentencing_rate),
        }
    }
}

/// One arrest together with its adjudication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrestEvent {
    pub tick: u64,
    pub agent_id: u32,
    pub group: Group,
    pub cell: Cell,
    /// Classifier output `J`.
    pub judged_positive: bool,
    /// True recidivism `R`.
    pub recidivated: bool,
}

/// Draws `(J, R)` for an arrested agent and records the outcome on the agent.
///
/// `J` is drawn before `R`; both come from the run's single stream.
pub fn adjudicate<R: Rng + ?Sized>(
    agent: &mut Civilian,
    classifier: &ClassifierSpec,
    recidivism_rate: f64,
    rng: &mut R,
) -> (bool, bool) {
    let judged = classifier.judge(agent, rng);
    let recidivated = rng.random_bool(recidivism_rate);
    agent.arrest_count += 1;
    agent.ever_positive_j |= judged;
    agent.ever_recidivist |= recidivated;
    (judged, recidivated)
}

pub const EVENT_CSV_HEADER: [&str; 7] = ["tick", "agent_id", "group", "cell_x", "cell_y", "J", "R"];

/// Writes an event log as CSV with header `tick,agent_id,group,cell_x,cell_y,J,R`.
/// `J` and `R` are written as `0`/`1`.
pub fn write_events_csv<W: Write>(events: &[ArrestEvent], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EVENT_CSV_HEADER)?;
    for e in events {
        w.write_record([
            e.tick.to_string(),
            e.agent_id.to_string(),
            e.group.to_string(),
            e.cell.x.to_string(),
            e.cell.y.to_string(),
            u8::from(e.judged_positive).to_string(),
            u8::from(e.recidivated).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one JSON object per line.
pub fn write_events_jsonl<W: Write>(events: &[ArrestEvent], mut out: W) -> std::io::Result<()> {
    for e in events {
        serde_json::to_writer(&mut out, e)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}
