//! Contingency tables and fairness quantities.
//!
//! Two record sets are used:
//!
//! - *arrested*: one record per arrest event, carrying that event's `(J, R)`;
//! - *population*: the arrested records plus one `(A=0, J=0, R=0)` record per
//!   individual who was never arrested.
//!
//! Every quantity is a plain empirical frequency over one of these sets, so a
//! metric whose denominator is zero is reported as `None` rather than coerced.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::justice::ArrestEvent;
use crate::output::fmt_opt;
use crate::sim::{Civilian, Group, SimConfig, SimRun, SimState};

/// Which record set a metric is computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Arrested,
    #[default]
    Population,
}

/// Per-group counts. `tp`, `fp`, `fn_` and `tn` are over arrest events.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupTable {
    pub group: Group,
    /// J=1, R=1
    pub tp: u64,
    /// J=1, R=0
    pub fp: u64,
    /// J=0, R=1
    #[serde(rename = "fn")]
    pub fn_: u64,
    /// J=0, R=0
    pub tn: u64,
    /// Individuals with zero arrests.
    pub never_arrested: u64,
}

impl GroupTable {
    pub fn empty(group: Group) -> Self {
        Self { group, tp: 0, fp: 0, fn_: 0, tn: 0, never_arrested: 0 }
    }

    pub fn arrests(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Size of the population record set.
    pub fn records(&self) -> u64 {
        self.arrests() + self.never_arrested
    }

    pub fn record(&mut self, judged_positive: bool, recidivated: bool) {
        match (judged_positive, recidivated) {
            (true, true) => self.tp += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
            (false, false) => self.tn += 1,
        }
    }
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Counts events per group and individuals never arrested.
///
/// An agent arrested `k` times contributes `k` records. Every event must name an
/// agent in `roster` with a matching group.
pub fn tabulate(events: &[ArrestEvent], roster: &[Civilian]) -> Result<[GroupTable; 2]> {
    let mut tables = [GroupTable::empty(Group::G1), GroupTable::empty(Group::G2)];
    let index: std::collections::HashMap<u32, (usize, Group)> =
        roster.iter().enumerate().map(|(i, c)| (c.id, (i, c.group))).collect();
    let mut arrested = vec![false; roster.len()];
    for e in events {
        let &(i, group) = index
            .get(&e.agent_id)
            .ok_or_else(|| Error::Integrity(format!("event at tick {} names unknown agent {}", e.tick, e.agent_id)))?;
        if group != e.group {
            return Err(Error::Integrity(format!(
                "event at tick {} records agent {} as {} but the roster has {}",
                e.tick, e.agent_id, e.group, group
            )));
        }
        arrested[i] = true;
        tables[group.index()].record(e.judged_positive, e.recidivated);
    }
    for (c, was) in roster.iter().zip(arrested) {
        if !was {
            tables[c.group.index()].never_arrested += 1;
        }
    }
    Ok(tables)
}

/// PPV, FPR and FNR of one group under one variant.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rates {
    pub ppv: Option<f64>,
    pub fpr: Option<f64>,
    pub fnr: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrestMetrics {
    pub rates: Rates,
    /// P(R=1 | G=g, A=1)
    pub prevalence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationMetrics {
    pub rates: Rates,
    /// P(R=1 | G=g)
    pub prevalence: Option<f64>,
    /// P(A=1 | G=g)
    pub arrest_prob: Option<f64>,
}

pub fn arrest_metrics(t: &GroupTable) -> ArrestMetrics {
    ArrestMetrics {
        rates: Rates { ppv: ratio(t.tp, t.tp + t.fp), fpr: ratio(t.fp, t.fp + t.tn), fnr: ratio(t.fn_, t.tp + t.fn_) },
        prevalence: ratio(t.tp + t.fn_, t.arrests()),
    }
}

/// Population metrics: never-arrested individuals enter as true negatives, so only
/// the FPR denominator and the prevalence change relative to the arrested set.
pub fn population_metrics(t: &GroupTable) -> PopulationMetrics {
    PopulationMetrics {
        rates: Rates {
            ppv: ratio(t.tp, t.tp + t.fp),
            fpr: ratio(t.fp, t.fp + t.tn + t.never_arrested),
            fnr: ratio(t.fn_, t.tp + t.fn_),
        },
        prevalence: ratio(t.tp + t.fn_, t.records()),
        arrest_prob: ratio(t.arrests(), t.records()),
    }
}

pub fn rates(t: &GroupTable, variant: Variant) -> Rates {
    match variant {
        Variant::Arrested => arrest_metrics(t).rates,
        Variant::Population => population_metrics(t).rates,
    }
}

fn ratio_deviation(g1: Option<f64>, g2: Option<f64>) -> Option<f64> {
    match (g1, g2) {
        (Some(a), Some(b)) if b != 0.0 => Some((1.0 - a / b).abs()),
        _ => None,
    }
}

/// Sum of absolute deviations of the three cross-group ratios from 1.
/// `None` if any metric is undefined or any G2 metric is zero.
pub fn tau(g1: &Rates, g2: &Rates) -> Option<f64> {
    Some(ratio_deviation(g1.ppv, g2.ppv)? + ratio_deviation(g1.fpr, g2.fpr)? + ratio_deviation(g1.fnr, g2.fnr)?)
}

/// Signed single-term outcome `1 - fpr_g1 / fpr_g2`.
pub fn tau1(fpr_g1: Option<f64>, fpr_g2: Option<f64>) -> Option<f64> {
    match (fpr_g1, fpr_g2) {
        (Some(a), Some(b)) if b != 0.0 => Some(1.0 - a / b),
        _ => None,
    }
}

/// G1 arrest events over G2 arrest events.
pub fn arrest_ratio(g1: &GroupTable, g2: &GroupTable) -> Option<f64> {
    ratio(g1.arrests(), g2.arrests())
}

/// 1 if `tau1` is defined and `|tau1| < eps_tol`, else 0. Undefined counts as unfair.
pub fn fairness_indicator(tau1: Option<f64>, eps_tol: f64) -> u8 {
    match tau1 {
        Some(v) if v.abs() < eps_tol => 1,
        _ => 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("identity not applicable: {0}")]
pub struct IdentityNotApplicable(pub &'static str);

/// Residual of `FPR = p/(1-p) * (1-PPV)/PPV * (1-FNR)` on one table.
///
/// All four quantities come from the same table, so the residual is zero up to
/// rounding whenever the identity applies.
pub fn identity_check(t: &GroupTable, variant: Variant) -> Result<f64, IdentityNotApplicable> {
    let (r, p) = match variant {
        Variant::Arrested => {
            let m = arrest_metrics(t);
            (m.rates, m.prevalence)
        }
        Variant::Population => {
            let m = population_metrics(t);
            (m.rates, m.prevalence)
        }
    };
    let (Some(fpr), Some(ppv), Some(fnr), Some(p)) = (r.fpr, r.ppv, r.fnr, p) else {
        return Err(IdentityNotApplicable("a metric is undefined"));
    };
    if ppv <= 0.0 {
        return Err(IdentityNotApplicable("PPV is zero"));
    }
    if p >= 1.0 {
        return Err(IdentityNotApplicable("prevalence is one"));
    }
    Ok(fpr - p / (1.0 - p) * ((1.0 - ppv) / ppv) * (1.0 - fnr))
}

/// Every fairness quantity for one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupMetrics {
    pub group: Group,
    pub arrests: u64,
    pub never_arrested: u64,
    pub ppv_a: Option<f64>,
    pub fpr_a: Option<f64>,
    pub fnr_a: Option<f64>,
    pub prevalence_a: Option<f64>,
    pub ppv_p: Option<f64>,
    pub fpr_p: Option<f64>,
    pub fnr_p: Option<f64>,
    pub prevalence_p: Option<f64>,
    pub arrest_prob: Option<f64>,
}

impl GroupMetrics {
    pub fn from_table(t: &GroupTable) -> Self {
        let a = arrest_metrics(t);
        let p = population_metrics(t);
        Self {
            group: t.group,
            arrests: t.arrests(),
            never_arrested: t.never_arrested,
            ppv_a: a.rates.ppv,
            fpr_a: a.rates.fpr,
            fnr_a: a.rates.fnr,
            prevalence_a: a.prevalence,
            ppv_p: p.rates.ppv,
            fpr_p: p.rates.fpr,
            fnr_p: p.rates.fnr,
            prevalence_p: p.prevalence,
            arrest_prob: p.arrest_prob,
        }
    }

    pub fn rates(&self, variant: Variant) -> Rates {
        match variant {
            Variant::Arrested => Rates { ppv: self.ppv_a, fpr: self.fpr_a, fnr: self.fnr_a },
            Variant::Population => Rates { ppv: self.ppv_p, fpr: self.fpr_p, fnr: self.fnr_p },
        }
    }
}

/// All fairness quantities for one measurement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub g1: GroupMetrics,
    pub g2: GroupMetrics,
    pub tau_a: Option<f64>,
    pub tau_p: Option<f64>,
    pub tau1_a: Option<f64>,
    pub tau1_p: Option<f64>,
    pub arrest_ratio: Option<f64>,
}

/// Column order of [`MetricsReport::csv_row`].
pub const REPORT_COLUMNS: [&str; 27] = [
    "tau_a",
    "tau_p",
    "tau1_a",
    "tau1_p",
    "arrest_ratio",
    "g1_arrests",
    "g1_never_arrested",
    "g1_ppv_a",
    "g1_fpr_a",
    "g1_fnr_a",
    "g1_prevalence_a",
    "g1_ppv_p",
    "g1_fpr_p",
    "g1_fnr_p",
    "g1_prevalence_p",
    "g1_arrest_prob",
    "g2_arrests",
    "g2_never_arrested",
    "g2_ppv_a",
    "g2_fpr_a",
    "g2_fnr_a",
    "g2_prevalence_a",
    "g2_ppv_p",
    "g2_fpr_p",
    "g2_fnr_p",
    "g2_prevalence_p",
    "g2_arrest_prob",
];

impl MetricsReport {
    pub fn from_tables(tables: &[GroupTable; 2]) -> Self {
        let g1 = GroupMetrics::from_table(&tables[0]);
        let g2 = GroupMetrics::from_table(&tables[1]);
        Self {
            tau_a: tau(&g1.rates(Variant::Arrested), &g2.rates(Variant::Arrested)),
            tau_p: tau(&g1.rates(Variant::Population), &g2.rates(Variant::Population)),
            tau1_a: tau1(g1.fpr_a, g2.fpr_a),
            tau1_p: tau1(g1.fpr_p, g2.fpr_p),
            arrest_ratio: arrest_ratio(&tables[0], &tables[1]),
            g1,
            g2,
        }
    }

    pub fn tau1(&self, variant: Variant) -> Option<f64> {
        match variant {
            Variant::Arrested => self.tau1_a,
            Variant::Population => self.tau1_p,
        }
    }

    pub fn group(&self, group: Group) -> &GroupMetrics {
        match group {
            Group::G1 => &self.g1,
            Group::G2 => &self.g2,
        }
    }

    /// Flat row in [`REPORT_COLUMNS`] order; undefined values are empty strings.
    pub fn csv_row(&self) -> Vec<String> {
        let mut row: Vec<String> =
            [self.tau_a, self.tau_p, self.tau1_a, self.tau1_p, self.arrest_ratio].iter().map(|v| fmt_opt(*v)).collect();
        for g in [&self.g1, &self.g2] {
            row.push(g.arrests.to_string());
            row.push(g.never_arrested.to_string());
            row.extend(
                [g.ppv_a, g.fpr_a, g.fnr_a, g.prevalence_a, g.ppv_p, g.fpr_p, g.fnr_p, g.prevalence_p, g.arrest_prob]
                    .iter()
                    .map(|v| fmt_opt(*v)),
            );
        }
        row
    }
}

/// Tabulates and reports in one step.
pub fn report(events: &[ArrestEvent], roster: &[Civilian]) -> Result<MetricsReport> {
    Ok(MetricsReport::from_tables(&tabulate(events, roster)?))
}

/// Runs a simulation and measures the cumulative metrics every `every` ticks
/// and at the final tick.
pub fn measure_series(config: SimConfig, every: u64) -> Result<(SimRun, Vec<(u64, MetricsReport)>)> {
    assert!(every > 0, "measurement cadence must be positive");
    let mut state = SimState::new(config)?;
    let mut events = Vec::new();
    let mut series = Vec::new();
    let mut failure = None;
    let last = state.config.max_ticks;
    if last == 0 {
        series.push((0, report(&events, &state.civilians)?));
    }
    state.run_observed(&mut events, |s, log| {
        if failure.is_none() && (s.tick % every == 0 || s.tick == last) {
            match report(log, &s.civilians) {
                Ok(m) => series.push((s.tick, m)),
                Err(e) => failure = Some(e),
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((SimRun { events, state }, series))
}
