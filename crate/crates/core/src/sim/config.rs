use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::justice::ClassifierSpec;

/// How a cop combines the stigma-following move with the random patrol move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopRule {
    /// With probability `stigma_follow` do the stigma move, otherwise the random move.
    #[default]
    Exclusive,
    /// With probability `stigma_follow` do the stigma move, then always do the random move.
    Sequential,
}

/// Full parameter vector of one simulation run.
///
/// Missing fields in a JSON document take the values from [`SimConfig::default`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub grid_width: usize,
    pub grid_height: usize,
    /// Civilians per group.
    pub n_per_group: usize,
    pub n_cops: usize,
    /// Per-tick probability that a civilian commits a crime.
    pub crime_rate: f64,
    /// Probability that an adjudicated arrestee truly recidivates.
    pub recidivism_rate: f64,
    /// Probability that a cop arrests an adjacent civilian who committed a crime this tick.
    pub arrest_rate: f64,
    /// Fraction of cops that start in region 1.
    pub cop_bias: f64,
    /// Probability that a cop follows the stigma field on a given tick.
    pub stigma_follow: f64,
    /// Probability that a random patrol move is a long move.
    pub long_move_prob: f64,
    /// Length in cells of a long patrol move.
    pub long_move_len: usize,
    pub stigma_bump_center: f64,
    pub stigma_bump_neighbor: f64,
    pub max_ticks: u64,
    pub seed: u64,
    pub classifier: ClassifierSpec,
    pub cop_rule: CopRule,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            grid_width: 50,
            grid_height: 50,
            n_per_group: 100,
            n_cops: 10,
            crime_rate: 0.01,
            recidivism_rate: 0.4,
            arrest_rate: 1.0,
            cop_bias: 0.8,
            stigma_follow: 0.5,
            long_move_prob: 0.1,
            long_move_len: 3,
            stigma_bump_center: 1.0,
            stigma_bump_neighbor: 0.5,
            max_ticks: 5000,
            seed: 0,
            classifier: ClassifierSpec::default(),
            cop_rule: CopRule::Exclusive,
        }
    }
}

fn check_probability(field: &str, value: f64) -> Result<(), ConfigError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ConfigError::new(field, format!("{value} is not a probability in [0, 1]")))
    }
}

impl SimConfig {
    pub fn sentencing_rate(&self) -> f64 {
        match self.classifier {
            ClassifierSpec::Random { sentencing_rate } => sentencing_rate,
        }
    }

    /// Number of cops placed in region 1 at start: `round(cop_bias * n_cops)`.
    pub fn cops_in_region1(&self) -> usize {
        ((self.cop_bias * self.n_cops as f64).round() as usize).min(self.n_cops)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.grid_width < 2 || !self.grid_width.is_multiple_of(2) {
            return Err(ConfigError::new(
                "grid_width",
                format!("{} must be even and at least 2 (two equal regions)", self.grid_width),
            ));
        }
        if self.grid_height < 1 {
            return Err(ConfigError::new("grid_height", "must be at least 1"));
        }
        if self.n_per_group < 1 {
            return Err(ConfigError::new("n_per_group", "must be at least 1"));
        }
        if self.n_cops < 1 {
            return Err(ConfigError::new("n_cops", "must be at least 1"));
        }
        check_probability("crime_rate", self.crime_rate)?;
        check_probability("recidivism_rate", self.recidivism_rate)?;
        check_probability("arrest_rate", self.arrest_rate)?;
        check_probability("cop_bias", self.cop_bias)?;
        check_probability("stigma_follow", self.stigma_follow)?;
        check_probability("long_move_prob", self.long_move_prob)?;
        check_probability("classifier.sentencing_rate", self.sentencing_rate())?;
        if self.long_move_len < 1 {
            return Err(ConfigError::new("long_move_len", "must be at least 1"));
        }
        if !(self.stigma_bump_center.is_finite() && self.stigma_bump_center > 0.0) {
            return Err(ConfigError::new("stigma_bump_center", "must be a positive finite number"));
        }
        if !(self.stigma_bump_neighbor > 0.0 && self.stigma_bump_neighbor < self.stigma_bump_center) {
            return Err(ConfigError::new(
                "stigma_bump_neighbor",
                "must be positive and smaller than stigma_bump_center",
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn odd_width_names_field() {
        let c = SimConfig { grid_width: 49, ..Default::default() };
        assert_eq!(c.validate().unwrap_err().field, "grid_width");
    }

    #[test]
    fn probability_out_of_range_names_field() {
        let c = SimConfig { stigma_follow: 1.5, ..Default::default() };
        assert_eq!(c.validate().unwrap_err().field, "stigma_follow");
        let c = SimConfig { classifier: ClassifierSpec::Random { sentencing_rate: -0.1 }, ..Default::default() };
        assert_eq!(c.validate().unwrap_err().field, "classifier.sentencing_rate");
    }

    #[test]
    fn bump_ordering_enforced() {
        let c = SimConfig { stigma_bump_neighbor: 1.0, ..Default::default() };
        assert_eq!(c.validate().unwrap_err().field, "stigma_bump_neighbor");
        let c = SimConfig { stigma_bump_neighbor: 0.0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn cop_split_rounds_to_nearest() {
        let split = |q, n| SimConfig { cop_bias: q, n_cops: n, ..Default::default() }.cops_in_region1();
        assert_eq!(split(0.8, 10), 8);
        assert_eq!(split(0.5, 10), 5);
        assert_eq!(split(1.0, 4), 4);
        assert_eq!(split(0.0, 4), 0);
    }

    #[test]
    fn json_round_trip_uses_field_names() {
        let json = serde_json::to_value(SimConfig::default()).unwrap();
        for key in [
            "grid_width",
            "grid_height",
            "n_per_group",
            "n_cops",
            "crime_rate",
            "recidivism_rate",
            "arrest_rate",
            "cop_bias",
            "stigma_follow",
            "long_move_prob",
            "long_move_len",
            "stigma_bump_center",
            "stigma_bump_neighbor",
            "max_ticks",
            "seed",
            "classifier",
        ] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["classifier"], serde_json::json!({"kind": "random", "sentencing_rate": 0.5}));
        let back: SimConfig = serde_json::from_value(json).unwrap();
        assert_eq!(back, SimConfig::default());
    }

    #[test]
    fn partial_json_fills_defaults_and_rejects_unknown() {
        let c: SimConfig = serde_json::from_str(r#"{"stigma_follow": 0.75, "cop_rule": "sequential"}"#).unwrap();
        assert_eq!(c.stigma_follow, 0.75);
        assert_eq!(c.cop_rule, CopRule::Sequential);
        assert_eq!(c.n_per_group, 100);
        assert!(serde_json::from_str::<SimConfig>(r#"{"theta": 0.5}"#).is_err());
    }
}
