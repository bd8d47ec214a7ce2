use serde::{Serialize, Serializer};

use crate::rational::{self, Prob};

pub const CSV_SCHEMA_VERSION: u32 = 1;

/// An exact rational or a sampled mean with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub enum Estimate {
    Exact(Prob),
    Sampled { mean: f64, std_err: f64 },
}

impl Estimate {
    pub fn value(&self) -> f64 {
        match self {
            Estimate::Exact(p) => rational::to_f64(p),
            Estimate::Sampled { mean, .. } => *mean,
        }
    }

    pub fn std_err(&self) -> f64 {
        match self {
            Estimate::Exact(_) => 0.0,
            Estimate::Sampled { std_err, .. } => *std_err,
        }
    }

    pub fn exact(&self) -> Option<&Prob> {
        match self {
            Estimate::Exact(p) => Some(p),
            Estimate::Sampled { .. } => None,
        }
    }
}

impl Serialize for Estimate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(2))?;
        match self {
            Estimate::Exact(p) => {
                map.serialize_entry("exact", &rational::format(p))?;
                map.serialize_entry("value", &rational::to_f64(p))?;
            }
            Estimate::Sampled { mean, std_err } => {
                map.serialize_entry("mean", mean)?;
                map.serialize_entry("std_err", std_err)?;
            }
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EvalMode {
    Exact { branches: u64 },
    MonteCarlo { trials: u64, seed: u64 },
}

impl EvalMode {
    pub fn name(&self) -> &'static str {
        match self {
            EvalMode::Exact { .. } => "exact",
            EvalMode::MonteCarlo { .. } => "monte_carlo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalResult {
    pub label: String,
    pub scheduler: String,
    #[serde(flatten)]
    pub mode: EvalMode,
    pub finish_prob: Vec<Estimate>,
    pub welfare: Estimate,
    /// Exact variance of the number of finished jobs (exact mode only).
    #[serde(serialize_with = "serialize_opt_prob", skip_serializing_if = "Option::is_none")]
    pub welfare_variance: Option<Prob>,
}

fn serialize_opt_prob<S: Serializer>(value: &Option<Prob>, s: S) -> Result<S::Ok, S::Error> {
    match value {
        Some(p) => s.serialize_str(&rational::format(p)),
        None => s.serialize_none(),
    }
}

impl EvalResult {
    pub fn n(&self) -> usize {
        self.finish_prob.len()
    }

    pub fn csv_header(n: usize) -> Vec<String> {
        let mut cols: Vec<String> = [
            "schema_version",
            "label",
            "scheduler",
            "mode",
            "trials",
            "seed",
            "branches",
            "welfare",
            "welfare_se",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        cols.extend((1..=n).map(|i| format!("p_finish_{i}")));
        cols
    }

    pub fn csv_record(&self) -> Vec<String> {
        let (trials, seed, branches) = match self.mode {
            EvalMode::Exact { branches } => (String::new(), String::new(), branches.to_string()),
            EvalMode::MonteCarlo { trials, seed } => (trials.to_string(), seed.to_string(), String::new()),
        };
        let mut row = vec![
            CSV_SCHEMA_VERSION.to_string(),
            self.label.clone(),
            self.scheduler.clone(),
            self.mode.name().to_string(),
            trials,
            seed,
            branches,
            self.welfare.value().to_string(),
            self.welfare.std_err().to_string(),
        ];
        row.extend(self.finish_prob.iter().map(|e| e.value().to_string()));
        row
    }

    /// Standard deviation of one trial's welfare, from exact variance or sample.
    pub fn welfare_sd(&self) -> Option<f64> {
        self.welfare_variance.as_ref().map(|v| rational::to_f64(v).sqrt())
    }
}
