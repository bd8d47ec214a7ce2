//! Fair shares, fairness ratios and welfare baselines.

mod optimum;

use num_traits::Zero;
use serde::Serialize;

use crate::cdf::LengthCdf;
use crate::engine::{Estimate, EvalResult};
use crate::model::Instance;
use crate::rational::{self, Prob};

pub use optimum::{
    canonical_gap_ratio, exact_preemptive_optimum, probe_then_complete_welfare, GapReport,
    DEFAULT_STATE_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("optimum needs more than {limit} states")]
    StateLimitExceeded { limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// `max f(t) * D / (t n)` over `ceil(D/n) <= t <= D`, capped at 1.
pub fn fair_share(f: &LengthCdf, n: usize, deadline: u32) -> Prob {
    let low = deadline.div_ceil(n as u32).max(1);
    let scale = rational::ratio(deadline as i64, n as i64);
    let best = (low..=deadline)
        .map(|t| f.at(t) * &scale / rational::int(t as i64))
        .max()
        .unwrap_or_else(Prob::zero);
    rational::min(&best, &rational::one())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FairnessRatio {
    Exact(#[serde(serialize_with = "ser_prob")] Prob),
    Sampled { value: f64, std_err: f64 },
    /// Every player's fair share is zero.
    Vacuous,
}

fn ser_prob<S: serde::Serializer>(p: &Prob, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(p))
}

impl FairnessRatio {
    /// `+inf` for the vacuous case.
    pub fn value(&self) -> f64 {
        match self {
            FairnessRatio::Exact(p) => rational::to_f64(p),
            FairnessRatio::Sampled { value, .. } => *value,
            FairnessRatio::Vacuous => f64::INFINITY,
        }
    }

    pub fn is_vacuous(&self) -> bool {
        matches!(self, FairnessRatio::Vacuous)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairnessRow {
    pub player: usize,
    #[serde(serialize_with = "ser_prob")]
    pub fair_share: Prob,
    pub achieved: f64,
    /// `None` when the fair share is zero.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FairnessReport {
    pub rows: Vec<FairnessRow>,
    pub ratio: FairnessRatio,
    /// Player attaining the minimum ratio.
    pub argmin: Option<usize>,
}

/// Minimum over players with positive fair share of achieved / fair share,
/// measured against each player's true distribution.
pub fn fairness_ratio(result: &EvalResult, instance: &Instance) -> FairnessReport {
    let n = instance.n();
    let shares: Vec<Prob> = instance
        .players
        .iter()
        .map(|p| fair_share(&p.true_cdf, n, instance.deadline))
        .collect();
    let rows: Vec<FairnessRow> = shares
        .iter()
        .zip(&result.finish_prob)
        .enumerate()
        .map(|(player, (fs, achieved))| FairnessRow {
            player,
            fair_share: fs.clone(),
            achieved: achieved.value(),
            ratio: (!fs.is_zero()).then(|| achieved.value() / rational::to_f64(fs)),
        })
        .collect();
    let exact = result.finish_prob.iter().all(|e| e.exact().is_some());
    let mut ratio = FairnessRatio::Vacuous;
    let mut argmin = None;
    if exact {
        let mut best: Option<Prob> = None;
        for (i, (fs, e)) in shares.iter().zip(&result.finish_prob).enumerate() {
            if fs.is_zero() {
                continue;
            }
            let r = e.exact().expect("exact") / fs;
            if best.as_ref().is_none_or(|b| r < *b) {
                best = Some(r);
                argmin = Some(i);
            }
        }
        if let Some(b) = best {
            ratio = FairnessRatio::Exact(b);
        }
    } else {
        for (i, (fs, e)) in shares.iter().zip(&result.finish_prob).enumerate() {
            if fs.is_zero() {
                continue;
            }
            let f = rational::to_f64(fs);
            let r = e.value() / f;
            if r < ratio.value() {
                ratio = FairnessRatio::Sampled {
                    value: r,
                    std_err: e.std_err() / f,
                };
                argmin = Some(i);
            }
        }
    }
    FairnessReport {
        rows,
        ratio,
        argmin,
    }
}

/// Sum of fair shares, for instances where the minimum alone hides the picture.
pub fn total_fair_share(instance: &Instance) -> Prob {
    instance
        .players
        .iter()
        .map(|p| fair_share(&p.true_cdf, instance.n(), instance.deadline))
        .sum()
}

/// Largest number of jobs that fit: the longest sorted prefix with sum at most `D`.
pub fn realized_optimal_welfare(lengths: &[u32], deadline: u32) -> usize {
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let mut used = 0u64;
    sorted
        .iter()
        .take_while(|&&l| {
            used += l as u64;
            used <= deadline as u64
        })
        .count()
}

/// Achieved probabilities as plain floats, handy for reports.
pub fn achieved_values(result: &EvalResult) -> Vec<f64> {
    result.finish_prob.iter().map(Estimate::value).collect()
}
