//! The twelve mechanisms, each prepared once per instance and then played
//! as fresh sessions.

mod adaptive_fair_share;
mod canonical;
mod common;
mod complete_lottery;
mod complete_nash;
mod fair_share;
mod forgiving;
mod near_deterministic;
mod oblivious;
mod shortest_first;

use serde::{Deserialize, Serialize};

use crate::model::Instance;
use crate::protocol::{Adaptivity, Capabilities, Session};

pub use canonical::{canonical_threshold, canonical_welfare};
pub use fair_share::{best_preference, interval_cells, layout, FairShareMode, IntervalCell, Layout};
pub use forgiving::VirtualLengthSession;
pub use near_deterministic::threshold_for;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchedulerError {
    #[error("reported distributions are not identical")]
    NotIdenticalInstance,
    #[error("granted time {granted} exceeds the deadline {deadline}")]
    TimeOverflow { granted: u32, deadline: u32 },
    #[error("grants need {bundles} bundles, at most 2 allowed")]
    SplitOverflow { bundles: usize },
    #[error("{n} players, at least {required} required")]
    TooFewPlayers { n: usize, required: usize },
    #[error("dynamic programming table of size {size} exceeds limit {limit}")]
    TableLimitExceeded { size: u64, limit: u64 },
    #[error("player {player} prefers t={t}, outside the allowed range {low}..={high}")]
    PreferenceOutOfRange {
        player: usize,
        t: u32,
        low: u32,
        high: u32,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerKind {
    ShortestFirst,
    TrivialOblivious,
    TimeoutOblivious,
    RandomThresholdOblivious,
    Canonical,
    FairShareLottery,
    AdaptiveFairShare,
    CompleteLottery,
    CompleteNashDp,
    NearDeterministicThreshold,
    ForgivingLottery,
    ForgivingVirtualLength,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 12] = [
        SchedulerKind::ShortestFirst,
        SchedulerKind::TrivialOblivious,
        SchedulerKind::TimeoutOblivious,
        SchedulerKind::RandomThresholdOblivious,
        SchedulerKind::Canonical,
        SchedulerKind::FairShareLottery,
        SchedulerKind::AdaptiveFairShare,
        SchedulerKind::CompleteLottery,
        SchedulerKind::CompleteNashDp,
        SchedulerKind::NearDeterministicThreshold,
        SchedulerKind::ForgivingLottery,
        SchedulerKind::ForgivingVirtualLength,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::ShortestFirst => "shortest_first",
            SchedulerKind::TrivialOblivious => "trivial_oblivious",
            SchedulerKind::TimeoutOblivious => "timeout_oblivious",
            SchedulerKind::RandomThresholdOblivious => "random_threshold_oblivious",
            SchedulerKind::Canonical => "canonical",
            SchedulerKind::FairShareLottery => "fair_share_lottery",
            SchedulerKind::AdaptiveFairShare => "adaptive_fair_share",
            SchedulerKind::CompleteLottery => "complete_lottery",
            SchedulerKind::CompleteNashDp => "complete_nash_dp",
            SchedulerKind::NearDeterministicThreshold => "near_deterministic_threshold",
            SchedulerKind::ForgivingLottery => "forgiving_lottery",
            SchedulerKind::ForgivingVirtualLength => "forgiving_virtual_length",
        }
    }

    pub fn capabilities(self) -> Capabilities {
        use Adaptivity::*;
        let caps = |adaptivity, oblivious, complete, deterministic| Capabilities {
            adaptivity,
            oblivious,
            complete,
            deterministic,
        };
        match self {
            SchedulerKind::ShortestFirst => caps(Adaptive, false, false, true),
            SchedulerKind::TrivialOblivious => caps(Adaptive, true, true, false),
            SchedulerKind::TimeoutOblivious => caps(Adaptive, true, false, false),
            SchedulerKind::RandomThresholdOblivious => caps(Adaptive, true, false, false),
            SchedulerKind::Canonical => caps(Nonadaptive, false, false, false),
            SchedulerKind::FairShareLottery => caps(Nonadaptive, false, false, false),
            SchedulerKind::AdaptiveFairShare => caps(Adaptive, false, false, false),
            SchedulerKind::CompleteLottery => caps(Adaptive, false, true, false),
            SchedulerKind::CompleteNashDp => caps(Preemptive, false, true, false),
            SchedulerKind::NearDeterministicThreshold => caps(Adaptive, false, false, false),
            SchedulerKind::ForgivingLottery => caps(Adaptive, false, false, false),
            SchedulerKind::ForgivingVirtualLength => caps(Preemptive, false, true, true),
        }
    }

    /// Parameter names and meanings, for listings.
    pub fn parameters(self) -> &'static [(&'static str, &'static str)] {
        match self {
            SchedulerKind::TimeoutOblivious => &[("timeout", "per-job timeout T (default ceil(D/sqrt(n)))")],
            SchedulerKind::FairShareLottery => &[
                ("mode", "bounded_m | general_half_fair (default general_half_fair)"),
                ("m", "largest grantable time M, required for bounded_m"),
            ],
            SchedulerKind::CompleteNashDp => &[
                ("table_limit", "bound on n*D^3 (default 10^8)"),
                ("state_limit", "bound on memoized states (default 2*10^6)"),
            ],
            SchedulerKind::ForgivingLottery => &[("unit", "fixed time unit u instead of floor(R/m)")],
            _ => &[],
        }
    }
}

impl std::fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = SchedulerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchedulerKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SchedulerError::InvalidParameter(format!("unknown scheduler kind {s:?}")))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SchedulerParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<FairShareMode>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timeout: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub unit: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_limit: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_limit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchedulerSpec {
    pub kind: SchedulerKind,
    #[serde(default)]
    pub params: SchedulerParams,
}

/// A mechanism with everything that depends only on the instance precomputed.
pub trait Mechanism: Send + Sync {
    fn capabilities(&self) -> Capabilities;
    fn start(&self) -> Box<dyn Session + '_>;
}

impl SchedulerSpec {
    pub fn new(kind: SchedulerKind) -> Self {
        SchedulerSpec {
            kind,
            params: SchedulerParams::default(),
        }
    }

    pub fn fair_share_bounded(m: u32) -> Self {
        SchedulerSpec {
            kind: SchedulerKind::FairShareLottery,
            params: SchedulerParams {
                mode: Some(FairShareMode::BoundedM),
                m: Some(m),
                ..Default::default()
            },
        }
    }

    pub fn forgiving_with_unit(unit: u32) -> Self {
        SchedulerSpec {
            kind: SchedulerKind::ForgivingLottery,
            params: SchedulerParams {
                unit: Some(unit),
                ..Default::default()
            },
        }
    }

    pub fn capabilities(&self) -> Capabilities {
        self.kind.capabilities()
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn prepare(&self, instance: &Instance) -> Result<Box<dyn Mechanism>, SchedulerError> {
        let p = &self.params;
        Ok(match self.kind {
            SchedulerKind::ShortestFirst => Box::new(shortest_first::ShortestFirst::new(instance)),
            SchedulerKind::TrivialOblivious => Box::new(oblivious::Oblivious::trivial(instance)),
            SchedulerKind::TimeoutOblivious => {
                Box::new(oblivious::Oblivious::timeout(instance, p.timeout)?)
            }
            SchedulerKind::RandomThresholdOblivious => {
                Box::new(oblivious::Oblivious::random_threshold(instance))
            }
            SchedulerKind::Canonical => Box::new(canonical::Canonical::new(instance)?),
            SchedulerKind::FairShareLottery => Box::new(fair_share::FairShare::new(
                instance,
                p.mode.unwrap_or(FairShareMode::GeneralHalfFair),
                p.m,
            )?),
            SchedulerKind::AdaptiveFairShare => {
                Box::new(adaptive_fair_share::AdaptiveFairShare::new(instance))
            }
            SchedulerKind::CompleteLottery => {
                Box::new(complete_lottery::CompleteLottery::new(instance)?)
            }
            SchedulerKind::CompleteNashDp => Box::new(complete_nash::CompleteNash::new(
                instance,
                p.table_limit,
                p.state_limit,
            )?),
            SchedulerKind::NearDeterministicThreshold => {
                Box::new(near_deterministic::NearDeterministic::new(instance))
            }
            SchedulerKind::ForgivingLottery => {
                Box::new(forgiving::ForgivingLottery::new(instance, p.unit)?)
            }
            SchedulerKind::ForgivingVirtualLength => {
                Box::new(forgiving::VirtualLength::new(instance))
            }
        })
    }
}
