//! Instances and reports.

use serde::{Deserialize, Serialize};

use crate::cdf::{point_mass, LengthCdf};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("deadline must be at least 1")]
    ZeroDeadline,
    #[error("instance has no players")]
    NoPlayers,
    #[error("player {player}: report value must be at least 1")]
    ZeroReport { player: usize },
}

/// What a player tells the mechanism.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Report {
    Quantitative(LengthCdf),
    Qualitative(u32),
    Preference(u32),
}

impl Report {
    /// Single-number reading: the median of a quantitative report, the value otherwise.
    pub fn estimate(&self) -> u32 {
        match self {
            Report::Quantitative(cdf) => cdf.median().unwrap_or(u32::MAX),
            Report::Qualitative(e) | Report::Preference(e) => *e,
        }
    }

    /// Distribution reading: a point estimate becomes a point mass.
    pub fn cdf(&self) -> LengthCdf {
        match self {
            Report::Quantitative(cdf) => cdf.clone(),
            Report::Qualitative(e) | Report::Preference(e) => point_mass(*e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Player {
    pub true_cdf: LengthCdf,
    pub report: Report,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct Instance {
    pub deadline: u32,
    pub players: Vec<Player>,
    #[serde(default)]
    pub label: String,
}

#[derive(Deserialize)]
struct RawInstance {
    deadline: u32,
    players: Vec<Player>,
    #[serde(default)]
    label: String,
}

impl TryFrom<RawInstance> for Instance {
    type Error = InstanceError;

    fn try_from(raw: RawInstance) -> Result<Self, Self::Error> {
        Instance::new(raw.deadline, raw.players, raw.label)
    }
}

impl Instance {
    pub fn new(
        deadline: u32,
        players: Vec<Player>,
        label: impl Into<String>,
    ) -> Result<Self, InstanceError> {
        if deadline == 0 {
            return Err(InstanceError::ZeroDeadline);
        }
        if players.is_empty() {
            return Err(InstanceError::NoPlayers);
        }
        for (player, p) in players.iter().enumerate() {
            if let Report::Qualitative(0) | Report::Preference(0) = p.report {
                return Err(InstanceError::ZeroReport { player });
            }
        }
        Ok(Instance {
            deadline,
            players,
            label: label.into(),
        })
    }

    /// Every player reports its true distribution.
    pub fn truthful(deadline: u32, cdfs: Vec<LengthCdf>, label: impl Into<String>) -> Self {
        let players = cdfs
            .into_iter()
            .map(|cdf| Player {
                report: Report::Quantitative(cdf.clone()),
                true_cdf: cdf,
            })
            .collect();
        Self::new(deadline, players, label).expect("valid truthful instance")
    }

    /// Deterministic lengths with qualitative reports.
    pub fn deterministic(deadline: u32, lengths: &[u32], reports: &[u32]) -> Self {
        assert_eq!(lengths.len(), reports.len());
        let players = lengths
            .iter()
            .zip(reports)
            .map(|(&l, &r)| Player {
                true_cdf: point_mass(l),
                report: Report::Qualitative(r),
            })
            .collect();
        Self::new(deadline, players, "deterministic").expect("valid deterministic instance")
    }

    pub fn n(&self) -> usize {
        self.players.len()
    }

    pub fn reports(&self) -> Vec<Report> {
        self.players.iter().map(|p| p.report.clone()).collect()
    }

    pub fn with_report(&self, player: usize, report: Report) -> Instance {
        let mut copy = self.clone();
        copy.players[player].report = report;
        copy
    }

    pub fn with_reports(&self, reports: &[Report]) -> Instance {
        assert_eq!(reports.len(), self.n());
        let mut copy = self.clone();
        for (p, r) in copy.players.iter_mut().zip(reports) {
            p.report = r.clone();
        }
        copy
    }

    /// Replaces every report by the true distribution.
    pub fn truthful_copy(&self) -> Instance {
        let reports: Vec<Report> = self
            .players
            .iter()
            .map(|p| Report::Quantitative(p.true_cdf.clone()))
            .collect();
        self.with_reports(&reports)
    }
}
