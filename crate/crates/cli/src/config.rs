//! Experiment configuration: one JSON document per run or sweep.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sscd_core::engine::DEFAULT_BRANCH_LIMIT;
use sscd_core::instances::GeneratorSpec;
use sscd_core::model::{Instance, Report};
use sscd_core::schedulers::SchedulerSpec;

use crate::error::CliError;

/// Overrides the built-in default branch limit; config values and flags still win.
pub const BRANCH_LIMIT_ENV: &str = "SSCD_BRANCH_LIMIT";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheduler: SchedulerSpec,
    pub instance: InstanceSource,
    pub engine: EngineConfig,
    #[serde(default)]
    pub analyses: Vec<AnalysisConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceSource {
    Inline(Instance),
    Generator(GeneratorSpec),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    MonteCarlo,
    Exact,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub mode: Mode,
    #[serde(default)]
    pub trials: Option<u64>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub branch_limit: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisConfig {
    /// Exact payoff of one player over a report grid; defaults to `1..=2l-1`
    /// around the player's reported estimate.
    PayoffCurve {
        player: usize,
        #[serde(default)]
        grid: Option<Vec<Report>>,
    },
    ErrorProperties { player: usize, true_length: u32 },
    BestResponseGap {
        player: usize,
        honest: Report,
        grid: Vec<Report>,
    },
    Completeness {
        players: [usize; 2],
        max_len: u32,
        deadlines: [u32; 2],
    },
    Obliviousness { profiles: Vec<Vec<Report>> },
    Optimum {
        #[serde(default)]
        state_limit: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    #[default]
    Both,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Flag values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub exact: bool,
    pub branch_limit: Option<u64>,
}

/// Engine settings after overrides and mode checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Exact { branch_limit: u64 },
    MonteCarlo { trials: u64, seed: u64, branch_limit: u64 },
}

impl Engine {
    pub fn branch_limit(&self) -> u64 {
        match *self {
            Engine::Exact { branch_limit } | Engine::MonteCarlo { branch_limit, .. } => branch_limit,
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_json(&text, &path.display().to_string())
}

/// Deserializes with the failing field's path in the message.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{origin}: field `{path}`: {}", e.inner()))
    })
}

pub fn from_value<T: serde::de::DeserializeOwned>(value: serde_json::Value, origin: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{origin}: field `{path}`: {}", e.inner()))
    })
}

fn default_branch_limit() -> Result<u64, CliError> {
    match std::env::var(BRANCH_LIMIT_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{BRANCH_LIMIT_ENV}: not a positive integer: {v:?}"))),
        Err(_) => Ok(DEFAULT_BRANCH_LIMIT),
    }
}

impl ExperimentConfig {
    pub fn engine(&self, o: &Overrides) -> Result<Engine, CliError> {
        let branch_limit = match o.branch_limit.or(self.engine.branch_limit) {
            Some(b) => b,
            None => default_branch_limit()?,
        };
        if branch_limit == 0 {
            return Err(CliError::Config("engine.branch_limit: must be at least 1".into()));
        }
        if o.exact || self.engine.mode == Mode::Exact {
            return Ok(Engine::Exact { branch_limit });
        }
        let trials = o
            .trials
            .or(self.engine.trials)
            .ok_or_else(|| CliError::Config("engine.trials: required in monte_carlo mode".into()))?;
        if trials == 0 {
            return Err(CliError::Config("engine.trials: must be at least 1".into()));
        }
        let seed = o
            .seed
            .or(self.engine.seed)
            .ok_or_else(|| CliError::Config("engine.seed: required in monte_carlo mode".into()))?;
        Ok(Engine::MonteCarlo {
            trials,
            seed,
            branch_limit,
        })
    }

    /// File references resolve relative to `base` (the config's directory).
    pub fn load_instance(&self, base: &Path) -> Result<Instance, CliError> {
        match &self.instance {
            InstanceSource::Inline(inst) => Ok(inst.clone()),
            InstanceSource::Generator(g) => g
                .generate()
                .map_err(|e| CliError::Config(format!("instance.generator: {e}"))),
            InstanceSource::File(p) => read_json(&base.join(p)),
        }
    }

    pub fn output_path(&self, o: &Overrides) -> Option<PathBuf> {
        o.out.clone().or_else(|| self.output.path.clone())
    }
}
