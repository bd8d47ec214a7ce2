//! Runs one configured experiment: evaluation, fairness, requested analyses.

use serde::Serialize;
use serde_json::{json, Value};
use sscd_core::analysis::{
    best_response_gap, check_error_properties, completeness_check, obliviousness_check, payoff_curve,
    symmetric_grid,
};
use sscd_core::engine::{exact_evaluate, monte_carlo, EngineError, EvalResult, CSV_SCHEMA_VERSION};
use sscd_core::metrics::{exact_preemptive_optimum, fairness_ratio, total_fair_share, FairnessReport, DEFAULT_STATE_LIMIT};
use sscd_core::model::Instance;
use sscd_core::rational::{self, Prob};
use sscd_core::schedulers::SchedulerSpec;

use crate::config::{AnalysisConfig, Engine};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Outcome {
    pub schema_version: u32,
    pub spec: SchedulerSpec,
    pub deadline: u32,
    pub n: usize,
    pub result: EvalResult,
    pub fairness: FairnessReport,
    #[serde(serialize_with = "ser_prob")]
    pub total_fair_share: Prob,
    pub analyses: Vec<Value>,
}

fn ser_prob<S: serde::Serializer>(p: &Prob, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(p))
}

pub fn evaluate(spec: &SchedulerSpec, instance: &Instance, engine: Engine) -> Result<EvalResult, EngineError> {
    match engine {
        Engine::Exact { branch_limit } => exact_evaluate(spec, instance, branch_limit),
        Engine::MonteCarlo { trials, seed, .. } => monte_carlo(spec, instance, trials, seed),
    }
}

pub fn run(
    spec: &SchedulerSpec,
    instance: &Instance,
    engine: Engine,
    analyses: &[AnalysisConfig],
) -> Result<Outcome, CliError> {
    let result = evaluate(spec, instance, engine)?;
    let fairness = fairness_ratio(&result, instance);
    let analyses = analyses
        .iter()
        .enumerate()
        .map(|(i, a)| analyze(spec, instance, engine.branch_limit(), a, i))
        .collect::<Result<_, _>>()?;
    Ok(Outcome {
        schema_version: CSV_SCHEMA_VERSION,
        spec: spec.clone(),
        deadline: instance.deadline,
        n: instance.n(),
        result,
        fairness,
        total_fair_share: total_fair_share(instance),
        analyses,
    })
}

fn check_player(instance: &Instance, player: usize, index: usize) -> Result<(), CliError> {
    if player >= instance.n() {
        return Err(CliError::Config(format!(
            "analyses[{index}].player: {player} out of range for {} players",
            instance.n()
        )));
    }
    Ok(())
}

fn analyze(
    spec: &SchedulerSpec,
    instance: &Instance,
    limit: u64,
    analysis: &AnalysisConfig,
    index: usize,
) -> Result<Value, CliError> {
    Ok(match analysis {
        AnalysisConfig::PayoffCurve { player, grid } => {
            check_player(instance, *player, index)?;
            let grid = match grid {
                Some(g) => g.clone(),
                None => symmetric_grid(instance.players[*player].report.estimate().max(1)),
            };
            let curve = payoff_curve(spec, instance, *player, &grid, limit)?;
            json!({"kind": "payoff_curve", "curve": to_value(&curve)})
        }
        AnalysisConfig::ErrorProperties { player, true_length } => {
            check_player(instance, *player, index)?;
            if *true_length == 0 {
                return Err(CliError::Config(format!("analyses[{index}].true_length: must be at least 1")));
            }
            let curve = payoff_curve(spec, instance, *player, &symmetric_grid(*true_length), limit)?;
            let props = check_error_properties(&curve, *true_length);
            json!({"kind": "error_properties", "properties": to_value(&props), "curve": to_value(&curve)})
        }
        AnalysisConfig::BestResponseGap { player, honest, grid } => {
            check_player(instance, *player, index)?;
            let gap = best_response_gap(spec, instance, *player, honest, grid, limit)?;
            json!({"kind": "best_response_gap", "player": player, "gap": rational::format(&gap)})
        }
        AnalysisConfig::Completeness {
            players,
            max_len,
            deadlines,
        } => {
            let report = completeness_check(spec, players[0]..=players[1], *max_len, deadlines[0]..=deadlines[1], limit)?;
            json!({"kind": "completeness", "passed": report.passed(), "report": to_value(&report)})
        }
        AnalysisConfig::Obliviousness { profiles } => {
            if let Some(k) = profiles.iter().position(|p| p.len() != instance.n()) {
                return Err(CliError::Config(format!(
                    "analyses[{index}].profiles[{k}]: expected {} reports",
                    instance.n()
                )));
            }
            let report = obliviousness_check(spec, instance, profiles, limit)?;
            json!({"kind": "obliviousness", "report": to_value(&report)})
        }
        AnalysisConfig::Optimum { state_limit } => {
            let opt = exact_preemptive_optimum(instance, state_limit.unwrap_or(DEFAULT_STATE_LIMIT))
                .map_err(CliError::Metrics)?;
            json!({"kind": "optimum", "welfare": rational::format(&opt), "value": rational::to_f64(&opt)})
        }
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("analysis results serialize")
}
