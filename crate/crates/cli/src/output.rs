//! CSV and JSON emission. Column lists live in `schema/results.json`.

use std::io::Write;
use std::path::Path;

use sscd_core::engine::{EvalMode, CSV_SCHEMA_VERSION};
use sscd_core::metrics::FairnessRatio;
use sscd_core::rational;

use crate::error::CliError;
use crate::experiment::Outcome;

pub const RUN_COLUMNS: &[&str] = &[
    "schema_version",
    "label",
    "scheduler",
    "mode",
    "trials",
    "seed",
    "branches",
    "n",
    "deadline",
    "player",
    "fair_share",
    "fair_share_value",
    "achieved",
    "achieved_se",
    "achieved_exact",
    "ratio",
    "welfare",
    "welfare_se",
    "fairness_ratio",
    "fairness_ratio_se",
];

/// Sweep rows start with one column per swept parameter.
pub const SWEEP_COLUMNS: &[&str] = &[
    "schema_version",
    "label",
    "scheduler",
    "mode",
    "trials",
    "seed",
    "branches",
    "n",
    "deadline",
    "welfare",
    "welfare_se",
    "welfare_exact",
    "total_fair_share",
    "fairness_ratio",
    "fairness_ratio_se",
    "argmin_player",
];

fn provenance(o: &Outcome) -> [String; 9] {
    let (trials, seed, branches) = match o.result.mode {
        EvalMode::Exact { branches } => (String::new(), String::new(), branches.to_string()),
        EvalMode::MonteCarlo { trials, seed } => (trials.to_string(), seed.to_string(), String::new()),
    };
    [
        CSV_SCHEMA_VERSION.to_string(),
        o.result.label.clone(),
        o.result.scheduler.clone(),
        o.result.mode.name().to_string(),
        trials,
        seed,
        branches,
        o.n.to_string(),
        o.deadline.to_string(),
    ]
}

fn ratio_cells(r: &FairnessRatio) -> [String; 2] {
    match r {
        FairnessRatio::Exact(p) => [rational::to_f64(p).to_string(), "0".into()],
        FairnessRatio::Sampled { value, std_err } => [value.to_string(), std_err.to_string()],
        FairnessRatio::Vacuous => [String::new(), String::new()],
    }
}

pub fn run_rows(o: &Outcome) -> Vec<Vec<String>> {
    let base = provenance(o);
    let [ratio, ratio_se] = ratio_cells(&o.fairness.ratio);
    o.fairness
        .rows
        .iter()
        .zip(&o.result.finish_prob)
        .map(|(row, est)| {
            let mut cells = base.to_vec();
            cells.extend([
                row.player.to_string(),
                rational::format(&row.fair_share),
                rational::to_f64(&row.fair_share).to_string(),
                est.value().to_string(),
                est.std_err().to_string(),
                est.exact().map(rational::format).unwrap_or_default(),
                row.ratio.map(|r| r.to_string()).unwrap_or_default(),
                o.result.welfare.value().to_string(),
                o.result.welfare.std_err().to_string(),
                ratio.clone(),
                ratio_se.clone(),
            ]);
            cells
        })
        .collect()
}

pub fn sweep_row(key: &[String], o: &Outcome) -> Vec<String> {
    let mut cells = key.to_vec();
    cells.extend(provenance(o));
    let [ratio, ratio_se] = ratio_cells(&o.fairness.ratio);
    cells.extend([
        o.result.welfare.value().to_string(),
        o.result.welfare.std_err().to_string(),
        o.result.welfare.exact().map(rational::format).unwrap_or_default(),
        rational::format(&o.total_fair_share),
        ratio,
        ratio_se,
        o.fairness.argmin.map(|i| i.to_string()).unwrap_or_default(),
    ]);
    cells
}

/// Writes a CSV document, optionally preceded by a `#` timestamp comment.
pub fn write_csv(
    out: &mut dyn Write,
    header: &[String],
    rows: &[Vec<String>],
    timestamp: bool,
) -> Result<(), CliError> {
    if timestamp {
        let secs = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        writeln!(out, "# sscd {} generated_at_unix={secs}", env!("CARGO_PKG_VERSION"))?;
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    create(path)?;
    std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

pub fn create(path: &Path) -> Result<std::fs::File, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    }
    std::fs::File::create(path).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}
