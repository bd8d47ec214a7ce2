mod config;
mod error;
mod experiment;
mod generate;
mod output;
mod sweep;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use sscd_core::instances::GeneratorSpec;
use sscd_core::schedulers::SchedulerKind;

use config::{read_json, ExperimentConfig, Format, Overrides};
use error::CliError;

/// Experiments with single-machine schedulers under a common deadline.
#[derive(Parser)]
#[command(name = "sscd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one scheduler on one instance.
    Run(RunArgs),
    /// Evaluate a grid of configurations, one CSV row per point.
    Sweep(RunArgs),
    /// Write an instance JSON file from a generator.
    Generate(GenerateArgs),
    /// Print scheduler kinds with capabilities and parameters.
    ListSchedulers {
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output path; `.csv` and `.json` extensions are set per format.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Force exact enumeration.
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    branch_limit: Option<u64>,
    #[arg(long)]
    no_header_timestamp: bool,
}

impl RunArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            out: self.out.clone(),
            seed: self.seed,
            trials: self.trials,
            exact: self.exact,
            branch_limit: self.branch_limit,
        }
    }

    fn base_dir(&self) -> &Path {
        self.config.parent().unwrap_or(Path::new("."))
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator kind, e.g. `theorem1` or `oblivious_lb`.
    #[arg(required_unless_present = "config")]
    kind: Option<String>,
    /// Generator parameters as key=value.
    params: Vec<String>,
    /// Generator spec as a JSON file instead of arguments.
    #[arg(long, conflicts_with = "kind")]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::ListSchedulers { json } => cmd_list_schedulers(json),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sscd: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Writes CSV and/or JSON to `path` or, without a path, the preferred one to stdout.
fn emit(
    path: Option<PathBuf>,
    format: Format,
    header: &[String],
    rows: &[Vec<String>],
    doc: &Value,
    timestamp: bool,
) -> Result<(), CliError> {
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            if format == Format::Json {
                serde_json::to_writer_pretty(&mut stdout, doc).map_err(|e| CliError::Output(e.to_string()))?;
                writeln!(stdout)?;
                Ok(())
            } else {
                output::write_csv(&mut stdout, header, rows, timestamp)
            }
        }
        Some(p) => {
            if format != Format::Json {
                let csv_path = p.with_extension("csv");
                let mut f = output::create(&csv_path)?;
                output::write_csv(&mut f, header, rows, timestamp)?;
            }
            if format != Format::Csv {
                let json_path = p.with_extension("json");
                output::write_json(&json_path, doc)?;
            }
            Ok(())
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let cfg: ExperimentConfig = read_json(&args.config)?;
    let o = args.overrides();
    let engine = cfg.engine(&o)?;
    let instance = cfg.load_instance(args.base_dir())?;
    let outcome = experiment::run(&cfg.scheduler, &instance, engine, &cfg.analyses)?;
    let header: Vec<String> = output::RUN_COLUMNS.iter().map(|s| s.to_string()).collect();
    let doc = serde_json::to_value(&outcome).map_err(|e| CliError::Output(e.to_string()))?;
    emit(
        cfg.output_path(&o),
        cfg.output.format,
        &header,
        &output::run_rows(&outcome),
        &doc,
        !args.no_header_timestamp,
    )
}

fn cmd_sweep(args: &RunArgs) -> Result<(), CliError> {
    let doc: Value = read_json(&args.config)?;
    let plan = sweep::SweepPlan::parse(doc)?;
    let points = plan.points()?;
    let o = args.overrides();
    let mut header: Vec<String> = plan.axes.iter().map(|a| a.path.clone()).collect();
    header.extend(output::SWEEP_COLUMNS.iter().map(|s| s.to_string()));
    let mut rows = Vec::with_capacity(points.len());
    let mut docs = Vec::with_capacity(points.len());
    for p in &points {
        let engine = p.config.engine(&o)?;
        let instance = p.config.load_instance(args.base_dir())?;
        let outcome = experiment::run(&p.config.scheduler, &instance, engine, &p.config.analyses)?;
        rows.push(output::sweep_row(&p.key, &outcome));
        let params: serde_json::Map<String, Value> =
            plan.axes.iter().zip(&p.key).map(|(a, k)| (a.path.clone(), Value::String(k.clone()))).collect();
        docs.push(json!({"parameters": params, "outcome": outcome}));
    }
    let first = &points[0].config;
    emit(
        first.output_path(&o),
        first.output.format,
        &header,
        &rows,
        &Value::Array(docs),
        !args.no_header_timestamp,
    )
}

fn cmd_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let spec: GeneratorSpec = match (&args.config, &args.kind) {
        (Some(path), _) => read_json(path)?,
        (None, Some(kind)) => generate::spec_from_args(kind, &args.params)?,
        (None, None) => unreachable!("clap requires kind or --config"),
    };
    let instance = spec
        .generate()
        .map_err(|e| CliError::Config(format!("generator: {e}")))?;
    match &args.out {
        Some(p) => output::write_json(p, &instance),
        None => {
            let mut out = std::io::stdout().lock();
            serde_json::to_writer_pretty(&mut out, &instance).map_err(|e| CliError::Output(e.to_string()))?;
            writeln!(out)?;
            Ok(())
        }
    }
}

fn cmd_list_schedulers(as_json: bool) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    if as_json {
        let list: Vec<Value> = SchedulerKind::ALL
            .iter()
            .map(|k| {
                let params: serde_json::Map<String, Value> = k
                    .parameters()
                    .iter()
                    .map(|(name, doc)| (name.to_string(), Value::String(doc.to_string())))
                    .collect();
                json!({"kind": k.name(), "capabilities": k.capabilities(), "params": params})
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &list).map_err(|e| CliError::Output(e.to_string()))?;
        writeln!(out)?;
        return Ok(());
    }
    for k in SchedulerKind::ALL {
        let c = k.capabilities();
        let mut flags = vec![format!("{:?}", c.adaptivity).to_lowercase()];
        for (on, name) in [(c.oblivious, "oblivious"), (c.complete, "complete"), (c.deterministic, "deterministic")] {
            if on {
                flags.push(name.to_string());
            }
        }
        let params: Vec<String> = k.parameters().iter().map(|(n, d)| format!("{n}: {d}")).collect();
        let params = if params.is_empty() { String::new() } else { format!("  [{}]", params.join("; ")) };
        writeln!(out, "{:<30} {}{}", k.name(), flags.join(","), params)?;
    }
    Ok(())
}
