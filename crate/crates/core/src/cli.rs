//! Command-line front door: scenario parsing, single runs, paired
//! comparisons, the built-in benchmark suite, and trace export.
//!
//! Exit codes: 0 success, 2 usage error, 3 scenario/config error,
//! 4 runtime abort (detector failure, invariant violation, I/O).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::ConfigError;
use crate::experiment::{
    regime_summary, run_comparison, run_simulation, benchmark_suite,
    write_regime_summary_json, ComparisonReport,
};
use crate::scenario::ScenarioConfig;
use crate::signal::ControllerKind;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONFIG: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "intersim",
    version,
    about = "Deterministic four-way intersection microsimulator with adaptive signal timing"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ControllerArg {
    Static,
    Adaptive,
}

impl From<ControllerArg> for ControllerKind {
    fn from(arg: ControllerArg) -> Self {
        match arg {
            ControllerArg::Static => ControllerKind::Static,
            ControllerArg::Adaptive => ControllerKind::Adaptive,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario under one controller and write the result as JSON.
    Run {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Which controller drives the signals.
        #[arg(long, value_enum)]
        controller: ControllerArg,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file for the run result (stdout when omitted).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Also write the event trace next to the output file
        /// (<output>.trace.jsonl); requires --output.
        #[arg(long)]
        trace: bool,
    },
    /// Run both controllers on one scenario with paired seeds and write
    /// runs.csv and summary.csv.
    Compare {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
        /// Override the scenario's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Paired replications per scenario; replication r offsets the seed by r.
        #[arg(long, default_value_t = 5)]
        replications: u32,
        /// Output directory for the CSV files.
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Run the built-in 15-scenario benchmark suite and write runs.csv,
    /// summary.csv, and regimes.json.
    Suite {
        /// Paired replications per scenario.
        #[arg(long, default_value_t = 5)]
        replications: u32,
        /// Output directory for the report files.
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Parse and validate a scenario file, reporting every violation.
    Validate {
        /// Scenario file (TOML).
        #[arg(long)]
        scenario: PathBuf,
    },
}

/// Read, parse, and validate a scenario file.
pub fn parse_scenario(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let config: ScenarioConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

/// Parse the process arguments and dispatch. Returns the process exit code.
pub fn run_cli() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version on stdout with exit 0, and usage
            // errors on stderr with exit 2.
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Runtime(#[from] crate::error::SimError),
    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Runtime(_) | CliError::Output { .. } => EXIT_RUNTIME,
        }
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            scenario,
            controller,
            seed,
            output,
            trace,
        } => run_command(&scenario, controller.into(), seed, output.as_deref(), trace),
        Command::Compare {
            scenario,
            seed,
            replications,
            output,
        } => compare_command(&scenario, seed, replications, &output),
        Command::Suite {
            replications,
            output,
        } => suite_command(replications, &output),
        Command::Validate { scenario } => {
            let config = parse_scenario(&scenario)?;
            println!("ok: scenario '{}' is valid", config.name);
            Ok(())
        }
    }
}

fn apply_seed(mut config: ScenarioConfig, seed: Option<u64>) -> ScenarioConfig {
    if let Some(seed) = seed {
        config.seed = seed;
    }
    config
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

fn run_command(
    scenario_path: &Path,
    kind: ControllerKind,
    seed: Option<u64>,
    output: Option<&Path>,
    trace: bool,
) -> Result<(), CliError> {
    if trace && output.is_none() {
        return Err(CliError::Usage(
            "--trace requires --output so the trace file has a place to live".into(),
        ));
    }
    let scenario = apply_seed(parse_scenario(scenario_path)?, seed);

    let result = if trace {
        let output = output.expect("checked above");
        let trace_path = output.with_extension("trace.jsonl");
        let mut trace_bytes: Vec<u8> = Vec::new();
        let mut detector = crate::detection::NoisyDetector::new(
            scenario.noise,
            crate::experiment::noise_rng(scenario.seed),
        );
        let result = crate::experiment::run_with_detector(
            &scenario,
            kind,
            &mut detector,
            Some(&mut trace_bytes),
        )?;
        write_file(&trace_path, &trace_bytes)?;
        result
    } else {
        run_simulation(&scenario, kind)?
    };

    let mut json = serde_json::to_string_pretty(&result).expect("result serializes");
    json.push('\n');
    match output {
        Some(path) => write_file(path, json.as_bytes())?,
        None => print!("{json}"),
    }
    Ok(())
}

fn write_report_files(
    report: &ComparisonReport,
    output: &Path,
    with_regimes: bool,
) -> Result<(), CliError> {
    fs::create_dir_all(output).map_err(|source| CliError::Output {
        path: output.to_path_buf(),
        source,
    })?;

    let mut runs_csv = Vec::new();
    report.write_runs_csv(&mut runs_csv).expect("vec write");
    write_file(&output.join("runs.csv"), &runs_csv)?;

    let mut summary_csv = Vec::new();
    report.write_summary_csv(&mut summary_csv).expect("vec write");
    write_file(&output.join("summary.csv"), &summary_csv)?;

    if with_regimes {
        let summary = regime_summary(report).map_err(CliError::Runtime)?;
        let mut json = Vec::new();
        write_regime_summary_json(&summary, &mut json).expect("vec write");
        write_file(&output.join("regimes.json"), &json)?;
    }
    Ok(())
}

fn print_report(report: &ComparisonReport) {
    for row in &report.rows {
        println!(
            "{}: static {:.1}, adaptive {:.1}, improvement {:+.2}%",
            row.scenario, row.static_mean, row.adaptive_mean, row.improvement_percent
        );
    }
    println!(
        "improvement mean {:+.2}% (min {:+.2}%, max {:+.2}%)",
        report.summary.mean_improvement_percent,
        report.summary.min_improvement_percent,
        report.summary.max_improvement_percent
    );
}

fn compare_command(
    scenario_path: &Path,
    seed: Option<u64>,
    replications: u32,
    output: &Path,
) -> Result<(), CliError> {
    let scenario = apply_seed(parse_scenario(scenario_path)?, seed);
    let report = run_comparison(std::slice::from_ref(&scenario), replications)?;
    write_report_files(&report, output, false)?;
    print_report(&report);
    Ok(())
}

fn suite_command(replications: u32, output: &Path) -> Result<(), CliError> {
    let suite = benchmark_suite();
    let report = run_comparison(&suite, replications)?;
    write_report_files(&report, output, true)?;
    print_report(&report);
    let regimes = regime_summary(&report).map_err(CliError::Runtime)?;
    let mut line = Vec::new();
    write_regime_summary_json(&regimes, &mut line).expect("vec write");
    let mut stdout = std::io::stdout();
    let _ = stdout.write_all(&line);
    Ok(())
}
