//! Command-line entry point: one subcommand per experiment plus a generic
//! `run --config <path>`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperpure_cli::config::{ExperimentKind, OutputFormat, RunConfig};
use hyperpure_cli::error::Result;
use hyperpure_cli::experiments;
use hyperpure_cli::report::RunSummary;
use serde_json::{Map, Value};

#[derive(Parser)]
#[command(
    name = "hyperpure",
    version,
    about = "Simulator and analysis toolkit for chip-to-chip hyperentanglement \
             distribution and entanglement purification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for stochastic experiments (echoed in every report).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to the config value, then $HYPERPURE_OUT,
    /// then ./reports.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Tabular artifact format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Suppress the summary lines on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config file.
    Run {
        /// Path to the JSON config document.
        #[arg(long, value_name = "PATH")]
        config: PathBuf,
    },
    /// Figures of merit of the distributed hyperentangled state.
    DistributeBaseline {
        /// Spatial-qubit Werner fidelity of the distributed state.
        #[arg(long)]
        f_spatial: Option<f64>,
        /// Polarization-qubit Werner fidelity of the distributed state.
        #[arg(long)]
        f_polarization: Option<f64>,
    },
    /// Bit-flip noise plus purification at one error rate.
    BfPurify {
        /// Bit-flip probability.
        #[arg(long)]
        p: Option<f64>,
        /// Calibrated spatial Werner fidelity of the noiseless baseline.
        #[arg(long)]
        baseline_f_spatial: Option<f64>,
        /// Calibrated polarization Werner fidelity of the noiseless baseline.
        #[arg(long)]
        baseline_f_polarization: Option<f64>,
    },
    /// Phase-flip noise plus Hadamard-assisted purification.
    PfPurify {
        /// Phase-flip probability.
        #[arg(long)]
        p: Option<f64>,
    },
    /// CHSH S before and after purification across bit-flip rates.
    ChshScan,
    /// Purified fidelity for Werner inputs, pipeline vs closed form.
    WernerCurve {
        /// Number of grid points.
        #[arg(long)]
        points: Option<usize>,
        /// Lower end of the input-fidelity grid.
        #[arg(long)]
        f_min: Option<f64>,
        /// Upper end of the input-fidelity grid.
        #[arg(long)]
        f_max: Option<f64>,
    },
    /// Full 16-row Bell-pair syndrome table at one Werner fidelity.
    SyndromeTable {
        /// Werner fidelity of both degrees of freedom.
        #[arg(long)]
        f: Option<f64>,
    },
    /// Photon-pair source figures: squeezing, purity, rate budget.
    SourceMetrics {
        /// Measured coincidence-to-accidental ratio.
        #[arg(long)]
        car: Option<f64>,
        /// Measured unheralded second-order autocorrelation.
        #[arg(long)]
        g2: Option<f64>,
    },
    /// Phase-lock loop simulation with drift, noise, and kicks.
    PllLock {
        /// Simulated duration in seconds.
        #[arg(long)]
        duration: Option<f64>,
        /// Disable the controller to record free-running drift.
        #[arg(long)]
        open_loop: bool,
    },
    /// Threaded sweep of purification over bit-flip rates.
    PurifySweep {
        /// Number of worker threads.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Closed-form bit-flip purification curve, 501 points on [0.5, 1].
    PurifyCurve,
}

fn insert_if<T: Into<Value>>(map: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(value) = value {
        map.insert(key.to_string(), value.into());
    }
}

fn parameters_value(map: Map<String, Value>) -> Value {
    if map.is_empty() {
        Value::Null
    } else {
        Value::Object(map)
    }
}

fn build_config(command: &Command) -> RunConfig {
    let mut map = Map::new();
    let kind = match command {
        Command::Run { .. } | Command::PurifyCurve => unreachable!("handled by caller"),
        Command::DistributeBaseline {
            f_spatial,
            f_polarization,
        } => {
            insert_if(&mut map, "f_spatial", *f_spatial);
            insert_if(&mut map, "f_polarization", *f_polarization);
            ExperimentKind::DistributeBaseline
        }
        Command::BfPurify {
            p,
            baseline_f_spatial,
            baseline_f_polarization,
        } => {
            insert_if(&mut map, "p", *p);
            insert_if(&mut map, "baseline_f_spatial", *baseline_f_spatial);
            insert_if(&mut map, "baseline_f_polarization", *baseline_f_polarization);
            ExperimentKind::BfPurify
        }
        Command::PfPurify { p } => {
            insert_if(&mut map, "p", *p);
            ExperimentKind::PfPurify
        }
        Command::ChshScan => ExperimentKind::ChshScan,
        Command::WernerCurve {
            points,
            f_min,
            f_max,
        } => {
            insert_if(&mut map, "points", points.map(|v| v as u64));
            insert_if(&mut map, "f_min", *f_min);
            insert_if(&mut map, "f_max", *f_max);
            ExperimentKind::WernerCurve
        }
        Command::SyndromeTable { f } => {
            insert_if(&mut map, "f", *f);
            ExperimentKind::SyndromeTable
        }
        Command::SourceMetrics { car, g2 } => {
            insert_if(&mut map, "car", *car);
            insert_if(&mut map, "g2", *g2);
            ExperimentKind::SourceMetrics
        }
        Command::PllLock {
            duration,
            open_loop,
        } => {
            insert_if(&mut map, "duration", *duration);
            if *open_loop {
                map.insert("open_loop".to_string(), Value::Bool(true));
            }
            ExperimentKind::PllLock
        }
        Command::PurifySweep { threads } => {
            insert_if(&mut map, "threads", threads.map(|v| v as u64));
            ExperimentKind::PurifySweep
        }
    };
    let mut config = RunConfig::new(kind);
    config.parameters = parameters_value(map);
    config
}

fn print_summary(summary: &RunSummary) {
    println!("{} -> {}", summary.experiment, summary.out_dir.display());
    for artifact in &summary.artifacts {
        println!("  {artifact}");
    }
}

fn run(cli: Cli) -> Result<()> {
    if matches!(cli.command, Command::PurifyCurve) {
        let dir = experiments::resolve_out_dir(cli.common.out.as_deref(), None);
        let format = cli.common.format.unwrap_or_default();
        let summary = experiments::write_purification_curve(&dir, format)?;
        if !cli.common.quiet {
            print_summary(&summary);
        }
        return Ok(());
    }
    let mut config = match &cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(config)?;
            RunConfig::from_json(&text)?
        }
        other => build_config(other),
    };
    if let Some(seed) = cli.common.seed {
        config.seed = seed;
    }
    if let Some(format) = cli.common.format {
        config.format = format;
    }
    if cli.common.quiet {
        config.quiet = true;
    }
    let dir = experiments::resolve_out_dir(cli.common.out.as_deref(), config.out_dir.as_deref());
    let summary = experiments::execute(&config, &dir)?;
    if !config.quiet {
        print_summary(&summary);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
