//! Run configuration: a single JSON document naming an experiment and its
//! parameters. Unknown keys are rejected everywhere so that a typo fails
//! fast instead of silently running defaults.

use std::fmt;
use std::path::PathBuf;

use hyperpure::counting::{DetectionModel, REFERENCE_PEAK_RETENTION};
use hyperpure::pll::PllConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    DistributeBaseline,
    BfPurify,
    PfPurify,
    ChshScan,
    WernerCurve,
    SyndromeTable,
    SourceMetrics,
    PllLock,
    PurifySweep,
}

impl ExperimentKind {
    /// File stem used for every artifact of this experiment.
    pub fn stem(self) -> &'static str {
        match self {
            ExperimentKind::DistributeBaseline => "distribute_baseline",
            ExperimentKind::BfPurify => "bf_purify",
            ExperimentKind::PfPurify => "pf_purify",
            ExperimentKind::ChshScan => "chsh_scan",
            ExperimentKind::WernerCurve => "werner_curve",
            ExperimentKind::SyndromeTable => "syndrome_table",
            ExperimentKind::SourceMetrics => "source_metrics",
            ExperimentKind::PllLock => "pll_lock",
            ExperimentKind::PurifySweep => "purify_sweep",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.stem())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    /// Tabular artifacts as CSV (the default).
    #[default]
    Csv,
    /// Tabular artifacts as JSON arrays.
    Json,
}

/// Top-level run description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    /// Experiment-specific parameters; schema per experiment, unknown keys
    /// rejected.
    #[serde(default)]
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub seed: u64,
    /// Output directory; overridden by the command line, then by the
    /// HYPERPURE_OUT environment variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub quiet: bool,
}

impl RunConfig {
    pub fn new(experiment: ExperimentKind) -> Self {
        RunConfig {
            experiment,
            parameters: serde_json::Value::Null,
            seed: 0,
            out_dir: None,
            format: OutputFormat::Csv,
            quiet: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Parse `parameters` into the typed struct for one experiment; `null`
    /// or absent parameters mean all defaults.
    pub fn typed_parameters<T: DeserializeOwned + Default>(&self) -> Result<T> {
        if self.parameters.is_null() {
            return Ok(T::default());
        }
        serde_json::from_value(self.parameters.clone())
            .map_err(|e| CliError::Config(format!("invalid parameters: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistributeBaselineParams {
    /// Spatial-qubit Werner fidelity of the distributed state.
    pub f_spatial: f64,
    /// Polarization-qubit Werner fidelity of the distributed state.
    pub f_polarization: f64,
}

impl Default for DistributeBaselineParams {
    fn default() -> Self {
        DistributeBaselineParams {
            f_spatial: 1.0,
            f_polarization: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BfPurifyParams {
    /// Bit-flip probability applied independently to each degree of freedom.
    pub p: f64,
    /// Optional measured baseline fidelities; when present the run is a
    /// calibrated consistency check rather than a first-principles
    /// prediction.
    pub baseline_f_spatial: Option<f64>,
    pub baseline_f_polarization: Option<f64>,
}

impl Default for BfPurifyParams {
    fn default() -> Self {
        BfPurifyParams {
            p: 0.2,
            baseline_f_spatial: None,
            baseline_f_polarization: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PfPurifyParams {
    /// Phase-flip probability applied independently to each degree of
    /// freedom.
    pub p: f64,
}

impl Default for PfPurifyParams {
    fn default() -> Self {
        PfPurifyParams { p: 0.2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChshScanParams {
    /// Bit-flip probabilities to scan.
    pub p_values: Vec<f64>,
    pub baseline_f_spatial: Option<f64>,
    pub baseline_f_polarization: Option<f64>,
}

impl Default for ChshScanParams {
    fn default() -> Self {
        ChshScanParams {
            p_values: (0..=10).map(|k| k as f64 * 0.05).collect(),
            baseline_f_spatial: None,
            baseline_f_polarization: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WernerCurveParams {
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
}

impl Default for WernerCurveParams {
    fn default() -> Self {
        WernerCurveParams {
            f_min: 0.25,
            f_max: 1.0,
            points: 151,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyndromeTableParams {
    /// Werner fidelity of both input pairs.
    pub f: f64,
}

impl Default for SyndromeTableParams {
    fn default() -> Self {
        SyndromeTableParams { f: 0.8 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceMetricsParams {
    /// Measured coincidence-to-accidental ratio.
    pub car: f64,
    /// Measured unheralded g2(0).
    pub g2: f64,
    /// Central-peak retention used for the jitter correction.
    pub retained_fraction: f64,
    /// Detection model; the reference loss budgets when absent.
    pub model: Option<DetectionModel>,
}

impl Default for SourceMetricsParams {
    fn default() -> Self {
        SourceMetricsParams {
            car: 56.3,
            g2: 1.77,
            retained_fraction: REFERENCE_PEAK_RETENTION,
            model: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PllLockParams {
    /// Simulated time, seconds.
    pub duration: f64,
    /// Disable the controller and record the raw drift.
    pub open_loop: bool,
    pub config: PllConfig,
}

impl Default for PllLockParams {
    fn default() -> Self {
        PllLockParams {
            duration: 3600.0,
            open_loop: false,
            config: PllConfig::reference(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PurifySweepParams {
    pub p_values: Vec<f64>,
    /// Worker threads for the sweep.
    pub threads: usize,
    pub baseline_f_spatial: Option<f64>,
    pub baseline_f_polarization: Option<f64>,
}

impl Default for PurifySweepParams {
    fn default() -> Self {
        PurifySweepParams {
            p_values: (0..=20).map(|k| k as f64 * 0.025).collect(),
            threads: 4,
            baseline_f_spatial: None,
            baseline_f_polarization: None,
        }
    }
}
