//! Experiment implementations. Each experiment builds its state pipeline
//! from the library, writes its tabular artifacts plus a summary report,
//! and returns everything it produced.

use std::env;
use std::fs;
use std::path::{Path, PathBuf};

use hyperpure::analysis::{chsh_s, ChshSettings};
use hyperpure::counting::{
    adjacent_peak_corrected_purity, car_from_model, purity_from_g2, xi_from_car, DetectionModel,
};
use hyperpure::noise::{apply_channel_mix, bf_channel_mix, hyper_werner_state, pf_channel_mix};
use hyperpure::pll::run_lock;
use hyperpure::purify::{
    accumulate_syndrome_fidelity, purify, purify_pf, syndrome_table, theoretical_fidelity_bf,
    theoretical_fidelity_werner, CollectionPair,
};
use hyperpure::qstate::{
    fidelity, fidelity_to_bell, hyper_state, BellKind, DegreeOfFreedom, JointDensityMatrix,
};
use serde_json::{json, Value};

use crate::config::{
    BfPurifyParams, ChshScanParams, DistributeBaselineParams, ExperimentKind, PfPurifyParams,
    PllLockParams, PurifySweepParams, RunConfig, SourceMetricsParams, SyndromeTableParams,
    WernerCurveParams,
};
use crate::error::{CliError, Result};
use crate::report::{self, num, RunSummary, Table};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "HYPERPURE_OUT";

/// Resolve the output directory: explicit flag, then the config value, then
/// the environment, then `./reports`.
pub fn resolve_out_dir(flag: Option<&Path>, config_dir: Option<&Path>) -> PathBuf {
    if let Some(dir) = flag {
        return dir.to_path_buf();
    }
    if let Some(dir) = config_dir {
        return dir.to_path_buf();
    }
    if let Some(dir) = env::var_os(OUT_DIR_ENV) {
        return PathBuf::from(dir);
    }
    PathBuf::from("reports")
}

/// Run one configured experiment and write its artifacts into `dir`.
pub fn execute(config: &RunConfig, dir: &Path) -> Result<RunSummary> {
    fs::create_dir_all(dir)?;
    let stem = config.experiment.stem();
    let (parameters, notes, results, mut artifacts) = match config.experiment {
        ExperimentKind::DistributeBaseline => distribute_baseline(config, dir)?,
        ExperimentKind::BfPurify => bf_purify(config, dir)?,
        ExperimentKind::PfPurify => pf_purify(config, dir)?,
        ExperimentKind::ChshScan => chsh_scan(config, dir)?,
        ExperimentKind::WernerCurve => werner_curve(config, dir)?,
        ExperimentKind::SyndromeTable => syndrome_table_experiment(config, dir)?,
        ExperimentKind::SourceMetrics => source_metrics(config, dir)?,
        ExperimentKind::PllLock => pll_lock(config, dir)?,
        ExperimentKind::PurifySweep => purify_sweep(config, dir)?,
    };
    let report = report::envelope(stem, config.seed, &parameters, &notes, results, &artifacts);
    let report_name = format!("{stem}.report.json");
    report::write_json(&dir.join(&report_name), &report)?;
    artifacts.push(report_name);
    artifacts.push(report::write_meta(dir, stem, stem)?);
    Ok(RunSummary {
        experiment: stem.to_string(),
        out_dir: dir.to_path_buf(),
        artifacts,
        report,
    })
}

type ExperimentOutput = (Value, Vec<String>, Value, Vec<String>);

fn echo<P: serde::Serialize>(params: &P) -> Value {
    serde_json::to_value(params).expect("serializable parameters")
}

/// Distributed state with optional single-degree Werner fidelities standing
/// in for measured link quality.
fn distributed_state(
    f_spatial: Option<f64>,
    f_polarization: Option<f64>,
) -> hyperpure::Result<JointDensityMatrix> {
    match (f_spatial, f_polarization) {
        (None, None) => Ok(hyper_state().to_density()),
        (fs, fp) => hyper_werner_state(fs.unwrap_or(1.0), fp.unwrap_or(1.0)),
    }
}

fn distribute_baseline(config: &RunConfig, _dir: &Path) -> Result<ExperimentOutput> {
    let params: DistributeBaselineParams = config.typed_parameters()?;
    let rho = hyper_werner_state(params.f_spatial, params.f_polarization)?;
    let polarization = rho.partial_trace(DegreeOfFreedom::Polarization)?;
    let spatial = rho.partial_trace(DegreeOfFreedom::Spatial)?;
    let settings = ChshSettings::reference();
    let results = json!({
        "fidelity_hyper": num(fidelity(&rho, &hyper_state().to_density())?),
        "fidelity_polarization": num(fidelity_to_bell(&polarization, BellKind::PhiPlus)?),
        "fidelity_spatial": num(fidelity_to_bell(&spatial, BellKind::PhiPlus)?),
        "chsh_s_polarization": num(chsh_s(&polarization, &settings)?),
        "chsh_angles_deg": settings,
    });
    Ok((echo(&params), Vec::new(), results, Vec::new()))
}

struct PurifyPoint {
    fidelity_before: f64,
    fidelity_after: f64,
    success_probability: f64,
}

/// One noisy-distribution plus purification evaluation. The before-fidelity
/// is that of the reduced polarization pair; purification consumes the
/// spatial degree of freedom.
fn purify_point(
    base: &JointDensityMatrix,
    p: f64,
    phase_flip: bool,
) -> hyperpure::Result<PurifyPoint> {
    let mix = if phase_flip {
        pf_channel_mix(p)?
    } else {
        bf_channel_mix(p)?
    };
    let noisy = apply_channel_mix(base, &mix)?;
    let before = noisy.partial_trace(DegreeOfFreedom::Polarization)?;
    let outcome = if phase_flip {
        purify_pf(&noisy, CollectionPair::FirstPair)?
    } else {
        purify(&noisy, CollectionPair::FirstPair)?
    };
    Ok(PurifyPoint {
        fidelity_before: fidelity_to_bell(&before, BellKind::PhiPlus)?,
        fidelity_after: outcome.fidelity_to(BellKind::PhiPlus)?,
        success_probability: outcome.success_probability,
    })
}

const CALIBRATED_NOTE: &str = "calibrated consistency check: the baseline state is tuned to \
independently measured single-degree fidelities, so the quoted numbers corroborate the error \
model rather than predict it from first principles";

fn bf_purify(config: &RunConfig, _dir: &Path) -> Result<ExperimentOutput> {
    let params: BfPurifyParams = config.typed_parameters()?;
    let calibrated =
        params.baseline_f_spatial.is_some() || params.baseline_f_polarization.is_some();
    let base = distributed_state(params.baseline_f_spatial, params.baseline_f_polarization)?;
    let point = purify_point(&base, params.p, false)?;
    let mut notes = Vec::new();
    let closed_form = if calibrated {
        notes.push(CALIBRATED_NOTE.to_string());
        Value::Null
    } else {
        num(theoretical_fidelity_bf(1.0 - params.p, 1.0 - params.p)?)
    };
    let results = json!({
        "p": num(params.p),
        "fidelity_before": num(point.fidelity_before),
        "fidelity_after": num(point.fidelity_after),
        "success_probability": num(point.success_probability),
        "closed_form_fidelity_after": closed_form,
        "calibrated_consistency_check": calibrated,
    });
    Ok((echo(&params), notes, results, Vec::new()))
}

fn pf_purify(config: &RunConfig, _dir: &Path) -> Result<ExperimentOutput> {
    let params: PfPurifyParams = config.typed_parameters()?;
    let base = hyper_state().to_density();
    let point = purify_point(&base, params.p, true)?;
    let results = json!({
        "p": num(params.p),
        "fidelity_before": num(point.fidelity_before),
        "fidelity_after": num(point.fidelity_after),
        "success_probability": num(point.success_probability),
        "closed_form_fidelity_after": num(theoretical_fidelity_bf(1.0 - params.p, 1.0 - params.p)?),
    });
    let notes = vec![
        "phase-flip errors are first converted to bit-flips by the Hadamard layer, then \
         filtered by the coincidence post-selection"
            .to_string(),
    ];
    Ok((echo(&params), notes, results, Vec::new()))
}

fn chsh_scan(config: &RunConfig, dir: &Path) -> Result<ExperimentOutput> {
    let params: ChshScanParams = config.typed_parameters()?;
    if params.p_values.is_empty() {
        return Err(CliError::Config("chsh_scan needs at least one p value".into()));
    }
    let base = distributed_state(params.baseline_f_spatial, params.baseline_f_polarization)?;
    let settings = ChshSettings::reference();
    let mut table = Table::new(vec!["p", "s_before", "s_after"]);
    for &p in &params.p_values {
        let mix = bf_channel_mix(p)?;
        let noisy = apply_channel_mix(&base, &mix)?;
        let before = noisy.partial_trace(DegreeOfFreedom::Polarization)?;
        let s_before = chsh_s(&before, &settings)?;
        let outcome = purify(&noisy, CollectionPair::FirstPair)?;
        let s_after = match &outcome.post_state {
            Some(rho) => num(chsh_s(rho, &settings)?),
            None => Value::Null,
        };
        table.push(vec![num(p), num(s_before), s_after]);
    }
    let name = report::write_table(dir, "chsh_scan", config.format, &table)?;
    let results = json!({
        "chsh_angles_deg": settings,
        "points": params.p_values.len(),
    });
    Ok((echo(&params), Vec::new(), results, vec![name]))
}

fn werner_curve(config: &RunConfig, dir: &Path) -> Result<ExperimentOutput> {
    let params: WernerCurveParams = config.typed_parameters()?;
    if params.points < 2 {
        return Err(CliError::Config("werner_curve needs at least 2 points".into()));
    }
    if !(0.0..=1.0).contains(&params.f_min)
        || !(0.0..=1.0).contains(&params.f_max)
        || params.f_min >= params.f_max
    {
        return Err(CliError::Config(
            "werner_curve needs 0 <= f_min < f_max <= 1".into(),
        ));
    }
    let mut table = Table::new(vec!["f_in", "f_out_pipeline", "f_out_closed_form"]);
    let step = (params.f_max - params.f_min) / (params.points - 1) as f64;
    for k in 0..params.points {
        let f = params.f_min + k as f64 * step;
        let rows = syndrome_table(f)?;
        let pipeline = accumulate_syndrome_fidelity(&rows)?;
        table.push(vec![
            num(f),
            num(pipeline),
            num(theoretical_fidelity_werner(f)?),
        ]);
    }
    let name = report::write_table(dir, "werner_curve", config.format, &table)?;
    let results = json!({ "points": params.points });
    Ok((echo(&params), Vec::new(), results, vec![name]))
}

fn syndrome_table_experiment(config: &RunConfig, dir: &Path) -> Result<ExperimentOutput> {
    let params: SyndromeTableParams = config.typed_parameters()?;
    let rows = syndrome_table(params.f)?;
    let mut table = Table::new(vec![
        "spatial",
        "polar",
        "probability",
        "coincidence",
        "post_label",
    ]);
    let mut coincident = 0usize;
    for row in &rows {
        if row.coincidence {
            coincident += 1;
        }
        table.push(vec![
            row.spatial.label(DegreeOfFreedom::Spatial).into(),
            row.polar.label(DegreeOfFreedom::Polarization).into(),
            num(row.probability),
            Value::Bool(row.coincidence),
            match row.post_label {
                Some(kind) => kind.label(DegreeOfFreedom::Polarization).into(),
                None => Value::Null,
            },
        ]);
    }
    let accumulated = accumulate_syndrome_fidelity(&rows)?;
    let name = report::write_table(dir, "syndrome_table", config.format, &table)?;
    let results = json!({
        "f": num(params.f),
        "coincident_rows": coincident,
        "accumulated_fidelity": num(accumulated),
        "closed_form_fidelity": num(theoretical_fidelity_werner(params.f)?),
    });
    Ok((echo(&params), Vec::new(), results, vec![name]))
}

const XI_DISCREPANCY_NOTE: &str = "squeezing-parameter discrepancy: inverting the printed \
ratio formula at CAR = 56.3 with a ~= 1 gives xi ~= 0.134, while the reference experimental \
analysis quotes xi = 0.02 for the same measurement; the formula is implemented exactly as \
printed and both values are reported side by side rather than reconciled";

fn source_metrics(config: &RunConfig, _dir: &Path) -> Result<ExperimentOutput> {
    let params: SourceMetricsParams = config.typed_parameters()?;
    let model = params.model.unwrap_or_else(DetectionModel::reference);
    model.validate()?;
    let xi_unit_a = xi_from_car(params.car, 1.0)?;
    let a_model = 1.0 - model.signal_arm_efficiency();
    let xi_model_a = xi_from_car(params.car, a_model)?;
    let car_round_trip = car_from_model(&model, xi_model_a)?;
    let purity = purity_from_g2(params.g2)?;
    let corrected = adjacent_peak_corrected_purity(params.g2, params.retained_fraction)?;
    let results = json!({
        "car_input": num(params.car),
        "xi_at_unit_a": num(xi_unit_a),
        "a_from_model": num(a_model),
        "xi_at_model_a": num(xi_model_a),
        "car_round_trip": num(car_round_trip),
        "quoted_reference_xi": num(0.02),
        "g2_input": num(params.g2),
        "schmidt_k": num(purity.schmidt_k),
        "spectral_purity_raw": num(purity.purity),
        "spectral_purity_adjacent_peak_corrected": num(corrected),
        "retained_fraction": num(params.retained_fraction),
        "signal_singles_rate_hz": num(model.signal_singles_rate()),
        "idler_singles_rate_hz": num(model.idler_singles_rate()),
        "coincidence_rate_hz": num(model.coincidence_rate()),
        "accidental_rate_hz": num(model.accidental_rate()),
    });
    let notes = vec![
        XI_DISCREPANCY_NOTE.to_string(),
        "the adjacent-peak correction divides the raw g2 - 1 by the central-peak retention, a \
         calibration constant rather than a derived quantity"
            .to_string(),
    ];
    Ok((echo(&params), notes, results, Vec::new()))
}

fn pll_lock(config: &RunConfig, dir: &Path) -> Result<ExperimentOutput> {
    let params: PllLockParams = config.typed_parameters()?;
    let mut loop_config = params.config.clone();
    if params.open_loop {
        loop_config.kp = 0.0;
        loop_config.ki = 0.0;
        loop_config.kd = 0.0;
    }
    let (trace, lock_report) = run_lock(&loop_config, params.duration, config.seed)?;
    let mut table = Table::new(vec![
        "t_s",
        "drift_phase_rad",
        "control_phase_rad",
        "monitor_power_w",
        "locked",
    ]);
    for s in &trace.samples {
        table.push(vec![
            num(s.t),
            num(s.drift_phase),
            num(s.control_phase),
            num(s.monitor_power),
            Value::Bool(s.locked),
        ]);
    }
    let name = report::write_table(dir, "pll_lock.trace", config.format, &table)?;
    let results = json!({
        "lock_report": lock_report,
        "open_loop": params.open_loop,
        "samples": trace.samples.len(),
    });
    let notes = vec![
        "drift diffusion is calibrated so the locked residual matches the observed power \
         fluctuation of about 4.6% at the 10 Hz loop cadence; a faster raw drift cannot be \
         stabilized below sqrt(diffusion x sample_interval) at this cadence"
            .to_string(),
    ];
    Ok((echo(&params), notes, results, vec![name]))
}

struct SweepRow {
    p: f64,
    point: PurifyPoint,
    closed_form: Option<f64>,
}

fn purify_sweep(config: &RunConfig, dir: &Path) -> Result<ExperimentOutput> {
    let params: PurifySweepParams = config.typed_parameters()?;
    if params.p_values.is_empty() {
        return Err(CliError::Config("purify_sweep needs at least one p value".into()));
    }
    if params.threads == 0 {
        return Err(CliError::Config("purify_sweep needs at least one thread".into()));
    }
    let calibrated =
        params.baseline_f_spatial.is_some() || params.baseline_f_polarization.is_some();
    let base = distributed_state(params.baseline_f_spatial, params.baseline_f_polarization)?;
    let mut rows: Vec<hyperpure::Result<SweepRow>> = Vec::with_capacity(params.p_values.len());
    for _ in 0..params.p_values.len() {
        rows.push(Err(hyperpure::Error::ZeroNormalization));
    }
    let chunk = params.p_values.len().div_ceil(params.threads);
    std::thread::scope(|scope| {
        for (p_chunk, out_chunk) in params.p_values.chunks(chunk).zip(rows.chunks_mut(chunk)) {
            let base = &base;
            scope.spawn(move || {
                for (&p, slot) in p_chunk.iter().zip(out_chunk.iter_mut()) {
                    *slot = purify_point(base, p, false).and_then(|point| {
                        let closed_form = if calibrated {
                            None
                        } else {
                            Some(theoretical_fidelity_bf(1.0 - p, 1.0 - p)?)
                        };
                        Ok(SweepRow {
                            p,
                            point,
                            closed_form,
                        })
                    });
                }
            });
        }
    });
    let mut table = Table::new(vec![
        "p",
        "fidelity_before",
        "fidelity_after",
        "success_probability",
        "closed_form_fidelity_after",
    ]);
    for row in rows {
        let row = row?;
        table.push(vec![
            num(row.p),
            num(row.point.fidelity_before),
            num(row.point.fidelity_after),
            num(row.point.success_probability),
            row.closed_form.map_or(Value::Null, num),
        ]);
    }
    let name = report::write_table(dir, "purify_sweep", config.format, &table)?;
    let mut notes = Vec::new();
    if calibrated {
        notes.push(CALIBRATED_NOTE.to_string());
    }
    let results = json!({
        "points": params.p_values.len(),
        "threads": params.threads,
    });
    Ok((echo(&params), notes, results, vec![name]))
}

/// Closed-form fidelity improvement curve for pure bit-flip noise: 501
/// evenly spaced points of `(F, F')` over `[0.5, 1]`, with the diagonal
/// column included for plotting.
pub fn write_purification_curve(dir: &Path, format: crate::config::OutputFormat) -> Result<RunSummary> {
    fs::create_dir_all(dir)?;
    let mut table = Table::new(vec!["f", "f_prime", "diagonal"]);
    for k in 0..=500 {
        let f = 0.5 + k as f64 * (0.5 / 500.0);
        table.push(vec![num(f), num(theoretical_fidelity_bf(f, f)?), num(f)]);
    }
    let name = report::write_table(dir, "purify_curve", format, &table)?;
    let meta = report::write_meta(dir, "purify_curve", "purify_curve")?;
    let report = json!({
        "experiment": "purify_curve",
        "library_version": hyperpure::VERSION,
        "notes": ["closed-form bit-flip purification curve with the identity diagonal for plotting"],
        "artifacts": [name, meta],
    });
    Ok(RunSummary {
        experiment: "purify_curve".to_string(),
        out_dir: dir.to_path_buf(),
        artifacts: vec![name, meta],
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::sync::atomic::{AtomicU64, Ordering};

    static COUNTER: AtomicU64 = AtomicU64::new(0);

    fn scratch_dir() -> PathBuf {
        let id = COUNTER.fetch_add(1, Ordering::SeqCst);
        let dir = env::temp_dir().join(format!(
            "hyperpure-exp-{}-{id}",
            std::process::id()
        ));
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn run(kind: ExperimentKind, parameters: Value) -> (RunSummary, PathBuf) {
        let mut config = RunConfig::new(kind);
        config.parameters = parameters;
        let dir = scratch_dir();
        let summary = execute(&config, &dir).unwrap();
        (summary, dir)
    }

    #[test]
    fn bf_purify_defaults_hit_closed_form() {
        let (summary, _dir) = run(ExperimentKind::BfPurify, Value::Null);
        let results = &summary.report["results"];
        assert_abs_diff_eq!(
            results["fidelity_before"].as_f64().unwrap(),
            0.8,
            epsilon = 1e-10
        );
        assert_abs_diff_eq!(
            results["fidelity_after"].as_f64().unwrap(),
            16.0 / 17.0,
            epsilon = 1e-10
        );
        assert_eq!(results["calibrated_consistency_check"], Value::Bool(false));
    }

    #[test]
    fn pf_purify_without_noise_is_identity() {
        let (summary, _dir) = run(ExperimentKind::PfPurify, json!({ "p": 0.0 }));
        let results = &summary.report["results"];
        assert_abs_diff_eq!(results["fidelity_before"].as_f64().unwrap(), 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(results["fidelity_after"].as_f64().unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn syndrome_table_writes_sixteen_rows() {
        let (summary, dir) = run(ExperimentKind::SyndromeTable, Value::Null);
        let csv = fs::read_to_string(dir.join("syndrome_table.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[0], "spatial,polar,probability,coincidence,post_label");
        assert_eq!(summary.report["results"]["coincident_rows"], json!(8));
    }

    #[test]
    fn purify_sweep_orders_rows_by_input() {
        let (_, dir) = run(
            ExperimentKind::PurifySweep,
            json!({ "p_values": [0.3, 0.1, 0.2], "threads": 2 }),
        );
        let csv = fs::read_to_string(dir.join("purify_sweep.csv")).unwrap();
        let first_column: Vec<&str> = csv
            .lines()
            .skip(1)
            .map(|l| l.split(',').next().unwrap())
            .collect();
        assert_eq!(first_column, vec!["0.3", "0.1", "0.2"]);
    }

    #[test]
    fn source_metrics_report_carries_discrepancy_note() {
        let (summary, _dir) = run(ExperimentKind::SourceMetrics, Value::Null);
        let notes = summary.report["notes"].as_array().unwrap();
        assert!(notes.iter().any(|n| {
            let text = n.as_str().unwrap();
            text.contains("0.134") && text.contains("0.02")
        }));
    }

    #[test]
    fn purification_curve_has_501_rows_and_landmarks() {
        let dir = scratch_dir();
        write_purification_curve(&dir, crate::config::OutputFormat::Csv).unwrap();
        let csv = fs::read_to_string(dir.join("purify_curve.csv")).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 502);
        assert_eq!(lines[0], "f,f_prime,diagonal");
        assert_eq!(lines[1], "0.5,0.5,0.5");
        assert_eq!(lines[501], "1.0,1.0,1.0");
        let row_075 = lines.iter().find(|l| l.starts_with("0.75,")).unwrap();
        assert_eq!(*row_075, "0.75,0.9,0.75");
    }

    #[test]
    fn pll_lock_emits_trace_and_report() {
        let (summary, dir) = run(
            ExperimentKind::PllLock,
            json!({ "duration": 30.0 }),
        );
        let csv = fs::read_to_string(dir.join("pll_lock.trace.csv")).unwrap();
        assert!(csv.starts_with("t_s,drift_phase_rad,control_phase_rad,monitor_power_w,locked"));
        assert_eq!(csv.lines().count(), 301);
        assert!(summary.report["results"]["lock_report"]["relative_power_std"].is_number());
    }
}
