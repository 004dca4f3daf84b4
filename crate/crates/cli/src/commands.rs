use std::path::{Path, PathBuf};

use uavsim_core::detection::{expected_detections, DetectionSampler};
use uavsim_core::engine::{energy_report, run_seeded, sweep_max_distance, CurvePoint};
use uavsim_core::linkbudget::LinkBudgetParams;

use crate::config::{load_mcs_file, parse_scenario, parse_scene, parse_sweep, ScenarioOverrides};
use crate::error::{CliError, CliResult};
use crate::report::{
    curve_csv, detection_csv, write_atomic, write_run_report, DetectionRow, RunSummary, CURVE_FILE, DETECTION_FILE,
};

#[derive(Debug, Clone)]
pub struct RunArgs {
    pub scenario: PathBuf,
    pub mcs_table: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    /// Sample detections per delivered frame; needs `seed`.
    pub monte_carlo: bool,
    pub dt: Option<f64>,
}

fn scenario_name(path: &Path) -> String {
    path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario").to_string()
}

pub fn cmd_run(args: &RunArgs) -> CliResult<RunSummary> {
    if args.monte_carlo && args.seed.is_none() {
        return Err(CliError::Validation("--monte-carlo requires --seed".into()));
    }
    let overrides = ScenarioOverrides { mcs_table: args.mcs_table.clone(), channel_sample_dt_s: args.dt };
    let scenario = parse_scenario(&args.scenario, &overrides)?;
    let sample_seed = if args.monte_carlo { args.seed } else { None };
    let result = run_seeded(&scenario, sample_seed)?;
    let energy = energy_report(&result, &scenario).map_err(|e| CliError::Internal(e.to_string()))?;
    let summary = RunSummary::new(&scenario_name(&args.scenario), args.seed, &scenario, &result, &energy);
    write_run_report(&args.out, &summary, &result.steps)?;
    Ok(summary)
}

/// Inclusive SNR grid from `start` to `stop` in `step` increments.
pub fn snr_range(start: f64, stop: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) {
        return Err(CliError::Validation("SNR range bounds must be finite".into()));
    }
    if stop < start {
        return Err(CliError::Validation(format!("SNR range must be ascending, got {start} to {stop}")));
    }
    if start == stop {
        return Ok(vec![start]);
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(CliError::Validation(format!("SNR step must be > 0, got {step}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

#[derive(Debug, Clone, Default)]
pub struct CurveArgs {
    /// Sweep document supplying the link template and default range.
    pub scenario: Option<PathBuf>,
    pub gains: Option<Vec<f64>>,
    pub snr_start: Option<f64>,
    pub snr_stop: Option<f64>,
    pub snr_step: Option<f64>,
    pub jobs: usize,
    pub out: Option<PathBuf>,
}

pub struct CurveOutput {
    pub points: Vec<CurvePoint>,
    pub csv: String,
}

/// Range-versus-SNR table; the gain is applied at both ends of the link.
pub fn cmd_distance_curve(args: &CurveArgs) -> CliResult<CurveOutput> {
    let (link, range) = match &args.scenario {
        Some(path) => {
            let t = parse_sweep(path)?;
            (t.link, t.range)
        }
        None => (LinkBudgetParams::sixty_ghz(0.0), None),
    };
    let pick = |flag: Option<f64>, from_doc: Option<f64>, name: &str| {
        flag.or(from_doc).ok_or_else(|| CliError::Validation(format!("missing --{name}")))
    };
    let gains = args
        .gains
        .clone()
        .or_else(|| range.as_ref().map(|r| r.gains_dbi.clone()))
        .ok_or_else(|| CliError::Validation("missing --gains".into()))?;
    if gains.is_empty() {
        return Err(CliError::Validation("gain list is empty".into()));
    }
    let start = pick(args.snr_start, range.as_ref().map(|r| r.snr_start_db), "snr-start")?;
    let stop = args.snr_stop.or(range.as_ref().map(|r| r.snr_stop_db)).unwrap_or(start);
    let step = args.snr_step.or(range.as_ref().map(|r| r.snr_step_db)).unwrap_or(1.0);
    let snrs = snr_range(start, stop, step)?;

    let points = sweep_max_distance(&link, &gains, &snrs, args.jobs.max(1))?;
    let csv = curve_csv(&points);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
        write_atomic(&dir.join(CURVE_FILE), &csv)?;
    }
    Ok(CurveOutput { points, csv })
}

pub struct DetectionOutput {
    pub rows: Vec<DetectionRow>,
    pub csv: String,
}

/// Expected detections of one scene under each camera profile.
pub fn cmd_detection_compare(scene: &Path, seed: Option<u64>, out: Option<&Path>) -> CliResult<DetectionOutput> {
    let cmp = parse_scene(scene)?;
    let mut rows = Vec::with_capacity(cmp.views.len());
    for (label, view) in &cmp.views {
        let expected = expected_detections(&cmp.calibration, view)?;
        let realized = match seed {
            Some(s) => Some(DetectionSampler::new(&cmp.calibration, view, s)?.sample_frame()),
            None => None,
        };
        rows.push(DetectionRow {
            label: label.clone(),
            width: view.camera.profile.width,
            height: view.camera.profile.height,
            faces: view.faces.len(),
            expected,
            ratio_to_2k: None,
            realized,
        });
    }
    let reference = rows.iter().find(|r| r.label == "2K").map(|r| r.expected).unwrap_or(0.0);
    for r in &mut rows {
        r.ratio_to_2k = (reference > 0.0).then(|| r.expected / reference);
    }
    let csv = detection_csv(&rows);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
        write_atomic(&dir.join(DETECTION_FILE), &csv)?;
    }
    Ok(DetectionOutput { rows, csv })
}

/// Checks a scenario (or a bare MCS table) without running it.
pub fn cmd_validate(scenario: Option<&Path>, mcs_table: Option<&Path>, dt: Option<f64>) -> CliResult<String> {
    match (scenario, mcs_table) {
        (Some(path), _) => {
            let overrides = ScenarioOverrides { mcs_table: mcs_table.map(Path::to_path_buf), channel_sample_dt_s: dt };
            let s = parse_scenario(path, &overrides)?;
            Ok(format!(
                "{}: ok ({} steps, {} MCS entries, {} waypoints)",
                path.display(),
                s.step_count(),
                s.mcs_table.len(),
                s.trajectory.waypoints().len()
            ))
        }
        (None, Some(path)) => {
            let t = load_mcs_file(path)?;
            Ok(format!("{}: ok ({} MCS entries)", path.display(), t.len()))
        }
        (None, None) => Err(CliError::Validation("nothing to validate: pass --scenario or --mcs-table".into())),
    }
}
