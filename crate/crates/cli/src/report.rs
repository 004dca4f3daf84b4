//! Output files. Every float goes through [`sig6`]/[`round6`] so reruns are
//! byte-identical and golden files stay portable.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use uavsim_core::engine::{CurvePoint, EnergyReport, Scenario, SimulationResult, StepRecord};

use crate::error::{CliError, CliResult};
use crate::format::{round6, sig6};

pub const SUMMARY_FILE: &str = "summary.json";
pub const STEPS_FILE: &str = "steps.csv";
pub const CURVE_FILE: &str = "distance_curve.csv";
pub const DETECTION_FILE: &str = "detection_compare.csv";

pub const STEP_COLUMNS: [&str; 18] = [
    "t_s",
    "distance_m",
    "az_off_deg",
    "el_off_deg",
    "in_scan",
    "angular_rate_deg_s",
    "in_track",
    "pol_mismatch_deg",
    "extra_loss_db",
    "snr_db",
    "mcs_index",
    "capacity_bps",
    "bits_sent",
    "queue_bits",
    "frames_generated_cum",
    "frames_delivered_cum",
    "frames_dropped_cum",
    "ground_active",
];

/// Writes `contents` next to `path` and renames it into place, so a failed
/// run never leaves a truncated file behind.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp: PathBuf = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| CliError::io(format!("cannot write {}", tmp.display()), e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        CliError::io(format!("cannot move {} into place", path.display()), e)
    })
}

fn flag(b: bool) -> &'static str {
    if b {
        "1"
    } else {
        "0"
    }
}

pub fn steps_csv(steps: &[StepRecord]) -> String {
    let mut out = STEP_COLUMNS.join(",");
    out.push('\n');
    for s in steps {
        let opt = |v: Option<f64>| v.map_or_else(|| "blocked".to_string(), sig6);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            sig6(s.t_s),
            sig6(s.distance_m),
            sig6(s.az_off_deg),
            sig6(s.el_off_deg),
            flag(s.in_scan),
            sig6(s.angular_rate_deg_s),
            flag(s.in_track),
            sig6(s.pol_mismatch_deg),
            opt(s.extra_loss_db),
            opt(s.snr_db),
            s.mcs_index.map_or_else(|| "none".to_string(), |i| i.to_string()),
            sig6(s.capacity_bps),
            sig6(s.bits_sent),
            sig6(s.queue_bits),
            s.frames_generated_cum,
            s.frames_delivered_cum,
            s.frames_dropped_cum,
            flag(s.ground_active),
        );
    }
    out
}

#[derive(Debug, Serialize)]
pub struct EnergySummary {
    pub ground_active_time_s: f64,
    pub ground_idle_time_s: f64,
    pub ground_active_j: f64,
    pub ground_idle_j: f64,
    pub ground_decode_j: f64,
    pub ground_j: f64,
    pub drone_base_j: f64,
    pub drone_radio_j: f64,
    pub drone_ai_j: f64,
    pub drone_encode_j: f64,
    pub drone_j: f64,
}

impl From<&EnergyReport> for EnergySummary {
    fn from(e: &EnergyReport) -> Self {
        Self {
            ground_active_time_s: round6(e.ground_active_time_s),
            ground_idle_time_s: round6(e.ground_idle_time_s),
            ground_active_j: round6(e.ground_active_j),
            ground_idle_j: round6(e.ground_idle_j),
            ground_decode_j: round6(e.ground_decode_j),
            ground_j: round6(e.ground_j),
            drone_base_j: round6(e.drone_base_j),
            drone_radio_j: round6(e.drone_radio_j),
            drone_ai_j: round6(e.drone_ai_j),
            drone_encode_j: round6(e.drone_encode_j),
            drone_j: round6(e.drone_j),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct DetectionSummary {
    pub expected_per_delivered_frame: f64,
    pub expected_total: f64,
    pub realized_total: Option<u64>,
}

/// Machine-readable run summary. Counters match the last row of the step table.
#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: Option<u64>,
    pub placement: &'static str,
    pub duration_s: f64,
    pub channel_sample_dt_s: f64,
    pub steps: usize,
    pub steps_file: &'static str,
    pub frame_bits: f64,
    pub frames_generated: u64,
    pub frames_delivered: u64,
    pub frames_dropped: u64,
    pub frames_dropped_deadline: u64,
    pub frames_dropped_overflow: u64,
    pub frames_in_flight: u64,
    pub offered_bits: f64,
    pub delivered_bits: f64,
    pub delivered_fraction: f64,
    pub goodput_bps: f64,
    pub latency_mean_s: f64,
    pub latency_p95_s: f64,
    pub latency_max_s: f64,
    pub snr_min_db: Option<f64>,
    pub snr_max_db: Option<f64>,
    pub mcs_indices_used: Vec<u32>,
    pub steps_in_scan: usize,
    pub steps_blocked: usize,
    pub energy: EnergySummary,
    pub detection: Option<DetectionSummary>,
}

impl RunSummary {
    pub fn new(
        name: &str,
        seed: Option<u64>,
        scenario: &Scenario,
        result: &SimulationResult,
        energy: &EnergyReport,
    ) -> Self {
        let snrs = result.steps.iter().filter_map(|s| s.snr_db);
        let snr_min = snrs.clone().reduce(f64::min).map(round6);
        let snr_max = snrs.reduce(f64::max).map(round6);
        let mcs: BTreeSet<u32> = result.steps.iter().filter_map(|s| s.mcs_index).collect();
        Self {
            scenario: name.to_string(),
            seed,
            placement: match scenario.placement {
                uavsim_core::engine::Placement::Edge => "edge",
                uavsim_core::engine::Placement::Onboard => "onboard",
            },
            duration_s: round6(result.duration_s),
            channel_sample_dt_s: round6(result.channel_sample_dt_s),
            steps: result.steps.len(),
            steps_file: STEPS_FILE,
            frame_bits: round6(result.frame_bits),
            frames_generated: result.frames_generated,
            frames_delivered: result.frames_delivered,
            frames_dropped: result.frames_dropped,
            frames_dropped_deadline: result.frames_dropped_deadline,
            frames_dropped_overflow: result.frames_dropped_overflow,
            frames_in_flight: result.frames_in_flight,
            offered_bits: round6(result.offered_bits),
            delivered_bits: round6(result.delivered_bits),
            delivered_fraction: round6(result.delivered_fraction()),
            goodput_bps: round6(result.goodput_bps),
            latency_mean_s: round6(result.latency.mean_s),
            latency_p95_s: round6(result.latency.p95_s),
            latency_max_s: round6(result.latency.max_s),
            snr_min_db: snr_min,
            snr_max_db: snr_max,
            mcs_indices_used: mcs.into_iter().collect(),
            steps_in_scan: result.steps.iter().filter(|s| s.in_scan).count(),
            steps_blocked: result.steps.iter().filter(|s| s.extra_loss_db.is_none()).count(),
            energy: EnergySummary::from(energy),
            detection: match (result.expected_detections_per_delivered_frame, result.expected_detections_total) {
                (Some(per), Some(total)) => Some(DetectionSummary {
                    expected_per_delivered_frame: round6(per),
                    expected_total: round6(total),
                    realized_total: result.realized_detections,
                }),
                _ => None,
            },
        }
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Internal(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes the step table and then the summary into `dir`.
pub fn write_run_report(dir: &Path, summary: &RunSummary, steps: &[StepRecord]) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}", dir.display()), e))?;
    write_atomic(&dir.join(STEPS_FILE), &steps_csv(steps))?;
    write_atomic(&dir.join(SUMMARY_FILE), &summary.to_json()?)
}

pub const UNREACHABLE: &str = "unreachable";

pub fn curve_csv(points: &[CurvePoint]) -> String {
    let mut out = String::from("gain_dbi,snr_db,max_distance_m\n");
    for p in points {
        let d = p.max_distance_m.map_or_else(|| UNREACHABLE.to_string(), sig6);
        let _ = writeln!(out, "{},{},{}", sig6(p.gain_dbi), sig6(p.snr_db), d);
    }
    out
}

/// One row of the detection comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRow {
    pub label: String,
    pub width: u32,
    pub height: u32,
    pub faces: usize,
    pub expected: f64,
    /// Relative to the 2K row; `None` when the 2K expectation is zero.
    pub ratio_to_2k: Option<f64>,
    pub realized: Option<u64>,
}

pub fn detection_csv(rows: &[DetectionRow]) -> String {
    let with_realized = rows.iter().any(|r| r.realized.is_some());
    let mut out = String::from("camera,width,height,faces,expected_detections,ratio_to_2k");
    if with_realized {
        out.push_str(",realized_detections");
    }
    out.push('\n');
    for r in rows {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            r.label,
            r.width,
            r.height,
            r.faces,
            sig6(r.expected),
            r.ratio_to_2k.map_or_else(|| "n/a".to_string(), sig6)
        );
        if with_realized {
            let _ = write!(out, ",{}", r.realized.map_or_else(String::new, |v| v.to_string()));
        }
        out.push('\n');
    }
    out
}
