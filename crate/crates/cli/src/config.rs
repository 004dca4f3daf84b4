//! Scenario, sweep and face-scene documents.
//!
//! All documents are TOML with strict keys: unknown keys are errors, and only
//! the documented optional keys have defaults. Units are part of key names.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use uavsim_core::detection::{Anchor, Camera, DetectionCalibration, Face, FaceScene};
use uavsim_core::engine::{
    DetectionSetup, OverflowPolicy, Placement, PowerModel, QueuePolicy, Scenario, DEFAULT_CHANNEL_SAMPLE_DT_S,
};
use uavsim_core::kinematics::{ApConfig, GimbalState, Trajectory, Waypoint};
use uavsim_core::linkbudget::LinkBudgetParams;
use uavsim_core::mcs::{load_mcs_table, McsTable, RadioHardware};
use uavsim_core::video::{CodecMode, CodecModel, VideoProfile};

use crate::error::{CliError, CliResult};

fn default_dt() -> f64 {
    DEFAULT_CHANNEL_SAMPLE_DT_S
}
fn default_bpp() -> u32 {
    VideoProfile::DEFAULT_BITS_PER_PIXEL
}
fn default_deadline() -> f64 {
    QueuePolicy::DEFAULT_DEADLINE_S
}
fn default_true() -> bool {
    true
}
fn default_zenith() -> [f64; 3] {
    [0.0, 0.0, 1.0]
}
fn default_infinity() -> f64 {
    f64::INFINITY
}
fn default_one() -> f64 {
    1.0
}
fn default_one_u32() -> u32 {
    1
}
fn default_min_face_px() -> f64 {
    DetectionCalibration::DEFAULT_MIN_FACE_PX
}
fn default_anchor_2k_px() -> f64 {
    DetectionCalibration::DEFAULT_2K_ANCHOR_PX
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    pub duration_s: f64,
    #[serde(default = "default_dt")]
    pub channel_sample_dt_s: f64,
    pub placement: PlacementDoc,
    /// Path of the MCS table, relative to the scenario file.
    pub mcs_table: PathBuf,
    #[serde(default)]
    pub mcs_hysteresis_db: f64,
    pub link: LinkDoc,
    pub ground_radio: RadioDoc,
    pub drone_radio: RadioDoc,
    #[serde(default)]
    pub ap: ApDoc,
    pub gimbal: GimbalDoc,
    pub trajectory: Vec<WaypointDoc>,
    pub video: VideoDoc,
    pub codec: CodecDoc,
    pub power: PowerDoc,
    pub queue: QueueDoc,
    pub detection: Option<DetectionDoc>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlacementDoc {
    Edge,
    Onboard,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDoc {
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub noise_density_dbm_per_hz: f64,
    pub noise_figure_db: f64,
    #[serde(default)]
    pub misc_loss_db: f64,
}

impl LinkDoc {
    /// Gains are filled in from the radio hardware.
    fn to_params(&self, tx_gain_dbi: f64, rx_gain_dbi: f64) -> LinkBudgetParams {
        LinkBudgetParams {
            carrier_freq_hz: self.carrier_freq_hz,
            bandwidth_hz: self.bandwidth_hz,
            tx_power_dbm: self.tx_power_dbm,
            tx_gain_dbi,
            rx_gain_dbi,
            noise_density_dbm_per_hz: self.noise_density_dbm_per_hz,
            noise_figure_db: self.noise_figure_db,
            misc_loss_db: self.misc_loss_db,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioDoc {
    pub antenna_gain_dbi: f64,
    pub scan_az_deg: f64,
    pub scan_el_deg: f64,
    pub max_throughput_bps: f64,
}

impl From<&RadioDoc> for RadioHardware {
    fn from(d: &RadioDoc) -> Self {
        RadioHardware {
            antenna_gain_dbi: d.antenna_gain_dbi,
            scan_az_deg: d.scan_az_deg,
            scan_el_deg: d.scan_el_deg,
            max_throughput_bps: d.max_throughput_bps,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApDoc {
    #[serde(default = "default_zenith")]
    pub boresight: [f64; 3],
    #[serde(default = "default_infinity")]
    pub max_tracking_rate_deg_s: f64,
}

impl Default for ApDoc {
    fn default() -> Self {
        Self { boresight: default_zenith(), max_tracking_rate_deg_s: default_infinity() }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GimbalDoc {
    pub initial_roll_deg: f64,
    pub rate_limit_deg_s: f64,
    #[serde(default = "default_true")]
    pub enabled: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaypointDoc {
    pub t_s: f64,
    pub position_m: [f64; 3],
    #[serde(default)]
    pub roll_deg: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VideoDoc {
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    #[serde(default = "default_bpp")]
    pub bits_per_pixel: u32,
}

impl From<&VideoDoc> for VideoProfile {
    fn from(d: &VideoDoc) -> Self {
        VideoProfile { width: d.width, height: d.height, fps: d.fps, bits_per_pixel: d.bits_per_pixel }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CodecModeDoc {
    Uncompressed,
    Compressed,
}

/// For `uncompressed` the numeric keys may be omitted (they are fixed at 1
/// and 0); for `compressed` all of them are required.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodecDoc {
    pub mode: CodecModeDoc,
    pub compression_ratio: Option<f64>,
    pub encode_latency_s: Option<f64>,
    pub decode_latency_s: Option<f64>,
    pub encode_power_w: Option<f64>,
    pub decode_power_w: Option<f64>,
}

impl CodecDoc {
    fn to_model(&self) -> CliResult<CodecModel> {
        match self.mode {
            CodecModeDoc::Uncompressed => Ok(CodecModel {
                mode: CodecMode::Uncompressed,
                compression_ratio: self.compression_ratio.unwrap_or(1.0),
                encode_latency_s: self.encode_latency_s.unwrap_or(0.0),
                decode_latency_s: self.decode_latency_s.unwrap_or(0.0),
                encode_power_w: self.encode_power_w.unwrap_or(0.0),
                decode_power_w: self.decode_power_w.unwrap_or(0.0),
            }),
            CodecModeDoc::Compressed => {
                let req = |v: Option<f64>, key: &str| {
                    v.ok_or_else(|| CliError::Validation(format!("codec: missing `{key}` for compressed mode")))
                };
                Ok(CodecModel {
                    mode: CodecMode::Compressed,
                    compression_ratio: req(self.compression_ratio, "compression_ratio")?,
                    encode_latency_s: req(self.encode_latency_s, "encode_latency_s")?,
                    decode_latency_s: req(self.decode_latency_s, "decode_latency_s")?,
                    encode_power_w: req(self.encode_power_w, "encode_power_w")?,
                    decode_power_w: req(self.decode_power_w, "decode_power_w")?,
                })
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerDoc {
    pub rx_idle_w: f64,
    pub rx_active_w: f64,
    pub drone_base_w: f64,
    pub drone_radio_w: f64,
    pub drone_ai_w: f64,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverflowDoc {
    #[default]
    DropNewest,
    DropOldest,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QueueDoc {
    pub max_queue_bits: f64,
    #[serde(default = "default_deadline")]
    pub frame_deadline_s: f64,
    #[serde(default)]
    pub overflow_policy: OverflowDoc,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnchorDoc {
    pub face_px: f64,
    pub detection_rate: f64,
}

/// Either explicit `anchors`, or the two-resolution default placed at
/// `anchor_2k_px`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationDoc {
    pub anchors: Option<Vec<AnchorDoc>>,
    #[serde(default = "default_anchor_2k_px")]
    pub anchor_2k_px: f64,
    #[serde(default = "default_min_face_px")]
    pub min_face_px: f64,
    #[serde(default = "default_one")]
    pub quality_factor: f64,
}

impl Default for CalibrationDoc {
    fn default() -> Self {
        Self {
            anchors: None,
            anchor_2k_px: default_anchor_2k_px(),
            min_face_px: default_min_face_px(),
            quality_factor: default_one(),
        }
    }
}

impl CalibrationDoc {
    fn to_calibration(&self) -> CliResult<DetectionCalibration> {
        let anchors = match &self.anchors {
            Some(list) => list.iter().map(|a| Anchor { face_px: a.face_px, rate: a.detection_rate }).collect(),
            None => DetectionCalibration::two_resolution(self.anchor_2k_px)?.anchors().to_vec(),
        };
        Ok(DetectionCalibration::new(anchors, self.min_face_px, self.quality_factor)?)
    }
}

/// `count` identical faces.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceGroupDoc {
    #[serde(default = "default_one_u32")]
    pub count: u32,
    pub width_m: f64,
    pub distance_m: f64,
}

fn expand_faces(groups: &[FaceGroupDoc]) -> Vec<Face> {
    groups
        .iter()
        .flat_map(|g| {
            std::iter::repeat_n(Face { physical_width_m: g.width_m, distance_m: g.distance_m }, g.count as usize)
        })
        .collect()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectionDoc {
    pub horizontal_fov_deg: f64,
    #[serde(default)]
    pub calibration: CalibrationDoc,
    #[serde(default)]
    pub faces: Vec<FaceGroupDoc>,
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(format!("cannot read {}", path.display()), e))
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> CliResult<T> {
    toml::from_str(text).map_err(|e| CliError::Validation(format!("{}: {}", path.display(), e)))
}

pub fn load_mcs_file(path: &Path) -> CliResult<McsTable> {
    let text = read(path)?;
    load_mcs_table(&text).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Overrides applied on top of a scenario file.
#[derive(Debug, Clone, Default)]
pub struct ScenarioOverrides {
    pub mcs_table: Option<PathBuf>,
    pub channel_sample_dt_s: Option<f64>,
}

/// Reads and fully validates a scenario file.
pub fn parse_scenario(path: &Path, overrides: &ScenarioOverrides) -> CliResult<Scenario> {
    let text = read(path)?;
    let doc: ScenarioDocument = parse_toml(path, &text)?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mcs_path = match &overrides.mcs_table {
        Some(p) => p.clone(),
        None => base.join(&doc.mcs_table),
    };
    if !mcs_path.is_file() {
        return Err(CliError::Validation(format!(
            "{}: referenced MCS table {} does not exist",
            path.display(),
            mcs_path.display()
        )));
    }
    let mcs_table = load_mcs_file(&mcs_path)?;
    let scenario = build_scenario(&doc, mcs_table, overrides)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(scenario)
}

fn build_scenario(doc: &ScenarioDocument, mcs_table: McsTable, overrides: &ScenarioOverrides) -> CliResult<Scenario> {
    let ground_radio = RadioHardware::from(&doc.ground_radio);
    let drone_radio = RadioHardware::from(&doc.drone_radio);
    let trajectory = Trajectory::new(
        doc.trajectory
            .iter()
            .map(|w| Waypoint { t_s: w.t_s, position_m: w.position_m, roll_deg: w.roll_deg })
            .collect(),
    )?;
    let video = VideoProfile::from(&doc.video);
    let detection = match &doc.detection {
        None => None,
        Some(d) => Some(DetectionSetup {
            calibration: d.calibration.to_calibration()?,
            faces: expand_faces(&d.faces),
            horizontal_fov_deg: d.horizontal_fov_deg,
        }),
    };
    let scenario = Scenario {
        link: doc.link.to_params(drone_radio.antenna_gain_dbi, ground_radio.antenna_gain_dbi),
        ground_radio,
        drone_radio,
        mcs_table,
        mcs_hysteresis_db: doc.mcs_hysteresis_db,
        trajectory,
        ap: ApConfig::new(doc.ap.boresight)?,
        max_tracking_rate_deg_s: doc.ap.max_tracking_rate_deg_s,
        gimbal: GimbalState { roll_deg: doc.gimbal.initial_roll_deg, rate_limit_deg_s: doc.gimbal.rate_limit_deg_s },
        gimbal_enabled: doc.gimbal.enabled,
        video,
        codec: doc.codec.to_model()?,
        power: PowerModel {
            rx_idle_w: doc.power.rx_idle_w,
            rx_active_w: doc.power.rx_active_w,
            drone_base_w: doc.power.drone_base_w,
            drone_radio_w: doc.power.drone_radio_w,
            drone_ai_w: doc.power.drone_ai_w,
        },
        detection,
        duration_s: doc.duration_s,
        channel_sample_dt_s: overrides.channel_sample_dt_s.unwrap_or(doc.channel_sample_dt_s),
        queue: QueuePolicy {
            max_queue_bits: doc.queue.max_queue_bits,
            frame_deadline_s: doc.queue.frame_deadline_s,
            overflow: match doc.queue.overflow_policy {
                OverflowDoc::DropNewest => OverflowPolicy::DropNewest,
                OverflowDoc::DropOldest => OverflowPolicy::DropOldest,
            },
        },
        placement: match doc.placement {
            PlacementDoc::Edge => Placement::Edge,
            PlacementDoc::Onboard => Placement::Onboard,
        },
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Parameters of a range-versus-SNR sweep.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDocument {
    pub link: LinkDoc,
    pub sweep: Option<SweepRangeDoc>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepRangeDoc {
    pub gains_dbi: Vec<f64>,
    pub snr_start_db: f64,
    pub snr_stop_db: f64,
    pub snr_step_db: f64,
}

pub struct SweepTemplate {
    pub link: LinkBudgetParams,
    pub range: Option<SweepRangeDoc>,
}

pub fn parse_sweep(path: &Path) -> CliResult<SweepTemplate> {
    let text = read(path)?;
    let doc: SweepDocument = parse_toml(path, &text)?;
    let link = doc.link.to_params(0.0, 0.0);
    link.validate().map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(SweepTemplate { link, range: doc.sweep })
}

/// Faces plus the camera profiles to compare them under.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneDocument {
    #[serde(default)]
    pub calibration: CalibrationDoc,
    pub cameras: Vec<CameraDoc>,
    #[serde(default)]
    pub faces: Vec<FaceGroupDoc>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraDoc {
    pub label: String,
    pub width: u32,
    pub height: u32,
    pub fps: f64,
    #[serde(default = "default_bpp")]
    pub bits_per_pixel: u32,
    pub horizontal_fov_deg: f64,
}

pub struct CompareScene {
    pub calibration: DetectionCalibration,
    /// Camera label and the scene as seen through it, in file order.
    pub views: Vec<(String, FaceScene)>,
}

/// Labels that must be present in a comparison scene.
pub const REQUIRED_CAMERAS: [&str; 2] = ["2K", "4K"];

pub fn parse_scene(path: &Path) -> CliResult<CompareScene> {
    let text = read(path)?;
    let doc: SceneDocument = parse_toml(path, &text)?;
    let ctx = |e: uavsim_core::Error| CliError::Validation(format!("{}: {e}", path.display()));
    let calibration = doc.calibration.to_calibration()?;
    for label in REQUIRED_CAMERAS {
        if !doc.cameras.iter().any(|c| c.label == label) {
            return Err(CliError::Validation(format!(
                "{}: invalid FaceScene.camera: missing `{label}` camera profile",
                path.display()
            )));
        }
    }
    let faces = expand_faces(&doc.faces);
    let mut views = Vec::with_capacity(doc.cameras.len());
    for c in &doc.cameras {
        let scene = FaceScene {
            faces: faces.clone(),
            camera: Camera {
                profile: VideoProfile {
                    width: c.width,
                    height: c.height,
                    fps: c.fps,
                    bits_per_pixel: c.bits_per_pixel,
                },
                horizontal_fov_deg: c.horizontal_fov_deg,
            },
        };
        scene.validate().map_err(ctx)?;
        views.push((c.label.clone(), scene));
    }
    Ok(CompareScene { calibration, views })
}
