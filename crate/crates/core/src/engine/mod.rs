//! Time-stepped simulation of the drone-to-AP video link.
//!
//! Each channel sample evaluates geometry, gimbal residual, polarization loss,
//! SNR, MCS and capacity, then drains the frame queue at that capacity. Frame
//! arrivals and completions inside a step are resolved at their exact instants,
//! so latencies do not depend on the step size while the channel is constant.

mod energy;
mod queue;
mod sweep;

pub use energy::{energy_report, EnergyReport, Placement, PowerModel};
pub use queue::{OverflowPolicy, QueuePolicy};
pub use sweep::{run_batch, sweep_max_distance, CurvePoint};

use crate::detection::{self, Camera, DetectionCalibration, DetectionSampler, Face, FaceScene};
use crate::error::{Error, Result};
use crate::kinematics::{
    aim_angles, angular_rate_deg_s, fold_polarization_deg, gimbal_step, in_scan, position_at, ApConfig, GimbalState,
    Trajectory,
};
use crate::linkbudget::{polarization_loss_db, snr_db, LinkBudgetParams};
use crate::mcs::{capacity_bps, select_mcs_with_hysteresis, McsTable, RadioHardware};
use crate::video::{frame_size_bits, frame_times_s, CodecModel, VideoProfile};
use queue::{Delivery, FluidQueue};

pub const DEFAULT_CHANNEL_SAMPLE_DT_S: f64 = 0.01;

/// Faces watched by the camera, for per-frame detection statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionSetup {
    pub calibration: DetectionCalibration,
    pub faces: Vec<Face>,
    pub horizontal_fov_deg: f64,
}

impl DetectionSetup {
    pub fn scene(&self, profile: VideoProfile) -> FaceScene {
        FaceScene { faces: self.faces.clone(), camera: Camera { profile, horizontal_fov_deg: self.horizontal_fov_deg } }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Radio parameters. The antenna gains are taken from `drone_radio`
    /// (transmit) and `ground_radio` (receive), see [`Scenario::link_params`].
    pub link: LinkBudgetParams,
    pub ground_radio: RadioHardware,
    pub drone_radio: RadioHardware,
    pub mcs_table: McsTable,
    pub mcs_hysteresis_db: f64,
    pub trajectory: Trajectory,
    pub ap: ApConfig,
    /// Pointing slew above this marks the link out of track. Infinite by default.
    pub max_tracking_rate_deg_s: f64,
    pub gimbal: GimbalState,
    /// Without the gimbal the full drone roll shows up as polarization mismatch.
    pub gimbal_enabled: bool,
    pub video: VideoProfile,
    pub codec: CodecModel,
    pub power: PowerModel,
    pub detection: Option<DetectionSetup>,
    pub duration_s: f64,
    pub channel_sample_dt_s: f64,
    pub queue: QueuePolicy,
    pub placement: Placement,
}

impl Scenario {
    /// Drone hovering 100 m above the AP with lens antennas at both ends,
    /// streaming raw 4K at 7.5 fps for `duration_s`.
    pub fn hover_100m(mcs_table: McsTable, duration_s: f64) -> Self {
        Self {
            link: LinkBudgetParams::sixty_ghz(RadioHardware::lens().antenna_gain_dbi),
            ground_radio: RadioHardware::lens(),
            drone_radio: RadioHardware::lens(),
            mcs_table,
            mcs_hysteresis_db: 0.0,
            trajectory: Trajectory::hover([0.0, 0.0, 100.0], duration_s),
            ap: ApConfig::zenith(),
            max_tracking_rate_deg_s: f64::INFINITY,
            gimbal: GimbalState { roll_deg: 0.0, rate_limit_deg_s: 90.0 },
            gimbal_enabled: true,
            video: VideoProfile::uhd(7.5),
            codec: CodecModel::uncompressed(),
            power: PowerModel::measured_ground_station(),
            detection: None,
            duration_s,
            channel_sample_dt_s: DEFAULT_CHANNEL_SAMPLE_DT_S,
            queue: QueuePolicy::new(4e9),
            placement: Placement::Edge,
        }
    }

    pub fn link_params(&self) -> LinkBudgetParams {
        self.link.with_gains(self.drone_radio.antenna_gain_dbi, self.ground_radio.antenna_gain_dbi)
    }

    pub fn frame_bits(&self) -> f64 {
        frame_size_bits(&self.video, &self.codec)
    }

    /// Number of channel samples; the last one may be shorter than `dt`.
    pub fn step_count(&self) -> usize {
        if self.duration_s <= 0.0 {
            return 0;
        }
        ((self.duration_s / self.channel_sample_dt_s) - 1e-9).ceil().max(1.0) as usize
    }

    pub fn step_bounds(&self, k: usize) -> (f64, f64) {
        let n = self.step_count();
        let start = k as f64 * self.channel_sample_dt_s;
        let end = if k + 1 >= n { self.duration_s } else { (k + 1) as f64 * self.channel_sample_dt_s };
        (start, end)
    }

    pub fn validate(&self) -> Result<()> {
        self.link.validate()?;
        self.ground_radio.validate("RadioHardware(ground)")?;
        self.drone_radio.validate("RadioHardware(drone)")?;
        self.gimbal.validate()?;
        self.video.validate()?;
        self.codec.validate()?;
        self.power.validate()?;
        if !(self.mcs_hysteresis_db >= 0.0 && self.mcs_hysteresis_db.is_finite()) {
            return Err(Error::invalid("Scenario.mcs_hysteresis_db", "must be >= 0"));
        }
        if !(self.max_tracking_rate_deg_s > 0.0) {
            return Err(Error::invalid("Scenario.max_tracking_rate_deg_s", "must be > 0"));
        }
        if !(self.duration_s >= 0.0 && self.duration_s.is_finite()) {
            return Err(Error::invalid("Scenario.duration_s", format!("must be >= 0, got {}", self.duration_s)));
        }
        if !(self.channel_sample_dt_s > 0.0 && self.channel_sample_dt_s.is_finite()) {
            return Err(Error::invalid(
                "Scenario.channel_sample_dt_s",
                format!("must be > 0, got {}", self.channel_sample_dt_s),
            ));
        }
        if !(self.queue.max_queue_bits > 0.0) {
            return Err(Error::invalid("QueuePolicy.max_queue_bits", "must be > 0"));
        }
        if !(self.queue.frame_deadline_s >= 0.0) {
            return Err(Error::invalid("QueuePolicy.frame_deadline_s", "must be >= 0"));
        }
        if self.trajectory.start_s() > 0.0 || self.trajectory.end_s() < self.duration_s {
            return Err(Error::invalid(
                "Trajectory.waypoints",
                format!(
                    "must cover [0, {}] s, covers [{}, {}]",
                    self.duration_s,
                    self.trajectory.start_s(),
                    self.trajectory.end_s()
                ),
            ));
        }
        if let Some(d) = &self.detection {
            d.scene(self.video).validate()?;
        }
        Ok(())
    }
}

/// State of the channel and queue at the end of one channel sample.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t_s: f64,
    pub dt_s: f64,
    pub distance_m: f64,
    pub az_off_deg: f64,
    pub el_off_deg: f64,
    pub in_scan: bool,
    pub angular_rate_deg_s: f64,
    pub in_track: bool,
    pub pol_mismatch_deg: f64,
    /// `None` when the polarization is orthogonal.
    pub extra_loss_db: Option<f64>,
    pub snr_db: Option<f64>,
    pub mcs_index: Option<u32>,
    pub capacity_bps: f64,
    pub bits_sent: f64,
    pub queue_bits: f64,
    pub frames_generated_cum: u64,
    pub frames_delivered_cum: u64,
    pub frames_dropped_cum: u64,
    pub ground_active: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LatencyStats {
    pub mean_s: f64,
    pub p95_s: f64,
    pub max_s: f64,
}

impl LatencyStats {
    fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = ((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        Self {
            mean_s: samples.iter().sum::<f64>() / samples.len() as f64,
            p95_s: sorted[rank - 1],
            max_s: sorted[sorted.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub duration_s: f64,
    pub channel_sample_dt_s: f64,
    pub steps: Vec<StepRecord>,
    pub frame_bits: f64,
    pub frames_generated: u64,
    pub frames_delivered: u64,
    pub frames_dropped: u64,
    pub frames_dropped_deadline: u64,
    pub frames_dropped_overflow: u64,
    /// Frames still queued or being encoded when the run ends.
    pub frames_in_flight: u64,
    /// End-to-end latency of each delivered frame, in delivery order.
    pub frame_latencies_s: Vec<f64>,
    pub latency: LatencyStats,
    pub offered_bits: f64,
    pub delivered_bits: f64,
    pub goodput_bps: f64,
    pub energy_drone_j: f64,
    pub energy_ground_j: f64,
    pub expected_detections_per_delivered_frame: Option<f64>,
    pub expected_detections_total: Option<f64>,
    pub realized_detections: Option<u64>,
}

impl SimulationResult {
    pub fn delivered_fraction(&self) -> f64 {
        if self.offered_bits > 0.0 {
            self.delivered_bits / self.offered_bits
        } else {
            0.0
        }
    }
}

/// Runs the scenario with detection statistics in expected-value mode.
pub fn run(scenario: &Scenario) -> Result<SimulationResult> {
    run_seeded(scenario, None)
}

/// Runs the scenario; with a seed, detections are also sampled per delivered frame.
pub fn run_seeded(scenario: &Scenario, seed: Option<u64>) -> Result<SimulationResult> {
    scenario.validate()?;

    let link = scenario.link_params();
    let frame_bits = scenario.frame_bits();
    let gen_times = frame_times_s(&scenario.video, scenario.duration_s);
    let encode_s = scenario.codec.encode_latency_s;
    let decode_s = scenario.codec.decode_latency_s;
    let n_steps = scenario.step_count();

    let mut queue = FluidQueue::new(scenario.queue);
    let mut gimbal = scenario.gimbal;
    let mut current_mcs: Option<u32> = None;
    let mut next_frame = 0usize;
    let mut deliveries: Vec<Delivery> = Vec::new();
    let mut steps = Vec::with_capacity(n_steps);

    for k in 0..n_steps {
        let (t0, t1) = scenario.step_bounds(k);
        let dt = t1 - t0;

        let (position, roll_deg) = position_at(&scenario.trajectory, t0)?;
        let distance_m = position.iter().map(|c| c * c).sum::<f64>().sqrt();
        let (az_off_deg, el_off_deg) = aim_angles(&scenario.ap, position)?;
        let scan_ok = in_scan(&scenario.ground_radio, az_off_deg, el_off_deg);
        let angular_rate = angular_rate_deg_s(&scenario.trajectory, &scenario.ap, t0, dt)?;
        let in_track = angular_rate <= scenario.max_tracking_rate_deg_s;

        let pol_mismatch_deg = if scenario.gimbal_enabled {
            let (next, residual) = gimbal_step(gimbal, roll_deg, dt);
            gimbal = next;
            residual
        } else {
            fold_polarization_deg(roll_deg)
        };
        let pol = polarization_loss_db(pol_mismatch_deg)?;
        let extra_loss_db = pol.loss_db();
        let snr = extra_loss_db.map(|loss| snr_db(&link, distance_m, loss)).transpose()?;

        let entry = match snr {
            Some(s) if scan_ok && in_track => {
                select_mcs_with_hysteresis(&scenario.mcs_table, s, current_mcs, scenario.mcs_hysteresis_db)
            }
            _ => None,
        };
        current_mcs = entry.map(|e| e.index);
        let capacity = capacity_bps(entry, &scenario.ground_radio).min(scenario.drone_radio.max_throughput_bps);

        // Fluid drain with arrivals resolved at their exact instants.
        let mut now = t0;
        let mut sent = 0.0;
        while next_frame < gen_times.len() {
            let arrival = gen_times[next_frame] + encode_s;
            if arrival >= t1 {
                break;
            }
            sent += queue.drain(now, arrival, capacity, &mut deliveries);
            now = arrival;
            queue.enqueue(gen_times[next_frame], frame_bits);
            next_frame += 1;
        }
        sent += queue.drain(now, t1, capacity, &mut deliveries);
        queue.expire(t1);

        let frames_generated_cum = gen_times.partition_point(|&g| g < t1) as u64;
        let frames_dropped_cum = queue.drops.deadline + queue.drops.overflow;
        let ground_active = match scenario.placement {
            Placement::Edge => sent > 0.0,
            Placement::Onboard => false,
        };
        steps.push(StepRecord {
            t_s: t0,
            dt_s: dt,
            distance_m,
            az_off_deg,
            el_off_deg,
            in_scan: scan_ok,
            angular_rate_deg_s: angular_rate,
            in_track,
            pol_mismatch_deg,
            extra_loss_db,
            snr_db: snr,
            mcs_index: current_mcs,
            capacity_bps: capacity,
            bits_sent: sent,
            queue_bits: queue.bits(),
            frames_generated_cum,
            frames_delivered_cum: deliveries.len() as u64,
            frames_dropped_cum,
            ground_active,
        });
    }

    let frames_generated = gen_times.len() as u64;
    let frames_delivered = deliveries.len() as u64;
    let frames_dropped = queue.drops.deadline + queue.drops.overflow;
    let frames_in_flight = queue.len() as u64 + (gen_times.len() - next_frame) as u64;
    debug_assert_eq!(frames_generated, frames_delivered + frames_dropped + frames_in_flight);

    let frame_latencies_s: Vec<f64> = deliveries.iter().map(|d| d.done_s + decode_s - d.gen_s).collect();
    let delivered_bits: f64 = deliveries.iter().map(|d| d.bits).sum();
    let goodput_bps = if scenario.duration_s > 0.0 { delivered_bits / scenario.duration_s } else { 0.0 };

    let (per_frame, total, realized) = match &scenario.detection {
        None => (None, None, None),
        Some(setup) => {
            let scene = setup.scene(scenario.video);
            let per_frame = detection::expected_detections(&setup.calibration, &scene)?;
            let realized = match seed {
                Some(seed) => {
                    let mut sampler = DetectionSampler::new(&setup.calibration, &scene, seed)?;
                    Some((0..frames_delivered).map(|_| sampler.sample_frame()).sum())
                }
                None => None,
            };
            (Some(per_frame), Some(per_frame * frames_delivered as f64), realized)
        }
    };

    let mut result = SimulationResult {
        duration_s: scenario.duration_s,
        channel_sample_dt_s: scenario.channel_sample_dt_s,
        steps,
        frame_bits,
        frames_generated,
        frames_delivered,
        frames_dropped,
        frames_dropped_deadline: queue.drops.deadline,
        frames_dropped_overflow: queue.drops.overflow,
        frames_in_flight,
        latency: LatencyStats::from_samples(&frame_latencies_s),
        frame_latencies_s,
        offered_bits: frame_bits * frames_generated as f64,
        delivered_bits,
        goodput_bps,
        energy_drone_j: 0.0,
        energy_ground_j: 0.0,
        expected_detections_per_delivered_frame: per_frame,
        expected_detections_total: total,
        realized_detections: realized,
    };
    let energy = energy_report(&result, scenario)?;
    result.energy_drone_j = energy.drone_j;
    result.energy_ground_j = energy.ground_j;
    Ok(result)
}
