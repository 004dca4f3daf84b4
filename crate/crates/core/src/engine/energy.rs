use crate::error::{Error, Result};

use super::{Scenario, SimulationResult};

/// Where the detection AI runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// At the ground station, on the received video.
    Edge,
    /// On the drone.
    Onboard,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerModel {
    pub rx_idle_w: f64,
    /// Ground station receiving video and running detection.
    pub rx_active_w: f64,
    pub drone_base_w: f64,
    pub drone_radio_w: f64,
    /// Only drawn when the AI runs onboard.
    pub drone_ai_w: f64,
}

impl PowerModel {
    /// 3.8 W idle and 17.3 W while receiving 4K video and running detection.
    /// Drone-side figures are zero and must be supplied by the caller.
    pub fn measured_ground_station() -> Self {
        Self { rx_idle_w: 3.8, rx_active_w: 17.3, drone_base_w: 0.0, drone_radio_w: 0.0, drone_ai_w: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("PowerModel.rx_idle_w", self.rx_idle_w),
            ("PowerModel.rx_active_w", self.rx_active_w),
            ("PowerModel.drone_base_w", self.drone_base_w),
            ("PowerModel.drone_radio_w", self.drone_radio_w),
            ("PowerModel.drone_ai_w", self.drone_ai_w),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        if self.rx_active_w < self.rx_idle_w {
            return Err(Error::invalid("PowerModel.rx_active_w", "must be >= rx_idle_w"));
        }
        Ok(())
    }
}

/// Energy per side and term, in joules.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyReport {
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

/// Integrates the power model over a finished run.
///
/// The ground station draws `rx_active_w` in every step that carried video
/// bits and `rx_idle_w` otherwise; with onboard placement it stays idle. The
/// drone draws base + radio (+ AI when onboard) for the whole flight. Codec
/// power is charged per frame for the codec latency.
pub fn energy_report(result: &SimulationResult, scenario: &Scenario) -> Result<EnergyReport> {
    if result.duration_s != scenario.duration_s {
        return Err(Error::Mismatch(format!("duration {} s vs scenario {} s", result.duration_s, scenario.duration_s)));
    }
    if result.channel_sample_dt_s != scenario.channel_sample_dt_s || result.steps.len() != scenario.step_count() {
        return Err(Error::Mismatch(format!(
            "{} steps of {} s vs scenario {} steps of {} s",
            result.steps.len(),
            result.channel_sample_dt_s,
            scenario.step_count(),
            scenario.channel_sample_dt_s
        )));
    }

    let p = &scenario.power;
    let flight_s = scenario.duration_s;
    let active_s: f64 = match scenario.placement {
        Placement::Edge => result.steps.iter().filter(|s| s.ground_active).map(|s| s.dt_s).sum(),
        Placement::Onboard => 0.0,
    };
    let idle_s = (flight_s - active_s).max(0.0);
    let ai_w = match scenario.placement {
        Placement::Edge => 0.0,
        Placement::Onboard => p.drone_ai_w,
    };

    let codec = &scenario.codec;
    let r = EnergyReport {
        ground_active_time_s: active_s,
        ground_idle_time_s: idle_s,
        ground_active_j: p.rx_active_w * active_s,
        ground_idle_j: p.rx_idle_w * idle_s,
        ground_decode_j: codec.decode_power_w * codec.decode_latency_s * result.frames_delivered as f64,
        drone_base_j: p.drone_base_w * flight_s,
        drone_radio_j: p.drone_radio_w * flight_s,
        drone_ai_j: ai_w * flight_s,
        drone_encode_j: codec.encode_power_w * codec.encode_latency_s * result.frames_generated as f64,
        ..EnergyReport::default()
    };
    Ok(EnergyReport {
        ground_j: r.ground_active_j + r.ground_idle_j + r.ground_decode_j,
        drone_j: r.drone_base_j + r.drone_radio_j + r.drone_ai_j + r.drone_encode_j,
        ..r
    })
}
