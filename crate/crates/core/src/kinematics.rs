//! Drone trajectory, ground-antenna pointing geometry and the polarization gimbal.
//!
//! Coordinates are in an AP-centred right-handed frame with z up. The ground
//! AP sits at the origin.

use crate::error::{Error, Result};
use crate::mcs::RadioHardware;

pub type Vec3 = [f64; 3];

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: Vec3, k: f64) -> Vec3 {
    [a[0] * k, a[1] * k, a[2] * k]
}

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn lerp(a: f64, b: f64, w: f64) -> f64 {
    a + (b - a) * w
}

/// Angle between two non-zero vectors, stable for small angles.
fn angle_between(a: Vec3, b: Vec3) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub t_s: f64,
    pub position_m: Vec3,
    /// Roll of the drone's polarization plane (deg).
    pub roll_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    waypoints: Vec<Waypoint>,
}

impl Trajectory {
    pub fn new(waypoints: Vec<Waypoint>) -> Result<Self> {
        if waypoints.is_empty() {
            return Err(Error::invalid("Trajectory.waypoints", "at least one waypoint required"));
        }
        for w in &waypoints {
            if !w.t_s.is_finite() || !w.roll_deg.is_finite() || w.position_m.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid("Trajectory.waypoints", format!("non-finite waypoint at t = {}", w.t_s)));
            }
        }
        if let Some(w) = waypoints.windows(2).find(|w| !(w[1].t_s > w[0].t_s)) {
            return Err(Error::invalid(
                "Trajectory.waypoints",
                format!("times must be strictly increasing ({} then {})", w[0].t_s, w[1].t_s),
            ));
        }
        Ok(Self { waypoints })
    }

    /// Stationary drone at `position` over `[0, duration_s]`.
    pub fn hover(position_m: Vec3, duration_s: f64) -> Self {
        let mut wps = vec![Waypoint { t_s: 0.0, position_m, roll_deg: 0.0 }];
        if duration_s > 0.0 {
            wps.push(Waypoint { t_s: duration_s, position_m, roll_deg: 0.0 });
        }
        Self { waypoints: wps }
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn start_s(&self) -> f64 {
        self.waypoints[0].t_s
    }

    pub fn end_s(&self) -> f64 {
        self.waypoints[self.waypoints.len() - 1].t_s
    }
}

/// Piecewise-linear position and roll at time `t`.
pub fn position_at(traj: &Trajectory, t: f64) -> Result<(Vec3, f64)> {
    if !(t >= traj.start_s() && t <= traj.end_s()) {
        return Err(Error::Domain(format!("t = {t} s outside trajectory span [{}, {}]", traj.start_s(), traj.end_s())));
    }
    let wps = &traj.waypoints;
    // First waypoint strictly after t; the bracketing segment ends there.
    let hi = wps.partition_point(|w| w.t_s <= t);
    if hi == 0 {
        unreachable!("t >= start checked above");
    }
    let a = &wps[hi - 1];
    if a.t_s == t || hi == wps.len() {
        return Ok((a.position_m, a.roll_deg));
    }
    let b = &wps[hi];
    let w = (t - a.t_s) / (b.t_s - a.t_s);
    let p = [
        lerp(a.position_m[0], b.position_m[0], w),
        lerp(a.position_m[1], b.position_m[1], w),
        lerp(a.position_m[2], b.position_m[2], w),
    ];
    Ok((p, lerp(a.roll_deg, b.roll_deg, w)))
}

/// Ground access point. Its position is the frame origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApConfig {
    boresight: Vec3,
}

impl Default for ApConfig {
    fn default() -> Self {
        Self::zenith()
    }
}

impl ApConfig {
    pub fn zenith() -> Self {
        Self { boresight: [0.0, 0.0, 1.0] }
    }

    /// Boresight must have unit norm (within 1e-9).
    pub fn new(boresight: Vec3) -> Result<Self> {
        let n = norm(boresight);
        if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("ApConfig.boresight", format!("must be a unit vector, norm is {n}")));
        }
        Ok(Self { boresight })
    }

    pub fn position(&self) -> Vec3 {
        [0.0; 3]
    }

    pub fn boresight(&self) -> Vec3 {
        self.boresight
    }

    /// (horizontal, vertical, forward) axes of the boresight frame.
    ///
    /// Vertical is world z projected off the boresight; for a zenith
    /// boresight world y is used instead, which makes horizontal = +x.
    fn frame(&self) -> (Vec3, Vec3, Vec3) {
        let f = self.boresight;
        let reference =
            if cross(f, [0.0, 0.0, 1.0]).iter().all(|c| c.abs() < 1e-12) { [0.0, 1.0, 0.0] } else { [0.0, 0.0, 1.0] };
        let up = sub(reference, scale(f, dot(reference, f)));
        let up = scale(up, 1.0 / norm(up));
        let horizontal = cross(up, f);
        (horizontal, up, f)
    }
}

/// Horizontal and vertical offsets (deg) of the drone direction from boresight.
pub fn aim_angles(ap: &ApConfig, position: Vec3) -> Result<(f64, f64)> {
    let v = sub(position, ap.position());
    if !(norm(v) > 0.0) {
        return Err(Error::Domain("drone coincides with the AP".into()));
    }
    let (h, u, f) = ap.frame();
    let (x, y, z) = (dot(v, h), dot(v, u), dot(v, f));
    let az = x.atan2(z);
    let el = y.atan2(x.hypot(z));
    Ok((az.to_degrees(), el.to_degrees()))
}

/// Whether the offsets lie inside the antenna's electronic scan range.
pub fn in_scan(hardware: &RadioHardware, az_off_deg: f64, el_off_deg: f64) -> bool {
    az_off_deg.abs() <= hardware.scan_az_deg && el_off_deg.abs() <= hardware.scan_el_deg
}

/// Rate of change (deg/s) of the AP-to-drone pointing direction over `[t, t + dt]`.
///
/// Uses a forward difference; when `t + dt` runs past the end of the
/// trajectory the window `[t - dt, t]` is used instead.
pub fn angular_rate_deg_s(traj: &Trajectory, ap: &ApConfig, t: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
    }
    let (t0, t1) = if t + dt <= traj.end_s() { (t, t + dt) } else { (t - dt, t) };
    let (p0, _) = position_at(traj, t0)?;
    let (p1, _) = position_at(traj, t1)?;
    let a = sub(p0, ap.position());
    let b = sub(p1, ap.position());
    if !(norm(a) > 0.0 && norm(b) > 0.0) {
        return Err(Error::Domain("drone passes through the AP".into()));
    }
    Ok(angle_between(a, b).to_degrees() / dt)
}

/// Fold an angle difference onto [0, 90] deg; linear polarization is
/// symmetric under 180 deg rotation and under sign.
pub fn fold_polarization_deg(diff_deg: f64) -> f64 {
    let m = diff_deg.abs().rem_euclid(180.0);
    if m > 90.0 {
        180.0 - m
    } else {
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GimbalState {
    pub roll_deg: f64,
    pub rate_limit_deg_s: f64,
}

impl GimbalState {
    pub fn new(roll_deg: f64, rate_limit_deg_s: f64) -> Result<Self> {
        let s = Self { roll_deg, rate_limit_deg_s };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.roll_deg.is_finite() {
            return Err(Error::invalid("GimbalState.roll_deg", "must be finite"));
        }
        if !(self.rate_limit_deg_s > 0.0) {
            return Err(Error::invalid(
                "GimbalState.rate_limit_deg_s",
                format!("must be > 0, got {}", self.rate_limit_deg_s),
            ));
        }
        Ok(())
    }
}

/// Slew the gimbal toward `target_roll_deg` for `dt` seconds.
///
/// Returns the new state and the remaining polarization mismatch in [0, 90] deg.
pub fn gimbal_step(state: GimbalState, target_roll_deg: f64, dt: f64) -> (GimbalState, f64) {
    let max_move = state.rate_limit_deg_s * dt.max(0.0);
    let err = target_roll_deg - state.roll_deg;
    let moved = err.clamp(-max_move, max_move);
    let roll = if moved == err { target_roll_deg } else { state.roll_deg + moved };
    let next = GimbalState { roll_deg: roll, ..state };
    (next, fold_polarization_deg(target_roll_deg - roll))
}
