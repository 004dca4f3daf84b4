//! Free-space link budget for a line-of-sight 60 GHz link.
//!
//! Only free-space spreading is modelled: no multipath, no oxygen absorption
//! and no rain fade. Antenna gains are scalars.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Radio parameters of one link direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetParams {
    pub carrier_freq_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    /// Thermal noise density (dBm/Hz).
    pub noise_density_dbm_per_hz: f64,
    pub noise_figure_db: f64,
    /// Fixed implementation loss, always >= 0.
    pub misc_loss_db: f64,
}

impl LinkBudgetParams {
    /// 60 GHz, 2.16 GHz channel, 10 dBm, -174 dBm/Hz, 10 dB noise figure,
    /// with the given gain applied at both ends.
    pub fn sixty_ghz(gain_dbi: f64) -> Self {
        Self {
            carrier_freq_hz: 60e9,
            bandwidth_hz: 2.16e9,
            tx_power_dbm: 10.0,
            tx_gain_dbi: gain_dbi,
            rx_gain_dbi: gain_dbi,
            noise_density_dbm_per_hz: -174.0,
            noise_figure_db: 10.0,
            misc_loss_db: 0.0,
        }
    }

    pub fn with_gains(mut self, tx_gain_dbi: f64, rx_gain_dbi: f64) -> Self {
        self.tx_gain_dbi = tx_gain_dbi;
        self.rx_gain_dbi = rx_gain_dbi;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("LinkBudgetParams.tx_power_dbm", self.tx_power_dbm),
            ("LinkBudgetParams.tx_gain_dbi", self.tx_gain_dbi),
            ("LinkBudgetParams.rx_gain_dbi", self.rx_gain_dbi),
            ("LinkBudgetParams.noise_density_dbm_per_hz", self.noise_density_dbm_per_hz),
            ("LinkBudgetParams.noise_figure_db", self.noise_figure_db),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, format!("must be finite, got {v}")));
            }
        }
        if !(self.carrier_freq_hz > 0.0 && self.carrier_freq_hz.is_finite()) {
            return Err(Error::invalid(
                "LinkBudgetParams.carrier_freq_hz",
                format!("must be > 0, got {}", self.carrier_freq_hz),
            ));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz.is_finite()) {
            return Err(Error::invalid(
                "LinkBudgetParams.bandwidth_hz",
                format!("must be > 0, got {}", self.bandwidth_hz),
            ));
        }
        if !(self.misc_loss_db >= 0.0 && self.misc_loss_db.is_finite()) {
            return Err(Error::invalid(
                "LinkBudgetParams.misc_loss_db",
                format!("must be >= 0, got {}", self.misc_loss_db),
            ));
        }
        Ok(())
    }

    /// Everything in the budget that does not depend on distance:
    /// EIRP + receive gain - fixed losses - noise floor.
    fn distance_free_margin_db(&self) -> f64 {
        self.tx_power_dbm + self.tx_gain_dbi + self.rx_gain_dbi - self.misc_loss_db - noise_power_dbm(self)
    }
}

/// Wavelength for a carrier frequency.
pub fn wavelength_m(carrier_freq_hz: f64) -> f64 {
    SPEED_OF_LIGHT / carrier_freq_hz
}

/// Free-space path loss `20 log10(4 pi d / lambda)` in dB.
pub fn fspl_db(distance_m: f64, carrier_freq_hz: f64) -> Result<f64> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(Error::Domain(format!("distance must be > 0 m, got {distance_m}")));
    }
    if !(carrier_freq_hz > 0.0) || !carrier_freq_hz.is_finite() {
        return Err(Error::Domain(format!("carrier frequency must be > 0 Hz, got {carrier_freq_hz}")));
    }
    let lambda = wavelength_m(carrier_freq_hz);
    Ok(20.0 * (4.0 * PI * distance_m / lambda).log10())
}

/// Receiver noise floor: density + 10 log10(B) + noise figure.
pub fn noise_power_dbm(params: &LinkBudgetParams) -> f64 {
    params.noise_density_dbm_per_hz + 10.0 * params.bandwidth_hz.log10() + params.noise_figure_db
}

/// SNR at `distance_m` with an additional time-varying loss (e.g. polarization).
pub fn snr_db(params: &LinkBudgetParams, distance_m: f64, extra_loss_db: f64) -> Result<f64> {
    if !(extra_loss_db >= 0.0) {
        return Err(Error::Domain(format!("extra loss must be >= 0 dB, got {extra_loss_db}")));
    }
    let fspl = fspl_db(distance_m, params.carrier_freq_hz)?;
    Ok(params.distance_free_margin_db() - fspl - extra_loss_db)
}

/// Distance at which the SNR (with no extra loss) equals `target_snr_db`.
///
/// Inverts the path loss in closed form:
/// `d = lambda / (4 pi) * 10^((margin - target) / 20)`.
pub fn max_distance_m(params: &LinkBudgetParams, target_snr_db: f64) -> Result<f64> {
    if target_snr_db.is_nan() {
        return Err(Error::Domain("target SNR is NaN".into()));
    }
    let allowed_fspl = params.distance_free_margin_db() - target_snr_db;
    let d = wavelength_m(params.carrier_freq_hz) / (4.0 * PI) * 10f64.powf(allowed_fspl / 20.0);
    // FSPL goes to -inf as d -> 0, so any finite target is met at some
    // d > 0 in exact arithmetic; in f64 it underflows for absurd targets.
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Unreachable { target_db: target_snr_db });
    }
    Ok(d)
}

/// Polarization mismatch loss between two linear antennas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolarizationLoss {
    Loss(f64),
    /// Orthogonal polarization: no power is coupled.
    Blocked,
}

impl PolarizationLoss {
    pub fn loss_db(self) -> Option<f64> {
        match self {
            PolarizationLoss::Loss(db) => Some(db),
            PolarizationLoss::Blocked => None,
        }
    }

    pub fn is_blocked(self) -> bool {
        matches!(self, PolarizationLoss::Blocked)
    }
}

/// `-20 log10(cos(mismatch))` for a mismatch already folded into [0, 90] degrees.
pub fn polarization_loss_db(mismatch_deg: f64) -> Result<PolarizationLoss> {
    if !(0.0..=90.0).contains(&mismatch_deg) {
        return Err(Error::Domain(format!("polarization mismatch must be in [0, 90] deg, got {mismatch_deg}")));
    }
    if mismatch_deg == 90.0 {
        return Ok(PolarizationLoss::Blocked);
    }
    let c = mismatch_deg.to_radians().cos();
    // cos(0) is exactly 1 so 0 deg gives exactly 0 dB.
    Ok(PolarizationLoss::Loss((-20.0 * c.log10()).max(0.0)))
}
