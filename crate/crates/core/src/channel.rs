//! Line-of-sight air-to-ground channel model.
//!
//! Path loss follows the sub-6 GHz free-space form
//! `PL(dB) = 20·log10(d) + 20·log10(f) − 147.55`, the received SNR is
//! `P / (σ² · 10^(PL/10))`, and each user contributes `ω · log2(1 + SNR)`
//! bits/s to the weighted sum uplink rate.

use crate::error::{Error, Result};

/// Free-space constant `20·log10(4π/c)` in dB.
pub const FREE_SPACE_CONSTANT_DB: f64 = 147.55;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::domain(format!(
                "position ({x}, {y}, {z}) has a non-finite coordinate"
            )));
        }
        Ok(Self { x, y, z })
    }

    pub fn distance(&self, other: &Position3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// One uplink ground user.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundUser {
    position: Position3,
    /// Transmit power in watts.
    tx_power: f64,
    /// Noise power in watts.
    noise_power: f64,
    /// Allocated bandwidth in hertz.
    bandwidth: f64,
}

impl GroundUser {
    /// Creates a user on the ground plane at `(x, y, 0)`.
    pub fn new(x: f64, y: f64, tx_power: f64, noise_power: f64, bandwidth: f64) -> Result<Self> {
        let position = Position3::new(x, y, 0.0)?;
        for (name, v) in [
            ("tx_power", tx_power),
            ("noise_power", noise_power),
            ("bandwidth", bandwidth),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            position,
            tx_power,
            noise_power,
            bandwidth,
        })
    }

    pub fn position(&self) -> Position3 {
        self.position
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierConfig {
    carrier_freq: f64,
}

impl CarrierConfig {
    pub fn new(carrier_freq: f64) -> Result<Self> {
        if !(carrier_freq.is_finite() && carrier_freq > 0.0) {
            return Err(Error::domain(format!(
                "carrier frequency must be positive, got {carrier_freq}"
            )));
        }
        Ok(Self { carrier_freq })
    }

    pub fn carrier_freq(&self) -> f64 {
        self.carrier_freq
    }
}

/// Large-scale path loss in dB at `distance` meters.
pub fn path_loss_db(distance: f64, carrier: &CarrierConfig) -> Result<f64> {
    if !(distance.is_finite() && distance > 0.0) {
        return Err(Error::domain(format!(
            "path loss distance must be positive, got {distance}"
        )));
    }
    Ok(20.0 * distance.log10() + 20.0 * carrier.carrier_freq.log10() - FREE_SPACE_CONSTANT_DB)
}

/// Linear received SNR for a user seen through `pl_db` of path loss.
pub fn snr(pl_db: f64, user: &GroundUser) -> f64 {
    user.tx_power / (user.noise_power * 10f64.powf(pl_db / 10.0))
}

/// Weighted sum uplink rate in bits/s with the UAV at `uav`.
pub fn sum_rate(uav: &Position3, users: &[GroundUser], carrier: &CarrierConfig) -> Result<f64> {
    if users.is_empty() {
        return Err(Error::domain("sum rate needs at least one ground user"));
    }
    if !(uav.z > 0.0) {
        return Err(Error::domain(format!(
            "UAV altitude must be positive, got {}",
            uav.z
        )));
    }
    users.iter().try_fold(0.0, |acc, user| {
        let pl = path_loss_db(uav.distance(&user.position), carrier)?;
        Ok(acc + user.bandwidth * snr(pl, user).ln_1p() / std::f64::consts::LN_2)
    })
}
