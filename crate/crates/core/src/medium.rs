use serde::{Deserialize, Serialize};

use crate::atomic::doppler_scale_rb87;
use crate::error::{Error, Result};

/// Atomic ensemble inside the fiber.
///
/// Lengths along the fiber are normalized to the medium length; the radial
/// widths `sigma_pc` and `sigma_a` only enter through their ratio, so any
/// consistent unit works (micrometres in the shipped presets).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumConfig {
    /// Resonant optical depth of the |1> <-> |3> transition.
    pub od: f64,
    pub length: f64,
    /// Temperature in kelvin.
    pub theta: f64,
    pub gamma_trd: f64,
    pub gamma_inh: f64,
    /// 1/e^2 intensity radius of the probe/control mode.
    pub sigma_pc: f64,
    /// Radius of the atomic density profile n(r) = n0 exp(-r^2 / sigma_a^2).
    pub sigma_a: f64,
    /// Doppler scale k v_th / Gamma.
    pub k_thermal: f64,
    /// Accumulated phase mismatch Delta_omega_21 L / c.
    pub phase_mismatch: f64,
}

impl MediumConfig {
    /// Cold homogeneous medium of the given optical depth.
    pub fn homogeneous(od: f64) -> Self {
        MediumConfig {
            od,
            length: 1.0,
            theta: 0.0,
            gamma_trd: 0.0,
            gamma_inh: 0.0,
            sigma_pc: 1.0,
            sigma_a: 1.0,
            k_thermal: 0.0,
            phase_mismatch: 0.0,
        }
    }

    /// Sets the temperature and the Rb-87 Doppler scale that goes with it.
    pub fn with_temperature(mut self, theta: f64) -> Self {
        self.theta = theta;
        self.k_thermal = doppler_scale_rb87(theta);
        self
    }

    pub fn gamma_21(&self) -> f64 {
        self.gamma_trd + self.gamma_inh
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.od >= 0.0) || !self.od.is_finite() {
            return Err(Error::invalid("medium.od", "optical depth must be finite and >= 0"));
        }
        if !(self.length > 0.0) {
            return Err(Error::invalid("medium.length", "must be positive"));
        }
        if !(self.theta >= 0.0) {
            return Err(Error::invalid("medium.theta", "temperature must be >= 0"));
        }
        if !(self.gamma_trd >= 0.0) {
            return Err(Error::invalid("medium.gamma_trd", "must be >= 0"));
        }
        if !(self.gamma_inh >= 0.0) {
            return Err(Error::invalid("medium.gamma_inh", "must be >= 0"));
        }
        if !(self.sigma_pc > 0.0) {
            return Err(Error::invalid("medium.sigma_pc", "must be positive"));
        }
        if !(self.sigma_a > 0.0) {
            return Err(Error::invalid("medium.sigma_a", "must be positive"));
        }
        if !(self.k_thermal >= 0.0) {
            return Err(Error::invalid("medium.k_thermal", "must be >= 0"));
        }
        if !self.phase_mismatch.is_finite() {
            return Err(Error::invalid("medium.phase_mismatch", "must be finite"));
        }
        Ok(())
    }
}

/// 1/e radius of a thermal cloud in the harmonic core of a Gaussian dipole
/// trap of depth `trap_depth` (same temperature units as `theta`) and 1/e^2
/// intensity waist `waist`.
pub fn thermal_cloud_radius(theta: f64, trap_depth: f64, waist: f64) -> f64 {
    waist * (theta / (2.0 * trap_depth)).sqrt()
}
