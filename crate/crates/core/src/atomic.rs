//! Atomic level scheme of the D2 line used for probe/control coupling.
//!
//! Levels: |1> = F=1 and |2> = F=2 ground states, |3> = F'=1, |4> = F'=0,
//! |5> = F'=2 and the adiabatically eliminated |6> = F'=3. All rates and
//! frequencies are in units of the excited-state linewidth, times in units
//! of its inverse.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Excited-state linewidth of the Rb-87 D2 line in rad/s (2 pi x 6.07 MHz).
pub const GAMMA_RB87: f64 = 2.0 * std::f64::consts::PI * 6.07e6;

/// Ground-state hyperfine splitting of Rb-87 in Hz.
pub const GROUND_SPLITTING_RB87_HZ: f64 = 6.835e9;

/// Excited-state hyperfine intervals of the Rb-87 D2 line in Hz.
const F0_TO_F1_HZ: f64 = 72.218e6;
const F1_TO_F2_HZ: f64 = 156.947e6;
const F2_TO_F3_HZ: f64 = 266.650e6;

const RB87_MASS_KG: f64 = 1.443_160_648e-25;
const RB87_D2_WAVELENGTH_M: f64 = 780.241e-9;
const BOLTZMANN: f64 = 1.380_649e-23;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Relative hyperfine strengths S_{FF'} of the D2 line (I = 3/2). Each row sums
/// to one.
pub mod strengths {
    /// F=1 -> F'=0, 1, 2
    pub const F1: [f64; 3] = [1.0 / 6.0, 5.0 / 12.0, 5.0 / 12.0];
    /// F=2 -> F'=1, 2, 3
    pub const F2: [f64; 3] = [1.0 / 20.0, 1.0 / 4.0, 7.0 / 10.0];
}

/// Converts a duration in microseconds to units of 1/Gamma.
pub fn micros(t_us: f64) -> f64 {
    t_us * 1e-6 * GAMMA_RB87
}

/// Converts a duration in units of 1/Gamma to microseconds.
pub fn to_micros(t: f64) -> f64 {
    t / GAMMA_RB87 * 1e6
}

/// Doppler scale k v_th / Gamma for Rb-87 atoms at temperature `theta` (kelvin),
/// where v_th = sqrt(k_B theta / m) is the 1D thermal velocity spread.
pub fn doppler_scale_rb87(theta: f64) -> f64 {
    let v_th = (BOLTZMANN * theta.max(0.0) / RB87_MASS_KG).sqrt();
    let k = 2.0 * std::f64::consts::PI / RB87_D2_WAVELENGTH_M;
    k * v_th / GAMMA_RB87
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelScheme {
    pub gamma: f64,
    pub delta_34: f64,
    pub delta_35: f64,
    pub delta_36: f64,
    pub delta_omega_21: f64,
    pub s_tilde_14: f64,
    pub s_tilde_15: f64,
    pub s_tilde_25: f64,
    pub s_tilde_26: f64,
    /// Minimum |delta_36 - delta_c| accepted by the F'=3 elimination.
    #[serde(default = "default_elimination_epsilon")]
    pub elimination_epsilon: f64,
}

fn default_elimination_epsilon() -> f64 {
    1e-6
}

impl LevelScheme {
    /// Rb-87 D2 constants in units of Gamma.
    pub fn rb87_d2() -> Self {
        let gamma_hz = GAMMA_RB87 / (2.0 * std::f64::consts::PI);
        let [s10, s11, s12] = strengths::F1;
        let [s21, s22, s23] = strengths::F2;
        LevelScheme {
            gamma: 1.0,
            delta_34: -F0_TO_F1_HZ / gamma_hz,
            delta_35: F1_TO_F2_HZ / gamma_hz,
            delta_36: (F1_TO_F2_HZ + F2_TO_F3_HZ) / gamma_hz,
            delta_omega_21: GROUND_SPLITTING_RB87_HZ / gamma_hz,
            s_tilde_14: (s10 / s11).sqrt(),
            s_tilde_15: (s12 / s11).sqrt(),
            s_tilde_25: (s22 / s21).sqrt(),
            s_tilde_26: (s23 / s21).sqrt(),
            elimination_epsilon: default_elimination_epsilon(),
        }
    }

    /// Ideal Lambda system: only |1>, |2>, |3> couple.
    pub fn three_level() -> Self {
        LevelScheme {
            s_tilde_14: 0.0,
            s_tilde_15: 0.0,
            s_tilde_25: 0.0,
            s_tilde_26: 0.0,
            ..Self::rb87_d2()
        }
    }

    /// Bare |1> <-> |3> transition. Controls have no effect on the probe
    /// because the probe sees no other excited level; use with zero control.
    pub fn two_level() -> Self {
        Self::three_level()
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "rb87_d2" => Some(Self::rb87_d2()),
            "three_level" => Some(Self::three_level()),
            "two_level" => Some(Self::two_level()),
            _ => None,
        }
    }

    /// Same scheme with the F'=0 absorption channel removed.
    pub fn without_f0_channel(mut self) -> Self {
        self.s_tilde_14 = 0.0;
        self
    }

    /// Same scheme with the eliminated F'=3 light shift switched off.
    pub fn without_f3_shift(mut self) -> Self {
        self.s_tilde_26 = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) {
            return Err(Error::invalid("scheme.gamma", "must be positive"));
        }
        for (name, s) in [
            ("scheme.s_tilde_14", self.s_tilde_14),
            ("scheme.s_tilde_15", self.s_tilde_15),
            ("scheme.s_tilde_25", self.s_tilde_25),
            ("scheme.s_tilde_26", self.s_tilde_26),
        ] {
            if !(s >= 0.0) || !s.is_finite() {
                return Err(Error::invalid(name, "strength factors must be finite and >= 0"));
            }
        }
        if !(self.elimination_epsilon > 0.0) {
            return Err(Error::invalid("scheme.elimination_epsilon", "must be positive"));
        }
        Ok(())
    }

    /// Light shift of |2> caused by a single control through the eliminated
    /// F'=3 level: -|S26 Omega_c|^2 / (4 (Delta_36 - Delta_c)).
    pub fn stark_shift_single(&self, omega_c: f64, delta_c: f64) -> Result<f64> {
        if omega_c == 0.0 || self.s_tilde_26 == 0.0 {
            return Ok(0.0);
        }
        let gap = self.delta_36 - delta_c;
        if gap.abs() < self.elimination_epsilon {
            return Err(Error::Elimination {
                gap: gap.abs(),
                epsilon: self.elimination_epsilon,
            });
        }
        let coupling = self.s_tilde_26 * omega_c;
        Ok(-coupling * coupling / (4.0 * gap))
    }

    /// Total F'=3 light shift from both counterpropagating controls.
    pub fn stark_shift(
        &self,
        omega_c_plus: f64,
        omega_c_minus: f64,
        delta_c_plus: f64,
        delta_c_minus: f64,
    ) -> Result<f64> {
        Ok(self.stark_shift_single(omega_c_plus, delta_c_plus)?
            + self.stark_shift_single(omega_c_minus, delta_c_minus)?)
    }

    /// Phase mismatch accumulated over a medium of physical length `length_m`,
    /// Delta_omega_21 L / c, for the Rb-87 ground splitting.
    pub fn phase_mismatch_for_length(&self, length_m: f64) -> f64 {
        2.0 * std::f64::consts::PI * GROUND_SPLITTING_RB87_HZ * length_m / SPEED_OF_LIGHT
    }
}

impl Default for LevelScheme {
    fn default() -> Self {
        Self::rb87_d2()
    }
}

/// Rb-87 D2 line constants; shorthand for [`LevelScheme::rb87_d2`].
pub fn default_rb87_d2() -> LevelScheme {
    LevelScheme::rb87_d2()
}
