//! Right-hand side of the truncated Bloch equations for one (z, v) block.

use num_complex::Complex64;

use super::state::Layout;
use crate::atomic::LevelScheme;

const I_HALF: Complex64 = Complex64::new(0.0, 0.5);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Detunings and decay of one velocity class at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassRates {
    /// Forward probe detuning seen by the class.
    pub delta_p: f64,
    /// Relative control detuning including the two-photon Doppler shift.
    pub zeta: f64,
    /// Light-shift corrected two-photon detuning.
    pub delta: f64,
    pub gamma_21: f64,
}

/// Local field amplitudes entering a block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub control_plus: Complex64,
    pub control_minus: Complex64,
    pub probe_plus: Complex64,
    pub probe_minus: Complex64,
}

#[inline]
fn decay(half_width: f64, detuning: f64) -> Complex64 {
    Complex64::new(-half_width, detuning)
}

/// Writes d(block)/dt into `out`.
pub fn block_derivative(
    layout: Layout,
    scheme: &LevelScheme,
    rates: &ClassRates,
    fields: &Couplings,
    y: &[Complex64],
    out: &mut [Complex64],
) {
    let n = layout.n_max as isize;
    let half_g = 0.5 * scheme.gamma;
    let (s14, s15, s25) = (scheme.s_tilde_14, scheme.s_tilde_15, scheme.s_tilde_25);
    let (cp, cm) = (fields.control_plus, fields.control_minus);

    let odd = |j: isize, plus: fn(&Layout, usize) -> usize, minus: fn(&Layout, usize) -> usize| {
        if j > 0 {
            y[plus(&layout, ((j - 1) / 2) as usize)]
        } else {
            y[minus(&layout, ((-j - 1) / 2) as usize)]
        }
    };
    let r31 = |j| odd(j, Layout::rho31_plus, Layout::rho31_minus);
    let r51 = |j| odd(j, Layout::rho51_plus, Layout::rho51_minus);
    let r21 = |m: isize| if m.abs() <= n { y[layout.rho21(m)] } else { ZERO };

    for m in -n..=n {
        let up = r31(2 * m + 1) + s25 * r51(2 * m + 1);
        let down = r31(2 * m - 1) + s25 * r51(2 * m - 1);
        let k = layout.rho21(m);
        out[k] = decay(0.5 * rates.gamma_21, rates.delta - m as f64 * rates.zeta) * y[k]
            + I_HALF * (cp.conj() * up + cm.conj() * down);
    }

    for k in 0..=layout.n_max {
        let ki = k as isize;
        let (pp, pm) = if k == 0 {
            (fields.probe_plus, fields.probe_minus)
        } else {
            (ZERO, ZERO)
        };
        let mix_plus = cp * r21(ki) + cm * r21(ki + 1);
        let mix_minus = cm * r21(-ki) + cp * r21(-ki - 1);
        let det_plus = rates.delta_p - k as f64 * rates.zeta;
        let det_minus = rates.delta_p + (k + 1) as f64 * rates.zeta;

        let i = layout.rho31_plus(k);
        out[i] = decay(half_g, det_plus) * y[i] + I_HALF * (pp + mix_plus);
        let i = layout.rho31_minus(k);
        out[i] = decay(half_g, det_minus) * y[i] + I_HALF * (pm + mix_minus);
        let i = layout.rho51_plus(k);
        out[i] = decay(half_g, det_plus - scheme.delta_35) * y[i] + I_HALF * (s15 * pp + s25 * mix_plus);
        let i = layout.rho51_minus(k);
        out[i] = decay(half_g, det_minus - scheme.delta_35) * y[i] + I_HALF * (s15 * pm + s25 * mix_minus);
    }

    let i = layout.rho41_plus();
    out[i] = decay(half_g, rates.delta_p - scheme.delta_34) * y[i] + I_HALF * s14 * fields.probe_plus;
    let i = layout.rho41_minus();
    out[i] = decay(half_g, rates.delta_p + rates.zeta - scheme.delta_34) * y[i] + I_HALF * s14 * fields.probe_minus;
}
