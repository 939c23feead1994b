//! Steady-state absorption and transmission of a weak probe under a single
//! forward control field.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atomic::LevelScheme;
use crate::drive::DriveConfig;
use crate::error::Result;
use crate::medium::MediumConfig;
use crate::quadrature::{gauss_legendre, maxwell_boltzmann_classes};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAbsorption {
    /// Complex absorption coefficient, in units of 1/Gamma.
    pub alpha: Complex64,
    pub detuning: f64,
}

/// Absorption coefficient of the five-level system for probe detuning
/// `delta_p` under a forward control (`omega_c`, `delta_c`).
///
/// `doppler_shift` is k v / Gamma; copropagating probe and control both see
/// their detunings reduced by it, so the two-photon detuning is unchanged.
/// The F'=3 light shift enters the two-photon denominator.
pub fn absorption_coefficient(
    delta_p: f64,
    omega_c: f64,
    delta_c: f64,
    scheme: &LevelScheme,
    gamma_21: f64,
    doppler_shift: f64,
) -> Result<ComplexAbsorption> {
    let dp = delta_p - doppler_shift;
    let dc = delta_c - doppler_shift;
    let stark = scheme.stark_shift_single(omega_c, dc)?;
    let half_gamma = 0.5 * scheme.gamma;
    let a = |xi: f64| 1.0 / Complex64::new(half_gamma, -(dp - xi));
    let a3 = a(0.0);
    let a4 = a(scheme.delta_34);
    let a5 = a(scheme.delta_35);

    let (s14, s15, s25) = (scheme.s_tilde_14, scheme.s_tilde_15, scheme.s_tilde_25);
    let incoherent = a4 * s14 * s14;
    let bare = a3 + a5 * s15 * s15;
    let alpha = if omega_c == 0.0 {
        incoherent + bare
    } else {
        // 1/B = 4 (gamma_21/2 - i delta'), kept finite at exact two-photon resonance
        let inv_b = 4.0 * Complex64::new(0.5 * gamma_21, -(delta_p - delta_c - stark));
        let w2 = omega_c * omega_c;
        let num = bare * inv_b + a3 * a5 * (s15 - s25).powi(2) * w2;
        let den = inv_b + (a3 + a5 * s25 * s25) * w2;
        incoherent + num / den
    };
    Ok(ComplexAbsorption {
        alpha,
        detuning: delta_p,
    })
}

/// Beer-Lambert transmission for a given absorption coefficient.
pub fn transmission_from_alpha(alpha: Complex64, od: f64, scheme: &LevelScheme) -> f64 {
    (-0.5 * scheme.gamma * od * alpha.re).exp()
}

/// Transmission of the homogeneous 1D medium. Uses gamma_21 = gamma_trd +
/// gamma_inh and the forward control exactly as given in `drive` (apply
/// effective parameters beforehand).
pub fn transmission_homogeneous(
    delta_p: f64,
    medium: &MediumConfig,
    drive: &DriveConfig,
    scheme: &LevelScheme,
) -> Result<f64> {
    if medium.od == 0.0 {
        return Ok(1.0);
    }
    let a = absorption_coefficient(
        delta_p,
        drive.cw_control(),
        drive.delta_c_plus,
        scheme,
        medium.gamma_21(),
        0.0,
    )?;
    Ok(transmission_from_alpha(a.alpha, medium.od, scheme))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    #[serde(default = "default_radial_nodes")]
    pub radial_nodes: usize,
    #[serde(default = "default_velocity_nodes")]
    pub velocity_nodes: usize,
    /// Re-evaluate with doubled node counts and flag changes above 1e-4.
    #[serde(default)]
    pub check_convergence: bool,
}

fn default_radial_nodes() -> usize {
    48
}
fn default_velocity_nodes() -> usize {
    16
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            radial_nodes: default_radial_nodes(),
            velocity_nodes: default_velocity_nodes(),
            check_convergence: false,
        }
    }
}

/// Below this Doppler scale the velocity average collapses onto v = 0.
pub const COLD_DOPPLER_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InhomogeneousTransmission {
    pub transmission: f64,
    /// False when doubling the node counts moved the result by more than 1e-4.
    pub converged: bool,
}

/// Transmission through the radially inhomogeneous, thermal medium.
///
/// The exponent averages Re(alpha) over the radial profile with weight
/// n(r) Omega_p(r) r and over the Maxwell-Boltzmann velocity distribution.
/// The weight is normalized so that `medium.od` is the optical depth seen by
/// the guided mode; a point-like on-axis cloud reproduces
/// [`transmission_homogeneous`] with the on-axis control. Only `gamma_trd`
/// enters, because the inhomogeneity is modelled explicitly here.
pub fn transmission_inhomogeneous(
    delta_p: f64,
    medium: &MediumConfig,
    drive: &DriveConfig,
    scheme: &LevelScheme,
    quad: &QuadratureSpec,
) -> Result<InhomogeneousTransmission> {
    if quad.radial_nodes < 2 || quad.velocity_nodes < 2 {
        return Err(crate::error::Error::invalid(
            "quadrature",
            "radial and velocity node counts must be >= 2",
        ));
    }
    let t = inhomogeneous_exponent(delta_p, medium, drive, scheme, quad.radial_nodes, quad.velocity_nodes)?;
    let transmission = (-t).exp();
    let mut converged = true;
    if quad.check_convergence {
        let t2 = inhomogeneous_exponent(
            delta_p,
            medium,
            drive,
            scheme,
            2 * quad.radial_nodes,
            2 * quad.velocity_nodes,
        )?;
        let fine = (-t2).exp();
        if (fine - transmission).abs() > 1e-4 {
            log::warn!(
                "inhomogeneous transmission at delta_p = {delta_p}: node doubling changed T by {:.2e}",
                (fine - transmission).abs()
            );
            converged = false;
        }
    }
    Ok(InhomogeneousTransmission {
        transmission,
        converged,
    })
}

/// Optical-depth exponent -ln T of the inhomogeneous medium.
fn inhomogeneous_exponent(
    delta_p: f64,
    medium: &MediumConfig,
    drive: &DriveConfig,
    scheme: &LevelScheme,
    radial_nodes: usize,
    velocity_nodes: usize,
) -> Result<f64> {
    if medium.od == 0.0 {
        return Ok(0.0);
    }
    let inv_eff = 1.0 / (medium.sigma_a * medium.sigma_a) + 1.0 / (medium.sigma_pc * medium.sigma_pc);
    let r_max = 5.0 / inv_eff.sqrt();
    let radial = gauss_legendre(radial_nodes, 0.0, r_max);
    let classes = if medium.k_thermal <= COLD_DOPPLER_LIMIT {
        vec![(0.0, 1.0)]
    } else {
        maxwell_boltzmann_classes(velocity_nodes, medium.k_thermal)
    };
    let omega_c0 = drive.cw_control();
    let mut acc = 0.0;
    let mut norm = 0.0;
    for (&r, &wr) in radial.nodes.iter().zip(&radial.weights) {
        let density = (-r * r / (medium.sigma_a * medium.sigma_a)).exp();
        let mode = (-r * r / (medium.sigma_pc * medium.sigma_pc)).exp();
        let weight = wr * density * mode * r;
        let omega_c = omega_c0 * mode;
        let mut avg = 0.0;
        for &(v, wv) in &classes {
            let a = absorption_coefficient(delta_p, omega_c, drive.delta_c_plus, scheme, medium.gamma_trd, v)?;
            avg += wv * a.alpha.re;
        }
        acc += weight * avg;
        norm += weight;
    }
    Ok(0.5 * scheme.gamma * medium.od * acc / norm)
}

/// Evenly spaced probe detunings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetuningGrid {
    pub center: f64,
    pub half_span: f64,
    pub points: usize,
}

impl DetuningGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.center];
        }
        let step = 2.0 * self.half_span / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.center - self.half_span + step * i as f64)
            .collect()
    }
}

/// Location of the transmission maximum of `f` in `[lo, hi]`: coarse scan
/// followed by golden-section refinement.
pub fn find_peak<F>(mut f: F, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = 401;
    let step = (hi - lo) / (n - 1) as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..n {
        let x = lo + step * i as f64;
        let y = f(x)?;
        if y > best.1 {
            best = (x, y);
        }
    }
    let (mut a, mut b) = ((best.0 - step).max(lo), (best.0 + step).min(hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..80 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
        if (b - a).abs() < 1e-10 {
            break;
        }
    }
    let x = 0.5 * (a + b);
    let y = f(x)?;
    Ok(if y >= best.1 { (x, y) } else { best })
}

/// Probe detuning of maximum homogeneous transmission within +-`span` of the
/// light-shifted two-photon resonance.
pub fn homogeneous_eit_peak(
    medium: &MediumConfig,
    drive: &DriveConfig,
    scheme: &LevelScheme,
    span: f64,
) -> Result<(f64, f64)> {
    let stark = scheme.stark_shift_single(drive.cw_control(), drive.delta_c_plus)?;
    let center = drive.delta_c_plus + stark;
    find_peak(
        |dp| transmission_homogeneous(dp, medium, drive, scheme),
        center - span,
        center + span,
    )
}

/// One row per detuning: `delta_p_over_gamma, transmission`.
pub fn spectrum_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from("delta_p_over_gamma,transmission\n");
    for (d, t) in rows {
        out.push_str(&crate::io::fmt_num(*d));
        out.push(',');
        out.push_str(&crate::io::fmt_num(*t));
        out.push('\n');
    }
    out
}
