//! WebAssembly bindings for the demo page in `www/`.

use eit_core::atomic::LevelScheme;
use eit_core::drive::{DriveConfig, ProbePulseSpec};
use eit_core::medium::MediumConfig;
use eit_core::scenarios::{group_delay_estimate, run_slow_light, run_slp, ScenarioResult, SlowLightSpec, SlpSpec};
use eit_core::solver::SimulationGrid;
use eit_core::spectra::{
    homogeneous_eit_peak, transmission_homogeneous, transmission_inhomogeneous, DetuningGrid, QuadratureSpec,
};
use wasm_bindgen::prelude::*;

/// Coarse grid that keeps a run well under a second in the browser.
fn demo_grid(t_end: f64) -> SimulationGrid {
    SimulationGrid {
        nz: 101,
        dt: 0.02,
        t_end,
        record_stride: 5,
        ..SimulationGrid::default()
    }
}

/// Output intensities of a pulse run, normalized to the input peak.
#[wasm_bindgen]
pub struct Trace {
    times: Vec<f64>,
    input: Vec<f64>,
    forward: Vec<f64>,
    backward: Vec<f64>,
    control_minus: Vec<f64>,
    /// Centroid delay; NaN when undefined.
    pub delay: f64,
    /// Retrieved fraction; NaN for plain slow light.
    pub efficiency: f64,
    pub transmission: f64,
}

#[wasm_bindgen]
impl Trace {
    pub fn times(&self) -> Vec<f64> {
        self.times.clone()
    }
    pub fn input(&self) -> Vec<f64> {
        self.input.clone()
    }
    pub fn forward(&self) -> Vec<f64> {
        self.forward.clone()
    }
    pub fn backward(&self) -> Vec<f64> {
        self.backward.clone()
    }
    pub fn control_minus(&self) -> Vec<f64> {
        self.control_minus.clone()
    }
}

impl Trace {
    fn from_result(r: ScenarioResult) -> Trace {
        let rec = r.record.expect("scenario keeps its record");
        let peak = rec.input.iter().cloned().fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let norm = |v: &[f64]| v.iter().map(|x| x / peak).collect::<Vec<_>>();
        Trace {
            input: norm(&rec.input),
            forward: norm(&rec.forward),
            backward: norm(&rec.backward),
            control_minus: rec.control_minus.clone(),
            times: rec.times,
            delay: r.delay.unwrap_or(f64::NAN),
            efficiency: r.efficiency.unwrap_or(f64::NAN),
            transmission: r.transmission,
        }
    }
}

fn thermal_medium(od: f64, theta_uk: f64) -> MediumConfig {
    MediumConfig {
        gamma_trd: 0.008,
        sigma_pc: 1.0,
        sigma_a: 0.32,
        ..MediumConfig::homogeneous(od)
    }
    .with_temperature(theta_uk * 1e-6)
}

/// Probe transmission over `points` detunings in [-span, span]; returns
/// interleaved (detuning, transmission) pairs.
pub fn spectrum_pairs(
    od: f64,
    theta_uk: f64,
    omega_c: f64,
    delta_c: f64,
    span: f64,
    points: usize,
    fiber: bool,
) -> eit_core::Result<Vec<f64>> {
    let scheme = LevelScheme::rb87_d2();
    let medium = thermal_medium(od, theta_uk);
    medium.validate()?;
    let drive = DriveConfig::cw(omega_c, delta_c, 0.0);
    let quad = QuadratureSpec {
        radial_nodes: 24,
        velocity_nodes: 10,
        check_convergence: false,
    };
    let grid = DetuningGrid {
        center: 0.0,
        half_span: span,
        points: points.clamp(2, 2001),
    };
    let mut out = Vec::with_capacity(2 * grid.points);
    for dp in grid.values() {
        let t = if fiber {
            transmission_inhomogeneous(dp, &medium, &drive, &scheme, &quad)?.transmission
        } else {
            transmission_homogeneous(dp, &medium, &drive, &scheme)?
        };
        out.push(dp);
        out.push(t);
    }
    Ok(out)
}

/// Gaussian pulse of width `fwhm` under a constant control.
pub fn slow_light_trace(od: f64, omega_c: f64, fwhm: f64) -> eit_core::Result<Trace> {
    let scheme = LevelScheme::rb87_d2();
    let medium = MediumConfig {
        gamma_trd: 0.008,
        ..MediumConfig::homogeneous(od)
    };
    let tau = group_delay_estimate(od, omega_c, &scheme);
    // probe on the light-shifted transparency peak
    let (delta_p, _) = homogeneous_eit_peak(&medium, &DriveConfig::cw(omega_c, 0.0, 0.0), &scheme, 1.0)?;
    let spec = SlowLightSpec {
        omega_c,
        delta_c: 0.0,
        delta_p,
        pulse: ProbePulseSpec {
            peak: 0.01,
            fwhm,
            center: 2.5 * fwhm,
        },
    };
    run_slow_light(&spec, &medium, &scheme, &demo_grid(5.0 * fwhm + 1.5 * tau)).map(Trace::from_result)
}

/// Stationary-light protocol at OD 53, 350 uK: the backward control is held
/// for `hold` (1/Gamma) once the pulse is mid-medium.
pub fn slp_trace(omega_c_minus: f64, delta_c_minus: f64, phase_mismatch: f64, hold: f64) -> eit_core::Result<Trace> {
    let scheme = LevelScheme::rb87_d2();
    let medium = MediumConfig {
        gamma_trd: 0.006,
        gamma_inh: 0.012,
        phase_mismatch,
        ..MediumConfig::homogeneous(53.0)
    }
    .with_temperature(350e-6);
    let omega_c_plus = 2.6;
    let tau = group_delay_estimate(53.0, omega_c_plus, &scheme);
    let fwhm = 0.8 * tau;
    let center = 2.5 * fwhm;
    let backward_on = center + 0.5 * tau;
    let spec = SlpSpec {
        omega_c_plus,
        omega_c_minus,
        delta_c_plus: 1.0,
        delta_c_minus,
        delta_p_plus: 1.0 - phase_mismatch / tau,
        pulse: ProbePulseSpec {
            peak: 0.01,
            fwhm,
            center,
        },
        backward_on,
        backward_off: backward_on + hold.max(0.0) + 1e-9,
        ramp: 3.814,
    };
    let t_end = spec.backward_off + 3.0 * tau;
    run_slp(&spec, &medium, &scheme, &demo_grid(t_end)).map(Trace::from_result)
}

fn js(e: eit_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub fn spectrum(
    od: f64,
    theta_uk: f64,
    omega_c: f64,
    delta_c: f64,
    span: f64,
    points: usize,
    fiber: bool,
) -> Result<Vec<f64>, JsError> {
    spectrum_pairs(od, theta_uk, omega_c, delta_c, span, points, fiber).map_err(js)
}

#[wasm_bindgen(js_name = slowLight)]
pub fn slow_light(od: f64, omega_c: f64, fwhm: f64) -> Result<Trace, JsError> {
    slow_light_trace(od, omega_c, fwhm).map_err(js)
}

#[wasm_bindgen(js_name = stationaryLight)]
pub fn stationary_light(
    omega_c_minus: f64,
    delta_c_minus: f64,
    phase_mismatch: f64,
    hold: f64,
) -> Result<Trace, JsError> {
    slp_trace(omega_c_minus, delta_c_minus, phase_mismatch, hold).map_err(js)
}
