//! Time-domain Maxwell-Bloch integration for counterpropagating probe and
//! control fields.
//!
//! Coherences are expanded in spatial harmonics of the standing control
//! pattern and truncated at `n_max`. Probe fields are treated quasi-statically:
//! at every Runge-Kutta stage they are obtained by marching the field
//! equations through the medium with the current coherences as sources.

mod bloch;
mod grid;
mod record;
mod state;

pub use bloch::{block_derivative, ClassRates, Couplings};
pub use grid::{PhaseGauge, SimulationGrid};
pub use record::{snapshot_csv, TimeSeriesRecord};
pub use state::{CoherenceState, FieldState, Layout};

use num_complex::Complex64;

use crate::atomic::LevelScheme;
use crate::drive::DriveConfig;
use crate::error::{Error, Result};
use crate::medium::MediumConfig;

/// Coherences may not exceed this multiple of the peak input probe.
pub const INSTABILITY_FACTOR: f64 = 1e3;

/// Truncation is flagged when the detuning/EIT-width ratio drops below this.
pub const TRUNCATION_WARN_RATIO: f64 = 3.0;

/// Weak-probe warning threshold for peak probe over peak control.
pub const WEAK_PROBE_WARN_RATIO: f64 = 0.1;

/// A configured simulation: fixed drive, medium, scheme and grid.
#[derive(Debug, Clone)]
pub struct Propagator {
    pub drive: DriveConfig,
    pub medium: MediumConfig,
    pub scheme: LevelScheme,
    pub grid: SimulationGrid,
    classes: Vec<(f64, f64)>,
    layout: Layout,
    kappa_plus: f64,
    kappa_minus: f64,
    intensity_ref: f64,
    probe_peak: f64,
}

impl Propagator {
    pub fn new(
        drive: &DriveConfig,
        medium: &MediumConfig,
        scheme: &LevelScheme,
        grid: &SimulationGrid,
    ) -> Result<Self> {
        drive.validate()?;
        medium.validate()?;
        scheme.validate()?;
        grid.validate()?;
        let classes = grid.velocity_classes(medium);
        for &(kv, _) in &classes {
            scheme.stark_shift_single(drive.omega_c_plus.peak(), drive.delta_c_plus - kv)?;
            scheme.stark_shift_single(drive.omega_c_minus.peak(), drive.delta_c_minus + kv)?;
        }
        let phi = medium.phase_mismatch;
        let (kappa_plus, kappa_minus) = match grid.gauge {
            PhaseGauge::BackwardOnly => (0.0, 2.0 * phi),
            PhaseGauge::Raw => (phi, phi),
        };
        let intensity_ref = (0..=grid.steps())
            .map(|k| control_intensity(drive, k as f64 * grid.dt))
            .fold(0.0, f64::max);
        Ok(Propagator {
            drive: drive.clone(),
            medium: *medium,
            scheme: *scheme,
            grid: grid.clone(),
            classes,
            layout: Layout { n_max: grid.n_max },
            kappa_plus,
            kappa_minus,
            intensity_ref,
            probe_peak: drive.omega_p_input.peak(),
        })
    }

    pub fn velocity_classes(&self) -> &[(f64, f64)] {
        &self.classes
    }

    pub fn zero_state(&self) -> CoherenceState {
        CoherenceState::zeros(self.grid.n_max, self.grid.nz, self.classes.len())
    }

    /// Ground-state decoherence at time `t`. The inhomogeneous part follows
    /// the total control intensity, reaching `gamma_inh` at its maximum and
    /// vanishing while the controls are off.
    pub fn gamma_21(&self, t: f64) -> f64 {
        let inh = if self.intensity_ref > 0.0 {
            self.medium.gamma_inh * control_intensity(&self.drive, t) / self.intensity_ref
        } else {
            0.0
        };
        self.medium.gamma_trd + inh
    }

    /// Detunings of velocity class `kv` (Doppler scale k v / Gamma) at time `t`.
    pub fn class_rates(&self, t: f64, kv: f64) -> ClassRates {
        let d = &self.drive;
        let delta_p = d.delta_p_plus - kv;
        let dcp = d.delta_c_plus - kv;
        let dcm = d.delta_c_minus + kv;
        let shift = light_shift(&self.scheme, d.omega_c_plus.value(t), dcp)
            + light_shift(&self.scheme, d.omega_c_minus.value(t), dcm);
        ClassRates {
            delta_p,
            zeta: dcm - dcp,
            delta: delta_p - dcp - shift,
            gamma_21: self.gamma_21(t),
        }
    }

    /// Velocity-averaged polarization sources P^+(z), P^-(z).
    fn sources(&self, y: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
        let l = self.layout;
        let b = l.block_len();
        let (s14, s15) = (self.scheme.s_tilde_14, self.scheme.s_tilde_15);
        let nv = self.classes.len();
        let mut plus = Vec::with_capacity(self.grid.nz);
        let mut minus = Vec::with_capacity(self.grid.nz);
        for iz in 0..self.grid.nz {
            let mut p = Complex64::new(0.0, 0.0);
            let mut m = Complex64::new(0.0, 0.0);
            for (iv, &(_, w)) in self.classes.iter().enumerate() {
                let blk = &y[(iz * nv + iv) * b..][..b];
                p += w * (blk[l.rho31_plus(0)] + s14 * blk[l.rho41_plus()] + s15 * blk[l.rho51_plus(0)]);
                m += w * (blk[l.rho31_minus(0)] + s14 * blk[l.rho41_minus()] + s15 * blk[l.rho51_minus(0)]);
            }
            plus.push(p);
            minus.push(m);
        }
        (plus, minus)
    }

    fn sweep_data(&self, y: &[Complex64], t: f64) -> FieldState {
        let nz = self.grid.nz;
        let h = self.grid.dz();
        let mut fields = FieldState::zeros(nz);
        fields.time = t;
        fields.omega_p_plus[0] = self.drive.omega_p_input.complex(t);
        if self.medium.od == 0.0 {
            let step = Complex64::from_polar(1.0, self.kappa_plus * h);
            for i in 1..nz {
                fields.omega_p_plus[i] = step * fields.omega_p_plus[i - 1];
            }
            return fields;
        }
        let (pp, pm) = self.sources(y);
        // trapezoid rule with the free phase integrated exactly
        let coupling = Complex64::new(0.0, 0.5 * self.medium.od * self.scheme.gamma) * (0.5 * h);
        let step = Complex64::from_polar(1.0, self.kappa_plus * h);
        for i in 1..nz {
            let prev = fields.omega_p_plus[i - 1];
            fields.omega_p_plus[i] = step * prev + coupling * (step * pp[i - 1] + pp[i]);
        }
        let step = Complex64::from_polar(1.0, self.kappa_minus * h);
        for i in (0..nz - 1).rev() {
            let next = fields.omega_p_minus[i + 1];
            fields.omega_p_minus[i] = step * next + coupling * (step * pm[i + 1] + pm[i]);
        }
        fields
    }

    /// Probe fields generated by the coherences in `state` at time `t`:
    /// forward field marched from its input at z = 0, backward field from
    /// zero at z = L.
    pub fn field_sweep(&self, state: &CoherenceState, t: f64) -> FieldState {
        self.sweep_data(&state.data, t)
    }

    fn derivative(&self, t: f64, y: &[Complex64], fields: &FieldState, out: &mut [Complex64]) {
        let cp = Complex64::new(self.drive.omega_c_plus.value(t), 0.0);
        let cm = Complex64::new(self.drive.omega_c_minus.value(t), 0.0);
        let rates: Vec<ClassRates> = self.classes.iter().map(|&(kv, _)| self.class_rates(t, kv)).collect();
        let layout = self.layout;
        let b = layout.block_len();
        let row = b * self.classes.len();
        let scheme = &self.scheme;
        let per_row = |iz: usize, y_row: &[Complex64], out_row: &mut [Complex64]| {
            let couplings = Couplings {
                control_plus: cp,
                control_minus: cm,
                probe_plus: fields.omega_p_plus[iz],
                probe_minus: fields.omega_p_minus[iz],
            };
            for (iv, r) in rates.iter().enumerate() {
                block_derivative(
                    layout,
                    scheme,
                    r,
                    &couplings,
                    &y_row[iv * b..][..b],
                    &mut out_row[iv * b..][..b],
                );
            }
        };
        #[cfg(feature = "parallel")]
        if y.len() >= PARALLEL_THRESHOLD {
            use rayon::prelude::*;
            out.par_chunks_mut(row)
                .zip(y.par_chunks(row))
                .enumerate()
                .for_each(|(iz, (o, yr))| per_row(iz, yr, o));
            return;
        }
        for (iz, (o, yr)) in out.chunks_mut(row).zip(y.chunks(row)).enumerate() {
            per_row(iz, yr, o);
        }
    }

    fn rk4<F>(&self, y: &mut [Complex64], t: f64, work: &mut Work, mut fields_at: F) -> FieldState
    where
        F: FnMut(&[Complex64], f64) -> FieldState,
    {
        let dt = self.grid.dt;
        let f1 = fields_at(y, t);
        self.derivative(t, y, &f1, &mut work.k1);
        axpy(&mut work.tmp, y, 0.5 * dt, &work.k1);
        let f = fields_at(&work.tmp, t + 0.5 * dt);
        self.derivative(t + 0.5 * dt, &work.tmp, &f, &mut work.k2);
        axpy(&mut work.tmp, y, 0.5 * dt, &work.k2);
        let f = fields_at(&work.tmp, t + 0.5 * dt);
        self.derivative(t + 0.5 * dt, &work.tmp, &f, &mut work.k3);
        axpy(&mut work.tmp, y, dt, &work.k3);
        let f = fields_at(&work.tmp, t + dt);
        self.derivative(t + dt, &work.tmp, &f, &mut work.k4);
        let c = dt / 6.0;
        for (i, yi) in y.iter_mut().enumerate() {
            *yi += c * (work.k1[i] + 2.0 * work.k2[i] + 2.0 * work.k3[i] + work.k4[i]);
        }
        f1
    }

    fn check(&self, state: &CoherenceState, t: f64) -> Result<()> {
        self.check_against(state, t, self.probe_peak)
    }

    fn check_against(&self, state: &CoherenceState, t: f64, probe: f64) -> Result<()> {
        let bound = INSTABILITY_FACTOR * probe.max(f64::MIN_POSITIVE);
        let magnitude = state.max_abs();
        if !(magnitude <= bound) {
            return Err(Error::Instability {
                time: t,
                magnitude,
                bound,
            });
        }
        Ok(())
    }

    /// One RK4 step of the coherences with the probe fields held fixed.
    pub fn bloch_step(&self, state: &mut CoherenceState, fields: &FieldState, t: f64) -> Result<()> {
        let mut work = Work::new(state.data.len());
        self.rk4(&mut state.data, t, &mut work, |_, _| fields.clone());
        let scale = fields
            .omega_p_plus
            .iter()
            .chain(&fields.omega_p_minus)
            .map(|c| c.norm())
            .fold(self.probe_peak, f64::max);
        self.check_against(state, t + self.grid.dt, scale)
    }

    /// One RK4 step of the coupled system, re-solving the fields at every
    /// stage. Returns the fields at the start of the step.
    pub fn step(&self, state: &mut CoherenceState, t: f64) -> Result<FieldState> {
        let mut work = Work::new(state.data.len());
        let f = self.rk4(&mut state.data, t, &mut work, |y, s| self.sweep_data(y, s));
        self.check(state, t + self.grid.dt)?;
        Ok(f)
    }

    /// EIT-width ratio that justifies dropping harmonics beyond `n_max`;
    /// `None` when only one control is ever on (truncation is then exact).
    pub fn truncation_ratio(&self) -> Option<f64> {
        let (p, m) = (self.drive.omega_c_plus.peak(), self.drive.omega_c_minus.peak());
        if p == 0.0 || m == 0.0 || self.medium.od == 0.0 {
            return None;
        }
        let width = crate::scenarios::eit_window_width(self.medium.od, (p * p + m * m).sqrt(), &self.scheme);
        let shift = self.drive.zeta().abs().max(2.0 * self.medium.k_thermal);
        Some(shift * (self.grid.n_max + 1) as f64 / width)
    }

    /// Integrates from t = 0 to `grid.t_end`, starting with all population
    /// in |1> and no coherence.
    pub fn run(&self) -> Result<TimeSeriesRecord> {
        let mut warnings = Vec::new();
        if let Some(r) = self.truncation_ratio() {
            if r < TRUNCATION_WARN_RATIO {
                warnings.push(format!(
                    "truncation at n_max = {} is marginal: detuning / EIT width ratio {:.2} < {}",
                    self.grid.n_max, r, TRUNCATION_WARN_RATIO
                ));
            }
        }
        let weak = self.drive.weak_probe_ratio();
        if weak > WEAK_PROBE_WARN_RATIO {
            warnings.push(format!(
                "probe/control ratio {weak:.3} exceeds {WEAK_PROBE_WARN_RATIO}; linear response assumed"
            ));
        }
        for w in &warnings {
            log::warn!("{w}");
        }

        let steps = self.grid.steps();
        let mut record = TimeSeriesRecord::new(self.grid.dt * self.grid.record_stride as f64, warnings);
        record.truncation_ratio = self.truncation_ratio();
        let mut state = self.zero_state();
        let mut work = Work::new(state.data.len());
        let vacuum = self.medium.od == 0.0;
        for k in 0..=steps {
            let t = k as f64 * self.grid.dt;
            let fields = if vacuum || k == steps {
                self.sweep_data(&state.data, t)
            } else {
                let f = self.rk4(&mut state.data, t, &mut work, |y, s| self.sweep_data(y, s));
                if k % 16 == 15 {
                    self.check(&state, t + self.grid.dt)?;
                }
                f
            };
            if k % self.grid.record_stride == 0 {
                record.push(
                    t,
                    self.drive.omega_p_input.value(t).powi(2),
                    &fields,
                    self.drive.omega_c_plus.value(t),
                    self.drive.omega_c_minus.value(t),
                );
            }
            if self.grid.snapshot_stride > 0 && k % self.grid.snapshot_stride == 0 {
                record.snapshots.push(fields);
            }
        }
        self.check(&state, self.grid.t_end)?;
        Ok(record)
    }
}

#[cfg(feature = "parallel")]
const PARALLEL_THRESHOLD: usize = 1 << 15;

struct Work {
    k1: Vec<Complex64>,
    k2: Vec<Complex64>,
    k3: Vec<Complex64>,
    k4: Vec<Complex64>,
    tmp: Vec<Complex64>,
}

impl Work {
    fn new(n: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); n];
        Work {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }
}

fn axpy(out: &mut [Complex64], y: &[Complex64], a: f64, k: &[Complex64]) {
    for ((o, yi), ki) in out.iter_mut().zip(y).zip(k) {
        *o = yi + a * ki;
    }
}

fn control_intensity(drive: &DriveConfig, t: f64) -> f64 {
    drive.omega_c_plus.value(t).powi(2) + drive.omega_c_minus.value(t).powi(2)
}

/// F'=3 light shift without the elimination check (done once up front).
fn light_shift(scheme: &LevelScheme, omega_c: f64, delta_c: f64) -> f64 {
    if omega_c == 0.0 || scheme.s_tilde_26 == 0.0 {
        return 0.0;
    }
    let c = scheme.s_tilde_26 * omega_c;
    -c * c / (4.0 * (scheme.delta_36 - delta_c))
}

/// Runs the full time-domain simulation.
pub fn propagate(
    drive: &DriveConfig,
    medium: &MediumConfig,
    scheme: &LevelScheme,
    grid: &SimulationGrid,
) -> Result<TimeSeriesRecord> {
    Propagator::new(drive, medium, scheme, grid)?.run()
}
