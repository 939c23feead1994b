//! Effective 1D parameters (beta, gamma_inh) that make the homogeneous
//! spectrum reproduce the inhomogeneous fiber spectrum.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::atomic::LevelScheme;
use crate::drive::DriveConfig;
use crate::error::{Error, Result};
use crate::medium::MediumConfig;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::spectra::{find_peak, transmission_homogeneous, transmission_inhomogeneous, DetuningGrid, QuadratureSpec};

/// Largest accepted uniform spectral mismatch.
pub const MATCH_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub beta: f64,
    pub gamma_inh: f64,
    /// Max |T_hom - T_inh| over the detuning grid.
    pub residual: f64,
}

impl EffectiveParams {
    pub fn identity() -> Self {
        EffectiveParams {
            beta: 1.0,
            gamma_inh: 0.0,
            residual: 0.0,
        }
    }

    /// Homogeneous 1D medium and drive carrying these parameters.
    pub fn apply(&self, medium: &MediumConfig, drive: &DriveConfig) -> (MediumConfig, DriveConfig) {
        let m = MediumConfig {
            gamma_inh: self.gamma_inh,
            ..*medium
        };
        (m, drive.with_control_scale(self.beta))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationOptions {
    #[serde(default = "default_start")]
    pub start: [f64; 2],
    #[serde(default = "default_max_evals")]
    pub max_evals: usize,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    /// Rounds of local grid refinement after the simplex search.
    #[serde(default = "default_refine_rounds")]
    pub refine_rounds: usize,
}

fn default_start() -> [f64; 2] {
    [0.8, 0.01]
}
fn default_max_evals() -> usize {
    300
}
fn default_refine_rounds() -> usize {
    4
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            start: default_start(),
            max_evals: default_max_evals(),
            quadrature: QuadratureSpec::default(),
            refine_rounds: default_refine_rounds(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CalibrationOutcome {
    pub params: EffectiveParams,
    /// Best residual after each accepted search step.
    pub history: Vec<f64>,
    /// Target spectrum the search matched.
    pub target: Vec<(f64, f64)>,
}

/// Detuning grid spanning +-3 Gamma around the inhomogeneous EIT peak.
pub fn default_grid(medium: &MediumConfig, drive: &DriveConfig, scheme: &LevelScheme) -> Result<DetuningGrid> {
    let quad = QuadratureSpec::default();
    let stark = scheme.stark_shift_single(drive.cw_control(), drive.delta_c_plus)?;
    let guess = drive.delta_c_plus + stark;
    let (center, _) = find_peak(
        |dp| Ok(transmission_inhomogeneous(dp, medium, drive, scheme, &quad)?.transmission),
        guess - 4.0,
        guess + 4.0,
    )?;
    Ok(DetuningGrid {
        center,
        half_span: 3.0,
        points: 61,
    })
}

/// Calibrates against the inhomogeneous spectrum of `medium`/`drive`.
pub fn calibrate(
    medium: &MediumConfig,
    drive: &DriveConfig,
    scheme: &LevelScheme,
    grid: &DetuningGrid,
) -> Result<EffectiveParams> {
    calibrate_with(medium, drive, scheme, grid, &CalibrationOptions::default()).map(|o| o.params)
}

pub fn calibrate_with(
    medium: &MediumConfig,
    drive: &DriveConfig,
    scheme: &LevelScheme,
    grid: &DetuningGrid,
    opts: &CalibrationOptions,
) -> Result<CalibrationOutcome> {
    medium.validate()?;
    let target = grid
        .values()
        .into_iter()
        .map(|dp| {
            Ok((
                dp,
                transmission_inhomogeneous(dp, medium, drive, scheme, &opts.quadrature)?.transmission,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    calibrate_to_target(&target, medium, drive, scheme, opts)
}

/// Uniform mismatch between the homogeneous model with (beta, gamma_inh) and
/// a target spectrum.
pub fn mismatch(
    target: &[(f64, f64)],
    beta: f64,
    gamma_inh: f64,
    medium: &MediumConfig,
    drive: &DriveConfig,
    scheme: &LevelScheme,
) -> Result<f64> {
    let params = EffectiveParams {
        beta,
        gamma_inh,
        residual: 0.0,
    };
    let (m, d) = params.apply(medium, drive);
    let mut worst: f64 = 0.0;
    for &(dp, t) in target {
        worst = worst.max((transmission_homogeneous(dp, &m, &d, scheme)? - t).abs());
    }
    Ok(worst)
}

/// Fits (beta, gamma_inh) of the homogeneous model to an arbitrary target
/// spectrum.
pub fn calibrate_to_target(
    target: &[(f64, f64)],
    medium: &MediumConfig,
    drive: &DriveConfig,
    scheme: &LevelScheme,
    opts: &CalibrationOptions,
) -> Result<CalibrationOutcome> {
    // search in (beta, gamma_inh / GAMMA_SCALE) so both axes are O(1)
    const GAMMA_SCALE: f64 = 0.01;
    let clamp = |x: &mut [f64]| {
        x[0] = x[0].clamp(1e-3, 1.0);
        x[1] = x[1].max(0.0);
    };
    let mut failure = None;
    let mut objective = |x: &[f64]| match mismatch(target, x[0], x[1] * GAMMA_SCALE, medium, drive, scheme) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::INFINITY
        }
    };
    let start = [opts.start[0], opts.start[1] / GAMMA_SCALE];
    let nm = nelder_mead(
        &mut objective,
        &start,
        &[0.1, 0.5],
        clamp,
        &NelderMeadOptions {
            max_evals: opts.max_evals,
            f_tol: 1e-7,
            x_tol: 1e-5,
        },
    );
    let mut history = nm.history;
    let mut best = (nm.x, nm.f);

    // local grid refinement around the simplex optimum
    let mut step = [0.02, 0.2];
    for _ in 0..opts.refine_rounds {
        let centre = best.0.clone();
        for i in -2i32..=2 {
            for j in -2i32..=2 {
                if i == 0 && j == 0 {
                    continue;
                }
                let mut p = vec![centre[0] + step[0] * i as f64, centre[1] + step[1] * j as f64];
                clamp(&mut p);
                let v = objective(&p);
                if v < best.1 {
                    best = (p, v);
                }
            }
        }
        history.push(best.1);
        step = [step[0] * 0.3, step[1] * 0.3];
    }
    if let Some(e) = failure {
        return Err(e);
    }

    let params = EffectiveParams {
        beta: best.0[0],
        gamma_inh: best.0[1] * GAMMA_SCALE,
        residual: best.1,
    };
    if params.residual >= MATCH_TOLERANCE {
        return Err(Error::CalibrationNonConvergence {
            beta: params.beta,
            gamma_inh: params.gamma_inh,
            residual: params.residual,
            tolerance: MATCH_TOLERANCE,
        });
    }
    Ok(CalibrationOutcome {
        params,
        history,
        target: target.to_vec(),
    })
}

/// Memoizes calibrations by their full input tuple.
#[derive(Debug, Default)]
pub struct CalibrationCache {
    entries: Mutex<HashMap<String, EffectiveParams>>,
}

impl CalibrationCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_calibrate(
        &self,
        medium: &MediumConfig,
        drive: &DriveConfig,
        scheme: &LevelScheme,
        grid: &DetuningGrid,
    ) -> Result<EffectiveParams> {
        let key = serde_json::to_string(&(medium, drive, scheme, grid))?;
        if let Some(p) = self.entries.lock().expect("cache lock").get(&key) {
            return Ok(*p);
        }
        let p = calibrate(medium, drive, scheme, grid)?;
        self.entries.lock().expect("cache lock").insert(key, p);
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Calibration table rows: `theta_K, omega_c_over_gamma, beta, gamma_inh_over_gamma, residual`.
pub fn calibration_table_csv(rows: &[(f64, f64, EffectiveParams)]) -> String {
    let data: Vec<[f64; 5]> = rows
        .iter()
        .map(|(theta, w, p)| [*theta, *w, p.beta, p.gamma_inh, p.residual])
        .collect();
    crate::io::csv(
        &[
            "theta_K",
            "omega_c_over_gamma",
            "beta",
            "gamma_inh_over_gamma",
            "residual",
        ],
        data.iter().map(|r| r.as_slice()),
    )
}
