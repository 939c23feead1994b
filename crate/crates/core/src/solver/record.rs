use serde::{Deserialize, Serialize};

use super::state::FieldState;
use crate::io::csv;

/// Boundary intensities sampled every `sample_dt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub sample_dt: f64,
    pub times: Vec<f64>,
    /// |Omega_p^+(0, t)|^2
    pub input: Vec<f64>,
    /// |Omega_p^+(L, t)|^2
    pub forward: Vec<f64>,
    /// |Omega_p^-(0, t)|^2
    pub backward: Vec<f64>,
    pub control_plus: Vec<f64>,
    pub control_minus: Vec<f64>,
    #[serde(skip)]
    pub snapshots: Vec<FieldState>,
    pub truncation_ratio: Option<f64>,
    pub warnings: Vec<String>,
}

impl TimeSeriesRecord {
    pub(crate) fn new(sample_dt: f64, warnings: Vec<String>) -> Self {
        TimeSeriesRecord {
            sample_dt,
            times: Vec::new(),
            input: Vec::new(),
            forward: Vec::new(),
            backward: Vec::new(),
            control_plus: Vec::new(),
            control_minus: Vec::new(),
            snapshots: Vec::new(),
            truncation_ratio: None,
            warnings,
        }
    }

    pub(crate) fn push(&mut self, t: f64, input: f64, fields: &FieldState, cp: f64, cm: f64) {
        self.times.push(t);
        self.input.push(input);
        self.forward.push(fields.forward_output());
        self.backward.push(fields.backward_output());
        self.control_plus.push(cp);
        self.control_minus.push(cm);
    }

    /// Sample-sum of `series` over samples with `t0 <= t < t1`.
    pub fn energy_between(&self, series: &[f64], t0: f64, t1: f64) -> f64 {
        self.times
            .iter()
            .zip(series)
            .filter(|(t, _)| **t >= t0 && **t < t1)
            .map(|(_, v)| v)
            .sum::<f64>()
            * self.sample_dt
    }

    pub fn input_energy(&self) -> f64 {
        self.input.iter().sum::<f64>() * self.sample_dt
    }

    pub fn forward_energy(&self) -> f64 {
        self.forward.iter().sum::<f64>() * self.sample_dt
    }

    pub fn backward_energy(&self) -> f64 {
        self.backward.iter().sum::<f64>() * self.sample_dt
    }

    /// Intensity-weighted mean time of `series`.
    pub fn centroid(&self, series: &[f64]) -> f64 {
        let (num, den) = self
            .times
            .iter()
            .zip(series)
            .fold((0.0, 0.0), |(n, d), (t, v)| (n + t * v, d + v));
        if den > 0.0 {
            num / den
        } else {
            f64::NAN
        }
    }

    /// Time trace with probe intensities normalized to the input peak.
    pub fn to_csv(&self) -> String {
        let peak = self.input.iter().cloned().fold(0.0, f64::max);
        let norm = if peak > 0.0 { 1.0 / peak } else { 1.0 };
        let rows: Vec<Vec<f64>> = (0..self.times.len())
            .map(|i| {
                vec![
                    self.times[i],
                    self.forward[i] * norm,
                    self.backward[i] * norm,
                    self.control_plus[i],
                    self.control_minus[i],
                ]
            })
            .collect();
        csv(
            &[
                "t_over_gamma_inv",
                "probe_out_forward",
                "probe_out_backward",
                "omega_c_plus",
                "omega_c_minus",
            ],
            rows.iter().map(|r| r.as_slice()),
        )
    }
}

/// z-resolved probe fields of one snapshot.
pub fn snapshot_csv(fields: &FieldState) -> String {
    let n = fields.omega_p_plus.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let (p, m) = (fields.omega_p_plus[i], fields.omega_p_minus[i]);
            vec![i as f64 / (n - 1) as f64, p.re, p.im, m.re, m.im]
        })
        .collect();
    csv(
        &[
            "z_over_L",
            "re_omega_p_plus",
            "im_omega_p_plus",
            "re_omega_p_minus",
            "im_omega_p_minus",
        ],
        rows.iter().map(|r| r.as_slice()),
    )
}
