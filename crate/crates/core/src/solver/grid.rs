use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::medium::MediumConfig;
use crate::quadrature::maxwell_boltzmann_classes;

/// Where the ground-state phase mismatch is booked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseGauge {
    /// Forward field re-gauged so only the backward field carries the
    /// mismatch, with twice the per-field phase.
    #[default]
    BackwardOnly,
    /// Mismatch phase applied to both fields.
    Raw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationGrid {
    /// Spatial points on [0, L], both ends included.
    pub nz: usize,
    pub dt: f64,
    pub t_end: f64,
    /// Fourier truncation order.
    pub n_max: usize,
    /// Gauss-Hermite classes used for a thermal medium.
    pub velocity_nodes: usize,
    /// Below this Doppler scale (k v_th / Gamma) a single v = 0 class is used.
    pub cold_limit: f64,
    pub gauge: PhaseGauge,
    /// Record the boundary intensities every this many steps.
    pub record_stride: usize,
    /// Keep z-resolved field snapshots every this many steps; 0 disables them.
    pub snapshot_stride: usize,
}

impl Default for SimulationGrid {
    fn default() -> Self {
        SimulationGrid {
            nz: 201,
            dt: 0.002,
            t_end: 100.0,
            n_max: 3,
            velocity_nodes: 11,
            cold_limit: 0.05,
            gauge: PhaseGauge::BackwardOnly,
            record_stride: 1,
            snapshot_stride: 0,
        }
    }
}

impl SimulationGrid {
    pub fn validate(&self) -> Result<()> {
        if self.nz < 32 {
            return Err(Error::invalid("grid.nz", "need at least 32 spatial points"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid("grid.dt", "must be positive and finite"));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::invalid("grid.t_end", "must be positive and finite"));
        }
        if self.velocity_nodes == 0 {
            return Err(Error::invalid("grid.velocity_nodes", "must be >= 1"));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("grid.record_stride", "must be >= 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).ceil() as usize
    }

    pub fn dz(&self) -> f64 {
        1.0 / (self.nz - 1) as f64
    }

    pub fn z(&self) -> Vec<f64> {
        (0..self.nz).map(|i| i as f64 * self.dz()).collect()
    }

    /// (k v / Gamma, weight) pairs for the medium's thermal distribution.
    pub fn velocity_classes(&self, medium: &MediumConfig) -> Vec<(f64, f64)> {
        if medium.k_thermal < self.cold_limit || self.velocity_nodes == 1 {
            vec![(0.0, 1.0)]
        } else {
            maxwell_boltzmann_classes(self.velocity_nodes, medium.k_thermal)
        }
    }
}
