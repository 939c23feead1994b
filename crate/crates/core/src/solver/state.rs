use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Offsets of the Fourier components inside one (z, velocity) block.
///
/// rho21 harmonics m = -N..N (spatial e^{2imkz}); rho31 and rho51 split into
/// `plus[n]` (e^{+i(2n+1)kz}) and `minus[n]` (e^{-i(2n+1)kz}), n = 0..N;
/// rho41 has only the first harmonic in each direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n_max: usize,
}

impl Layout {
    pub fn block_len(&self) -> usize {
        6 * self.n_max + 7
    }
    pub fn rho21(&self, m: isize) -> usize {
        (m + self.n_max as isize) as usize
    }
    pub fn rho31_plus(&self, n: usize) -> usize {
        2 * self.n_max + 1 + n
    }
    pub fn rho31_minus(&self, n: usize) -> usize {
        3 * self.n_max + 2 + n
    }
    pub fn rho51_plus(&self, n: usize) -> usize {
        4 * self.n_max + 3 + n
    }
    pub fn rho51_minus(&self, n: usize) -> usize {
        5 * self.n_max + 4 + n
    }
    pub fn rho41_plus(&self) -> usize {
        6 * self.n_max + 5
    }
    pub fn rho41_minus(&self) -> usize {
        6 * self.n_max + 6
    }
}

/// All coherences on the (z, velocity class) grid, stored block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceState {
    pub layout: Layout,
    pub nz: usize,
    pub classes: usize,
    pub data: Vec<Complex64>,
}

impl CoherenceState {
    pub fn zeros(n_max: usize, nz: usize, classes: usize) -> Self {
        let layout = Layout { n_max };
        CoherenceState {
            layout,
            nz,
            classes,
            data: vec![Complex64::new(0.0, 0.0); nz * classes * layout.block_len()],
        }
    }

    pub fn block(&self, iz: usize, iv: usize) -> &[Complex64] {
        let b = self.layout.block_len();
        let start = (iz * self.classes + iv) * b;
        &self.data[start..start + b]
    }

    pub fn block_mut(&mut self, iz: usize, iv: usize) -> &mut [Complex64] {
        let b = self.layout.block_len();
        let start = (iz * self.classes + iv) * b;
        &mut self.data[start..start + b]
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Forward and backward probe envelopes on the spatial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldState {
    pub time: f64,
    pub omega_p_plus: Vec<Complex64>,
    pub omega_p_minus: Vec<Complex64>,
}

impl FieldState {
    pub fn zeros(nz: usize) -> Self {
        FieldState {
            time: 0.0,
            omega_p_plus: vec![Complex64::new(0.0, 0.0); nz],
            omega_p_minus: vec![Complex64::new(0.0, 0.0); nz],
        }
    }

    /// |Omega_p^+(L)|^2
    pub fn forward_output(&self) -> f64 {
        self.omega_p_plus.last().map_or(0.0, |c| c.norm_sqr())
    }

    /// |Omega_p^-(0)|^2
    pub fn backward_output(&self) -> f64 {
        self.omega_p_minus.first().map_or(0.0, |c| c.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_covers_block_exactly_once() {
        for n_max in 0..5 {
            let l = Layout { n_max };
            let mut idx: Vec<usize> = (-(n_max as isize)..=n_max as isize).map(|m| l.rho21(m)).collect();
            for n in 0..=n_max {
                idx.extend([l.rho31_plus(n), l.rho31_minus(n), l.rho51_plus(n), l.rho51_minus(n)]);
            }
            idx.extend([l.rho41_plus(), l.rho41_minus()]);
            idx.sort();
            assert_eq!(idx, (0..l.block_len()).collect::<Vec<_>>());
        }
    }
}
