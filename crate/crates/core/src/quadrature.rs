//! Gauss-Legendre and Gauss-Hermite rules.

use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Gauss-Legendre rule with `n` nodes mapped onto `[a, b]`.
pub fn gauss_legendre(n: usize, a: f64, b: f64) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[n - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[n - 1 - i] = half * w;
    }
    Rule { nodes, weights }
}

/// P_n(x) and its derivative.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss-Hermite rule for the weight exp(-x^2), ascending nodes.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z: f64 = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..200 {
            // orthonormal Hermite recurrence
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / (pp * pp);
    }
    // nodes[0..m] hold the non-negative roots in descending order
    let mut out_nodes = vec![0.0; n];
    let mut out_weights = vec![0.0; n];
    for i in 0..m {
        out_nodes[i] = -nodes[i];
        out_weights[i] = weights[i];
        out_nodes[n - 1 - i] = nodes[i];
        out_weights[n - 1 - i] = weights[i];
    }
    Rule {
        nodes: out_nodes,
        weights: out_weights,
    }
}

/// Velocity classes for a 1D Maxwell-Boltzmann distribution with standard
/// deviation `sigma`: returns (velocity, probability) pairs whose weights sum
/// to one.
pub fn maxwell_boltzmann_classes(n: usize, sigma: f64) -> Vec<(f64, f64)> {
    if n == 1 || sigma == 0.0 {
        return vec![(0.0, 1.0)];
    }
    let rule = gauss_hermite(n);
    let norm: f64 = rule.weights.iter().sum();
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&x, &w)| (std::f64::consts::SQRT_2 * sigma * x, w / norm))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(6, 0.0, 2.0);
        // degree 11 polynomial
        let exact = 2f64.powi(12) / 12.0;
        assert!((rule.integrate(|x| x.powi(11)) - exact).abs() < 1e-10 * exact);
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn legendre_gaussian_tail() {
        let rule = gauss_legendre(48, 0.0, 4.0);
        let val = rule.integrate(|r| (-r * r).exp() * r);
        assert!((val - 0.5 * (1.0 - (-16.0f64).exp())).abs() < 1e-13);
    }

    #[test]
    fn hermite_moments() {
        for n in [1, 2, 5, 11, 16, 40] {
            let rule = gauss_hermite(n);
            let m0: f64 = rule.weights.iter().sum();
            assert!((m0 - PI.sqrt()).abs() < 1e-12, "n={n} m0={m0}");
            if n >= 2 {
                let m2 = rule.integrate(|x| x * x);
                assert!((m2 - PI.sqrt() / 2.0).abs() < 1e-12, "n={n}");
            }
            assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn mb_classes_normalized() {
        let classes = maxwell_boltzmann_classes(11, 0.3);
        let w: f64 = classes.iter().map(|c| c.1).sum();
        assert!((w - 1.0).abs() < 1e-12);
        let var: f64 = classes.iter().map(|c| c.0 * c.0 * c.1).sum();
        assert!((var - 0.09).abs() < 1e-12);
    }
}
