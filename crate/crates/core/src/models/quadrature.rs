//! Adaptive Gauss–Legendre quadrature for smooth complex integrands.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::state::C64;

/// Nodes and weights of the `n`-point rule on `[−1, 1]` (Newton iteration on
/// `P_n` from the usual cosine initial guesses).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Integrates with a fixed rule and recursive bisection until a panel and
/// its two halves agree to `tol·max(1, |I|)`.
#[derive(Debug, Clone)]
pub struct Integrator {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    tol: f64,
    max_depth: usize,
}

impl Integrator {
    pub fn new(order: usize, tol: f64) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self {
            nodes,
            weights,
            tol,
            max_depth: 40,
        }
    }

    fn panel<F: Fn(f64) -> C64>(&self, f: &F, a: f64, b: f64) -> C64 {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let s: C64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| f(c + h * x) * *w)
            .sum();
        s * h
    }

    pub fn integrate<F: Fn(f64) -> C64>(&self, f: &F, a: f64, b: f64) -> Result<C64> {
        if a == b {
            return Ok(C64::new(0.0, 0.0));
        }
        let whole = self.panel(f, a, b);
        self.refine(f, a, b, whole, 0)
    }

    fn refine<F: Fn(f64) -> C64>(&self, f: &F, a: f64, b: f64, whole: C64, depth: usize) -> Result<C64> {
        let m = 0.5 * (a + b);
        let left = self.panel(f, a, m);
        let right = self.panel(f, m, b);
        let halves = left + right;
        let diff = (halves - whole).norm();
        if diff <= self.tol * halves.norm().max(1.0) {
            return Ok(halves);
        }
        if depth >= self.max_depth {
            return Err(Error::QuadratureNotConverged(diff));
        }
        Ok(self.refine(f, a, m, left, depth + 1)? + self.refine(f, m, b, right, depth + 1)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫ x^14 = 2/15
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory_integral() {
        let q = Integrator::new(16, 1e-13);
        let v = q.integrate(&|t: f64| C64::from_polar(1.0, 3.0 * t), 0.0, 50.0).unwrap();
        let want = (C64::from_polar(1.0, 150.0) - 1.0) / C64::new(0.0, 3.0);
        assert!((v - want).norm() < 1e-12);
    }
}
