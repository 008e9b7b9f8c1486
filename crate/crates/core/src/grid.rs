//! Equidistant Fourier grids and the kinetic-energy operator applied in
//! momentum space.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::state::C64;

/// Periodic grid on `[r_min, r_max)` with `n_points` (a power of two) points.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierGrid {
    n_points: usize,
    r_min: f64,
    r_max: f64,
    dr: f64,
    r: Vec<f64>,
    k: Vec<f64>,
}

impl FourierGrid {
    pub fn new(n_points: usize, r_min: f64, r_max: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points} is not a power of two"
            )));
        }
        if !(r_max > r_min) || !r_min.is_finite() || !r_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need r_max > r_min, got [{r_min}, {r_max}]"
            )));
        }
        let dr = (r_max - r_min) / n_points as f64;
        let r = (0..n_points).map(|i| r_min + i as f64 * dr).collect();
        let dk = 2.0 * PI / (n_points as f64 * dr);
        let k = (0..n_points)
            .map(|j| {
                if j < n_points / 2 {
                    j as f64 * dk
                } else {
                    (j as f64 - n_points as f64) * dk
                }
            })
            .collect();
        Ok(Self {
            n_points,
            r_min,
            r_max,
            dr,
            r,
            k,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn positions(&self) -> &[f64] {
        &self.r
    }

    /// Momenta in FFT order: non-negative frequencies first.
    pub fn momenta(&self) -> &[f64] {
        &self.k
    }

    pub fn k_max(&self) -> f64 {
        PI / self.dr
    }

    /// Largest kinetic energy representable on the grid.
    pub fn kinetic_cutoff(&self, mass: f64) -> f64 {
        self.k_max().powi(2) / (2.0 * mass)
    }
}

/// Kinetic energy `p²/2m` applied by forward FFT, multiplication and
/// inverse FFT.
#[derive(Clone)]
pub struct Kinetic {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // k²/2m with the 1/N of the inverse transform folded in
    scaled_energies: Vec<f64>,
    energies: Vec<f64>,
    scratch_len: usize,
}

impl fmt::Debug for Kinetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kinetic").field("n", &self.energies.len()).finish()
    }
}

impl Kinetic {
    pub fn new(grid: &FourierGrid, mass: f64) -> Self {
        let n = grid.n_points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let energies: Vec<f64> = grid.momenta().iter().map(|k| k * k / (2.0 * mass)).collect();
        let scaled_energies = energies.iter().map(|e| e / n as f64).collect();
        let scratch_len = forward.get_inplace_scratch_len().max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scaled_energies,
            energies,
            scratch_len,
        }
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Kinetic energies in FFT order.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `out = T psi`
    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        out.copy_from_slice(psi);
        self.apply_in_place(out);
    }

    pub fn apply_in_place(&self, buf: &mut [C64]) {
        self.map_momentum(buf, |e, z| z * e);
    }

    /// Multiplies by `exp(-i T dt)`.
    pub fn propagate_in_place(&self, buf: &mut [C64], dt: f64) {
        let n = self.len() as f64;
        self.map_momentum_raw(buf, |e, z| z * C64::from_polar(1.0 / n, -e * dt));
    }

    fn map_momentum(&self, buf: &mut [C64], f: impl Fn(f64, C64) -> C64) {
        let mut scratch = vec![C64::new(0.0, 0.0); self.scratch_len];
        self.forward.process_with_scratch(buf, &mut scratch);
        for (z, &e) in buf.iter_mut().zip(&self.scaled_energies) {
            *z = f(e, *z);
        }
        self.inverse.process_with_scratch(buf, &mut scratch);
    }

    // like map_momentum but hands `f` the unscaled energy; `f` must apply 1/N
    fn map_momentum_raw(&self, buf: &mut [C64], f: impl Fn(f64, C64) -> C64) {
        let mut scratch = vec![C64::new(0.0, 0.0); self.scratch_len];
        self.forward.process_with_scratch(buf, &mut scratch);
        for (z, &e) in buf.iter_mut().zip(&self.energies) {
            *z = f(e, *z);
        }
        self.inverse.process_with_scratch(buf, &mut scratch);
    }

    /// Unitary forward transform to momentum space.
    pub fn to_momentum(&self, psi: &[C64]) -> Vec<C64> {
        let mut buf = psi.to_vec();
        let mut scratch = vec![C64::new(0.0, 0.0); self.scratch_len];
        self.forward.process_with_scratch(&mut buf, &mut scratch);
        let s = 1.0 / (buf.len() as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }

    /// Inverse of [`Kinetic::to_momentum`].
    pub fn from_momentum(&self, phi: &[C64]) -> Vec<C64> {
        let mut buf = phi.to_vec();
        let mut scratch = vec![C64::new(0.0, 0.0); self.scratch_len];
        self.inverse.process_with_scratch(&mut buf, &mut scratch);
        let s = 1.0 / (buf.len() as f64).sqrt();
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }
}
