//! Complex state vectors and the small amount of linear algebra the
//! propagators need on them.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Layout of a state vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Repr {
    /// `n` discrete levels.
    Levels(usize),
    /// A single surface on a Fourier grid of `n` points.
    Grid(usize),
    /// Two surfaces on a Fourier grid of `n` points, ground block first.
    TwoSurface(usize),
}

impl Repr {
    pub fn len(&self) -> usize {
        match *self {
            Repr::Levels(n) | Repr::Grid(n) => n,
            Repr::TwoSurface(n) => 2 * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Amplitudes of a wave function in a given representation.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
    repr: Repr,
}

impl StateVector {
    pub fn new(amps: Vec<C64>, repr: Repr) -> Result<Self> {
        if amps.len() != repr.len() {
            return Err(Error::Length {
                left: amps.len(),
                right: repr.len(),
            });
        }
        Ok(Self { amps, repr })
    }

    pub fn zeros(repr: Repr) -> Self {
        Self {
            amps: vec![C64::new(0.0, 0.0); repr.len()],
            repr,
        }
    }

    /// Basis vector `index` of the representation.
    pub fn basis(repr: Repr, index: usize) -> Result<Self> {
        if index >= repr.len() {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {repr:?}"
            )));
        }
        let mut psi = Self::zeros(repr);
        psi.amps[index] = C64::new(1.0, 0.0);
        Ok(psi)
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_same(other)?;
        Ok(inner(&self.amps, &other.amps))
    }

    /// `alpha * phi + self`, returned as a new vector.
    pub fn axpy(&self, alpha: C64, phi: &StateVector) -> Result<StateVector> {
        self.check_same(phi)?;
        let mut out = self.clone();
        axpy(alpha, &phi.amps, &mut out.amps);
        Ok(out)
    }

    pub fn scale(&mut self, alpha: C64) {
        for a in &mut self.amps {
            *a *= alpha;
        }
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_same(other)?;
        Ok(distance(&self.amps, &other.amps))
    }

    pub fn check_repr(&self, repr: Repr) -> Result<()> {
        if self.repr != repr {
            return Err(Error::Dimension {
                expected: repr,
                found: self.repr,
            });
        }
        Ok(())
    }

    fn check_same(&self, other: &StateVector) -> Result<()> {
        self.check_repr(other.repr)
    }
}

// Slice kernels used by the propagators' inner loops.

pub fn norm_sqr(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// `y += alpha * x`
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// `y += alpha * x` for a real scale factor.
pub fn axpy_real(alpha: f64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * alpha;
    }
}

pub fn distance(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}

/// Values that can be combined linearly: Chebyshev coefficients may be
/// scalars or whole state vectors.
pub trait Linear: Clone {
    fn zero_like(&self) -> Self;
    fn add_scaled(&mut self, alpha: f64, other: &Self);
    fn scale_by(&mut self, alpha: f64);
    fn magnitude(&self) -> f64;
}

impl Linear for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, alpha: f64, other: &Self) {
        *self += alpha * other;
    }
    fn scale_by(&mut self, alpha: f64) {
        *self *= alpha;
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Linear for C64 {
    fn zero_like(&self) -> Self {
        C64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, alpha: f64, other: &Self) {
        *self += other * alpha;
    }
    fn scale_by(&mut self, alpha: f64) {
        *self *= alpha;
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Linear for Vec<C64> {
    fn zero_like(&self) -> Self {
        vec![C64::new(0.0, 0.0); self.len()]
    }
    fn add_scaled(&mut self, alpha: f64, other: &Self) {
        axpy_real(alpha, other, self);
    }
    fn scale_by(&mut self, alpha: f64) {
        for z in self.iter_mut() {
            *z *= alpha;
        }
    }
    fn magnitude(&self) -> f64 {
        norm(self)
    }
}

impl Linear for StateVector {
    fn zero_like(&self) -> Self {
        StateVector::zeros(self.repr)
    }
    fn add_scaled(&mut self, alpha: f64, other: &Self) {
        axpy_real(alpha, &other.amps, &mut self.amps);
    }
    fn scale_by(&mut self, alpha: f64) {
        self.scale(C64::new(alpha, 0.0));
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}
