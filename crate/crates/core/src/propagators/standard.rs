use std::collections::hash_map::Entry;
use std::collections::HashMap;

use crate::cheby::{apply_operator_series, exp_series, ChebyshevSeries, FrozenOperator};
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianModel, SpectralBounds};
use crate::propagators::{StepDiagnostics, Stepper};
use crate::state::{StateVector, C64};

/// Exponential series keyed by `(τ, bounds)` bit patterns.
#[derive(Debug, Default)]
pub(crate) struct ExpCache {
    map: HashMap<(u64, u64, u64), ChebyshevSeries<C64>>,
}

impl ExpCache {
    pub(crate) fn get(
        &mut self,
        tau: f64,
        bounds: SpectralBounds,
        eps: f64,
        n_max: usize,
    ) -> Result<&ChebyshevSeries<C64>> {
        let key = (tau.to_bits(), bounds.e_min.to_bits(), bounds.e_max.to_bits());
        if self.map.len() >= 1024 && !self.map.contains_key(&key) {
            self.map.clear();
        }
        match self.map.entry(key) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(exp_series(bounds, tau, eps, n_max)?)),
        }
    }
}

/// `e^{−i H_n Δτ} ψ` with `H_n` frozen at the midpoint of `[t_n, t_n + Δτ]`.
/// Time ordering is ignored.
pub fn standard_cheb_step(
    model: &HamiltonianModel,
    psi: &StateVector,
    t_n: f64,
    dtau: f64,
    eps: f64,
    n_cheby_cap: usize,
) -> Result<StateVector> {
    let series = exp_series(model.bounds(), check_dt(dtau)?, eps, n_cheby_cap)?;
    let op = FrozenOperator::new(model, model.field_at(t_n + 0.5 * dtau));
    apply_operator_series(&series, &op, psi)
}

fn check_dt(dt: f64) -> Result<f64> {
    if dt > 0.0 && dt.is_finite() {
        Ok(dt)
    } else {
        Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")))
    }
}

/// Where a step without time ordering samples the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreezePoint {
    /// `t_n`: first order in `Δt`. This is the plain baseline whose errors
    /// shrink linearly with the step.
    #[default]
    Start,
    /// `t_n + Δt/2`: second order.
    Midpoint,
}

impl FreezePoint {
    pub fn fraction(self) -> f64 {
        match self {
            FreezePoint::Start => 0.0,
            FreezePoint::Midpoint => 0.5,
        }
    }
}

/// Exponential steps with the Hamiltonian frozen once per step and the
/// series cached across steps.
#[derive(Debug)]
pub struct StandardStepper {
    eps: f64,
    n_cheby_cap: usize,
    freeze: FreezePoint,
    cache: ExpCache,
}

impl StandardStepper {
    /// Freezes at the start of each step; see [`StandardStepper::with_freeze`].
    pub fn new(eps: f64, n_cheby_cap: usize) -> Self {
        Self {
            eps,
            n_cheby_cap,
            freeze: FreezePoint::Start,
            cache: ExpCache::default(),
        }
    }

    pub fn with_freeze(mut self, freeze: FreezePoint) -> Self {
        self.freeze = freeze;
        self
    }

    pub fn freeze(&self) -> FreezePoint {
        self.freeze
    }
}

impl Stepper for StandardStepper {
    fn name(&self) -> &'static str {
        "cheb"
    }

    fn step(
        &mut self,
        model: &HamiltonianModel,
        psi: &StateVector,
        t: f64,
        dt: f64,
    ) -> Result<(StateVector, StepDiagnostics)> {
        let series = self
            .cache
            .get(check_dt(dt)?, model.bounds(), self.eps, self.n_cheby_cap)?;
        let op = FrozenOperator::new(model, model.field_at(t + self.freeze.fraction() * dt));
        let out = apply_operator_series(series, &op, psi)?;
        let diag = StepDiagnostics {
            n_cheby: series.len(),
            ..StepDiagnostics::default()
        };
        Ok((out, diag))
    }
}
