//! Time steppers and the driver that strings steps together.

mod baseline;
mod inhomo;
mod ito;
mod standard;

pub use baseline::{rk4_step, split_step, Rk4Stepper, SplitStepper};
pub use inhomo::{fm_scalar, inhomo_step};
pub use ito::{ito_step, ItoConfig, ItoStepper};
pub use standard::{standard_cheb_step, FreezePoint, StandardStepper};

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianModel;
use crate::state::StateVector;

/// Per-step bookkeeping. Fields that do not apply to a method stay zero.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepDiagnostics {
    /// Order of the inhomogeneity expansion (largest over the iterations).
    pub m_k: usize,
    /// Longest operator series used in the step.
    pub n_cheby: usize,
    /// Time-ordering iterations until convergence.
    pub k_used: usize,
    /// Number of sampling points the step finished with.
    pub n_t_used: usize,
    /// Last iteration residual `‖ψ_k − ψ_{k−1}‖` at the end of the step.
    pub residual: f64,
    /// Fewer than half of the sampling points were needed.
    pub shrink_advised: bool,
}

impl StepDiagnostics {
    pub fn merge(&mut self, other: &StepDiagnostics) {
        self.m_k = self.m_k.max(other.m_k);
        self.n_cheby = self.n_cheby.max(other.n_cheby);
        self.k_used = self.k_used.max(other.k_used);
        self.n_t_used = self.n_t_used.max(other.n_t_used);
        self.residual = self.residual.max(other.residual);
        self.shrink_advised |= other.shrink_advised;
    }
}

/// One propagation step `ψ(t) → ψ(t + dt)`.
pub trait Stepper {
    fn name(&self) -> &'static str;

    fn step(
        &mut self,
        model: &HamiltonianModel,
        psi: &StateVector,
        t: f64,
        dt: f64,
    ) -> Result<(StateVector, StepDiagnostics)>;
}

impl<S: Stepper + ?Sized> Stepper for Box<S> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn step(
        &mut self,
        model: &HamiltonianModel,
        psi: &StateVector,
        t: f64,
        dt: f64,
    ) -> Result<(StateVector, StepDiagnostics)> {
        (**self).step(model, psi, t, dt)
    }
}

/// Outcome of [`propagate`].
#[derive(Debug, Clone)]
pub struct Propagation {
    pub state: StateVector,
    pub steps: usize,
    /// Maxima over all steps.
    pub diagnostics: StepDiagnostics,
}

/// A smooth stretch `[start, end]` cut into steps `start + n·dt`; a last
/// partial step is shortened.
#[derive(Debug, Clone, Copy)]
struct Segment {
    start: f64,
    end: f64,
    dt: f64,
    steps: usize,
}

impl Segment {
    fn new(start: f64, end: f64, dt: f64) -> Self {
        let full = ((end - start) / dt * (1.0 + 1e-12)).floor() as usize;
        let last = start + full as f64 * dt;
        let steps = if end - last > 1e-9 * dt { full + 1 } else { full };
        Self { start, end, dt, steps }
    }

    fn boundary(&self, n: usize) -> f64 {
        if n == self.steps {
            self.end
        } else {
            self.start + n as f64 * self.dt
        }
    }
}

/// Step boundaries generated on the fly, so long runs need no storage per
/// step. Steps never straddle a breakpoint of the field; breakpoints closer
/// than `10⁻⁹·dt` to a segment end are ignored.
#[derive(Debug, Clone)]
pub struct StepSchedule {
    segments: Vec<Segment>,
}

impl StepSchedule {
    pub fn new(t0: f64, t_final: f64, dt: f64, breakpoints: &[f64]) -> Result<Self> {
        if !(dt > 0.0) || !(t_final >= t0) {
            return Err(Error::InvalidParameter(format!(
                "need dt > 0 and t_final ≥ t0, got dt = {dt}, [{t0}, {t_final}]"
            )));
        }
        let mut ends: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > t0 + 1e-9 * dt && b < t_final - 1e-9 * dt)
            .collect();
        ends.sort_by(f64::total_cmp);
        ends.push(t_final);
        let mut segments = Vec::new();
        let mut start = t0;
        for end in ends {
            if end - start <= 1e-9 * dt {
                continue;
            }
            segments.push(Segment::new(start, end, dt));
            start = end;
        }
        Ok(Self { segments })
    }

    pub fn len(&self) -> usize {
        self.segments.iter().map(|s| s.steps).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(t_n, t_{n+1})` for every step in order.
    pub fn steps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.segments
            .iter()
            .flat_map(|s| (0..s.steps).map(move |n| (s.boundary(n), s.boundary(n + 1))))
    }

    fn boundaries(&self, t0: f64) -> Vec<f64> {
        std::iter::once(t0).chain(self.steps().map(|(_, b)| b)).collect()
    }
}

/// Step boundaries `t_0 + n·dt` up to `t_final`; a last partial step is
/// shortened.
pub fn step_boundaries(t0: f64, t_final: f64, dt: f64) -> Result<Vec<f64>> {
    let mut times = StepSchedule::new(t0, t_final, dt, &[])?.boundaries(t0);
    // zero-length interval: the single boundary is t_final itself
    *times.last_mut().unwrap() = t_final;
    Ok(times)
}

/// Step boundaries that also land on every breakpoint inside `(t0, t_final)`;
/// see [`StepSchedule`].
pub fn step_schedule(t0: f64, t_final: f64, dt: f64, breakpoints: &[f64]) -> Result<Vec<f64>> {
    Ok(StepSchedule::new(t0, t_final, dt, breakpoints)?.boundaries(t0))
}

/// Runs `stepper` from `t0` to `t_final` on a [`StepSchedule`] with the field's
/// breakpoints. `observe` sees the initial state, every `record_every`-th
/// boundary and the final state.
#[allow(clippy::too_many_arguments)]
pub fn propagate<S, F>(
    model: &HamiltonianModel,
    psi0: &StateVector,
    t0: f64,
    t_final: f64,
    dt: f64,
    stepper: &mut S,
    record_every: usize,
    mut observe: F,
) -> Result<Propagation>
where
    S: Stepper + ?Sized,
    F: FnMut(f64, &StateVector, &StepDiagnostics),
{
    psi0.check_repr(model.repr())?;
    let schedule = StepSchedule::new(t0, t_final, dt, &model.field().breakpoints())?;
    let every = record_every.max(1);
    let mut psi = psi0.clone();
    let mut total = StepDiagnostics::default();
    observe(t0, &psi, &total);
    let steps = schedule.len();
    for (n, (t, next_t)) in schedule.steps().enumerate() {
        let (next, diag) = stepper.step(model, &psi, t, next_t - t)?;
        total.merge(&diag);
        psi = next;
        if (n + 1) % every == 0 || n + 1 == steps {
            observe(next_t, &psi, &diag);
        }
    }
    Ok(Propagation {
        state: psi,
        steps,
        diagnostics: total,
    })
}
