use std::f64::consts::PI;

use crate::cheby::{apply_operator_series, scalar_func_series, FrozenOperator};
use crate::error::{Error, Result};
use crate::grid::FourierGrid;
use crate::hamiltonian::HamiltonianModel;
use crate::propagators::{propagate, Stepper};
use crate::pulse::{Envelope, Field, Pulse};
use crate::state::{Repr, StateVector, C64};

/// Two displaced harmonic surfaces coupled by a pump and a delayed control
/// pulse (wave-packet interferometry).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpiSpec {
    pub n_grid: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub r_e: f64,
    pub mass: f64,
    pub omega_g: f64,
    pub omega_e: f64,
    pub mu: f64,
    /// Length of each sin² pulse.
    pub duration: f64,
    /// Carrier frequency, by default the vertical transition energy at `r = 0`.
    pub carrier: f64,
    /// Start of the control pulse relative to the pump.
    pub delay: f64,
    /// Pulse area `μ e0 duration / 2` (the time integral of `μ e0 S(t)`).
    pub area: f64,
    /// Relative phase of the control pulse.
    pub phase: f64,
    /// Control amplitude relative to the pump.
    pub control_scale: f64,
}

impl Default for WpiSpec {
    fn default() -> Self {
        let r_e = 3.5;
        Self {
            n_grid: 128,
            r_min: -10.0,
            r_max: 12.0,
            r_e,
            mass: 1.0,
            omega_g: 1.0,
            omega_e: 1.0,
            mu: 1.0,
            duration: 0.3,
            carrier: 0.5 * r_e * r_e,
            delay: 2.0 * PI,
            area: PI / 20.0,
            phase: 0.0,
            control_scale: 1.0,
        }
    }
}

impl WpiSpec {
    pub fn e0(&self) -> f64 {
        2.0 * self.area / (self.mu * self.duration)
    }

    /// End of the pump pulse.
    pub fn t_pump_end(&self) -> f64 {
        self.duration
    }

    /// End of the control pulse.
    pub fn t_final(&self) -> f64 {
        self.delay + self.duration
    }

    pub fn grid(&self) -> Result<FourierGrid> {
        FourierGrid::new(self.n_grid, self.r_min, self.r_max)
    }

    pub fn pump(&self) -> Pulse {
        Pulse::carrier(
            self.e0(),
            Envelope::Sin2 {
                t_start: 0.0,
                duration: self.duration,
            },
            self.carrier,
            0.0,
        )
    }

    /// The pump shifted by `delay`, with carrier phase `φ` relative to the
    /// pump's own phase at its start.
    pub fn control(&self) -> Pulse {
        Pulse::carrier(
            self.control_scale * self.e0(),
            Envelope::Sin2 {
                t_start: self.delay,
                duration: self.duration,
            },
            self.carrier,
            self.phase - self.carrier * self.delay,
        )
    }

    pub fn field(&self) -> Field {
        Field::new(vec![self.pump(), self.control()])
    }

    pub fn potentials(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let grid = self.grid()?;
        let kg = self.mass * self.omega_g * self.omega_g;
        let ke = self.mass * self.omega_e * self.omega_e;
        let vg = grid.positions().iter().map(|r| 0.5 * kg * r * r).collect();
        let ve = grid
            .positions()
            .iter()
            .map(|r| 0.5 * ke * (r - self.r_e) * (r - self.r_e))
            .collect();
        Ok((vg, ve))
    }

    pub fn build(&self) -> Result<HamiltonianModel> {
        self.build_with_field(self.field())
    }

    pub fn build_with_field(&self, field: Field) -> Result<HamiltonianModel> {
        let (vg, ve) = self.potentials()?;
        HamiltonianModel::two_surface(self.grid()?, self.mass, vg, ve, vec![self.mu; self.n_grid], field)
    }

    /// Vibronic ground state: lowest eigenstate of `T + V_g` on the grid,
    /// placed on the ground surface.
    pub fn ground_state(&self) -> Result<StateVector> {
        let (vg, _) = self.potentials()?;
        let n = self.n_grid;
        let single = HamiltonianModel::grid(self.grid()?, self.mass, vg, vec![0.0; n], Field::zero())?;
        let phi = relax_ground_state(&single, 1e-10)?;
        let mut amps = phi.into_amplitudes();
        amps.extend(std::iter::repeat_n(C64::new(0.0, 0.0), n));
        StateVector::new(amps, Repr::TwoSurface(n))
    }
}

/// Lowest eigenstate by repeated application of `e^{−(H − E₀)τ}`, starting
/// from a Gaussian at the origin, until `‖Hφ − ⟨H⟩φ‖ < tol`.
///
/// `E₀` is the energy of the starting Gaussian. The spectral bounds reach
/// below the true ground state, so `τ` is kept small enough that the series
/// never grows much beyond unity there and round-off stays relative to the
/// ground-state component.
pub fn relax_ground_state(model: &HamiltonianModel, tol: f64) -> Result<StateVector> {
    const MAX_ITER: usize = 4000;
    let grid = model
        .fourier_grid()
        .ok_or(Error::Unsupported("relaxation needs a grid representation"))?;
    let op = FrozenOperator::new(model, 0.0);
    let bounds = model.spectral_range(0.0);
    let mut psi = StateVector::new(
        grid.positions()
            .iter()
            .map(|r| C64::new((-0.5 * r * r).exp(), 0.0))
            .collect(),
        model.repr(),
    )?;
    normalize(&mut psi);
    let e_ref = psi.inner(&model.apply_frozen(0.0, &psi)?)?.re;
    let tau = (2.0 / (e_ref - bounds.e_min).max(1e-3)).min(4.0);
    let series = scalar_func_series(|e| C64::new((-(e - e_ref) * tau).exp(), 0.0), bounds, 1e-17, 4096)?;
    let mut res = f64::INFINITY;
    for _ in 0..MAX_ITER {
        psi = apply_operator_series(&series, &op, &psi)?;
        normalize(&mut psi);
        let h = model.apply_frozen(0.0, &psi)?;
        let e = psi.inner(&h)?.re;
        res = h.axpy(C64::new(-e, 0.0), &psi)?.norm();
        if res < tol {
            return Ok(psi);
        }
    }
    Err(Error::IterationNotConverged {
        iterations: MAX_ITER,
        residual: res,
    })
}

fn normalize(psi: &mut StateVector) {
    let n = psi.norm();
    psi.scale(C64::new(1.0 / n, 0.0));
}

/// Excited-surface population `⟨ψ_e|ψ_e⟩`.
pub fn excited_population(psi: &StateVector) -> f64 {
    match psi.repr() {
        Repr::TwoSurface(n) => psi.amplitudes()[n..].iter().map(|z| z.norm_sqr()).sum(),
        _ => 0.0,
    }
}

/// Populations around the control pulse and their ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WpiOutcome {
    /// Excited population at the end of the pump.
    pub p_pump: f64,
    /// Excited population at the end of the control pulse.
    pub p_final: f64,
    /// `p_final / p_pump`.
    pub ratio: f64,
}

/// `R(φ)`: excited population after the control pulse over the population
/// right after the pump.
pub fn wpi_ratio<S: Stepper + ?Sized>(
    spec: &WpiSpec,
    stepper: &mut S,
    dt: f64,
    initial: &StateVector,
) -> Result<WpiOutcome> {
    wpi_ratio_with_model(spec, &spec.build()?, stepper, dt, initial)
}

pub fn wpi_ratio_with_model<S: Stepper + ?Sized>(
    spec: &WpiSpec,
    model: &HamiltonianModel,
    stepper: &mut S,
    dt: f64,
    initial: &StateVector,
) -> Result<WpiOutcome> {
    let t1 = spec.t_pump_end();
    let first = propagate(model, initial, 0.0, t1, dt, stepper, usize::MAX, |_, _, _| {})?;
    let p_pump = excited_population(&first.state);
    let second = propagate(
        model,
        &first.state,
        t1,
        spec.t_final(),
        dt,
        stepper,
        usize::MAX,
        |_, _, _| {},
    )?;
    let p_final = excited_population(&second.state);
    if p_pump == 0.0 {
        return Err(Error::DivisionByZero("no excited population after the pump"));
    }
    Ok(WpiOutcome {
        p_pump,
        p_final,
        ratio: p_final / p_pump,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertical_transition_energy() {
        let spec = WpiSpec::default();
        let (vg, ve) = spec.potentials().unwrap();
        let grid = spec.grid().unwrap();
        // V_e(0) − V_g(0) = ½ r_e²
        let de = 0.5 * spec.r_e * spec.r_e;
        assert!((de - 6.125).abs() < 1e-15);
        assert_eq!(spec.carrier, de);
        for ((r, g), e) in grid.positions().iter().zip(&vg).zip(&ve) {
            assert!((e - g - (de - spec.r_e * r)).abs() < 1e-12);
        }
    }

    #[test]
    fn ground_state_residual() {
        let spec = WpiSpec::default();
        let psi = spec.ground_state().unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-13);
        assert_eq!(excited_population(&psi), 0.0);
    }
}
