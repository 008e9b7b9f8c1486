use crate::error::Result;
use crate::hamiltonian::HamiltonianModel;
use crate::propagators::{StepDiagnostics, Stepper};
use crate::state::{StateVector, C64};

/// Classical fourth-order Runge–Kutta step for `ψ' = −i H(t) ψ`.
pub fn rk4_step(model: &HamiltonianModel, psi: &StateVector, t: f64, dt: f64) -> Result<StateVector> {
    psi.check_repr(model.repr())?;
    let y = psi.amplitudes();
    let n = y.len();
    let rhs = |tt: f64, v: &[C64], out: &mut [C64]| {
        model.apply_with_field_into(model.field_at(tt), v, out);
        for z in out.iter_mut() {
            *z = C64::new(z.im, -z.re);
        }
    };
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut tmp = vec![zero; n];
    let h = 0.5 * dt;
    rhs(t, y, &mut k1);
    for i in 0..n {
        tmp[i] = y[i] + k1[i] * h;
    }
    rhs(t + h, &tmp, &mut k2);
    for i in 0..n {
        tmp[i] = y[i] + k2[i] * h;
    }
    rhs(t + h, &tmp, &mut k3);
    for i in 0..n {
        tmp[i] = y[i] + k3[i] * dt;
    }
    rhs(t + dt, &tmp, &mut k4);
    let w = dt / 6.0;
    let out = (0..n)
        .map(|i| y[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w)
        .collect();
    StateVector::new(out, psi.repr())
}

/// Strang splitting `e^{−iVΔt/2} e^{−iTΔt} e^{−iVΔt/2}` with the field in
/// `V` taken at the midpoint of the step.
pub fn split_step(model: &HamiltonianModel, psi: &StateVector, t: f64, dt: f64) -> Result<StateVector> {
    psi.check_repr(model.repr())?;
    let w = model.field_at(t + 0.5 * dt);
    let mut buf = psi.amplitudes().to_vec();
    model.exp_potential_in_place(w, 0.5 * dt, &mut buf)?;
    model.exp_kinetic_in_place(dt, &mut buf)?;
    model.exp_potential_in_place(w, 0.5 * dt, &mut buf)?;
    StateVector::new(buf, psi.repr())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Rk4Stepper;

impl Stepper for Rk4Stepper {
    fn name(&self) -> &'static str {
        "rk4"
    }

    fn step(
        &mut self,
        model: &HamiltonianModel,
        psi: &StateVector,
        t: f64,
        dt: f64,
    ) -> Result<(StateVector, StepDiagnostics)> {
        Ok((rk4_step(model, psi, t, dt)?, StepDiagnostics::default()))
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SplitStepper;

impl Stepper for SplitStepper {
    fn name(&self) -> &'static str {
        "split"
    }

    fn step(
        &mut self,
        model: &HamiltonianModel,
        psi: &StateVector,
        t: f64,
        dt: f64,
    ) -> Result<(StateVector, StepDiagnostics)> {
        Ok((split_step(model, psi, t, dt)?, StepDiagnostics::default()))
    }
}
