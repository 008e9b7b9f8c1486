use std::f64::consts::PI;

use crate::error::Result;
use crate::hamiltonian::HamiltonianModel;
use crate::pulse::{Envelope, Field, Pulse};
use crate::state::{Repr, StateVector, C64};

/// Resonantly driven two-level atom in the rotating frame:
/// `H = [[0, μE(t)], [μE(t), 0]]` with `E(t) = ½ e0 sin²(πt/T)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoLevelSpec {
    pub mu: f64,
    pub t_final: f64,
    pub e0: f64,
}

impl Default for TwoLevelSpec {
    fn default() -> Self {
        Self::pi_pulse(1.0, 9000.0)
    }
}

impl TwoLevelSpec {
    /// Amplitude for complete inversion at `t_final`: `¼ μ e0 T = π/2`.
    pub fn pi_pulse(mu: f64, t_final: f64) -> Self {
        Self {
            mu,
            t_final,
            e0: 2.0 * PI / (mu * t_final),
        }
    }

    pub fn field(&self) -> Field {
        Field::new(vec![Pulse::rotating(
            self.e0,
            Envelope::Sin2 {
                t_start: 0.0,
                duration: self.t_final,
            },
        )])
    }

    pub fn build(&self) -> Result<HamiltonianModel> {
        let z = C64::new(0.0, 0.0);
        let m = C64::new(self.mu, 0.0);
        HamiltonianModel::levels(2, vec![z; 4], vec![z, m, m, z], self.field())
    }

    pub fn initial_state(&self) -> StateVector {
        StateVector::basis(Repr::Levels(2), 0).expect("two levels")
    }

    /// Rotation angle `¼ μ e0 (t − T/(2π) sin(2πt/T))`.
    pub fn angle(&self, t: f64) -> f64 {
        let tt = self.t_final;
        0.25 * self.mu * self.e0 * (t - tt / (2.0 * PI) * (2.0 * PI * t / tt).sin())
    }

    /// `(c_g, c_e) = (cos θ, −i sin θ)`.
    pub fn analytic(&self, t: f64) -> (C64, C64) {
        let (s, c) = self.angle(t).sin_cos();
        (C64::new(c, 0.0), C64::new(0.0, -s))
    }

    /// Ground-state population `cos² θ(t)`.
    pub fn ground_population(&self, t: f64) -> f64 {
        self.angle(t).cos().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_endpoints() {
        let spec = TwoLevelSpec::default();
        let (g, e) = spec.analytic(0.0);
        assert_eq!((g, e), (C64::new(1.0, 0.0), C64::new(0.0, 0.0)));
        let (g, e) = spec.analytic(spec.t_final);
        assert!(g.norm() < 1e-15);
        assert!((e.norm_sqr() - 1.0).abs() < 1e-15);
        assert!((spec.ground_population(4500.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn coupling_is_off_diagonal() {
        let spec = TwoLevelSpec::default();
        let model = spec.build().unwrap();
        let out = model.apply_h_at(4500.0, &spec.initial_state()).unwrap();
        let w = spec.mu * spec.e0 / 2.0;
        assert!(out.amplitudes()[0].norm() == 0.0);
        assert!((out.amplitudes()[1] - C64::new(w, 0.0)).norm() < 1e-18);
    }
}
