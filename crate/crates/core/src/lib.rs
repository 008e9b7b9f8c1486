//! Propagators for the time-dependent Schrödinger equation with a
//! Hamiltonian `H(t) = H₀ + E(t) μ`.
//!
//! The main integrator is a Chebyshev propagator that restores time ordering
//! by iterating an inhomogeneous equation inside each step
//! ([`propagators::ItoStepper`]). Standard Chebyshev, RK4 and Strang
//! split-operator steppers are provided as baselines, and [`models`] holds
//! three test systems with analytic or quadrature references.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cheby;
pub mod error;
pub mod grid;
pub mod hamiltonian;
pub mod models;
pub mod propagators;
pub mod pulse;
pub mod state;

pub use error::{Error, Result};
pub use grid::{FourierGrid, Kinetic};
pub use hamiltonian::{HamiltonianModel, SpectralBounds};
pub use pulse::{Envelope, Field, Pulse, PulseForm};
pub use state::{Repr, StateVector, C64};
