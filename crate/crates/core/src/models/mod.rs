//! The three test systems: a resonantly driven two-level atom, a driven
//! harmonic oscillator and two coupled surfaces for wave-packet
//! interferometry, with their references.

mod metrics;
mod oscillator;
pub mod quadrature;
mod two_level;
mod wpi;

pub use metrics::{error_metrics, relative_error, ErrorMetrics};
pub use oscillator::{depletion_amplitude, OscillatorOracle, OscillatorSpec, DEFAULT_DEPLETION};
pub use two_level::TwoLevelSpec;
pub use wpi::{excited_population, relax_ground_state, wpi_ratio, wpi_ratio_with_model, WpiOutcome, WpiSpec};
