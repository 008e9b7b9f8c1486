//! Laser pulses and the total field `E(t)` seen by the dipole coupling.

use std::f64::consts::PI;

/// Pulse envelope `S(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// `sin²(π (t − t_start) / duration)` inside the window, zero outside.
    Sin2 { t_start: f64, duration: f64 },
    /// `S(t) ≡ 1`.
    Constant,
}

impl Envelope {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Envelope::Constant => 1.0,
            Envelope::Sin2 { t_start, duration } => {
                if t < t_start || t > t_start + duration {
                    0.0
                } else {
                    (PI * (t - t_start) / duration).sin().powi(2)
                }
            }
        }
    }

    /// `S(t) − S(s)` without cancellation when `t ≈ s`.
    pub fn difference(&self, t: f64, s: f64) -> f64 {
        match *self {
            Envelope::Constant => 0.0,
            Envelope::Sin2 { t_start, duration } => {
                let inside = |x: f64| x >= t_start && x <= t_start + duration;
                if inside(t) && inside(s) {
                    // sin²a − sin²b = sin(a − b) sin(a + b)
                    let a_minus_b = PI * (t - s) / duration;
                    let a_plus_b = PI * ((t - t_start) + (s - t_start)) / duration;
                    a_minus_b.sin() * a_plus_b.sin()
                } else {
                    self.value(t) - self.value(s)
                }
            }
        }
    }

    /// Times where the envelope stops being smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match *self {
            Envelope::Constant => Vec::new(),
            Envelope::Sin2 { t_start, duration } => vec![t_start, t_start + duration],
        }
    }

    pub fn time_reversed(&self, about: f64) -> Envelope {
        match *self {
            Envelope::Constant => Envelope::Constant,
            Envelope::Sin2 { t_start, duration } => Envelope::Sin2 {
                t_start: about - t_start - duration,
                duration,
            },
        }
    }
}

/// How the envelope is combined with the carrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseForm {
    /// `e0 S(t) cos(ω₀ t + φ)`
    Carrier,
    /// `½ e0 S(t)`, the rotating-frame amplitude of a resonant drive.
    Rotating,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pulse {
    pub e0: f64,
    pub envelope: Envelope,
    pub carrier: f64,
    pub phase: f64,
    pub form: PulseForm,
}

impl Pulse {
    pub fn carrier(e0: f64, envelope: Envelope, carrier: f64, phase: f64) -> Self {
        Self {
            e0,
            envelope,
            carrier,
            phase,
            form: PulseForm::Carrier,
        }
    }

    pub fn rotating(e0: f64, envelope: Envelope) -> Self {
        Self {
            e0,
            envelope,
            carrier: 0.0,
            phase: 0.0,
            form: PulseForm::Rotating,
        }
    }

    /// A field constant in time.
    pub fn constant(value: f64) -> Self {
        Self::carrier(value, Envelope::Constant, 0.0, 0.0)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self.form {
            PulseForm::Rotating => 0.5 * self.e0 * self.envelope.value(t),
            PulseForm::Carrier => self.e0 * self.envelope.value(t) * (self.carrier * t + self.phase).cos(),
        }
    }

    /// `E(t) − E(s)`, accurate to relative precision even for `t ≈ s`.
    pub fn difference(&self, t: f64, s: f64) -> f64 {
        match self.form {
            PulseForm::Rotating => 0.5 * self.e0 * self.envelope.difference(t, s),
            PulseForm::Carrier => {
                let ds = self.envelope.difference(t, s);
                let ct = (self.carrier * t + self.phase).cos();
                // cos a − cos b = −2 sin((a + b)/2) sin((a − b)/2)
                let dc =
                    -2.0 * (0.5 * self.carrier * (t + s) + self.phase).sin() * (0.5 * self.carrier * (t - s)).sin();
                self.e0 * (ds * ct + self.envelope.value(s) * dc)
            }
        }
    }

    /// Upper bound on `|E(t)|`.
    pub fn max_abs(&self) -> f64 {
        match self.form {
            PulseForm::Rotating => 0.5 * self.e0.abs(),
            PulseForm::Carrier => self.e0.abs(),
        }
    }

    /// The pulse `E'(t) = E(about − t)`.
    pub fn time_reversed(&self, about: f64) -> Pulse {
        Pulse {
            envelope: self.envelope.time_reversed(about),
            // cos(ω(a − t) + φ) = cos(ωt − ωa − φ)
            phase: -(self.carrier * about + self.phase),
            ..*self
        }
    }
}

/// Sum of pulses.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Field {
    pulses: Vec<Pulse>,
}

impl Field {
    pub fn new(pulses: Vec<Pulse>) -> Self {
        Self { pulses }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn value(&self, t: f64) -> f64 {
        self.pulses.iter().map(|p| p.value(t)).sum()
    }

    pub fn difference(&self, t: f64, s: f64) -> f64 {
        self.pulses.iter().map(|p| p.difference(t, s)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.pulses.iter().map(Pulse::max_abs).sum()
    }

    /// Sorted envelope breakpoints of all pulses, without duplicates.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pulses.iter().flat_map(|p| p.envelope.breakpoints()).collect();
        b.sort_by(f64::total_cmp);
        b.dedup();
        b
    }

    pub fn time_reversed(&self, about: f64) -> Field {
        Field::new(self.pulses.iter().map(|p| p.time_reversed(about)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin2_envelope_vanishes_at_window_edges() {
        let env = Envelope::Sin2 {
            t_start: 2.0,
            duration: 0.3,
        };
        assert!(env.value(2.0).abs() < 1e-30);
        assert!(env.value(2.3).abs() < 1e-28);
        assert!((env.value(2.15) - 1.0).abs() < 1e-15);
        assert_eq!(env.value(1.0), 0.0);
        assert_eq!(env.value(5.0), 0.0);
    }

    #[test]
    fn rotating_form_is_half_amplitude() {
        let p = Pulse::rotating(
            2.0,
            Envelope::Sin2 {
                t_start: 0.0,
                duration: 10.0,
            },
        );
        assert!((p.value(5.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn difference_matches_direct_subtraction() {
        let p = Pulse::carrier(
            0.7,
            Envelope::Sin2 {
                t_start: 0.0,
                duration: 100.0,
            },
            1.0,
            0.3,
        );
        for &(t, s) in &[(1.0, 2.0), (37.1, 37.9), (99.0, 50.0), (101.0, 99.5)] {
            let direct = p.value(t) - p.value(s);
            assert!((p.difference(t, s) - direct).abs() < 1e-14, "{t} {s}");
        }
    }

    #[test]
    fn difference_keeps_relative_precision() {
        let p = Pulse::rotating(
            1e-3,
            Envelope::Sin2 {
                t_start: 0.0,
                duration: 9000.0,
            },
        );
        let (t, s) = (1234.5, 1234.5 + 1e-6);
        // d/dt ½e0 sin²(πt/T) = ½e0 (π/T) sin(2πt/T)
        let slope = 0.5e-3 * PI / 9000.0 * (2.0 * PI * t / 9000.0).sin();
        let expected = -slope * 1e-6;
        assert!(((p.difference(t, s) - expected) / expected).abs() < 1e-6);
    }

    #[test]
    fn reversed_pulse_mirrors_the_field() {
        let p = Pulse::carrier(
            1.3,
            Envelope::Sin2 {
                t_start: 0.5,
                duration: 3.0,
            },
            2.2,
            0.4,
        );
        let a = 4.1;
        let r = p.time_reversed(a);
        for t in [0.2, 0.9, 1.7, 2.8, 3.4] {
            assert!((r.value(t) - p.value(a - t)).abs() < 1e-13);
        }
    }
}
