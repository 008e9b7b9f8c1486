use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::FourierGrid;
use crate::hamiltonian::HamiltonianModel;
use crate::models::quadrature::Integrator;
use crate::pulse::{Envelope, Field, Pulse};
use crate::state::{Repr, StateVector, C64};

/// Harmonic oscillator driven by `r e0 sin²(πt/T) cos(ω₀ t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorSpec {
    pub mass: f64,
    pub omega: f64,
    /// Carrier `ω₀`; zero drops the fast oscillation of the field.
    pub carrier: f64,
    pub t_final: f64,
    pub n_grid: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub e0: f64,
}

/// Default bound on the smallest ground-state population reached during
/// the pulse. Deeper depletion displaces the packet into the grid edges.
pub const DEFAULT_DEPLETION: f64 = 1e-4;

impl OscillatorSpec {
    pub fn new(carrier: f64, e0: f64) -> Self {
        Self {
            mass: 1.0,
            omega: 1.0,
            carrier,
            t_final: 100.0,
            n_grid: 128,
            r_min: -10.0,
            r_max: 10.0,
            e0,
        }
    }

    /// Amplitude chosen so that `min_t P₀(t)` equals `target`.
    pub fn depleting(carrier: f64, target: f64) -> Result<Self> {
        let mut spec = Self::new(carrier, 1.0);
        spec.e0 = depletion_amplitude(&spec, target)?.0;
        Ok(spec)
    }

    pub fn grid(&self) -> Result<FourierGrid> {
        FourierGrid::new(self.n_grid, self.r_min, self.r_max)
    }

    pub fn field(&self) -> Field {
        Field::new(vec![Pulse::carrier(
            self.e0,
            Envelope::Sin2 {
                t_start: 0.0,
                duration: self.t_final,
            },
            self.carrier,
            0.0,
        )])
    }

    pub fn build(&self) -> Result<HamiltonianModel> {
        let grid = self.grid()?;
        let r = grid.positions().to_vec();
        let k = self.mass * self.omega * self.omega;
        let v = r.iter().map(|x| 0.5 * k * x * x).collect();
        HamiltonianModel::grid(grid, self.mass, v, r, self.field())
    }

    /// Gaussian ground state sampled on the grid (amplitudes carry `√dr`).
    pub fn ground_state(&self) -> Result<StateVector> {
        let grid = self.grid()?;
        let mw = self.mass * self.omega;
        let pref = (mw / PI).powf(0.25) * grid.dr().sqrt();
        let amps: Vec<C64> = grid
            .positions()
            .iter()
            .map(|r| C64::new(pref * (-0.5 * mw * r * r).exp(), 0.0))
            .collect();
        let mut psi = StateVector::new(amps, Repr::Grid(self.n_grid))?;
        let n = psi.norm();
        psi.scale(C64::new(1.0 / n, 0.0));
        Ok(psi)
    }

    pub fn oracle(&self) -> OscillatorOracle {
        OscillatorOracle::new(*self)
    }
}

/// Coherent-state solution `α(t) = −i/√(2mω) ∫₀ᵗ f(τ) e^{iω(τ−t)} dτ` by
/// adaptive quadrature, independent of any propagator.
#[derive(Debug, Clone)]
pub struct OscillatorOracle {
    spec: OscillatorSpec,
    quad: Integrator,
}

impl OscillatorOracle {
    pub fn new(spec: OscillatorSpec) -> Self {
        Self {
            spec,
            quad: Integrator::new(16, 1e-13),
        }
    }

    fn force(&self, tau: f64) -> f64 {
        let s = &self.spec;
        if tau < 0.0 || tau > s.t_final {
            return 0.0;
        }
        s.e0 * (PI * tau / s.t_final).sin().powi(2) * (s.carrier * tau).cos()
    }

    // ∫_a^b f(τ) e^{iωτ} dτ restricted to the pulse window
    fn segment(&self, a: f64, b: f64) -> Result<C64> {
        let (a, b) = (a.max(0.0), b.min(self.spec.t_final));
        if b <= a {
            return Ok(C64::new(0.0, 0.0));
        }
        let w = self.spec.omega;
        self.quad
            .integrate(&|tau: f64| C64::from_polar(self.force(tau), w * tau), a, b)
    }

    fn finish(&self, integral: C64, t: f64) -> C64 {
        let s = &self.spec;
        let pref = C64::new(0.0, -1.0 / (2.0 * s.mass * s.omega).sqrt());
        pref * integral * C64::from_polar(1.0, -s.omega * t)
    }

    pub fn alpha(&self, t: f64) -> Result<C64> {
        if t < 0.0 {
            return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
        }
        // panels of at most one time unit keep the first refinement cheap
        let mut integral = C64::new(0.0, 0.0);
        let mut a = 0.0;
        while a < t {
            let b = (a + 1.0).min(t);
            integral += self.segment(a, b)?;
            a = b;
        }
        Ok(self.finish(integral, t))
    }

    /// `α` at ascending `times`, integrating cumulatively.
    pub fn alpha_trace(&self, times: &[f64]) -> Result<Vec<C64>> {
        let mut out = Vec::with_capacity(times.len());
        let mut integral = C64::new(0.0, 0.0);
        let mut prev = 0.0;
        for &t in times {
            if t < prev {
                return Err(Error::InvalidParameter(
                    "times must be ascending and non-negative".into(),
                ));
            }
            let mut a = prev;
            while a < t {
                let b = (a + 1.0).min(t);
                integral += self.segment(a, b)?;
                a = b;
            }
            prev = t;
            out.push(self.finish(integral, t));
        }
        Ok(out)
    }

    /// `P₀(t) = exp(−|α(t)|²)`.
    pub fn ground_population(&self, t: f64) -> Result<f64> {
        Ok((-self.alpha(t)?.norm_sqr()).exp())
    }

    pub fn ground_population_trace(&self, times: &[f64]) -> Result<Vec<f64>> {
        Ok(self.alpha_trace(times)?.iter().map(|a| (-a.norm_sqr()).exp()).collect())
    }

    /// `⟨r⟩(t) = √(2/(mω)) Re α(t)`.
    pub fn position(&self, t: f64) -> Result<f64> {
        let s = &self.spec;
        Ok((2.0 / (s.mass * s.omega)).sqrt() * self.alpha(t)?.re)
    }
}

/// Amplitude `e0` with `min_t P₀(t) = target`, and the time of that minimum.
///
/// `|α|²` scales with `e0²`, so the task reduces to locating the maximum of
/// `|α(t)|²` at unit amplitude: a scan followed by golden-section search.
pub fn depletion_amplitude(spec: &OscillatorSpec, target: f64) -> Result<(f64, f64)> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "depletion target must lie in (0, 1), got {target}"
        )));
    }
    let unit = OscillatorOracle::new(OscillatorSpec { e0: 1.0, ..*spec });
    let n = 2000;
    let times: Vec<f64> = (0..=n).map(|i| spec.t_final * i as f64 / n as f64).collect();
    let g: Vec<f64> = unit.alpha_trace(&times)?.iter().map(|a| a.norm_sqr()).collect();
    let best = (0..=n).max_by(|&a, &b| g[a].total_cmp(&g[b])).ok_or(Error::Empty)?;
    let (mut lo, mut hi) = (times[best.saturating_sub(1)], times[(best + 1).min(n)]);
    let f = |t: f64| unit.alpha(t).map(|a| a.norm_sqr());
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = hi - ratio * (hi - lo);
    let mut d = lo + ratio * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..80 {
        if (hi - lo).abs() < 1e-12 * spec.t_final {
            break;
        }
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = f(d)?;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let g_max = f(t_star)?.max(g[best]);
    if !(g_max > 0.0) {
        return Err(Error::RootFinding("the field never displaces the oscillator".into()));
    }
    Ok(((-target.ln() / g_max).sqrt(), t_star))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_is_normalized_eigenstate() {
        let spec = OscillatorSpec::new(1.0, 0.0);
        let psi = spec.ground_state().unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        let model = spec.build().unwrap();
        let h = model.apply_frozen(0.0, &psi).unwrap();
        let res = h.axpy(C64::new(-0.5, 0.0), &psi).unwrap();
        assert!(res.norm() < 1e-8);
    }

    #[test]
    fn zero_field_never_depletes() {
        let oracle = OscillatorSpec::new(1.0, 0.0).oracle();
        for t in [0.0, 13.0, 100.0] {
            assert_eq!(oracle.ground_population(t).unwrap(), 1.0);
        }
        let spec = OscillatorSpec::new(1.0, 0.3);
        assert_eq!(spec.oracle().ground_population(0.0).unwrap(), 1.0);
    }

    #[test]
    fn constant_force_closed_form() {
        // window long enough that S ≈ const is not needed: compare against the
        // analytic integral of the sin² cos drive at ω₀ = ω = 1
        let spec = OscillatorSpec::new(1.0, 0.2);
        let oracle = spec.oracle();
        let t = spec.t_final;
        // ∫₀ᵀ sin²(πτ/T) cos τ e^{iτ} dτ = T/4 + ∫ sin² e^{2iτ}/2
        let tt = t;
        let k = 2.0;
        let a = 2.0 * PI / tt;
        let z = C64::new(0.0, 1.0);
        let i_exp = |q: f64| -> C64 {
            if q == 0.0 {
                C64::new(tt, 0.0)
            } else {
                (C64::from_polar(1.0, q * tt) - 1.0) / (z * q)
            }
        };
        // sin² = ½ − ¼(e^{iaτ} + e^{−iaτ})
        let sin2_exp = |q: f64| i_exp(q) * 0.5 - (i_exp(q + a) + i_exp(q - a)) * 0.25;
        let integral = (sin2_exp(0.0) + sin2_exp(k)) * 0.5 * spec.e0;
        let want = C64::new(0.0, -1.0 / 2f64.sqrt()) * integral * C64::from_polar(1.0, -t);
        let got = oracle.alpha(t).unwrap();
        assert!((got - want).norm() < 1e-12 * want.norm());
        let trace = oracle.alpha_trace(&[0.0, 50.0, t]).unwrap();
        assert!((trace[2] - got).norm() < 1e-12);
    }

    #[test]
    fn depletion_hits_the_target() {
        for carrier in [0.0, 1.0] {
            let (e0, t_star) = depletion_amplitude(&OscillatorSpec::new(carrier, 1.0), 1e-4).unwrap();
            let spec = OscillatorSpec::new(carrier, e0);
            let p = spec.oracle().ground_population(t_star).unwrap();
            assert!((p.ln() - 1e-4f64.ln()).abs() < 1e-8, "carrier {carrier}: {p}");
        }
    }
}
