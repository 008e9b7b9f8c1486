use std::f64::consts::PI;

use crate::cheby::series::ChebyshevSeries;
use crate::error::{Error, Result};
use crate::hamiltonian::{HamiltonianModel, SpectralBounds};
use crate::state::{norm, StateVector, C64};

/// Number of samples tried first by [`scalar_func_series`].
pub const INITIAL_SAMPLES: usize = 16;

/// Growth of `‖φ_j‖` beyond this multiple of `‖ψ‖` means the spectrum left
/// the expansion interval.
pub const DIVERGENCE_FACTOR: f64 = 1e3;

/// Chebyshev series of a scalar function `f(E)` over `E ∈ [e_min, e_max]`.
///
/// The number of samples doubles from [`INITIAL_SAMPLES`] until the last
/// quarter of the coefficients lies below `ε·max_j |c_j|` (or the rounding
/// floor of the samples); the series is then cut after the last coefficient
/// above that threshold.
pub fn scalar_func_series<F>(f: F, bounds: SpectralBounds, eps: f64, n_max: usize) -> Result<ChebyshevSeries<C64>>
where
    F: Fn(f64) -> C64,
{
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    if n_max < 4 {
        return Err(Error::InvalidParameter(format!(
            "sample cap must be at least 4, got {n_max}"
        )));
    }
    let (c, h) = (bounds.center(), bounds.half_width());
    let mut n = INITIAL_SAMPLES.min(n_max);
    let mut last_ratio = f64::INFINITY;
    loop {
        let (coeffs, max_sample) = sampled_coefficients(&f, c, h, n)?;
        if !max_sample.is_finite() || coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter(
                "function is not finite on the spectral interval".into(),
            ));
        }
        let largest = coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if largest == 0.0 {
            let mut s = ChebyshevSeries::new(vec![C64::new(0.0, 0.0)], c, h)?;
            s.set_trunc_ratio(0.0);
            return Ok(s);
        }
        let noise = 8.0 * f64::EPSILON * max_sample;
        let thr = (eps * largest).max(noise);
        let tail = &coeffs[n - n / 4..];
        let tail_max = tail.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if tail_max < thr {
            let m = coeffs.iter().rposition(|z| z.norm() >= thr).map_or(1, |i| i + 1);
            let ratio = coeffs.get(m).map_or(0.0, |z| z.norm() / largest);
            let mut s = ChebyshevSeries::new(coeffs[..m].to_vec(), c, h)?;
            s.set_trunc_ratio(ratio);
            return Ok(s);
        }
        last_ratio = last_ratio.min(tail_max / largest);
        if n >= n_max {
            return Err(Error::SeriesNotConverged {
                n_max,
                ratio: last_ratio,
            });
        }
        n = (2 * n).min(n_max);
    }
}

// Coefficients from samples of f(c + h x) at the N roots, plus max |sample|.
fn sampled_coefficients<F>(f: &F, c: f64, h: f64, n: usize) -> Result<(Vec<C64>, f64)>
where
    F: Fn(f64) -> C64,
{
    // cos(π p/(2n)) for p = 0..4n; the root angles are odd multiples of π/(2n)
    let table: Vec<f64> = (0..4 * n)
        .map(|p| {
            if p % (2 * n) == n {
                0.0
            } else {
                (PI * p as f64 / (2 * n) as f64).cos()
            }
        })
        .collect();
    let mut samples = Vec::with_capacity(n);
    let mut max_sample = 0.0f64;
    for i in 0..n {
        let x = table[2 * n - 2 * i - 1];
        let v = f(c + h * x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "function is not finite at {}",
                c + h * x
            )));
        }
        max_sample = max_sample.max(v.norm());
        samples.push(v);
    }
    let coeffs = (0..n)
        .map(|j| {
            let mut acc = C64::new(0.0, 0.0);
            for (i, s) in samples.iter().enumerate() {
                acc += s * table[(j * (2 * n - 2 * i - 1)) % (4 * n)];
            }
            acc * (if j == 0 { 1.0 } else { 2.0 } / n as f64)
        })
        .collect();
    Ok((coeffs, max_sample))
}

/// Series of `e^{−iEτ}` over the spectral interval.
pub fn exp_series(bounds: SpectralBounds, tau: f64, eps: f64, n_max: usize) -> Result<ChebyshevSeries<C64>> {
    scalar_func_series(|e| C64::from_polar(1.0, -e * tau), bounds, eps, n_max)
}

/// `H_n = H₀ + w μ` for a frozen field value.
#[derive(Debug, Clone, Copy)]
pub struct FrozenOperator<'a> {
    model: &'a HamiltonianModel,
    w: f64,
}

impl<'a> FrozenOperator<'a> {
    pub fn new(model: &'a HamiltonianModel, w: f64) -> Self {
        Self { model, w }
    }

    pub fn model(&self) -> &'a HamiltonianModel {
        self.model
    }

    pub fn field_value(&self) -> f64 {
        self.w
    }

    pub fn apply(&self, psi: &[C64], out: &mut [C64]) {
        self.model.apply_with_field_into(self.w, psi, out);
    }

    // out = (H − c) psi / h
    fn apply_scaled(&self, c: f64, h: f64, psi: &[C64], out: &mut [C64]) {
        self.apply(psi, out);
        let inv = 1.0 / h;
        for (o, p) in out.iter_mut().zip(psi) {
            *o = (*o - p * c) * inv;
        }
    }
}

/// `Σ_j c_j P_j(H_norm) ψ` with `H_norm = (H − center)/half_width`.
pub fn apply_operator_series(
    series: &ChebyshevSeries<C64>,
    op: &FrozenOperator<'_>,
    psi: &StateVector,
) -> Result<StateVector> {
    psi.check_repr(op.model.repr())?;
    let out = apply_series_slices(&[series.coeffs()], series.domain(), op, psi.amplitudes())?;
    StateVector::new(out.into_iter().next().unwrap_or_default(), psi.repr())
}

/// Several series over the same domain applied to one vector, sharing the
/// recurrence.
pub fn apply_operator_series_multi(
    series: &[&ChebyshevSeries<C64>],
    op: &FrozenOperator<'_>,
    psi: &StateVector,
) -> Result<Vec<StateVector>> {
    psi.check_repr(op.model.repr())?;
    let Some(first) = series.first() else {
        return Ok(Vec::new());
    };
    let domain = first.domain();
    if series.iter().any(|s| s.domain() != domain) {
        return Err(Error::InvalidParameter("series must share one expansion domain".into()));
    }
    let coeffs: Vec<&[C64]> = series.iter().map(|s| s.coeffs()).collect();
    apply_series_slices(&coeffs, domain, op, psi.amplitudes())?
        .into_iter()
        .map(|a| StateVector::new(a, psi.repr()))
        .collect()
}

pub(crate) fn apply_series_slices(
    coeff_sets: &[&[C64]],
    (center, half_width): (f64, f64),
    op: &FrozenOperator<'_>,
    psi: &[C64],
) -> Result<Vec<Vec<C64>>> {
    let n = psi.len();
    let zero = C64::new(0.0, 0.0);
    let terms = coeff_sets.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut out: Vec<Vec<C64>> = coeff_sets
        .iter()
        .map(|c| {
            let c0 = c.first().copied().unwrap_or(zero);
            psi.iter().map(|p| p * c0).collect()
        })
        .collect();
    if terms <= 1 {
        return Ok(out);
    }
    let limit = DIVERGENCE_FACTOR * norm(psi).max(f64::MIN_POSITIVE);
    let mut prev = psi.to_vec();
    let mut cur = vec![zero; n];
    op.apply_scaled(center, half_width, psi, &mut cur);
    let mut next = vec![zero; n];
    for j in 1..terms {
        if norm(&cur) > limit {
            return Err(Error::BoundsViolation { term: j });
        }
        for (o, c) in out.iter_mut().zip(coeff_sets) {
            if let Some(&cj) = c.get(j) {
                for (oi, ci) in o.iter_mut().zip(&cur) {
                    *oi += ci * cj;
                }
            }
        }
        if j + 1 < terms {
            // φ_{j+1} = 2 H_norm φ_j − φ_{j−1}
            op.apply_scaled(center, half_width, &cur, &mut next);
            for (nx, pv) in next.iter_mut().zip(&prev) {
                *nx = *nx * 2.0 - pv;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::Field;
    use crate::state::Repr;

    fn diag_model(e: [f64; 2]) -> HamiltonianModel {
        let z = C64::new(0.0, 0.0);
        HamiltonianModel::levels(
            2,
            vec![C64::new(e[0], 0.0), z, z, C64::new(e[1], 0.0)],
            vec![z; 4],
            Field::zero(),
        )
        .unwrap()
    }

    // J_n(z) = (1/π) ∫_0^π cos(nθ − z sin θ) dθ, trapezoid rule (spectrally
    // accurate for this periodic integrand)
    fn bessel_j(n: usize, z: f64) -> f64 {
        let k = 2000;
        let mut s = 0.0;
        for i in 0..=k {
            let th = PI * i as f64 / k as f64;
            let w = if i == 0 || i == k { 0.5 } else { 1.0 };
            s += w * (n as f64 * th - z * th.sin()).cos();
        }
        s / k as f64
    }

    #[test]
    fn constant_function() {
        let b = SpectralBounds::new(-2.0, 3.0);
        let s = scalar_func_series(|_| C64::new(1.5, -0.5), b, 1e-14, 256).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.coeffs()[0] - C64::new(1.5, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn exponential_matches_bessel_coefficients() {
        let b = SpectralBounds::new(-3.0, 5.0);
        let dt = 2.5;
        let s = exp_series(b, dt, 1e-15, 1024).unwrap();
        let (c, h) = (b.center(), b.half_width());
        let phase = C64::from_polar(1.0, -c * dt);
        let mi = C64::new(0.0, -1.0);
        for (j, cj) in s.coeffs().iter().enumerate() {
            let pref = if j == 0 { 1.0 } else { 2.0 };
            let want = phase * mi.powu(j as u32) * (pref * bessel_j(j, h * dt));
            assert!((cj - want).norm() < 1e-10, "j={j}");
        }
    }

    #[test]
    fn reports_non_convergence() {
        let b = SpectralBounds::new(-100.0, 100.0);
        let r = exp_series(b, 50.0, 1e-14, 64);
        assert!(matches!(r, Err(Error::SeriesNotConverged { n_max: 64, .. })));
    }

    #[test]
    fn identity_series_returns_input() {
        let model = diag_model([0.3, -0.8]);
        let s = ChebyshevSeries::new(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], 0.0, 1.0).unwrap();
        let psi = StateVector::new(vec![C64::new(0.6, 0.1), C64::new(-0.2, 0.7)], Repr::Levels(2)).unwrap();
        let out = apply_operator_series(&s, &FrozenOperator::new(&model, 0.0), &psi).unwrap();
        assert_eq!(out, psi);
    }

    #[test]
    fn diagonal_exponential() {
        let model = diag_model([0.3, -0.8]);
        let b = model.spectral_range(0.0);
        let dt = 3.7;
        let s = exp_series(b, dt, 1e-15, 1024).unwrap();
        let psi = StateVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)], Repr::Levels(2)).unwrap();
        let out = apply_operator_series(&s, &FrozenOperator::new(&model, 0.0), &psi).unwrap();
        let want = [
            psi.amplitudes()[0] * C64::from_polar(1.0, -0.3 * dt),
            psi.amplitudes()[1] * C64::from_polar(1.0, 0.8 * dt),
        ];
        for (a, b) in out.amplitudes().iter().zip(want) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!((out.norm() - psi.norm()).abs() < 1e-11);
    }

    #[test]
    fn spectrum_outside_bounds_is_detected() {
        let model = diag_model([40.0, -40.0]);
        let s = exp_series(SpectralBounds::new(-1.0, 1.0), 20.0, 1e-14, 1024).unwrap();
        let psi = StateVector::new(vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0)], Repr::Levels(2)).unwrap();
        let r = apply_operator_series(&s, &FrozenOperator::new(&model, 0.0), &psi);
        assert!(matches!(r, Err(Error::BoundsViolation { .. })));
    }

    #[test]
    fn shared_recurrence_matches_single_applications() {
        let model = diag_model([0.5, -1.5]);
        let b = model.spectral_range(0.0);
        let s1 = exp_series(b, 0.7, 1e-15, 512).unwrap();
        let s2 = exp_series(b, 4.0, 1e-15, 512).unwrap();
        let psi = StateVector::new(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)], Repr::Levels(2)).unwrap();
        let op = FrozenOperator::new(&model, 0.0);
        let both = apply_operator_series_multi(&[&s1, &s2], &op, &psi).unwrap();
        assert_eq!(both[0], apply_operator_series(&s1, &op, &psi).unwrap());
        assert_eq!(both[1], apply_operator_series(&s2, &op, &psi).unwrap());
    }
}
