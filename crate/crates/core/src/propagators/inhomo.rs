use std::collections::hash_map::Entry;
use std::collections::HashMap;

use crate::cheby::{apply_series_slices, inverse_factorials, scalar_func_series, ChebyshevSeries, FrozenOperator};
use crate::error::{Error, Result};
use crate::hamiltonian::SpectralBounds;
use crate::state::{StateVector, C64};

/// Cap on the terms of the small-argument expansion of `F_m`.
const TAIL_TERMS: usize = 200;

/// `f_m(x; s) = (−ix)^{−m} (e^{−ixs} − Σ_{j<m} (−ixs)^j/j!)`.
///
/// For `|xs|` below `max(½, m)` the direct form loses up to `m!/|xs|^m` in
/// relative accuracy, so the remainder series
/// `Σ_{a≥0} (−ix)^a s^{a+m}/(a+m)!` is summed instead.
pub fn fm_scalar(m: usize, x: f64, s: f64) -> C64 {
    let z = x * s;
    let v = if z.abs() < (m as f64).max(0.5) {
        fm_tail(m, z)
    } else {
        fm_direct(m, z)
    };
    v * s.powi(m as i32)
}

// Σ_a (−iz)^a/(a+m)!, free of cancellation for small |z|
fn fm_tail(m: usize, z: f64) -> C64 {
    let mi = C64::new(0.0, -1.0);
    let mut term = C64::new(inverse_factorials(m + 1)[m], 0.0);
    let mut sum = term;
    for a in 0..TAIL_TERMS {
        term *= mi * z / (a + m + 1) as f64;
        sum += term;
        if term.norm() <= 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

// (e^{−iz} − Σ_{j<m} (−iz)^j/j!) / (−iz)^m
fn fm_direct(m: usize, z: f64) -> C64 {
    let iz = C64::new(0.0, -z);
    let mut partial = C64::new(0.0, 0.0);
    let mut term = C64::new(1.0, 0.0);
    for j in 0..m {
        partial += term;
        term *= iz / (j + 1) as f64;
    }
    (C64::from_polar(1.0, -z) - partial) / iz.powu(m as u32)
}

/// Series of `F_m(·; s)` keyed by `(m, s, bounds)` bit patterns.
#[derive(Debug, Default)]
pub(crate) struct FmCache {
    map: HashMap<(usize, u64, u64, u64), ChebyshevSeries<C64>>,
}

const CACHE_LIMIT: usize = 4096;

impl FmCache {
    pub(crate) fn get(
        &mut self,
        m: usize,
        s: f64,
        bounds: SpectralBounds,
        eps: f64,
        n_max: usize,
    ) -> Result<&ChebyshevSeries<C64>> {
        let key = (m, s.to_bits(), bounds.e_min.to_bits(), bounds.e_max.to_bits());
        if self.map.len() >= CACHE_LIMIT && !self.map.contains_key(&key) {
            self.map.clear();
        }
        match self.map.entry(key) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(scalar_func_series(|x| fm_scalar(m, x, s), bounds, eps, n_max)?)),
        }
    }
}

/// `λ^{(0)} = ψ`, `λ^{(j)} = −iH λ^{(j−1)} + Φ^{(j−1)}` for `j = 1..=m`.
pub(crate) fn lambdas(op: &FrozenOperator<'_>, psi: &[C64], taylor: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let m = taylor.len();
    let mut out = Vec::with_capacity(m + 1);
    out.push(psi.to_vec());
    let mut buf = vec![C64::new(0.0, 0.0); psi.len()];
    for phi in taylor {
        op.apply(out.last().unwrap(), &mut buf);
        let next: Vec<C64> = buf.iter().zip(phi).map(|(h, p)| C64::new(h.im, -h.re) + p).collect();
        out.push(next);
    }
    out
}

/// `ψ(t_n + s) = Σ_{j<m} s^j/j! λ^{(j)} + F_m(H; s) λ^{(m)}` for every `s`
/// in `offsets`. Returns the states and the longest `F_m` series used.
pub(crate) fn evaluate_formal_solution(
    op: &FrozenOperator<'_>,
    bounds: SpectralBounds,
    lambdas: &[Vec<C64>],
    offsets: &[f64],
    eps: f64,
    n_max: usize,
    cache: &mut FmCache,
) -> Result<(Vec<Vec<C64>>, usize)> {
    let m = lambdas.len() - 1;
    let mut coeffs: Vec<Vec<C64>> = Vec::with_capacity(offsets.len());
    let mut domain = (bounds.center(), bounds.half_width());
    let mut n_cheby = 0;
    for &s in offsets {
        let series = cache.get(m, s, bounds, eps, n_max)?;
        domain = series.domain();
        n_cheby = n_cheby.max(series.len());
        coeffs.push(series.coeffs().to_vec());
    }
    let refs: Vec<&[C64]> = coeffs.iter().map(|c| c.as_slice()).collect();
    let mut states = apply_series_slices(&refs, domain, op, &lambdas[m])?;
    let inv_fact = inverse_factorials(m.max(1));
    for (state, &s) in states.iter_mut().zip(offsets) {
        let mut w = 1.0;
        for (j, lam) in lambdas[..m].iter().enumerate() {
            let weight = w * inv_fact[j];
            for (o, l) in state.iter_mut().zip(lam) {
                *o += l * weight;
            }
            w *= s;
        }
    }
    Ok((states, n_cheby))
}

/// One step of the inhomogeneous equation `iψ' = H ψ + i Φ(t)` with `Φ`
/// given by its Taylor coefficients `Φ^{(j)}` at the start of the step.
pub fn inhomo_step(
    op: &FrozenOperator<'_>,
    psi: &StateVector,
    taylor: &[StateVector],
    dt: f64,
    eps: f64,
    n_cheby_cap: usize,
) -> Result<StateVector> {
    let repr = op.model().repr();
    psi.check_repr(repr)?;
    for t in taylor {
        t.check_repr(repr)?;
    }
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let taylor: Vec<Vec<C64>> = taylor.iter().map(|t| t.amplitudes().to_vec()).collect();
    let lam = lambdas(op, psi.amplitudes(), &taylor);
    let mut cache = FmCache::default();
    let bounds = op.model().bounds();
    let (mut states, _) = evaluate_formal_solution(op, bounds, &lam, &[dt], eps, n_cheby_cap, &mut cache)?;
    StateVector::new(states.pop().unwrap_or_default(), repr)
}
