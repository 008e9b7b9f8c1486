use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::state::Linear;

/// Roots of `P_n`, ascending: `x_i = −cos(π(i + ½)/n)`.
pub fn chebyshev_roots(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidOrder(0));
    }
    Ok((0..n).map(|i| root_cos(n, i)).collect())
}

// cos(π p / (2n)) with p reduced modulo 4n, so equal angles give equal bits
fn cos_half_pi_ratio(p: usize, n: usize) -> f64 {
    let p = p % (4 * n);
    (PI * p as f64 / (2 * n) as f64).cos()
}

// x_i = cos(θ_i) with θ_i = π(2n − 2i − 1)/(2n)
fn root_cos(n: usize, i: usize) -> f64 {
    let x = cos_half_pi_ratio(2 * n - 2 * i - 1, n);
    // the middle root of an odd order is exactly zero
    if 2 * i + 1 == n {
        0.0
    } else {
        x
    }
}

/// `P_j(x_i)` at the ascending root `i` of `P_n`, via `cos(j θ_i)`.
pub fn chebyshev_at_root(j: usize, i: usize, n: usize) -> f64 {
    let p = j * (2 * n - 2 * i - 1);
    let v = cos_half_pi_ratio(p, n);
    // cos of an odd multiple of π/2 is zero
    if (p % (4 * n)) % (2 * n) == n {
        0.0
    } else {
        v
    }
}

/// Evaluate `P_0(x) … P_{n−1}(x)` by the three-term recurrence.
pub fn chebyshev_values(x: f64, n: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(n);
    for j in 0..n {
        let v = match j {
            0 => 1.0,
            1 => x,
            _ => 2.0 * x * p[j - 1] - p[j - 2],
        };
        p.push(v);
    }
    p
}

/// Sampling times `τ_l = t_n + (Δt/2)(x_l + 1)` at the roots of `P_{N_t}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalTimeGrid {
    t_n: f64,
    dt: f64,
    roots: Vec<f64>,
    offsets: Vec<f64>,
}

impl LocalTimeGrid {
    pub fn new(t_n: f64, dt: f64, n_t: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        let roots = chebyshev_roots(n_t)?;
        let offsets = roots.iter().map(|x| 0.5 * dt * (x + 1.0)).collect();
        Ok(Self {
            t_n,
            dt,
            roots,
            offsets,
        })
    }

    pub fn t_n(&self) -> f64 {
        self.t_n
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_t(&self) -> usize {
        self.roots.len()
    }

    pub fn roots(&self) -> &[f64] {
        &self.roots
    }

    /// `τ_l − t_n`; these depend only on `(Δt, N_t)`.
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn tau(&self, l: usize) -> f64 {
        self.t_n + self.offsets[l]
    }

    pub fn taus(&self) -> Vec<f64> {
        self.offsets.iter().map(|s| self.t_n + s).collect()
    }

    /// `t̄ = 2(t − t_n)/Δt − 1`
    pub fn scaled(&self, t: f64) -> f64 {
        2.0 * (t - self.t_n) / self.dt - 1.0
    }

    pub fn midpoint(&self) -> f64 {
        self.t_n + 0.5 * self.dt
    }
}

/// Chebyshev coefficients `c_j` of a function of `center + half_width·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevSeries<T> {
    coeffs: Vec<T>,
    center: f64,
    half_width: f64,
    trunc_ratio: f64,
}

impl<T: Linear> ChebyshevSeries<T> {
    pub fn new(coeffs: Vec<T>, center: f64, half_width: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty);
        }
        Ok(Self {
            coeffs,
            center,
            half_width,
            trunc_ratio: f64::NAN,
        })
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.center, self.half_width)
    }

    /// Ratio at which the series was cut, `NaN` if it never was.
    pub fn trunc_ratio(&self) -> f64 {
        self.trunc_ratio
    }

    pub fn with_domain(mut self, center: f64, half_width: f64) -> Self {
        self.center = center;
        self.half_width = half_width;
        self
    }

    /// Keep the first `m` coefficients.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        if m == 0 || m > self.coeffs.len() {
            return Err(Error::InvalidOrder(m));
        }
        let lead = self.coeffs[0].magnitude();
        let ratio = match self.coeffs.get(m) {
            Some(c) if lead > 0.0 => c.magnitude() / lead,
            Some(_) => 0.0,
            None => f64::NAN,
        };
        Ok(Self {
            coeffs: self.coeffs[..m].to_vec(),
            center: self.center,
            half_width: self.half_width,
            trunc_ratio: ratio,
        })
    }

    pub(crate) fn set_trunc_ratio(&mut self, ratio: f64) {
        self.trunc_ratio = ratio;
    }

    /// Value at the scaled variable `x ∈ [−1, 1]` (Clenshaw).
    pub fn eval_scaled(&self, x: f64) -> T {
        let zero = self.coeffs[0].zero_like();
        let mut b1 = zero.clone();
        let mut b2 = zero;
        for c in self.coeffs.iter().skip(1).rev() {
            // b_j = c_j + 2x b_{j+1} − b_{j+2}
            let mut b = c.clone();
            b.add_scaled(2.0 * x, &b1);
            b.add_scaled(-1.0, &b2);
            b2 = b1;
            b1 = b;
        }
        let mut out = self.coeffs[0].clone();
        out.add_scaled(x, &b1);
        out.add_scaled(-1.0, &b2);
        out
    }

    /// Value at the physical variable `center + half_width·x`.
    pub fn eval(&self, y: f64) -> T {
        self.eval_scaled((y - self.center) / self.half_width)
    }
}

/// Cosine transform of samples at the ascending roots of `P_N`:
/// `c_j = ((2 − δ_{j0})/N) Σ_i s_i P_j(x_i)`, `j = 0..N−1`.
/// The domain is the scaled variable itself.
pub fn samples_to_cheb<T: Linear>(samples: &[T]) -> Result<ChebyshevSeries<T>> {
    let n = samples.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    let mut coeffs = Vec::with_capacity(n);
    for j in 0..n {
        let mut c = samples[0].zero_like();
        for (i, s) in samples.iter().enumerate() {
            let p = chebyshev_at_root(j, i, n);
            if p != 0.0 {
                c.add_scaled(p, s);
            }
        }
        c.scale_by(if j == 0 { 1.0 } else { 2.0 } / n as f64);
        coeffs.push(c);
    }
    ChebyshevSeries::new(coeffs, 0.0, 1.0)
}

/// Below this every coefficient counts as zero.
pub const ZERO_SERIES: f64 = 1e-300;

/// Smallest order `m` such that the first omitted coefficient satisfies
/// `‖c_m‖/max_j ‖c_j‖ < ε`. An isolated small coefficient inside a still
/// decaying series is skipped: the coefficient after it must also pass.
/// Fails with [`Error::IncreaseSamples`] when no `m ≤ N − 1` qualifies.
pub fn truncate<T: Linear>(series: &ChebyshevSeries<T>, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive, got {eps}"
        )));
    }
    let mags: Vec<f64> = series.coeffs().iter().map(Linear::magnitude).collect();
    let n = mags.len();
    let largest = mags.iter().cloned().fold(0.0, f64::max);
    if largest < ZERO_SERIES {
        return Ok(1);
    }
    // measured against the largest coefficient: the leading one can pass
    // through zero when the source changes sign inside the interval
    let denom = largest;
    let mut best = f64::INFINITY;
    for m in 1..n {
        let r = mags[m] / denom;
        best = best.min(r);
        let next_ok = m + 1 >= n || mags[m + 1] / denom < eps;
        if r < eps && next_ok {
            return Ok(m);
        }
    }
    Err(Error::IncreaseSamples {
        n_samples: n,
        ratio: best,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::C64;

    #[test]
    fn low_order_roots() {
        assert_eq!(chebyshev_roots(1).unwrap(), vec![0.0]);
        let r = chebyshev_roots(2).unwrap();
        let h = 0.5f64.sqrt();
        assert!((r[0] + h).abs() < 2e-16 && (r[1] - h).abs() < 2e-16);
        assert!(matches!(chebyshev_roots(0), Err(Error::InvalidOrder(0))));
    }

    #[test]
    fn roots_are_zeros_of_the_polynomial() {
        for n in [3usize, 8, 13, 64] {
            let r = chebyshev_roots(n).unwrap();
            assert!(r.windows(2).all(|w| w[0] < w[1]));
            for x in r {
                assert!(x.abs() < 1.0);
                assert!(chebyshev_values(x, n + 1)[n].abs() < 1e-14 * n as f64);
            }
        }
    }

    #[test]
    fn values_at_roots_agree_with_recurrence() {
        let n = 17;
        let r = chebyshev_roots(n).unwrap();
        for (i, &x) in r.iter().enumerate() {
            let p = chebyshev_values(x, 40);
            for (j, pj) in p.iter().enumerate() {
                assert!((chebyshev_at_root(j, i, n) - pj).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn local_grid_maps_roots_inside_the_step() {
        let g = LocalTimeGrid::new(100.0, 10.0, 6).unwrap();
        for (l, tau) in g.taus().into_iter().enumerate() {
            assert!(tau > 100.0 && tau < 110.0);
            assert!((g.scaled(tau) - g.roots()[l]).abs() < 1e-14);
        }
        // offsets do not depend on where the step starts
        let h = LocalTimeGrid::new(7.3e3, 10.0, 6).unwrap();
        assert_eq!(g.offsets(), h.offsets());
    }

    #[test]
    fn cubic_has_known_coefficients() {
        let x = chebyshev_roots(4).unwrap();
        let s: Vec<f64> = x.iter().map(|x| x * x * x).collect();
        let c = samples_to_cheb(&s).unwrap();
        let want = [0.0, 0.75, 0.0, 0.25];
        for (a, b) in c.coeffs().iter().zip(want) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_and_linear_vector_samples() {
        let v = vec![C64::new(1.0, -2.0), C64::new(0.5, 0.0)];
        let x = chebyshev_roots(6).unwrap();
        let constant = vec![v.clone(); 6];
        let c = samples_to_cheb(&constant).unwrap();
        assert!((c.coeffs()[0][0] - v[0]).norm() < 1e-15);
        assert!(c.coeffs()[1..].iter().all(|c| c.magnitude() < 1e-15));
        let linear: Vec<Vec<C64>> = x.iter().map(|&x| v.iter().map(|z| z * x).collect()).collect();
        let c = samples_to_cheb(&linear).unwrap();
        for (j, cj) in c.coeffs().iter().enumerate() {
            let target = if j == 1 { 1.0 } else { 0.0 };
            assert!((cj[1] - v[1] * target).norm() < 1e-15);
        }
        assert!(samples_to_cheb::<f64>(&[]).is_err());
    }

    #[test]
    fn truncation_examples() {
        let c = ChebyshevSeries::new(vec![1.0, 1e-3, 1e-8, 1e-15, 1e-17, 0.0], 0.0, 1.0).unwrap();
        assert_eq!(truncate(&c, 1e-12).unwrap(), 3);
        let constant = samples_to_cheb(&[2.5; 8]).unwrap();
        assert_eq!(truncate(&constant, 1e-14).unwrap(), 1);
        let zero = ChebyshevSeries::new(vec![0.0; 5], 0.0, 1.0).unwrap();
        assert_eq!(truncate(&zero, 1e-3).unwrap(), 1);
        let slow = ChebyshevSeries::new(vec![1.0, 0.5, 0.25, 0.125], 0.0, 1.0).unwrap();
        assert!(matches!(
            truncate(&slow, 1e-3),
            Err(Error::IncreaseSamples { n_samples: 4, .. })
        ));
    }

    #[test]
    fn isolated_zero_does_not_cut_the_series() {
        let c = ChebyshevSeries::new(vec![1.0, 0.0, 0.3, 1e-20, 1e-20], 0.0, 1.0).unwrap();
        assert_eq!(truncate(&c, 1e-12).unwrap(), 3);
    }

    #[test]
    fn clenshaw_matches_direct_sum() {
        let c = ChebyshevSeries::new(vec![0.3, -1.0, 0.25, 2.0, -0.5], 2.0, 3.0).unwrap();
        for &y in &[-1.0, 0.0, 2.0, 4.5, 5.0] {
            let x = (y - 2.0) / 3.0;
            let p = chebyshev_values(x, 5);
            let direct: f64 = c.coeffs().iter().zip(&p).map(|(a, b)| a * b).sum();
            assert!((c.eval(y) - direct).abs() < 1e-14);
        }
    }
}
