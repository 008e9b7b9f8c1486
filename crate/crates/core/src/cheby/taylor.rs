use crate::error::{Error, Result};
use crate::state::Linear;

/// Largest order accepted by the Chebyshev to monomial conversion.
pub const MAX_TAYLOR_ORDER: usize = 60;

/// Lower-triangular table with `P_j(x) = Σ_k C[j][k] x^k / k!`, `j < m`.
pub fn monomial_table(m: usize) -> Result<Vec<Vec<f64>>> {
    if m == 0 {
        return Err(Error::InvalidOrder(0));
    }
    if m > MAX_TAYLOR_ORDER {
        return Err(Error::OrderTooLarge {
            order: m,
            limit: MAX_TAYLOR_ORDER,
        });
    }
    let mut c: Vec<Vec<f64>> = Vec::with_capacity(m);
    c.push(vec![1.0]);
    if m > 1 {
        c.push(vec![0.0, 1.0]);
    }
    for j in 1..m.saturating_sub(1) {
        // P_{j+1} = 2x P_j − P_{j−1}; x·x^{k−1}/(k−1)! = k·x^k/k!
        let mut row = vec![0.0; j + 2];
        for (k, r) in row.iter_mut().enumerate() {
            let up = if k >= 1 && k - 1 <= j {
                2.0 * k as f64 * c[j][k - 1]
            } else {
                0.0
            };
            let down = c[j - 1].get(k).copied().unwrap_or(0.0);
            *r = up - down;
        }
        c.push(row);
    }
    Ok(c)
}

/// Converts Chebyshev coefficients `Φ̄_j` of a function on `[0, t]` (scaled
/// variable `2τ/t − 1`) into Taylor coefficients `Φ^{(k)}` at `τ = 0`:
/// `Φ(τ) = Σ_k τ^k/k! Φ^{(k)}`. Uses the first `m` coefficients.
pub fn cheb_to_taylor<T: Linear>(cheb: &[T], m: usize, t: f64) -> Result<Vec<T>> {
    if m == 0 || m > cheb.len() {
        return Err(Error::InvalidOrder(m));
    }
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "interval length must be positive, got {t}"
        )));
    }
    let table = monomial_table(m)?;
    let inv_fact = inverse_factorials(m);
    // y_k = (t/2)^k Φ^{(k)} solves  Σ_{j≥k} C_{j,k} Φ̄_j = Σ_{j'≥k} y_{j'}/(j'−k)!
    let mut y: Vec<T> = Vec::with_capacity(m);
    for k in (0..m).rev() {
        let mut acc = cheb[0].zero_like();
        for j in k..m {
            acc.add_scaled(table[j][k], &cheb[j]);
        }
        for (idx, yj) in y.iter().enumerate() {
            // y is stored from the top order down: idx 0 ↔ order m−1
            let jp = m - 1 - idx;
            acc.add_scaled(-inv_fact[jp - k], yj);
        }
        y.push(acc);
    }
    y.reverse();
    let scale = 2.0 / t;
    let mut s = 1.0;
    for yk in y.iter_mut() {
        yk.scale_by(s);
        s *= scale;
    }
    Ok(y)
}

/// `Φ(τ) = Σ_k τ^k/k! Φ^{(k)}` evaluated by Horner's rule.
pub fn eval_taylor<T: Linear>(taylor: &[T], tau: f64) -> T {
    let m = taylor.len();
    let mut acc = taylor[m - 1].clone();
    for k in (0..m - 1).rev() {
        // acc ← Φ^{(k)} + τ/(k+1) acc
        acc.scale_by(tau / (k + 1) as f64);
        acc.add_scaled(1.0, &taylor[k]);
    }
    acc
}

pub(crate) fn inverse_factorials(n: usize) -> Vec<f64> {
    let mut f = Vec::with_capacity(n);
    let mut v = 1.0;
    for k in 0..n {
        if k > 0 {
            v /= k as f64;
        }
        f.push(v);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheby::series::{chebyshev_roots, chebyshev_values, samples_to_cheb};
    use crate::state::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn factorial(k: usize) -> f64 {
        (1..=k).map(|i| i as f64).product()
    }

    #[test]
    fn second_row() {
        let c = monomial_table(3).unwrap();
        assert_eq!(c[2], vec![-1.0, 0.0, 4.0]);
    }

    #[test]
    fn diagonal_and_row_sums() {
        let c = monomial_table(40).unwrap();
        for j in 1..40 {
            let lead = 2f64.powi(j as i32 - 1) * factorial(j);
            assert!((c[j][j] - lead).abs() <= 1e-15 * lead);
        }
        for (j, row) in c.iter().enumerate() {
            // P_j(1) = 1; the terms cancel heavily, so compare against their size
            let s: f64 = row.iter().enumerate().map(|(k, v)| v / factorial(k)).sum();
            let size: f64 = row.iter().enumerate().map(|(k, v)| (v / factorial(k)).abs()).sum();
            assert!((s - 1.0).abs() < 1e-14 * size, "row {j}: {s}");
        }
    }

    #[test]
    fn rows_reproduce_polynomials() {
        let c = monomial_table(41).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let x: f64 = rng.gen_range(-1.0..1.0);
            let p = chebyshev_values(x, 41);
            for j in 0..=40 {
                let v: f64 = c[j]
                    .iter()
                    .enumerate()
                    .map(|(k, ck)| ck * x.powi(k as i32) / factorial(k))
                    .sum();
                // P_j is bounded by one, so measure against the largest term
                let scale = c[j]
                    .iter()
                    .enumerate()
                    .map(|(k, ck)| (ck * x.powi(k as i32) / factorial(k)).abs())
                    .fold(1.0, f64::max);
                assert!((v - p[j]).abs() <= 1e-9 * scale.max(1.0), "j={j} x={x}");
            }
        }
    }

    #[test]
    fn order_limits() {
        assert!(matches!(monomial_table(0), Err(Error::InvalidOrder(0))));
        assert!(monomial_table(60).is_ok());
        assert!(matches!(monomial_table(61), Err(Error::OrderTooLarge { .. })));
        assert!(cheb_to_taylor(&[1.0; 70], 61, 1.0).is_err());
    }

    #[test]
    fn first_orders_by_hand() {
        let v = vec![C64::new(0.3, 1.0), C64::new(-2.0, 0.1)];
        let w = vec![C64::new(1.5, 0.0), C64::new(0.0, -0.7)];
        let one = cheb_to_taylor(&[v.clone()], 1, 3.0).unwrap();
        assert_eq!(one[0], v);
        let t = 3.0;
        let two = cheb_to_taylor(&[v.clone(), w.clone()], 2, t).unwrap();
        for i in 0..2 {
            assert!((two[1][i] - w[i] * (2.0 / t)).norm() < 1e-15);
            assert!((two[0][i] - (v[i] - w[i])).norm() < 1e-15);
        }
    }

    #[test]
    fn taylor_round_trip() {
        // The monomial basis amplifies errors like (1+√2)^m, so the data decay
        // geometrically as the coefficients of a smooth source would.
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &m in &[1usize, 2, 5, 10, 20, 30] {
            let t = 0.7;
            let c: Vec<C64> = (0..m)
                .map(|j| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.3f64.powi(j as i32))
                .collect();
            let taylor = cheb_to_taylor(&c, m, t).unwrap();
            let roots = chebyshev_roots(m).unwrap();
            let samples: Vec<C64> = roots
                .iter()
                .map(|x| eval_taylor(&taylor, 0.5 * t * (x + 1.0)))
                .collect();
            let back = samples_to_cheb(&samples).unwrap();
            let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (a, b) in back.coeffs().iter().zip(&c) {
                assert!((a - b).norm() <= 1e-10 * scale, "m={m}");
            }
        }
    }
}
