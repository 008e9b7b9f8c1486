use itoprop::cheby::{
    cheb_to_taylor, chebyshev_at_root, chebyshev_roots, chebyshev_values, eval_taylor, monomial_table, samples_to_cheb,
    truncate, ChebyshevSeries, LocalTimeGrid,
};
use itoprop::models::quadrature::gauss_legendre;
use itoprop::C64;
use proptest::prelude::*;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

// P_j(x) = cos(j arccos x), an oracle independent of the recurrence
fn cheb_trig(j: usize, x: f64) -> f64 {
    (j as f64 * x.clamp(-1.0, 1.0).acos()).cos()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // sampling a degree < N polynomial at the N roots recovers its coefficients
    #[test]
    fn cosine_transform_is_exact_on_polynomials(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..40),
        extra in 0usize..8,
    ) {
        let n = coeffs.len() + extra;
        let roots = chebyshev_roots(n).unwrap();
        let samples: Vec<f64> = roots
            .iter()
            .map(|&x| coeffs.iter().enumerate().map(|(j, c)| c * cheb_trig(j, x)).sum())
            .collect();
        let series = samples_to_cheb(&samples).unwrap();
        for (j, got) in series.coeffs().iter().enumerate() {
            let want = coeffs.get(j).copied().unwrap_or(0.0);
            prop_assert!((got - want).abs() <= 1e-13, "j={} got={} want={}", j, got, want);
        }
    }

    #[test]
    fn gauss_legendre_is_exact_to_degree_2n_minus_1(n in 1usize..24, k_frac in 0.0f64..1.0) {
        let (x, w) = gauss_legendre(n);
        let k = ((2 * n - 1) as f64 * k_frac).floor() as i32;
        let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
        let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
        prop_assert!((got - want).abs() <= 1e-13, "n={} k={} got={}", n, k, got);
    }

    #[test]
    fn discrete_orthogonality_at_roots(n in 1usize..40, a in 0usize..40, b in 0usize..40) {
        prop_assume!(a < n && b < n);
        let s: f64 = (0..n).map(|i| chebyshev_at_root(a, i, n) * chebyshev_at_root(b, i, n)).sum();
        let want = match (a, b) {
            (0, 0) => n as f64,
            _ if a == b => n as f64 / 2.0,
            _ => 0.0,
        };
        prop_assert!((s - want).abs() <= 1e-12 * n as f64);
    }

    #[test]
    fn recurrence_matches_trigonometric_form(x in -1.0f64..1.0) {
        let p = chebyshev_values(x, 50);
        for (j, v) in p.iter().enumerate() {
            prop_assert!((v - cheb_trig(j, x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn clenshaw_agrees_with_direct_sum(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..30),
        center in -5.0f64..5.0,
        half in 0.1f64..10.0,
        u in -1.0f64..1.0,
    ) {
        let series = ChebyshevSeries::new(coeffs.clone(), center, half).unwrap();
        let y = center + half * u;
        let direct: f64 = coeffs.iter().enumerate().map(|(j, c)| c * cheb_trig(j, u)).sum();
        let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();
        prop_assert!((series.eval(y) - direct).abs() <= 1e-13 * scale.max(1.0));
    }

    // Chebyshev → Taylor → Chebyshev on smooth (geometrically decaying) data
    #[test]
    fn taylor_round_trip_recovers_coefficients(
        m in 1usize..=30,
        seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 30),
        t in 0.01f64..100.0,
    ) {
        let c: Vec<C64> = seed[..m]
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| C64::new(a, b) * 0.3f64.powi(j as i32))
            .collect();
        let taylor = cheb_to_taylor(&c, m, t).unwrap();
        let grid = LocalTimeGrid::new(0.0, t, m).unwrap();
        let samples: Vec<C64> = grid.offsets().iter().map(|&tau| eval_taylor(&taylor, tau)).collect();
        let back = samples_to_cheb(&samples).unwrap();
        let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in back.coeffs().iter().zip(&c) {
            prop_assert!((a - b).norm() <= 1e-10 * scale, "m={} t={}", m, t);
        }
    }

    #[test]
    fn truncation_order_is_minimal(decay in 0.05f64..0.6, eps_exp in 3i32..14) {
        let eps = 10f64.powi(-eps_exp);
        let c: Vec<f64> = (0..60).map(|j| decay.powi(j)).collect();
        let series = ChebyshevSeries::new(c.clone(), 0.0, 1.0).unwrap();
        let m = truncate(&series, eps).unwrap();
        prop_assert!(c[m] < eps);
        prop_assert!(c[m - 1] >= eps);
    }
}

#[test]
fn monomial_rows_match_power_series_of_cosine_form() {
    let table = monomial_table(25).unwrap();
    for x in [-0.9f64, -0.3, 0.0, 0.4, 0.95] {
        for (j, row) in table.iter().enumerate() {
            let terms: Vec<f64> = row
                .iter()
                .enumerate()
                .map(|(k, c)| c * x.powi(k as i32) / factorial(k))
                .collect();
            let v: f64 = terms.iter().sum();
            let size: f64 = terms.iter().map(|t| t.abs()).sum();
            assert!((v - cheb_trig(j, x)).abs() <= 1e-14 * size.max(1.0), "j={j} x={x}");
        }
    }
}

#[test]
fn taylor_coefficients_of_a_known_polynomial() {
    // Φ(τ) = 1 + 2τ + 3τ² on [0, t]: Φ' = 2, Φ'' = 6
    let t = 0.8;
    let roots = chebyshev_roots(3).unwrap();
    let samples: Vec<f64> = roots
        .iter()
        .map(|x| {
            let tau = 0.5 * t * (x + 1.0);
            1.0 + 2.0 * tau + 3.0 * tau * tau
        })
        .collect();
    let cheb = samples_to_cheb(&samples).unwrap();
    let taylor = cheb_to_taylor(cheb.coeffs(), 3, t).unwrap();
    for (got, want) in taylor.iter().zip([1.0, 2.0, 6.0]) {
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
    }
}
