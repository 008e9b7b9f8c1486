//! Property checks of the numerical core with pinned tolerances.

use itoprop::cheby::{cheb_to_taylor, eval_taylor, monomial_table, samples_to_cheb, FrozenOperator, LocalTimeGrid};
use itoprop::models::quadrature::gauss_legendre;
use itoprop::models::OscillatorSpec;
use itoprop::propagators::{
    inhomo_step, ito_step, propagate, rk4_step, split_step, standard_cheb_step, ItoConfig, ItoStepper, Stepper,
};
use itoprop::{Field, HamiltonianModel, Pulse, Repr, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

type BaselineStep = fn(&HamiltonianModel, &StateVector, f64, f64) -> itoprop::Result<StateVector>;

#[derive(Debug, Clone, Copy, Default)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Perturbs one entry of the Chebyshev-to-monomial table before the
    /// row-sum check, which must then fail.
    pub corrupt_c_table: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `value ≤ tolerance`
    AtMost,
    /// `|value − target| ≤ tolerance`
    Near { target_milli: i64 },
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

fn at_most(name: &'static str, value: f64, tolerance: f64, detail: String) -> Check {
    Check {
        name,
        value,
        tolerance,
        bound: Bound::AtMost,
        passed: value <= tolerance,
        detail,
    }
}

fn near(name: &'static str, value: f64, target: f64, tolerance: f64, detail: String) -> Check {
    Check {
        name,
        value,
        tolerance,
        bound: Bound::Near {
            target_milli: (target * 1000.0).round() as i64,
        },
        passed: (value - target).abs() <= tolerance,
        detail,
    }
}

fn failed(name: &'static str, tolerance: f64, bound: Bound, err: impl ToString) -> Check {
    Check {
        name,
        value: f64::NAN,
        tolerance,
        bound,
        passed: false,
        detail: err.to_string(),
    }
}

pub fn validate(opts: ValidateOptions) -> ValidationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let checks = vec![
        quadrature(),
        row_sums(opts.corrupt_c_table),
        round_trip(&mut rng),
        zero_inhomogeneity(&mut rng),
        first_order_source(&mut rng),
        norm_conservation(),
        sample_doubling(),
        time_reversal(),
        order_slope_check("rk4_order", 4.0),
        order_slope_check("split_order", 2.0),
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    ValidationReport {
        seed: opts.seed,
        checks,
        all_passed,
    }
}

fn quadrature() -> Check {
    let mut worst: f64 = 0.0;
    for n in 1..=24 {
        let (x, w) = gauss_legendre(n);
        for k in 0..(2 * n) as i32 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let want = if k % 2 == 1 { 0.0 } else { 2.0 / (k + 1) as f64 };
            worst = worst.max((got - want).abs());
        }
    }
    at_most(
        "quadrature_exactness",
        worst,
        1e-13,
        "Gauss-Legendre n ≤ 24 on x^k, k < 2n".into(),
    )
}

// P_j(1) = 1, so every row of the table sums to one after the 1/k! scaling
fn row_sums(corrupt: bool) -> Check {
    let name = "c_table_row_sums";
    let mut table = match monomial_table(30) {
        Ok(t) => t,
        Err(e) => return failed(name, 1e-14, Bound::AtMost, e),
    };
    if corrupt {
        table[7][3] += 1.0;
    }
    let inv: Vec<f64> = (0..30)
        .scan(1.0, |f, k| {
            let v = 1.0 / *f;
            *f *= (k + 1) as f64;
            Some(v)
        })
        .collect();
    let worst = table
        .iter()
        .map(|row| {
            let terms: Vec<f64> = row.iter().enumerate().map(|(k, c)| c * inv[k]).collect();
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            (terms.iter().sum::<f64>() - 1.0).abs() / scale.max(1.0)
        })
        .fold(0.0, f64::max);
    at_most(
        name,
        worst,
        1e-14,
        "|Σ_k C[j][k]/k! − 1| relative to Σ|terms|, j < 30".into(),
    )
}

fn round_trip(rng: &mut ChaCha8Rng) -> Check {
    let name = "taylor_round_trip";
    let mut worst: f64 = 0.0;
    for _ in 0..64 {
        let m = rng.gen_range(1..=30);
        let t = 10f64.powf(rng.gen_range(-2.0..2.0));
        let c: Vec<C64> = (0..m)
            .map(|j| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * 0.3f64.powi(j as i32))
            .collect();
        let result = cheb_to_taylor(&c, m, t).and_then(|taylor| {
            let grid = LocalTimeGrid::new(0.0, t, m)?;
            let samples: Vec<C64> = grid.offsets().iter().map(|&tau| eval_taylor(&taylor, tau)).collect();
            samples_to_cheb(&samples)
        });
        let back = match result {
            Ok(b) => b,
            Err(e) => return failed(name, 1e-10, Bound::AtMost, e),
        };
        let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in back.coeffs().iter().zip(&c) {
            worst = worst.max((a - b).norm() / scale);
        }
    }
    at_most(
        name,
        worst,
        1e-10,
        "Chebyshev → Taylor → Chebyshev, m ≤ 30, decay 0.3^j".into(),
    )
}

fn random_state(rng: &mut ChaCha8Rng, repr: Repr) -> StateVector {
    let amps = (0..repr.len())
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let mut psi = StateVector::new(amps, repr).expect("length matches");
    let n = psi.norm();
    psi.scale(C64::new(1.0 / n, 0.0));
    psi
}

fn chain(energies: &[f64], field: Field) -> itoprop::Result<HamiltonianModel> {
    let n = energies.len();
    let z = C64::new(0.0, 0.0);
    let mut h0 = vec![z; n * n];
    let mut mu = vec![z; n * n];
    for (i, e) in energies.iter().enumerate() {
        h0[i * n + i] = C64::new(*e, 0.0);
        if i + 1 < n {
            mu[i * n + i + 1] = C64::new(0.3, 0.0);
            mu[(i + 1) * n + i] = C64::new(0.3, 0.0);
        }
    }
    HamiltonianModel::levels(n, h0, mu, field)
}

fn zero_inhomogeneity(rng: &mut ChaCha8Rng) -> Check {
    let name = "zero_inhomogeneity_equivalence";
    let run = |rng: &mut ChaCha8Rng| -> itoprop::Result<f64> {
        let model = chain(&[-1.0, 0.2, 0.7, 1.5], Field::new(vec![Pulse::constant(0.4)]))?;
        let psi = random_state(rng, model.repr());
        let mut worst: f64 = 0.0;
        for dt in [0.01, 0.1, 0.5] {
            let (ito, _) = ito_step(&model, &psi, 1.0, &ItoConfig::new(dt, 6, 1e-14))?;
            let std = standard_cheb_step(&model, &psi, 1.0, dt, 1e-14, 4096)?;
            worst = worst.max(ito.distance(&std)?);
        }
        Ok(worst)
    };
    match run(rng) {
        Ok(v) => at_most(name, v, 1e-13, "constant field: ITO against one standard step".into()),
        Err(e) => failed(name, 1e-13, Bound::AtMost, e),
    }
}

fn first_order_source(rng: &mut ChaCha8Rng) -> Check {
    let name = "f1_closed_form";
    let energies = [-2.0, -0.3, 0.0, 0.8, 3.1];
    let run = |rng: &mut ChaCha8Rng| -> itoprop::Result<f64> {
        let model = chain(&energies, Field::zero())?;
        let op = FrozenOperator::new(&model, 0.0);
        let psi = random_state(rng, model.repr());
        let phi = random_state(rng, model.repr());
        let mut worst: f64 = 0.0;
        for t in [0.05, 0.7, 2.0] {
            let got = inhomo_step(&op, &psi, std::slice::from_ref(&phi), t, 1e-15, 4096)?;
            for (i, &e) in energies.iter().enumerate() {
                // e^{−iEt}ψ + (1 − e^{−iEt})/(iE) Φ, written without cancellation
                let f1 = if e == 0.0 {
                    C64::new(t, 0.0)
                } else {
                    C64::from_polar(2.0 * (0.5 * e * t).sin() / e, -0.5 * e * t)
                };
                let want = C64::from_polar(1.0, -e * t) * psi.amplitudes()[i] + f1 * phi.amplitudes()[i];
                worst = worst.max((got.amplitudes()[i] - want).norm());
            }
        }
        Ok(worst)
    };
    match run(rng) {
        Ok(v) => at_most(name, v, 1e-12, "diagonal H, constant source".into()),
        Err(e) => failed(name, 1e-12, Bound::AtMost, e),
    }
}

fn oscillator() -> itoprop::Result<(OscillatorSpec, HamiltonianModel, StateVector)> {
    let spec = OscillatorSpec::new(1.0, 0.17);
    Ok((spec, spec.build()?, spec.ground_state()?))
}

fn norm_conservation() -> Check {
    let name = "norm_conservation";
    let run = || -> itoprop::Result<f64> {
        let (_, model, psi) = oscillator()?;
        let mut worst: f64 = 0.0;
        for eps in [1e-8, 1e-11, 1e-14] {
            let mut stepper = ItoStepper::new(ItoConfig::new(0.05, 8, eps));
            let mut cur = psi.clone();
            for n in 0..40 {
                let before = cur.norm_sqr();
                let (next, _) = stepper.step(&model, &cur, 30.0 + 0.05 * n as f64, 0.05)?;
                worst = worst.max((next.norm_sqr() - before).abs() / eps.max(f64::EPSILON));
                cur = next;
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(v) => at_most(name, v, 10.0, "per-step norm change in units of ε".into()),
        Err(e) => failed(name, 10.0, Bound::AtMost, e),
    }
}

fn sample_doubling() -> Check {
    let name = "n_t_doubling";
    let run = || -> itoprop::Result<f64> {
        let (_, model, psi) = oscillator()?;
        let pinned = |dt, n_t, eps| ItoConfig {
            n_t_max: n_t,
            ..ItoConfig::new(dt, n_t, eps)
        };
        let mut worst: f64 = 0.0;
        for (dt, eps) in [(0.02, 1e-12), (0.1, 1e-10), (0.1, 1e-13)] {
            for t in [10.0, 50.0] {
                let (a, _) = ito_step(&model, &psi, t, &pinned(dt, 16, eps))?;
                let (b, _) = ito_step(&model, &psi, t, &pinned(dt, 32, eps))?;
                worst = worst.max(a.distance(&b)? / eps);
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(v) => at_most(name, v, 10.0, "‖ψ(N_t) − ψ(2N_t)‖ in units of ε".into()),
        Err(e) => failed(name, 10.0, Bound::AtMost, e),
    }
}

fn time_reversal() -> Check {
    let name = "time_reversal";
    let eps = 1e-12;
    let run = || -> itoprop::Result<f64> {
        let (spec, model, psi) = oscillator()?;
        let total = spec.t_final;
        let reversed = model.with_field(model.field().time_reversed(total));
        let conj = |s: &StateVector| StateVector::new(s.amplitudes().iter().map(|z| z.conj()).collect(), s.repr());
        let mut worst: f64 = 0.0;
        for t in [20.0, 47.3] {
            let cfg = ItoConfig::new(0.1, 8, eps);
            let (fwd, _) = ito_step(&model, &psi, t, &cfg)?;
            let (back, _) = ito_step(&reversed, &conj(&fwd)?, total - t - 0.1, &cfg)?;
            worst = worst.max(1.0 - conj(&back)?.inner(&psi)?.norm_sqr());
        }
        Ok(worst / eps)
    };
    match run() {
        Ok(v) => at_most(
            name,
            v,
            100.0,
            "infidelity of forward then reversed step, units of ε".into(),
        ),
        Err(e) => failed(name, 100.0, Bound::AtMost, e),
    }
}

/// Least-squares slope of `ln error` against `ln dt`.
pub fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let num: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    num / den
}

fn order_slope_check(name: &'static str, target: f64) -> Check {
    let run = || -> itoprop::Result<f64> {
        let spec = OscillatorSpec::new(1.0, 0.5);
        let model = spec.build()?;
        let psi = spec.ground_state()?;
        let t_end = 2.0;
        let mut ito = ItoStepper::new(ItoConfig::new(0.01, 8, 1e-14));
        let reference = propagate(&model, &psi, 0.0, t_end, 0.01, &mut ito, usize::MAX, |_, _, _| {})?.state;
        let (dts, step): (&[f64], BaselineStep) = if target > 3.0 {
            (&[0.01, 0.005, 0.0025], rk4_step)
        } else {
            (&[0.02, 0.01, 0.005], split_step)
        };
        let mut pts = Vec::new();
        for &dt in dts {
            let n = (t_end / dt).round() as usize;
            let mut cur = psi.clone();
            for i in 0..n {
                cur = step(&model, &cur, i as f64 * dt, dt)?;
            }
            pts.push((dt.ln(), cur.distance(&reference)?.ln()));
        }
        Ok(fit_slope(&pts))
    };
    match run() {
        Ok(v) => near(name, v, target, 0.3, format!("log-log error slope, expected {target}")),
        Err(e) => failed(
            name,
            0.3,
            Bound::Near {
                target_milli: (target * 1000.0) as i64,
            },
            e,
        ),
    }
}
