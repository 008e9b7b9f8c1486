use itoprop::cheby::FrozenOperator;
use itoprop::models::{OscillatorSpec, TwoLevelSpec};
use itoprop::propagators::{
    inhomo_step, ito_step, propagate, rk4_step, split_step, standard_cheb_step, ItoConfig, ItoStepper, Stepper,
};
use itoprop::{Error, Field, HamiltonianModel, Pulse, Repr, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_state(rng: &mut ChaCha8Rng, repr: Repr) -> StateVector {
    let n = repr.len();
    let mut psi = StateVector::new(
        (0..n)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
        repr,
    )
    .unwrap();
    let norm = psi.norm();
    psi.scale(c(1.0 / norm, 0.0));
    psi
}

fn diagonal(energies: &[f64], field: Field) -> HamiltonianModel {
    let n = energies.len();
    let mut h0 = vec![c(0.0, 0.0); n * n];
    let mut mu = vec![c(0.0, 0.0); n * n];
    for (i, e) in energies.iter().enumerate() {
        h0[i * n + i] = c(*e, 0.0);
        if i + 1 < n {
            mu[i * n + i + 1] = c(0.3, 0.0);
            mu[(i + 1) * n + i] = c(0.3, 0.0);
        }
    }
    HamiltonianModel::levels(n, h0, mu, field).unwrap()
}

fn driven_oscillator() -> (OscillatorSpec, HamiltonianModel) {
    let spec = OscillatorSpec::new(1.0, 0.17);
    let model = spec.build().unwrap();
    (spec, model)
}

#[test]
fn constant_field_reduces_to_the_standard_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let field = Field::new(vec![Pulse::constant(0.4)]);
    let models = [
        diagonal(&[-1.0, 0.2, 0.7, 1.5], field.clone()),
        OscillatorSpec::new(1.0, 0.0).build().unwrap().with_field(field.clone()),
    ];
    for model in &models {
        let psi = random_state(&mut rng, model.repr());
        for dt in [0.01, 0.1, 0.5] {
            let cfg = ItoConfig::new(dt, 6, 1e-14);
            let (ito, _) = ito_step(model, &psi, 1.0, &cfg).unwrap();
            let std = standard_cheb_step(model, &psi, 1.0, dt, 1e-14, 4096).unwrap();
            let gap = ito.distance(&std).unwrap();
            assert!(gap <= 1e-13, "dt={dt} gap={gap:e}");
        }
    }
}

#[test]
fn first_order_source_matches_closed_form() {
    // ψ' = −iEψ + Φ₀ per eigencomponent:
    // ψ(t) = e^{−iEt} ψ₀ + (1 − e^{−iEt})/(iE) Φ₀
    let energies = [-2.0, -0.3, 0.0, 1e-9, 0.8, 3.1];
    let model = diagonal(&energies, Field::zero());
    let op = FrozenOperator::new(&model, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let psi = random_state(&mut rng, model.repr());
    let phi = random_state(&mut rng, model.repr());
    for t in [0.05, 0.7, 2.0] {
        let got = inhomo_step(&op, &psi, &[phi.clone()], t, 1e-15, 4096).unwrap();
        for (i, &e) in energies.iter().enumerate() {
            let u = C64::from_polar(1.0, -e * t);
            // (1 − e^{−iz})/(iE) = e^{−iz/2} 2 sin(z/2)/E, stable as E → 0
            let f1 = if e == 0.0 {
                c(t, 0.0)
            } else {
                C64::from_polar(2.0 * (0.5 * e * t).sin() / e, -0.5 * e * t)
            };
            let want = u * psi.amplitudes()[i] + f1 * phi.amplitudes()[i];
            let err = (got.amplitudes()[i] - want).norm();
            assert!(err <= 1e-12, "t={t} E={e} err={err:e}");
        }
    }
}

#[test]
fn ito_steps_conserve_the_norm() {
    let (spec, model) = driven_oscillator();
    let psi = spec.ground_state().unwrap();
    for eps in [1e-8, 1e-11, 1e-14] {
        let mut stepper = ItoStepper::new(ItoConfig::new(0.05, 8, eps));
        let mut cur = psi.clone();
        for n in 0..40 {
            let t = 30.0 + 0.05 * n as f64;
            let before = cur.norm_sqr();
            let (next, _) = stepper.step(&model, &cur, t, 0.05).unwrap();
            let drift = (next.norm_sqr() - before).abs();
            assert!(drift <= 10.0 * eps.max(f64::EPSILON), "eps={eps:e} drift={drift:e}");
            cur = next;
        }
    }
}

#[test]
fn doubling_the_sampling_points_changes_nothing() {
    let (spec, model) = driven_oscillator();
    let psi = spec.ground_state().unwrap();
    // n_t_max pins the sampling so the stepper cannot adapt it
    let pinned = |dt, n_t, eps| ItoConfig {
        n_t_max: n_t,
        ..ItoConfig::new(dt, n_t, eps)
    };
    for (dt, eps) in [(0.02, 1e-12), (0.1, 1e-10), (0.1, 1e-13)] {
        for t in [10.0, 50.0] {
            let (a, da) = ito_step(&model, &psi, t, &pinned(dt, 16, eps)).unwrap();
            let (b, db) = ito_step(&model, &psi, t, &pinned(dt, 32, eps)).unwrap();
            assert_eq!(db.n_t_used, 2 * da.n_t_used);
            let gap = a.distance(&b).unwrap();
            assert!(gap <= 10.0 * eps, "dt={dt} gap={gap:e}");
        }
    }
}

#[test]
fn reversed_field_undoes_a_step() {
    // H is real, so conj(ψ(T − s)) evolves under H(T − s)
    let (spec, model) = driven_oscillator();
    let t_total = spec.t_final;
    let reversed = model.with_field(model.field().time_reversed(t_total));
    let psi = spec.ground_state().unwrap();
    let eps = 1e-12;
    for t in [20.0, 47.3] {
        let dt = 0.1;
        let cfg = ItoConfig::new(dt, 8, eps);
        let (fwd, _) = ito_step(&model, &psi, t, &cfg).unwrap();
        let conj =
            |s: &StateVector| StateVector::new(s.amplitudes().iter().map(|z| z.conj()).collect(), s.repr()).unwrap();
        let (back, _) = ito_step(&reversed, &conj(&fwd), t_total - t - dt, &cfg).unwrap();
        let fidelity = conj(&back).inner(&psi).unwrap().norm_sqr();
        assert!(fidelity >= 1.0 - 100.0 * eps, "t={t} fidelity={fidelity}");
    }
}

#[test]
fn iteration_residual_shrinks_with_k() {
    let (spec, model) = driven_oscillator();
    let psi = spec.ground_state().unwrap();
    let mut residuals = Vec::new();
    for k in 1..=25 {
        let mut cfg = ItoConfig::new(0.4, 16, 1e-14);
        cfg.k_cap = k;
        match ito_step(&model, &psi, 25.0, &cfg) {
            Err(Error::IterationNotConverged { residual, .. }) => residuals.push(residual),
            Ok((_, diag)) => {
                residuals.push(diag.residual);
                break;
            }
            Err(e) => panic!("k={k}: {e}"),
        }
    }
    assert!(residuals.len() >= 3, "converged too fast to observe: {residuals:?}");
    for w in residuals.windows(2) {
        assert!(w[1] < w[0], "{residuals:?}");
    }
}

#[test]
fn two_level_rabi_flop_is_reproduced() {
    let spec = TwoLevelSpec::default();
    let model = spec.build().unwrap();
    let mut stepper = ItoStepper::new(ItoConfig::new(100.0, 9, 1e-12));
    let mut worst: f64 = 0.0;
    let out = propagate(
        &model,
        &spec.initial_state(),
        0.0,
        spec.t_final,
        100.0,
        &mut stepper,
        1,
        |t, psi, _| {
            let (g, e) = spec.analytic(t);
            worst = worst
                .max((psi.amplitudes()[0] - g).norm())
                .max((psi.amplitudes()[1] - e).norm());
        },
    )
    .unwrap();
    assert!(worst < 1e-12, "amplitude error {worst:e}");
    assert!(out.state.amplitudes()[1].norm_sqr() > 1.0 - 1e-12);
}

// log-log slope of final-state error against dt
fn order_slope<F>(
    model: &HamiltonianModel,
    psi: &StateVector,
    t_end: f64,
    dts: &[f64],
    reference: &StateVector,
    step: F,
) -> f64
where
    F: Fn(&HamiltonianModel, &StateVector, f64, f64) -> itoprop::Result<StateVector>,
{
    let pts: Vec<(f64, f64)> = dts
        .iter()
        .map(|&dt| {
            let n = (t_end / dt).round() as usize;
            let mut cur = psi.clone();
            for i in 0..n {
                cur = step(model, &cur, i as f64 * dt, dt).unwrap();
            }
            (dt.ln(), cur.distance(reference).unwrap().ln())
        })
        .collect();
    let k = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / k, sy / k);
    let num: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    num / den
}

#[test]
fn baseline_convergence_orders() {
    let spec = OscillatorSpec::new(1.0, 0.5);
    let model = spec.build().unwrap();
    let psi = spec.ground_state().unwrap();
    let t_end = 2.0;
    let mut ito = ItoStepper::new(ItoConfig::new(0.01, 8, 1e-14));
    let reference = propagate(&model, &psi, 0.0, t_end, 0.01, &mut ito, usize::MAX, |_, _, _| {})
        .unwrap()
        .state;
    let rk4 = order_slope(&model, &psi, t_end, &[0.01, 0.005, 0.0025], &reference, rk4_step);
    assert!((rk4 - 4.0).abs() <= 0.3, "rk4 slope {rk4}");
    let split = order_slope(&model, &psi, t_end, &[0.02, 0.01, 0.005], &reference, split_step);
    assert!((split - 2.0).abs() <= 0.3, "split slope {split}");
}
