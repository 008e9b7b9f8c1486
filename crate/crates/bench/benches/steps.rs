use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use itoprop::cheby::cheb_to_taylor;
use itoprop::models::{OscillatorSpec, TwoLevelSpec};
use itoprop::propagators::{ito_step, rk4_step, split_step, standard_cheb_step, ItoConfig};

fn steps(c: &mut Criterion) {
    let osc = OscillatorSpec::new(1.0, 0.05);
    let model = osc.build().unwrap();
    let psi = osc.ground_state().unwrap();
    let mut g = c.benchmark_group("oscillator_step");
    for dt in [0.05, 0.1] {
        for eps in [1e-8, 1e-12] {
            let cfg = ItoConfig::new(dt, 8, eps);
            g.bench_with_input(BenchmarkId::new(format!("ito_eps{eps:e}"), dt), &cfg, |b, cfg| {
                b.iter(|| ito_step(&model, black_box(&psi), 1.0, cfg).unwrap())
            });
        }
        g.bench_with_input(BenchmarkId::new("cheb", dt), &dt, |b, &dt| {
            b.iter(|| standard_cheb_step(&model, black_box(&psi), 1.0, dt, 1e-12, 1024).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("rk4", dt), &dt, |b, &dt| {
            b.iter(|| rk4_step(&model, black_box(&psi), 1.0, dt).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("split", dt), &dt, |b, &dt| {
            b.iter(|| split_step(&model, black_box(&psi), 1.0, dt).unwrap())
        });
    }
    g.finish();

    let two = TwoLevelSpec::pi_pulse(1.0, 100.0);
    let model = two.build().unwrap();
    let psi = two.initial_state();
    let cfg = ItoConfig::new(1.0, 9, 1e-12);
    c.bench_function("twolevel_ito_step", |b| {
        b.iter(|| ito_step(&model, black_box(&psi), 10.0, &cfg).unwrap())
    });
}

fn taylor(c: &mut Criterion) {
    let mut g = c.benchmark_group("cheb_to_taylor");
    for m in [8usize, 16, 32] {
        let cheb: Vec<f64> = (0..m).map(|j| 1.0 / (1.0 + j as f64).powi(2)).collect();
        g.bench_with_input(BenchmarkId::from_parameter(m), &cheb, |b, cheb| {
            b.iter(|| cheb_to_taylor(black_box(cheb), cheb.len(), 0.5).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, steps, taylor);
criterion_main!(benches);
