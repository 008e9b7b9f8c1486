//! Turning a config into models, steppers and per-point error data.

use std::time::Instant;

use itoprop::models::{
    depletion_amplitude, error_metrics, excited_population, relative_error, OscillatorSpec, TwoLevelSpec, WpiSpec,
};
use itoprop::propagators::{
    propagate, FreezePoint, ItoConfig, ItoStepper, Rk4Stepper, SplitStepper, StandardStepper, StepDiagnostics, Stepper,
};
use itoprop::{HamiltonianModel, StateVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Amplitude, ExperimentConfig, Freeze, Method, RunSection, System};
use crate::error::CliError;

/// Models resolved from a config, with everything derived once per run.
#[derive(Debug, Clone)]
pub enum Prepared {
    TwoLevel(TwoLevelSpec),
    Oscillator(OscillatorSpec),
    Wpi {
        /// One spec per pulse area, phase left at zero.
        specs: Vec<WpiSpec>,
        ground: StateVector,
        /// `R` from the reference propagation, indexed `[area][phase]`.
        reference: Vec<Vec<Result<f64, String>>>,
    },
}

/// Derived quantities recorded in the manifest.
#[derive(Debug, Clone, Serialize)]
pub struct Derived {
    /// Pulse amplitude per model (one per area for wpi).
    pub e0: Vec<f64>,
    /// `[e_min, e_max]` per model.
    pub spectral_bounds: Vec<[f64; 2]>,
    /// Final time of the propagation.
    pub t_final: f64,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let r = &cfg.run;
        match r.system {
            System::TwoLevel => {
                let mut spec = TwoLevelSpec::pi_pulse(cfg.twolevel.mu, r.t_final.unwrap_or(9000.0));
                if let Amplitude::Value(e0) = cfg.twolevel.e0 {
                    spec.e0 = e0;
                }
                Ok(Prepared::TwoLevel(spec))
            }
            System::Oscillator => {
                let o = &cfg.oscillator;
                let mut spec = OscillatorSpec::new(o.carrier, 1.0);
                spec.mass = o.mass;
                spec.omega = o.omega;
                spec.n_grid = o.n_grid;
                spec.r_min = o.r_min;
                spec.r_max = o.r_max;
                spec.t_final = r.t_final.unwrap_or(100.0);
                spec.e0 = match o.e0 {
                    Amplitude::Value(v) => v,
                    Amplitude::Auto => depletion_amplitude(&spec, o.depletion)?.0,
                };
                Ok(Prepared::Oscillator(spec))
            }
            System::Wpi => {
                if r.t_final.is_some() {
                    return Err(CliError::Config(
                        "t_final is fixed by the pulses for wpi; remove it".into(),
                    ));
                }
                let w = &cfg.wpi;
                let specs: Vec<WpiSpec> = w
                    .area
                    .iter()
                    .map(|&area| WpiSpec {
                        n_grid: w.n_grid,
                        r_min: w.r_min,
                        r_max: w.r_max,
                        r_e: w.r_e,
                        mass: w.mass,
                        omega_g: w.omega_g,
                        omega_e: w.omega_e,
                        mu: w.mu,
                        duration: w.duration,
                        carrier: w
                            .carrier
                            .unwrap_or(0.5 * w.mass * w.omega_e * w.omega_e * w.r_e * w.r_e),
                        delay: w.delay,
                        area,
                        phase: 0.0,
                        control_scale: w.control_scale,
                    })
                    .collect();
                let ground = specs[0].ground_state()?;
                let ref_cfg = ItoConfig {
                    k_cap: r.k_cap,
                    m_cap: r.m_cap,
                    n_cheby_cap: r.n_cheby_cap,
                    n_t_max: r.n_t_max,
                    ..ItoConfig::new(w.reference_dt, w.reference_n_t, w.reference_eps)
                };
                let tasks: Vec<(usize, usize)> = (0..specs.len())
                    .flat_map(|a| (0..w.phase.len()).map(move |p| (a, p)))
                    .collect();
                let flat: Vec<Result<f64, String>> = tasks
                    .par_iter()
                    .map(|&(a, p)| {
                        let spec = WpiSpec {
                            phase: w.phase[p],
                            ..specs[a]
                        };
                        let mut stepper = ItoStepper::new(ref_cfg);
                        wpi_single(&spec, &ground, &mut stepper, w.reference_dt, usize::MAX)
                            .map(|o| o.ratio)
                            .map_err(|e| format!("reference: {e}"))
                    })
                    .collect();
                let mut it = flat.into_iter();
                let reference = specs
                    .iter()
                    .map(|_| it.by_ref().take(w.phase.len()).collect())
                    .collect();
                Ok(Prepared::Wpi {
                    specs,
                    ground,
                    reference,
                })
            }
        }
    }

    pub fn derived(&self) -> Result<Derived, CliError> {
        let pack = |m: HamiltonianModel| {
            let b = m.bounds();
            [b.e_min, b.e_max]
        };
        Ok(match self {
            Prepared::TwoLevel(s) => Derived {
                e0: vec![s.e0],
                spectral_bounds: vec![pack(s.build()?)],
                t_final: s.t_final,
            },
            Prepared::Oscillator(s) => Derived {
                e0: vec![s.e0],
                spectral_bounds: vec![pack(s.build()?)],
                t_final: s.t_final,
            },
            Prepared::Wpi { specs, .. } => Derived {
                e0: specs.iter().map(WpiSpec::e0).collect(),
                spectral_bounds: specs.iter().map(|s| s.build().map(pack)).collect::<Result<_, _>>()?,
                t_final: specs[0].t_final(),
            },
        })
    }
}

/// Largest per-step diagnostics over a point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct DiagSummary {
    pub max_m_k: usize,
    pub max_k: usize,
    pub max_n_cheby: usize,
    pub max_n_t: usize,
    pub steps: usize,
}

impl DiagSummary {
    fn absorb(&mut self, d: &StepDiagnostics, steps: usize) {
        self.max_m_k = self.max_m_k.max(d.m_k);
        self.max_k = self.max_k.max(d.k_used);
        self.max_n_cheby = self.max_n_cheby.max(d.n_cheby);
        self.max_n_t = self.max_n_t.max(d.n_t_used);
        self.steps += steps;
    }
}

/// Rows of a per-point CSV.
#[derive(Debug, Clone, PartialEq)]
pub enum Rows {
    /// `(t, ε_sol, ε_norm)`
    Trace(Vec<[f64; 3]>),
    /// `(φ, R, ε_sol^rel)`
    Phase(Vec<[f64; 3]>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointData {
    pub rows: Rows,
    pub eps_sol_max: f64,
    pub eps_norm_max: f64,
    pub diag: DiagSummary,
}

/// One sweep point: a time step, and for wpi a pulse area.
#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub method: Method,
    pub dt: f64,
    /// Configured initial `N_t` (ITO only).
    pub n_t: usize,
    pub area: Option<f64>,
    pub wall_seconds: f64,
    pub result: Result<PointData, String>,
}

pub fn make_stepper(run: &RunSection, method: Method, dt: f64, n_t: usize) -> Box<dyn Stepper> {
    match method {
        Method::Ito => Box::new(ItoStepper::new(ItoConfig {
            k_cap: run.k_cap,
            m_cap: run.m_cap,
            n_cheby_cap: run.n_cheby_cap,
            n_t_max: run.n_t_max,
            strict: run.strict,
            ..ItoConfig::new(dt, n_t, run.eps)
        })),
        Method::Cheb => Box::new(
            StandardStepper::new(run.eps, run.n_cheby_cap).with_freeze(match run.freeze {
                Freeze::Start => FreezePoint::Start,
                Freeze::Midpoint => FreezePoint::Midpoint,
            }),
        ),
        Method::Split => Box::new(SplitStepper),
        Method::Rk4 => Box::new(Rk4Stepper),
    }
}

fn record_every(run: &RunSection, dt: f64) -> usize {
    run.record_interval
        .map(|i| ((i / dt).round() as usize).max(1))
        .unwrap_or(1)
}

/// Runs `method` over `dts` (with matching `n_ts`); points run in parallel
/// and come back in sweep order.
pub fn execute(
    cfg: &ExperimentConfig,
    prepared: &Prepared,
    method: Method,
    dts: &[f64],
    n_ts: &[usize],
) -> Vec<PointOutcome> {
    let run = &cfg.run;
    match prepared {
        Prepared::TwoLevel(_) | Prepared::Oscillator(_) => dts
            .par_iter()
            .zip(n_ts.par_iter())
            .map(|(&dt, &n_t)| {
                let start = Instant::now();
                let result = trajectory(prepared, run, method, dt, n_t).map_err(|e| e.to_string());
                PointOutcome {
                    method,
                    dt,
                    n_t,
                    area: None,
                    wall_seconds: start.elapsed().as_secs_f64(),
                    result,
                }
            })
            .collect(),
        Prepared::Wpi {
            specs,
            ground,
            reference,
        } => {
            let phases = &cfg.wpi.phase;
            let tasks: Vec<(usize, usize, usize)> = (0..dts.len())
                .flat_map(|d| (0..specs.len()).flat_map(move |a| (0..phases.len()).map(move |p| (d, a, p))))
                .collect();
            let runs: Vec<(Result<WpiRun, String>, f64)> = tasks
                .par_iter()
                .map(|&(d, a, p)| {
                    let start = Instant::now();
                    let spec = WpiSpec {
                        phase: phases[p],
                        ..specs[a]
                    };
                    let mut stepper = make_stepper(run, method, dts[d], n_ts[d]);
                    let out = wpi_single(&spec, ground, &mut stepper, dts[d], record_every(run, dts[d]))
                        .map_err(|e| e.to_string());
                    (out, start.elapsed().as_secs_f64())
                })
                .collect();
            let mut it = runs.into_iter();
            let mut out = Vec::new();
            for (d, &dt) in dts.iter().enumerate() {
                for (a, spec) in specs.iter().enumerate() {
                    let chunk: Vec<_> = it.by_ref().take(phases.len()).collect();
                    let wall = chunk.iter().map(|(_, w)| w).sum();
                    out.push(PointOutcome {
                        method,
                        dt,
                        n_t: n_ts[d],
                        area: Some(spec.area),
                        wall_seconds: wall,
                        result: phase_point(phases, &reference[a], chunk.into_iter().map(|(r, _)| r).collect()),
                    });
                }
            }
            out
        }
    }
}

fn trajectory(
    prepared: &Prepared,
    run: &RunSection,
    method: Method,
    dt: f64,
    n_t: usize,
) -> Result<PointData, CliError> {
    let (model, psi0, t_final) = match prepared {
        Prepared::TwoLevel(s) => (s.build()?, s.initial_state(), s.t_final),
        Prepared::Oscillator(s) => (s.build()?, s.ground_state()?, s.t_final),
        Prepared::Wpi { .. } => unreachable!("wpi points are phase scans"),
    };
    let mut stepper = make_stepper(run, method, dt, n_t);
    let (mut times, mut pops, mut norms) = (Vec::new(), Vec::new(), Vec::new());
    let prop = propagate(
        &model,
        &psi0,
        0.0,
        t_final,
        dt,
        &mut stepper,
        record_every(run, dt),
        |t, psi, _| {
            times.push(t);
            pops.push(match prepared {
                Prepared::TwoLevel(_) => psi.amplitudes()[0].norm_sqr(),
                _ => psi0.inner(psi).map(|z| z.norm_sqr()).unwrap_or(f64::NAN),
            });
            norms.push(psi.norm_sqr());
        },
    )?;
    let reference: Vec<f64> = match prepared {
        Prepared::TwoLevel(s) => times.iter().map(|&t| s.ground_population(t)).collect(),
        Prepared::Oscillator(s) => s.oracle().ground_population_trace(&times)?,
        Prepared::Wpi { .. } => unreachable!(),
    };
    let m = error_metrics(&times, &pops, &norms, &reference)?;
    let mut diag = DiagSummary::default();
    diag.absorb(&prop.diagnostics, prop.steps);
    let rows = m
        .times
        .iter()
        .zip(&m.eps_sol)
        .zip(&m.eps_norm)
        .map(|((&t, &s), &n)| [t, s, n])
        .collect();
    Ok(PointData {
        rows: Rows::Trace(rows),
        eps_sol_max: m.eps_sol_max,
        eps_norm_max: m.eps_norm_max,
        diag,
    })
}

/// Excited-population ratio of one interferometry run.
#[derive(Debug, Clone, Copy)]
pub struct WpiRun {
    pub ratio: f64,
    pub eps_norm_max: f64,
    pub diag: DiagSummary,
}

/// Pump, then control; `R = P_e(T)/P_e(t₁)`, tracking the norm on the way.
pub fn wpi_single<S: Stepper + ?Sized>(
    spec: &WpiSpec,
    ground: &StateVector,
    stepper: &mut S,
    dt: f64,
    record_every: usize,
) -> Result<WpiRun, CliError> {
    let model = spec.build()?;
    let mut eps_norm_max: f64 = 0.0;
    let mut diag = DiagSummary::default();
    let t1 = spec.t_pump_end();
    let mut track = |_: f64, psi: &StateVector, _: &StepDiagnostics| {
        eps_norm_max = eps_norm_max.max((1.0 - psi.norm_sqr()).abs());
    };
    let first = propagate(&model, ground, 0.0, t1, dt, stepper, record_every, &mut track)?;
    let p_pump = excited_population(&first.state);
    let second = propagate(
        &model,
        &first.state,
        t1,
        spec.t_final(),
        dt,
        stepper,
        record_every,
        &mut track,
    )?;
    let p_final = excited_population(&second.state);
    diag.absorb(&first.diagnostics, first.steps);
    diag.absorb(&second.diagnostics, second.steps);
    if p_pump == 0.0 {
        return Err(CliError::Numerical("no excited population after the pump".into()));
    }
    Ok(WpiRun {
        ratio: p_final / p_pump,
        eps_norm_max,
        diag,
    })
}

fn phase_point(
    phases: &[f64],
    reference: &[Result<f64, String>],
    runs: Vec<Result<WpiRun, String>>,
) -> Result<PointData, String> {
    let mut rows = Vec::with_capacity(phases.len());
    let mut diag = DiagSummary::default();
    let (mut eps_sol_max, mut eps_norm_max): (f64, f64) = (0.0, 0.0);
    for ((&phi, r_ref), run) in phases.iter().zip(reference).zip(runs) {
        let run = run?;
        let r_ref = r_ref.clone()?;
        let rel = relative_error(r_ref, run.ratio).map_err(|e| e.to_string())?;
        rows.push([phi, run.ratio, rel]);
        eps_sol_max = eps_sol_max.max(rel);
        eps_norm_max = eps_norm_max.max(run.eps_norm_max);
        diag.max_m_k = diag.max_m_k.max(run.diag.max_m_k);
        diag.max_k = diag.max_k.max(run.diag.max_k);
        diag.max_n_cheby = diag.max_n_cheby.max(run.diag.max_n_cheby);
        diag.max_n_t = diag.max_n_t.max(run.diag.max_n_t);
        diag.steps += run.diag.steps;
    }
    Ok(PointData {
        rows: Rows::Phase(rows),
        eps_sol_max,
        eps_norm_max,
        diag,
    })
}
