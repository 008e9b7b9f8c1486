use crate::cheby::{
    apply_series_slices, cheb_to_taylor, samples_to_cheb, truncate, FrozenOperator, LocalTimeGrid, ZERO_SERIES,
};
use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianModel;
use crate::propagators::inhomo::{evaluate_formal_solution, lambdas, FmCache};
use crate::propagators::standard::ExpCache;
use crate::propagators::{StepDiagnostics, Stepper};
use crate::state::{distance, norm, StateVector, C64};

/// Settings of the iteratively time-ordered Chebyshev propagator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItoConfig {
    pub dt: f64,
    /// Initial number of sampling points per step.
    pub n_t: usize,
    pub eps: f64,
    pub k_cap: usize,
    pub m_cap: usize,
    pub n_cheby_cap: usize,
    /// Sampling points are doubled up to this bound.
    pub n_t_max: usize,
    /// Also require convergence at every sampling time, not only at the end.
    pub strict: bool,
}

impl ItoConfig {
    pub fn new(dt: f64, n_t: usize, eps: f64) -> Self {
        Self {
            dt,
            n_t,
            eps,
            k_cap: 25,
            m_cap: 60,
            n_cheby_cap: 1024,
            n_t_max: 128,
            strict: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps must be positive, got {}",
                self.eps
            )));
        }
        if self.n_t < 2 {
            return Err(Error::InvalidParameter(format!(
                "n_t must be at least 2, got {}",
                self.n_t
            )));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if self.k_cap == 0 || self.m_cap == 0 || self.n_cheby_cap < 4 {
            return Err(Error::InvalidParameter(
                "iteration and order caps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Iteratively time-ordered stepper. Keeps its series caches and the
/// current number of sampling points between steps.
#[derive(Debug)]
pub struct ItoStepper {
    config: ItoConfig,
    n_t: usize,
    exp_cache: ExpCache,
    fm_cache: FmCache,
}

impl ItoStepper {
    pub fn new(config: ItoConfig) -> Self {
        Self {
            n_t: config.n_t,
            config,
            exp_cache: ExpCache::default(),
            fm_cache: FmCache::default(),
        }
    }

    pub fn config(&self) -> &ItoConfig {
        &self.config
    }

    /// Sampling points currently in use.
    pub fn n_t(&self) -> usize {
        self.n_t
    }

    fn step_inner(
        &mut self,
        model: &HamiltonianModel,
        psi: &StateVector,
        t_n: f64,
        dt: f64,
    ) -> Result<(StateVector, StepDiagnostics)> {
        self.config.validate()?;
        psi.check_repr(model.repr())?;
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
        }
        loop {
            match self.attempt(model, psi.amplitudes(), t_n, dt) {
                Err(Error::IncreaseSamples { n_samples, ratio }) => {
                    if 2 * self.n_t > self.config.n_t_max {
                        return Err(Error::IncreaseSamples { n_samples, ratio });
                    }
                    self.n_t *= 2;
                }
                Err(e) => return Err(e),
                Ok((amps, diag)) => return Ok((StateVector::new(amps, psi.repr())?, diag)),
            }
        }
    }

    fn attempt(
        &mut self,
        model: &HamiltonianModel,
        psi: &[C64],
        t_n: f64,
        dt: f64,
    ) -> Result<(Vec<C64>, StepDiagnostics)> {
        let cfg = self.config;
        let grid = LocalTimeGrid::new(t_n, dt, self.n_t)?;
        let t_mid = grid.midpoint();
        let op = FrozenOperator::new(model, model.field_at(t_mid));
        let bounds = model.bounds();
        let n_t = grid.n_t();
        let mut diag = StepDiagnostics {
            n_t_used: n_t,
            ..StepDiagnostics::default()
        };

        // k = 0: frozen propagation across the sub-intervals between samples
        let mut edges = Vec::with_capacity(n_t + 2);
        edges.push(0.0);
        edges.extend_from_slice(grid.offsets());
        edges.push(dt);
        let mut samples: Vec<Vec<C64>> = Vec::with_capacity(n_t);
        let mut cur = psi.to_vec();
        for (i, w) in edges.windows(2).enumerate() {
            let series = self.exp_cache.get(w[1] - w[0], bounds, cfg.eps, cfg.n_cheby_cap)?;
            diag.n_cheby = diag.n_cheby.max(series.len());
            cur = apply_series_slices(&[series.coeffs()], series.domain(), &op, &cur)?
                .pop()
                .unwrap_or_default();
            if i < n_t {
                samples.push(cur.clone());
            }
        }
        let mut end = cur;

        // δE(τ_l) = E(τ_l) − E(t_mid), without cancellation
        let delta: Vec<f64> = grid
            .taus()
            .iter()
            .map(|&tau| model.field().difference(tau, t_mid))
            .collect();
        let mut mu_buf = vec![C64::new(0.0, 0.0); psi.len()];
        let mut eval_points = grid.offsets().to_vec();
        eval_points.push(dt);

        let mut residual = f64::INFINITY;
        for k in 1..=cfg.k_cap {
            // Φ_{k−1}(τ_l) = −i δE(τ_l) μ ψ_{k−1}(τ_l)
            let phi: Vec<Vec<C64>> = samples
                .iter()
                .zip(&delta)
                .map(|(s, &d)| {
                    model.apply_mu_into(s, &mut mu_buf);
                    mu_buf.iter().map(|z| C64::new(z.im * d, -z.re * d)).collect()
                })
                .collect();
            let phi_max = phi.iter().map(|p| norm(p)).fold(0.0, f64::max);
            if phi_max < ZERO_SERIES {
                // no time dependence inside the step: ψ_k = ψ_0
                diag.k_used = k;
                diag.residual = 0.0;
                diag.m_k = diag.m_k.max(1);
                diag.shrink_advised = 2 * diag.m_k < n_t;
                return Ok((end, diag));
            }
            let series = samples_to_cheb(&phi)?;
            let m = truncate(&series, cfg.eps)?;
            if m > cfg.m_cap {
                return Err(Error::OrderTooLarge {
                    order: m,
                    limit: cfg.m_cap,
                });
            }
            diag.m_k = diag.m_k.max(m);
            let taylor = cheb_to_taylor(series.coeffs(), m, dt)?;
            let lam = lambdas(&op, psi, &taylor);
            let (mut states, n_cheby) = evaluate_formal_solution(
                &op,
                bounds,
                &lam,
                &eval_points,
                cfg.eps,
                cfg.n_cheby_cap,
                &mut self.fm_cache,
            )?;
            diag.n_cheby = diag.n_cheby.max(n_cheby);
            let new_end = states.pop().unwrap_or_default();
            residual = distance(&new_end, &end);
            if cfg.strict {
                for (a, b) in states.iter().zip(&samples) {
                    residual = residual.max(distance(a, b));
                }
            }
            end = new_end;
            samples = states;
            if residual < cfg.eps {
                diag.k_used = k;
                diag.residual = residual;
                diag.shrink_advised = 2 * diag.m_k < n_t;
                return Ok((end, diag));
            }
        }
        Err(Error::IterationNotConverged {
            iterations: cfg.k_cap,
            residual,
        })
    }
}

impl Stepper for ItoStepper {
    fn name(&self) -> &'static str {
        "ito"
    }

    fn step(
        &mut self,
        model: &HamiltonianModel,
        psi: &StateVector,
        t: f64,
        dt: f64,
    ) -> Result<(StateVector, StepDiagnostics)> {
        self.step_inner(model, psi, t, dt)
    }
}

/// A single step of length `config.dt` with a fresh stepper.
pub fn ito_step(
    model: &HamiltonianModel,
    psi: &StateVector,
    t_n: f64,
    config: &ItoConfig,
) -> Result<(StateVector, StepDiagnostics)> {
    ItoStepper::new(*config).step(model, psi, t_n, config.dt)
}
