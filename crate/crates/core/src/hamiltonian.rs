//! Hamiltonians of the form `H(t) = H₀ + E(t) μ` in three representations:
//! discrete levels, one surface on a Fourier grid, and two surfaces coupled
//! by the field.

use crate::error::{Error, Result};
use crate::grid::{FourierGrid, Kinetic};
use crate::pulse::Field;
use crate::state::{Repr, StateVector, C64};

/// Relative widening applied to the half-width of the spectral interval.
pub const SPECTRAL_MARGIN: f64 = 0.05;

/// Interval `[e_min, e_max]` known to contain the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralBounds {
    pub e_min: f64,
    pub e_max: f64,
}

impl SpectralBounds {
    pub fn new(e_min: f64, e_max: f64) -> Self {
        Self { e_min, e_max }
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.e_min + self.e_max)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.e_max - self.e_min)
    }

    pub fn contains(&self, e: f64) -> bool {
        e >= self.e_min && e <= self.e_max
    }

    /// Widen the half-width by `margin` (relative) around the same center.
    /// A degenerate interval gets a tiny positive width so that the scaled
    /// variable stays defined.
    fn widened(e_lo: f64, e_hi: f64, margin: f64) -> Self {
        let c = 0.5 * (e_lo + e_hi);
        let h = (0.5 * (e_hi - e_lo) * (1.0 + margin)).max(1e-10 * (1.0 + c.abs()));
        Self::new(c - h, c + h)
    }
}

#[derive(Debug, Clone)]
enum Operators {
    Levels {
        n: usize,
        h0: Vec<C64>,
        mu: Vec<C64>,
    },
    Grid {
        grid: FourierGrid,
        mass: f64,
        potential: Vec<f64>,
        dipole: Vec<f64>,
        kinetic: Kinetic,
    },
    TwoSurface {
        grid: FourierGrid,
        mass: f64,
        v_ground: Vec<f64>,
        v_excited: Vec<f64>,
        coupling: Vec<f64>,
        kinetic: Kinetic,
    },
}

/// Field-free part, coupling operator and the driving field.
#[derive(Debug, Clone)]
pub struct HamiltonianModel {
    ops: Operators,
    field: Field,
    bounds: SpectralBounds,
}

impl HamiltonianModel {
    /// Dense `n × n` Hermitian `h0` and `mu`, row-major.
    pub fn levels(n: usize, h0: Vec<C64>, mu: Vec<C64>, field: Field) -> Result<Self> {
        if n == 0 || h0.len() != n * n || mu.len() != n * n {
            return Err(Error::InvalidParameter(format!("level matrices must be {n}x{n}")));
        }
        for m in [&h0, &mu] {
            for i in 0..n {
                for j in 0..n {
                    if (m[i * n + j] - m[j * n + i].conj()).norm() > 1e-14 * (1.0 + m[i * n + j].norm()) {
                        return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
                    }
                }
            }
        }
        Ok(Self::finish(Operators::Levels { n, h0, mu }, field))
    }

    /// A single surface `T + V(r) + E(t) d(r)` on `grid`.
    pub fn grid(grid: FourierGrid, mass: f64, potential: Vec<f64>, dipole: Vec<f64>, field: Field) -> Result<Self> {
        let n = grid.n_points();
        if potential.len() != n || dipole.len() != n {
            return Err(Error::InvalidGrid(
                "potential and dipole must be sampled on the grid".into(),
            ));
        }
        check_mass(mass)?;
        let kinetic = Kinetic::new(&grid, mass);
        Ok(Self::finish(
            Operators::Grid {
                grid,
                mass,
                potential,
                dipole,
                kinetic,
            },
            field,
        ))
    }

    /// Two surfaces coupled off-diagonally by `E(t) μ(r)`.
    pub fn two_surface(
        grid: FourierGrid,
        mass: f64,
        v_ground: Vec<f64>,
        v_excited: Vec<f64>,
        coupling: Vec<f64>,
        field: Field,
    ) -> Result<Self> {
        let n = grid.n_points();
        if v_ground.len() != n || v_excited.len() != n || coupling.len() != n {
            return Err(Error::InvalidGrid(
                "potentials and coupling must be sampled on the grid".into(),
            ));
        }
        check_mass(mass)?;
        let kinetic = Kinetic::new(&grid, mass);
        Ok(Self::finish(
            Operators::TwoSurface {
                grid,
                mass,
                v_ground,
                v_excited,
                coupling,
                kinetic,
            },
            field,
        ))
    }

    fn finish(ops: Operators, field: Field) -> Self {
        let mut model = Self {
            ops,
            field,
            bounds: SpectralBounds::new(0.0, 0.0),
        };
        model.bounds = model.spectral_range(model.field.max_abs());
        model
    }

    /// The same operators driven by a different field.
    pub fn with_field(&self, field: Field) -> Self {
        Self::finish(self.ops.clone(), field)
    }

    pub fn repr(&self) -> Repr {
        match &self.ops {
            Operators::Levels { n, .. } => Repr::Levels(*n),
            Operators::Grid { grid, .. } => Repr::Grid(grid.n_points()),
            Operators::TwoSurface { grid, .. } => Repr::TwoSurface(grid.n_points()),
        }
    }

    pub fn dim(&self) -> usize {
        self.repr().len()
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn field_at(&self, t: f64) -> f64 {
        self.field.value(t)
    }

    /// Bounds valid for every field value the model's pulses can reach.
    pub fn bounds(&self) -> SpectralBounds {
        self.bounds
    }

    pub fn fourier_grid(&self) -> Option<&FourierGrid> {
        match &self.ops {
            Operators::Levels { .. } => None,
            Operators::Grid { grid, .. } | Operators::TwoSurface { grid, .. } => Some(grid),
        }
    }

    pub fn mass(&self) -> Option<f64> {
        match &self.ops {
            Operators::Levels { .. } => None,
            Operators::Grid { mass, .. } | Operators::TwoSurface { mass, .. } => Some(*mass),
        }
    }

    /// Spectral interval of `H₀ + w μ` for all `|w| ≤ w_max`, widened by
    /// [`SPECTRAL_MARGIN`].
    pub fn spectral_range(&self, w_max: f64) -> SpectralBounds {
        let w_max = w_max.abs();
        let (lo, hi) = match &self.ops {
            Operators::Levels { n, h0, mu } => {
                // Gershgorin discs of H₀ widened by the row sums of |μ|
                let n = *n;
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..n {
                    let off: f64 = (0..n).filter(|&j| j != i).map(|j| h0[i * n + j].norm()).sum();
                    let coupling: f64 = (0..n).map(|j| mu[i * n + j].norm()).sum();
                    let d = h0[i * n + i].re;
                    lo = lo.min(d - off - w_max * coupling);
                    hi = hi.max(d + off + w_max * coupling);
                }
                (lo, hi)
            }
            Operators::Grid {
                grid,
                mass,
                potential,
                dipole,
                ..
            } => {
                let (vmin, vmax) = min_max(potential);
                let dmax = dipole.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                (vmin - w_max * dmax, vmax + w_max * dmax + grid.kinetic_cutoff(*mass))
            }
            Operators::TwoSurface {
                grid,
                mass,
                v_ground,
                v_excited,
                coupling,
                ..
            } => {
                let (gmin, gmax) = min_max(v_ground);
                let (emin, emax) = min_max(v_excited);
                let cmax = coupling.iter().fold(0.0f64, |m, d| m.max(d.abs()));
                (
                    gmin.min(emin) - w_max * cmax,
                    gmax.max(emax) + w_max * cmax + grid.kinetic_cutoff(*mass),
                )
            }
        };
        SpectralBounds::widened(lo, hi, SPECTRAL_MARGIN)
    }

    // ---- slice kernels ----------------------------------------------------

    /// `out = (H₀ + w μ) psi`
    pub fn apply_with_field_into(&self, w: f64, psi: &[C64], out: &mut [C64]) {
        match &self.ops {
            Operators::Levels { n, h0, mu } => {
                let n = *n;
                for i in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for j in 0..n {
                        acc += (h0[i * n + j] + mu[i * n + j] * w) * psi[j];
                    }
                    out[i] = acc;
                }
            }
            Operators::Grid {
                potential,
                dipole,
                kinetic,
                ..
            } => {
                kinetic.apply(psi, out);
                for i in 0..psi.len() {
                    out[i] += psi[i] * (potential[i] + w * dipole[i]);
                }
            }
            Operators::TwoSurface {
                v_ground,
                v_excited,
                coupling,
                kinetic,
                ..
            } => {
                let n = v_ground.len();
                let (pg, pe) = psi.split_at(n);
                let (og, oe) = out.split_at_mut(n);
                kinetic.apply(pg, og);
                kinetic.apply(pe, oe);
                for i in 0..n {
                    let c = w * coupling[i];
                    og[i] += pg[i] * v_ground[i] + pe[i] * c;
                    oe[i] += pe[i] * v_excited[i] + pg[i] * c;
                }
            }
        }
    }

    /// `out = μ psi`
    pub fn apply_mu_into(&self, psi: &[C64], out: &mut [C64]) {
        match &self.ops {
            Operators::Levels { n, mu, .. } => {
                let n = *n;
                for i in 0..n {
                    out[i] = (0..n).map(|j| mu[i * n + j] * psi[j]).sum();
                }
            }
            Operators::Grid { dipole, .. } => {
                for ((o, p), d) in out.iter_mut().zip(psi).zip(dipole) {
                    *o = p * d;
                }
            }
            Operators::TwoSurface { coupling, .. } => {
                let n = coupling.len();
                for i in 0..n {
                    out[i] = psi[n + i] * coupling[i];
                    out[n + i] = psi[i] * coupling[i];
                }
            }
        }
    }

    /// Multiplies `buf` by `exp(−i (V + w μ) dt)`, exactly per grid point.
    pub fn exp_potential_in_place(&self, w: f64, dt: f64, buf: &mut [C64]) -> Result<()> {
        match &self.ops {
            Operators::Levels { .. } => Err(Error::Unsupported(
                "split-operator propagation needs a grid representation",
            )),
            Operators::Grid { potential, dipole, .. } => {
                for ((z, v), d) in buf.iter_mut().zip(potential).zip(dipole) {
                    *z *= C64::from_polar(1.0, -(v + w * d) * dt);
                }
                Ok(())
            }
            Operators::TwoSurface {
                v_ground,
                v_excited,
                coupling,
                ..
            } => {
                let n = v_ground.len();
                for i in 0..n {
                    // M = a·1 + b·σz + c·σx,  e^{−iMτ} = e^{−iaτ}(cos Ωτ − i sin Ωτ/Ω (bσz + cσx))
                    let a = 0.5 * (v_ground[i] + v_excited[i]);
                    let b = 0.5 * (v_ground[i] - v_excited[i]);
                    let c = w * coupling[i];
                    let omega = b.hypot(c);
                    let (s, co) = (omega * dt).sin_cos();
                    let sinc = if omega * dt.abs() < 1e-8 {
                        dt * (1.0 - (omega * dt).powi(2) / 6.0)
                    } else {
                        s / omega
                    };
                    let phase = C64::from_polar(1.0, -a * dt);
                    let i_unit = C64::new(0.0, 1.0);
                    let m00 = phase * (co - i_unit * sinc * b);
                    let m11 = phase * (co + i_unit * sinc * b);
                    let m01 = phase * (-i_unit * sinc * c);
                    let (g, e) = (buf[i], buf[n + i]);
                    buf[i] = m00 * g + m01 * e;
                    buf[n + i] = m01 * g + m11 * e;
                }
                Ok(())
            }
        }
    }

    /// Multiplies `buf` by `exp(−i T dt)`.
    pub fn exp_kinetic_in_place(&self, dt: f64, buf: &mut [C64]) -> Result<()> {
        match &self.ops {
            Operators::Levels { .. } => Err(Error::Unsupported(
                "split-operator propagation needs a grid representation",
            )),
            Operators::Grid { kinetic, .. } => {
                kinetic.propagate_in_place(buf, dt);
                Ok(())
            }
            Operators::TwoSurface { kinetic, .. } => {
                let n = kinetic.len();
                let (g, e) = buf.split_at_mut(n);
                kinetic.propagate_in_place(g, dt);
                kinetic.propagate_in_place(e, dt);
                Ok(())
            }
        }
    }

    // ---- state-level operations ------------------------------------------

    /// `H(t) psi = (H₀ + E(t) μ) psi`
    pub fn apply_h_at(&self, t: f64, psi: &StateVector) -> Result<StateVector> {
        self.apply_frozen(self.field.value(t), psi)
    }

    /// `H_n psi = (H₀ + w_n μ) psi` for a frozen field value `w_n`.
    pub fn apply_frozen(&self, w_n: f64, psi: &StateVector) -> Result<StateVector> {
        psi.check_repr(self.repr())?;
        let mut out = StateVector::zeros(self.repr());
        self.apply_with_field_into(w_n, psi.amplitudes(), out.amplitudes_mut());
        Ok(out)
    }

    /// `(E(t) − w_n) μ psi`
    pub fn residual_apply(&self, t: f64, w_n: f64, psi: &StateVector) -> Result<StateVector> {
        self.scaled_mu(self.field.value(t) - w_n, psi)
    }

    /// `(E(t) − E(t_mid)) μ psi` with the field difference evaluated
    /// without cancellation.
    pub fn residual_about(&self, t: f64, t_mid: f64, psi: &StateVector) -> Result<StateVector> {
        self.scaled_mu(self.field.difference(t, t_mid), psi)
    }

    fn scaled_mu(&self, scale: f64, psi: &StateVector) -> Result<StateVector> {
        psi.check_repr(self.repr())?;
        let mut out = StateVector::zeros(self.repr());
        if scale != 0.0 {
            self.apply_mu_into(psi.amplitudes(), out.amplitudes_mut());
            out.scale(C64::new(scale, 0.0));
        }
        Ok(out)
    }
}

fn check_mass(mass: f64) -> Result<()> {
    if mass > 0.0 && mass.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")))
    }
}

fn min_max(v: &[f64]) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
        (lo.min(x), hi.max(x))
    })
}
