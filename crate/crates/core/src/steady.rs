//! Even-cosine collocation of the nonlocal steady problem
//!
//! ```text
//! F(v, M) = v'' - g v + M (ω(v) - K(v)) = 0,   K(v) = ⨍ ω(v),
//! ```
//!
//! for `v = Σ_{ℓ=1..N} aℓ cos(ℓ k0 x)`. The residual is the cosine projection
//! of `F` onto modes `1..N`, evaluated with `4N` collocation points. The mean
//! mode is excluded, so the nonlocal term `M K(v)` (and the rank-one part of
//! its derivative) drops out of the projected equations: `F` maps mean-zero
//! functions to mean-zero functions by the choice of `K`.

use crate::error::{Error, Result};
use crate::model::{mass_constant_k_with, max_flux_residual, omega_prime, omega_unchecked, ModelParams};
use crate::profile::PeriodicProfile;
use crate::spectral::CosineGrid;
use nalgebra::{DMatrix, DVector};

/// Default number of cosine modes.
pub const DEFAULT_MODES: usize = 64;
/// Newton stops once `‖F‖∞` drops below this.
pub const NEWTON_TOL: f64 = 1e-11;
pub const NEWTON_MAX_ITER: usize = 50;
/// Iterates must keep `min(1 + v) > POSITIVITY_FLOOR`.
pub const POSITIVITY_FLOOR: f64 = 1e-6;
/// Modes are doubled while `|a_N| / max|aℓ|` exceeds this.
pub const TAIL_TOL: f64 = 1e-10;

/// Discretisation of the steady problem on one period.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    g: f64,
    k0: f64,
    modes: usize,
    grid: CosineGrid,
}

impl CollocationSystem {
    /// `modes` cosine modes on `4 * modes` collocation points.
    pub fn new(g: f64, k0: f64, modes: usize) -> Self {
        assert!(modes >= 1);
        Self {
            g,
            k0,
            modes,
            grid: CosineGrid::new(k0, 4 * modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn grid(&self) -> &CosineGrid {
        &self.grid
    }

    /// Collocation values of `v`, checking `min(1 + v) > floor`.
    fn values(&self, v: &PeriodicProfile, floor: f64) -> Result<Vec<f64>> {
        assert_eq!(v.n_modes(), self.modes, "profile/system mode mismatch");
        let vals = self.grid.synthesize(v.coeffs(), 0);
        let min_h = 1.0 + vals.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min_h > floor) {
            return Err(Error::Positivity { min_height: min_h });
        }
        Ok(vals)
    }

    fn linear_diagonal(&self, l: usize) -> f64 {
        let w = l as f64 * self.k0;
        -(w * w) - self.g
    }

    /// Cosine coefficients of `F(v, M)` on modes `1..N`.
    pub fn residual(&self, v: &PeriodicProfile, marangoni: f64) -> Result<Vec<f64>> {
        let vals = self.values(v, 0.0)?;
        Ok(self.residual_from_values(v, &vals, marangoni))
    }

    fn residual_from_values(&self, v: &PeriodicProfile, vals: &[f64], marangoni: f64) -> Vec<f64> {
        let om: Vec<f64> = vals.iter().map(|&x| omega_unchecked(x)).collect();
        let proj = self.grid.project(&om, self.modes);
        v.coeffs()
            .iter()
            .zip(&proj)
            .enumerate()
            .map(|(i, (&a, &p))| self.linear_diagonal(i + 1) * a + marangoni * p)
            .collect()
    }

    /// `∂F/∂M = ω(v) - K(v)`, projected.
    pub fn d_marangoni(&self, v: &PeriodicProfile) -> Result<Vec<f64>> {
        let vals = self.values(v, 0.0)?;
        let om: Vec<f64> = vals.iter().map(|&x| omega_unchecked(x)).collect();
        Ok(self.grid.project(&om, self.modes))
    }

    /// Linearisation `∂ₓ² + (M ω'(v) - g) - M ⨍ ω'(v)(·)` on modes `1..N`.
    ///
    /// The multiplication operator has entries `M (Q_{|ℓ-m|} + Q_{ℓ+m})` with
    /// `Q_j` the discrete cosine moments of `ω'(v)`; the period average only
    /// feeds the mean mode and vanishes after projection.
    pub fn jacobian(&self, v: &PeriodicProfile, marangoni: f64) -> Result<DMatrix<f64>> {
        let vals = self.values(v, 0.0)?;
        Ok(self.jacobian_from_values(&vals, marangoni))
    }

    fn jacobian_from_values(&self, vals: &[f64], marangoni: f64) -> DMatrix<f64> {
        let n = self.modes;
        let q = self.grid.cosine_moments(&vals.iter().map(|&x| omega_prime(x)).collect::<Vec<_>>());
        DMatrix::from_fn(n, n, |i, j| {
            let (l, m) = (i + 1, j + 1);
            let mult = marangoni * (q[l.abs_diff(m)] + q[l + m]);
            if i == j {
                self.linear_diagonal(l) + mult
            } else {
                mult
            }
        })
    }

    /// Residual, Jacobian and `∂F/∂M` in one pass, with the Newton positivity floor.
    pub(crate) fn linearise(
        &self,
        v: &PeriodicProfile,
        marangoni: f64,
    ) -> Result<(Vec<f64>, DMatrix<f64>, Vec<f64>)> {
        let vals = self.values(v, POSITIVITY_FLOOR)?;
        let r = self.residual_from_values(v, &vals, marangoni);
        let jac = self.jacobian_from_values(&vals, marangoni);
        let om: Vec<f64> = vals.iter().map(|&x| omega_unchecked(x)).collect();
        Ok((r, jac, self.grid.project(&om, self.modes)))
    }

    /// Mass constant `K(v)` on the collocation grid.
    pub fn mass_constant(&self, v: &PeriodicProfile) -> Result<f64> {
        mass_constant_k_with(v, self.grid.len())
    }
}

/// Converged steady state with its Newton log.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub profile: PeriodicProfile,
    pub marangoni: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl SteadyState {
    /// `max |flux|` of `h = 1 + v` on the `4N` grid.
    pub fn flux_residual(&self, g: f64) -> f64 {
        let p = ModelParams {
            g,
            marangoni: self.marangoni,
            k0: self.profile.k0(),
        };
        max_flux_residual(&self.profile, &p, (4 * self.profile.n_modes()).max(256))
    }
}

pub(crate) fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Damped Newton solver for `F(v, M) = 0`.
///
/// Owns its discretisation; not meant to be shared between threads while
/// solving, but independent instances may run concurrently.
#[derive(Debug, Clone)]
pub struct SteadySolver {
    system: CollocationSystem,
    pub tol: f64,
    pub max_iter: usize,
    pub max_modes: usize,
}

impl SteadySolver {
    pub fn new(g: f64, k0: f64, modes: usize) -> Self {
        Self {
            system: CollocationSystem::new(g, k0, modes),
            tol: NEWTON_TOL,
            max_iter: NEWTON_MAX_ITER,
            max_modes: 1024,
        }
    }

    pub fn system(&self) -> &CollocationSystem {
        &self.system
    }

    pub fn modes(&self) -> usize {
        self.system.modes
    }

    /// Switches to `modes` cosine modes.
    pub fn set_modes(&mut self, modes: usize) {
        if modes != self.system.modes {
            self.system = CollocationSystem::new(self.system.g, self.system.k0, modes);
        }
    }

    /// Newton iteration at fixed `M` from `guess`.
    pub fn newton_solve(&self, guess: &PeriodicProfile, marangoni: f64) -> Result<SteadyState> {
        let sys = &self.system;
        let mut v = guess.resized(sys.modes);
        let mut vals = sys.values(&v, POSITIVITY_FLOOR)?;
        let mut r = sys.residual_from_values(&v, &vals, marangoni);
        let mut res = sup(&r);
        for it in 0..=self.max_iter {
            if res < self.tol {
                return Ok(SteadyState {
                    profile: v,
                    marangoni,
                    iterations: it,
                    residual: res,
                });
            }
            if it == self.max_iter {
                break;
            }
            let jac = sys.jacobian_from_values(&vals, marangoni);
            let rhs = -DVector::from_vec(r.clone());
            let step = jac
                .lu()
                .solve(&rhs)
                .ok_or(Error::NonConvergence { iterations: it, residual: res })?;
            let (nv, nvals) = damped_update(sys, &v, step.as_slice())?;
            v = nv;
            vals = nvals;
            r = sys.residual_from_values(&v, &vals, marangoni);
            res = sup(&r);
        }
        Err(Error::NonConvergence {
            iterations: self.max_iter,
            residual: res,
        })
    }

    /// Newton solve with the first coefficient pinned to `amplitude` and `M`
    /// as unknown.
    pub fn solve_at_amplitude(
        &self,
        amplitude: f64,
        guess: &PeriodicProfile,
        marangoni_guess: f64,
    ) -> Result<SteadyState> {
        let sys = &self.system;
        let n = sys.modes;
        let mut v = guess.resized(n);
        v.coeffs_mut()[0] = amplitude;
        let mut m = marangoni_guess;
        let mut res = f64::INFINITY;
        for it in 0..=self.max_iter {
            let vals = sys.values(&v, POSITIVITY_FLOOR)?;
            let r = sys.residual_from_values(&v, &vals, m);
            res = sup(&r);
            if res < self.tol {
                return Ok(SteadyState {
                    profile: v,
                    marangoni: m,
                    iterations: it,
                    residual: res,
                });
            }
            if it == self.max_iter {
                break;
            }
            let mut jac = sys.jacobian_from_values(&vals, m);
            let om: Vec<f64> = vals.iter().map(|&x| omega_unchecked(x)).collect();
            let dm = sys.grid.project(&om, n);
            // column 0 now carries ∂F/∂M
            for (i, d) in dm.iter().enumerate() {
                jac[(i, 0)] = *d;
            }
            let step = jac
                .lu()
                .solve(&-DVector::from_vec(r))
                .ok_or(Error::NonConvergence { iterations: it, residual: res })?;
            let mut dv = step.as_slice().to_vec();
            let dmarangoni = dv[0];
            dv[0] = 0.0;
            let mut lambda = 1.0;
            loop {
                let trial = add_scaled(&v, &dv, lambda);
                if trial.min_height() > POSITIVITY_FLOOR {
                    v = trial;
                    m += lambda * dmarangoni;
                    break;
                }
                lambda *= 0.5;
                if lambda < 1e-9 {
                    return Err(Error::Positivity { min_height: trial.min_height() });
                }
            }
        }
        Err(Error::NonConvergence {
            iterations: self.max_iter,
            residual: res,
        })
    }

    /// [`Self::newton_solve`] followed by mode doubling until the trailing
    /// coefficient is below [`TAIL_TOL`] (or `max_modes` is reached).
    pub fn solve_adaptive(&mut self, guess: &PeriodicProfile, marangoni: f64) -> Result<SteadyState> {
        let mut state = self.newton_solve(guess, marangoni)?;
        while state.profile.tail_ratio() > TAIL_TOL && 2 * self.modes() <= self.max_modes {
            self.set_modes(2 * self.modes());
            state = self.newton_solve(&state.profile, marangoni)?;
        }
        Ok(state)
    }
}

pub(crate) fn add_scaled(v: &PeriodicProfile, dv: &[f64], lambda: f64) -> PeriodicProfile {
    let coeffs = v.coeffs().iter().zip(dv).map(|(a, d)| a + lambda * d).collect();
    PeriodicProfile::new(v.k0(), coeffs)
}

/// Applies `v + λ dv`, halving λ until the positivity floor holds.
fn damped_update(
    sys: &CollocationSystem,
    v: &PeriodicProfile,
    dv: &[f64],
) -> Result<(PeriodicProfile, Vec<f64>)> {
    let mut lambda = 1.0;
    loop {
        let trial = add_scaled(v, dv, lambda);
        match sys.values(&trial, POSITIVITY_FLOOR) {
            Ok(vals) => return Ok((trial, vals)),
            Err(Error::Positivity { min_height }) => {
                lambda *= 0.5;
                if lambda < 1e-9 {
                    return Err(Error::Positivity { min_height });
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Leading-order guess `s cos(k0 x)` at `M*(k0) - c s²` from the local
/// bifurcation expansion, `c = (g + k0²)(8g + 41k0²)/(12 k0²)`.
pub fn local_expansion(g: f64, k0: f64, s: f64, modes: usize) -> (PeriodicProfile, f64) {
    let k2 = k0 * k0;
    let coeff = (g + k2) * (8.0 * g + 41.0 * k2) / (12.0 * k2);
    let m = 4.0 * g + 4.0 * k2 - coeff * s * s;
    (PeriodicProfile::single_mode(k0, s, modes), m)
}
