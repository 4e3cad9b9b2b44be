//! Pseudo-arclength continuation of the periodic branch from the pitchfork
//! at `M*(k0)` toward film rupture.
//!
//! Unknowns are `X = (a_1, …, a_N, M)`. Each corrector solves `F(v, M) = 0`
//! together with the spherical constraint `|X - X_c|² = ds²`, so a step of
//! `+ds` followed by `-ds` lands on the starting point again.

use crate::error::{Error, Result};
use crate::model::{mass_constant_k, max_flux_residual, ModelParams, K0};
use crate::profile::PeriodicProfile;
use crate::steady::{add_scaled, local_expansion, sup, SteadySolver, NEWTON_TOL, POSITIVITY_FLOOR, TAIL_TOL};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Flux residual above which an accepted point triggers mode doubling.
pub const FLUX_REFINE: f64 = 1e-7;

/// One converged point on the branch with its diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchPoint {
    /// Arclength coordinate.
    pub s: f64,
    pub marangoni: f64,
    pub mass_constant: f64,
    pub profile: PeriodicProfile,
    pub min_h: f64,
    pub max_h: f64,
    pub l2_norm: f64,
    pub h2_norm: f64,
    pub w24_norm: f64,
    /// `max |v''|`.
    pub curvature: f64,
    pub flux_residual: f64,
    /// `max |F(v, M)|` at acceptance.
    pub residual: f64,
    /// Leading co-periodic eigenvalue; NaN until computed.
    pub leading_eig: f64,
}

impl BranchPoint {
    /// Evaluates the diagnostics of a converged state.
    pub fn new(s: f64, profile: PeriodicProfile, marangoni: f64, g: f64, residual: f64) -> Result<Self> {
        let params = ModelParams {
            g,
            marangoni,
            k0: profile.k0(),
        };
        let n_flux = (4 * profile.n_modes()).max(256);
        Ok(Self {
            s,
            marangoni,
            mass_constant: mass_constant_k(&profile)?,
            min_h: profile.min_height(),
            max_h: profile.max_height(),
            l2_norm: profile.l2_norm(),
            h2_norm: profile.h2_norm(),
            w24_norm: profile.w24_norm(),
            curvature: profile.sup_norm(2),
            flux_residual: max_flux_residual(&profile, &params, n_flux),
            residual,
            leading_eig: f64::NAN,
            profile,
        })
    }

    /// Amplitude of the first cosine mode, the local bifurcation parameter.
    pub fn amplitude(&self) -> f64 {
        self.profile.amplitude()
    }

    fn unknowns(&self, modes: usize) -> Vec<f64> {
        let mut x = self.profile.resized(modes).coeffs().to_vec();
        x.push(self.marangoni);
        x
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    RuptureThreshold,
    StepFailure,
    UserBound,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::RuptureThreshold => "rupture-threshold",
            Termination::StepFailure => "step-failure",
            Termination::UserBound => "user-bound",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BranchRecord {
    pub points: Vec<BranchPoint>,
    pub termination: Termination,
}

/// Step control and stopping rules.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationSettings {
    pub g: f64,
    pub k0: f64,
    /// Initial (and post-refinement) arclength step.
    pub ds: f64,
    pub ds_min: f64,
    pub ds_max: f64,
    pub max_steps: usize,
    pub rupture_threshold: f64,
    /// First-mode amplitude of the first branch point.
    pub start_amplitude: f64,
    pub modes: usize,
    pub max_modes: usize,
    /// Largest accepted L∞ change of the profile in one step.
    pub trust: f64,
    pub newton_max_iter: usize,
    /// Steps converging within this many iterations count as easy.
    pub easy_iterations: usize,
}

impl Default for ContinuationSettings {
    fn default() -> Self {
        Self {
            g: 1.0,
            k0: 1.0,
            ds: 0.02,
            ds_min: 1e-8,
            ds_max: 0.1,
            max_steps: 2000,
            rupture_threshold: 1e-2,
            start_amplitude: 0.02,
            modes: 64,
            max_modes: 1024,
            trust: 0.2,
            newton_max_iter: 12,
            easy_iterations: 4,
        }
    }
}

/// Leading-order branch point `v = s cos(k0 x)`, `M = M*(k0) - c s²`.
pub fn local_predictor(k0: f64, g: f64, s: f64, modes: usize) -> (PeriodicProfile, f64) {
    local_expansion(g, k0, s, modes)
}

/// Branch tracer. Holds the current discretisation and step history.
#[derive(Debug, Clone)]
pub struct Continuation {
    pub settings: ContinuationSettings,
    solver: SteadySolver,
    easy_streak: usize,
}

impl Continuation {
    pub fn new(settings: ContinuationSettings) -> Result<Self> {
        if !(settings.g > 0.0 && settings.k0 > 0.0) {
            return Err(Error::Domain("g and k0 must be positive".into()));
        }
        if !(settings.ds > 0.0 && settings.ds_min > 0.0 && settings.ds_max >= settings.ds) {
            return Err(Error::Domain("need 0 < ds ≤ ds_max and ds_min > 0".into()));
        }
        let mut solver = SteadySolver::new(settings.g, settings.k0, settings.modes);
        solver.max_modes = settings.max_modes;
        Ok(Self {
            settings,
            solver,
            easy_streak: 0,
        })
    }

    pub fn modes(&self) -> usize {
        self.solver.modes()
    }

    fn refine(&mut self) -> bool {
        let next = 2 * self.solver.modes();
        if next > self.settings.max_modes {
            return false;
        }
        self.solver.set_modes(next);
        true
    }

    /// Two amplitude-pinned solves seeding the secant predictor.
    pub fn start(&mut self) -> Result<(BranchPoint, BranchPoint)> {
        let st = &self.settings;
        let (a0, a1) = (st.start_amplitude, st.start_amplitude + st.ds);
        let (guess, m) = local_predictor(st.k0, st.g, a0, self.solver.modes());
        let first = self.solver.solve_at_amplitude(a0, &guess, m)?;
        let (guess, m) = local_predictor(st.k0, st.g, a1, self.solver.modes());
        let second = self.solver.solve_at_amplitude(a1, &guess, m)?;
        let p0 = BranchPoint::new(a0, first.profile, first.marangoni, st.g, first.residual)?;
        let mut x1 = second.profile.coeffs().to_vec();
        x1.push(second.marangoni);
        let len = distance(&p0.unknowns(self.solver.modes()), &x1);
        let p1 = BranchPoint::new(a0 + len, second.profile, second.marangoni, st.g, second.residual)?;
        Ok((p0, p1))
    }

    /// Corrector on the sphere `|X - X_c| = |ds|` from the predictor
    /// `X_c + ds τ`. Returns the converged unknowns and the iteration count.
    fn correct(&self, xc: &[f64], tangent: &[f64], ds: f64) -> Result<(Vec<f64>, f64, usize)> {
        let n = self.solver.modes();
        let k0 = self.settings.k0;
        let sys = self.solver.system();
        let mut x: Vec<f64> = xc.iter().zip(tangent).map(|(c, t)| c + ds * t).collect();
        let r2 = ds * ds;
        let mut res = f64::INFINITY;
        for it in 0..=self.settings.newton_max_iter {
            let v = PeriodicProfile::new(k0, x[..n].to_vec());
            let (r, jac, dm) = sys.linearise(&v, x[n])?;
            let offset: Vec<f64> = x.iter().zip(xc).map(|(a, b)| a - b).collect();
            let c = offset.iter().map(|d| d * d).sum::<f64>() - r2;
            res = sup(&r);
            if res < NEWTON_TOL && c.abs() <= 1e-12 * r2 {
                return Ok((x, res, it));
            }
            if it == self.settings.newton_max_iter {
                break;
            }
            let mut big = DMatrix::<f64>::zeros(n + 1, n + 1);
            big.view_mut((0, 0), (n, n)).copy_from(&jac);
            for i in 0..n {
                big[(i, n)] = dm[i];
            }
            for j in 0..=n {
                big[(n, j)] = 2.0 * offset[j];
            }
            let mut rhs = DVector::from_vec(r);
            rhs = -rhs.push(c);
            let step = big
                .lu()
                .solve(&rhs)
                .ok_or(Error::NonConvergence { iterations: it, residual: res })?;
            let mut lambda = 1.0;
            loop {
                let trial = add_scaled(&v, &step.as_slice()[..n], lambda);
                if trial.min_height() > POSITIVITY_FLOOR {
                    x[..n].copy_from_slice(trial.coeffs());
                    x[n] += lambda * step[n];
                    break;
                }
                lambda *= 0.5;
                if lambda < 1e-9 {
                    return Err(Error::Positivity { min_height: trial.min_height() });
                }
            }
        }
        Err(Error::NonConvergence {
            iterations: self.settings.newton_max_iter,
            residual: res,
        })
    }

    /// One arclength step from `current` along the secant from `previous`.
    ///
    /// A negative `ds` walks backward. The step is halved on failure until
    /// `|ds| < ds_min`. Returns the new point and the step actually taken.
    pub fn arclength_step(
        &mut self,
        previous: &BranchPoint,
        current: &BranchPoint,
        ds: f64,
    ) -> Result<(BranchPoint, f64)> {
        let mut ds = ds;
        loop {
            let n = self.solver.modes();
            let xc = current.unknowns(n);
            let xp = previous.unknowns(n);
            let mut tangent: Vec<f64> = xc.iter().zip(&xp).map(|(c, p)| c - p).collect();
            let norm = tangent.iter().map(|t| t * t).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(Error::Domain("coincident branch points".into()));
            }
            tangent.iter_mut().for_each(|t| *t /= norm);
            match self.correct(&xc, &tangent, ds) {
                Ok((x, res, iters)) => {
                    let ahead: f64 = x.iter().zip(&xc).zip(&tangent).map(|((a, b), t)| (a - b) * t).sum();
                    let profile = PeriodicProfile::new(self.settings.k0, x[..n].to_vec());
                    let jump = profile.sup_distance(&current.profile);
                    if ahead * ds > 0.0 && jump <= self.settings.trust {
                        if profile.tail_ratio() > TAIL_TOL && self.refine() {
                            continue;
                        }
                        let point = BranchPoint::new(current.s + ds, profile, x[n], self.settings.g, res)?;
                        // the flux sees third derivatives, so it can demand more modes than the tail test
                        if point.flux_residual > FLUX_REFINE && self.refine() {
                            continue;
                        }
                        if iters <= self.settings.easy_iterations {
                            self.easy_streak += 1;
                        } else {
                            self.easy_streak = 0;
                        }
                        return Ok((point, ds));
                    }
                }
                Err(e) if e.is_numerical() => {}
                Err(e) => return Err(e),
            }
            self.easy_streak = 0;
            ds *= 0.5;
            if ds.abs() < self.settings.ds_min {
                return Err(Error::StepFailure { ds });
            }
        }
    }

    /// Traces the branch until rupture threshold, step failure or `max_steps`.
    pub fn trace(&mut self) -> Result<BranchRecord> {
        let (p0, p1) = self.start()?;
        let mut points = vec![p0, p1];
        let mut ds = self.settings.ds;
        let mut refinements_at_failure = 0;
        let termination = loop {
            let last = points.last().unwrap();
            if last.min_h < self.settings.rupture_threshold {
                break Termination::RuptureThreshold;
            }
            if points.len() >= self.settings.max_steps {
                break Termination::UserBound;
            }
            let prev = &points[points.len() - 2];
            match self.arclength_step(prev, last, ds) {
                Ok((point, taken)) => {
                    ds = taken;
                    if self.easy_streak >= 3 {
                        ds = (2.0 * ds).min(self.settings.ds_max);
                        self.easy_streak = 0;
                    }
                    points.push(point);
                }
                Err(Error::StepFailure { .. }) => {
                    if refinements_at_failure < 2 && self.refine() {
                        refinements_at_failure += 1;
                        ds = self.settings.ds;
                        continue;
                    }
                    break Termination::StepFailure;
                }
                Err(e) => return Err(e),
            }
        };
        Ok(BranchRecord { points, termination })
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Cone test: `v' ≥ -1e-10` on `(-π/k0, 0)`, minimum at `±π/k0`, maximum at 0.
pub fn monitor_nodal(v: &PeriodicProfile) -> bool {
    let n = (4 * v.n_modes()).max(64);
    let vals = v.sample(n, 0);
    let slope = v.sample(n, 1);
    if slope[1..n / 2].iter().any(|&d| d < -1e-10) {
        return false;
    }
    let scale = 1e-12 * (1.0 + vals.iter().fold(0.0f64, |m, x| m.max(x.abs())));
    let (lo, hi) = (vals[0], vals[n / 2]);
    vals.iter().all(|&x| x >= lo - scale && x <= hi + scale)
}

/// Approach-to-rupture summary of a branch record.
#[derive(Debug, Clone, PartialEq)]
pub struct RuptureDiagnosis {
    /// Whether some point fell below the threshold.
    pub reached: bool,
    /// First point below the threshold, or the point of smallest `min_h`.
    pub index: usize,
    pub min_h: f64,
    /// Location of the minimum of `h` at that point.
    pub min_location: f64,
    /// Distance of the minimum from `±π/k0`.
    pub location_error: f64,
    /// Sampling-grid spacing used for the location.
    pub grid_cell: f64,
    /// `M` extrapolated to `min_h = 0` by a linear fit over the last points.
    pub m_infinity: f64,
    /// `max |v''|` at that point.
    pub curvature: f64,
}

/// Locates the minimum of `1 + v` on the default sampling grid.
pub fn minimum_location(v: &PeriodicProfile) -> (f64, f64) {
    let n = v.default_grid_size();
    let vals = v.sample(n, 0);
    let (idx, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &x)| if x < acc.1 { (i, x) } else { acc });
    let dx = 2.0 * PI / (v.k0() * n as f64);
    (-PI / v.k0() + idx as f64 * dx, dx)
}

pub fn detect_rupture(record: &BranchRecord, threshold: f64) -> Result<RuptureDiagnosis> {
    let pts = &record.points;
    if pts.is_empty() {
        return Err(Error::Data("empty branch record".into()));
    }
    let first = pts.iter().position(|p| p.min_h < threshold);
    let index = first.unwrap_or_else(|| {
        pts.iter()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, p)| if p.min_h < acc.1 { (i, p.min_h) } else { acc })
            .0
    });
    let p = &pts[index];
    let (x, cell) = minimum_location(&p.profile);
    let half = PI / p.profile.k0();
    let location_error = (x + half).abs().min((x - half).abs());
    let tail = &pts[pts.len().saturating_sub(10)..];
    let m_infinity = linear_intercept(tail.iter().map(|p| (p.min_h, p.marangoni)));
    Ok(RuptureDiagnosis {
        reached: first.is_some(),
        index,
        min_h: p.min_h,
        min_location: x,
        location_error,
        grid_cell: cell,
        m_infinity,
        curvature: p.curvature,
    })
}

/// Intercept at `x = 0` of the least-squares line through the pairs.
fn linear_intercept(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let pts: Vec<(f64, f64)> = pairs.collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return pts.first().map_or(f64::NAN, |p| p.1);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return my;
    }
    my - sxy / sxx * mx
}

/// Empirical bounds on `M` and `K` along a branch.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub m_lower: f64,
    pub m_upper: f64,
    /// Largest `K` over the nontrivial points.
    pub k_upper: f64,
    pub violations: Vec<String>,
}

impl BoundsReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn branch_bounds_check(record: &BranchRecord) -> BoundsReport {
    let mut violations = Vec::new();
    let mut m_lower = f64::INFINITY;
    let mut m_upper = f64::NEG_INFINITY;
    let mut k_upper = f64::NEG_INFINITY;
    for (i, p) in record.points.iter().enumerate() {
        m_lower = m_lower.min(p.marangoni);
        m_upper = m_upper.max(p.marangoni);
        if !(p.marangoni > 0.0 && p.marangoni.is_finite()) {
            violations.push(format!("point {i}: M = {}", p.marangoni));
        }
        if p.profile.sup_norm(0) > 0.0 {
            k_upper = k_upper.max(p.mass_constant);
            if !(p.mass_constant < K0 - 1e-12) {
                violations.push(format!("point {i}: K = {} not below K(0)", p.mass_constant));
            }
        } else {
            violations.push(format!("point {i}: trivial profile on the branch"));
        }
    }
    BoundsReport {
        m_lower,
        m_upper,
        k_upper,
        violations,
    }
}

/// Least-squares `d²M/ds²(0)` from `M - M*(k0) = c₂a² + c₄a⁴ + c₆a⁶` with `a` the
/// first-mode amplitude. Returns `2c₂`.
pub fn fit_curvature(points: &[BranchPoint], g: f64, k0: f64) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Data("need at least three branch points".into()));
    }
    let m_star = 4.0 * g + 4.0 * k0 * k0;
    let a = DMatrix::from_fn(points.len(), 3, |i, j| points[i].amplitude().powi(2 * (j as i32 + 1)));
    let b = DVector::from_iterator(points.len(), points.iter().map(|p| p.marangoni - m_star));
    let c = a
        .svd(true, true)
        .solve(&b, 1e-14)
        .map_err(|e| Error::Data(e.to_string()))?;
    Ok(2.0 * c[0])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short_branch(steps: usize) -> (Continuation, BranchRecord) {
        let mut c = Continuation::new(ContinuationSettings {
            max_steps: steps,
            ..Default::default()
        })
        .unwrap();
        let rec = c.trace().unwrap();
        (c, rec)
    }

    #[test]
    fn predictor_values() {
        let (v, m) = local_predictor(1.0, 1.0, 0.0, 8);
        assert_eq!(m, 8.0);
        assert_eq!(v.sup_norm(0), 0.0);
        let (_, m) = local_predictor(1.0, 1.0, 0.1, 8);
        assert!((m - (8.0 - 98.0 / 12.0 * 0.01)).abs() < 1e-14);
    }

    #[test]
    fn nodal_monitor() {
        assert!(monitor_nodal(&PeriodicProfile::single_mode(1.0, 0.3, 16)));
        let mut two = PeriodicProfile::zero(1.0, 16);
        two.coeffs_mut()[1] = 0.3;
        assert!(!monitor_nodal(&two));
        assert!(!monitor_nodal(&PeriodicProfile::single_mode(1.0, -0.3, 16)));
    }

    #[test]
    fn early_branch_is_subcritical_and_converged() {
        let (_, rec) = short_branch(12);
        assert_eq!(rec.termination, Termination::UserBound);
        for w in rec.points.windows(2) {
            assert!(w[1].s > w[0].s);
            assert!(w[1].marangoni < w[0].marangoni);
        }
        for p in &rec.points {
            assert!(p.residual < 1e-11);
            assert!(p.flux_residual < 1e-6);
            assert!(monitor_nodal(&p.profile));
            assert!(p.mass_constant < K0);
        }
        let bounds = branch_bounds_check(&rec);
        assert!(bounds.is_ok(), "{:?}", bounds.violations);
    }

    #[test]
    fn onset_is_quadratic() {
        let (_, rec) = short_branch(10);
        let ratios: Vec<f64> = rec
            .points
            .iter()
            .map(|p| p.profile.sup_norm(0) / (8.0 - p.marangoni).sqrt())
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
        // leading order: 1/sqrt(49/6)
        assert!(lo > 0.25 && hi < 0.45, "{lo} {hi}");
        let curv = fit_curvature(&rec.points, 1.0, 1.0).unwrap();
        assert!((curv + 49.0 / 3.0).abs() < 0.05 * 49.0 / 3.0, "{curv}");
    }

    #[test]
    fn step_is_reversible() {
        let (mut c, rec) = short_branch(6);
        let n = rec.points.len();
        let (prev, cur) = (&rec.points[n - 2], &rec.points[n - 1]);
        let (next, ds) = c.arclength_step(prev, cur, 0.03).unwrap();
        assert!(next.residual < 1e-11);
        let (back, _) = c.arclength_step(cur, &next, -ds).unwrap();
        assert!(back.profile.sup_distance(&cur.profile) < 1e-8);
        assert!((back.marangoni - cur.marangoni).abs() < 1e-8);
    }

    #[test]
    fn rupture_diagnosis_on_synthetic_record() {
        let (_, rec) = short_branch(4);
        let d = detect_rupture(&rec, 1e-2).unwrap();
        assert!(!d.reached);
        assert_eq!(d.index, rec.points.len() - 1);
        assert!(d.location_error <= d.grid_cell);
    }

    #[test]
    fn intercept_of_exact_line() {
        let v = linear_intercept([(1.0, 3.0), (2.0, 5.0), (3.0, 7.0)].into_iter());
        assert!((v - 1.0).abs() < 1e-14);
    }
}
