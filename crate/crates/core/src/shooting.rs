//! Independent route to steady states through the Hamiltonian system.
//!
//! A `2π/k0`-periodic, mean-zero orbit is found by a two-dimensional root
//! find on `(K, E)` using the period and orbit-average quadratures; the
//! profile is then obtained by integrating `v'' = -G'(v)` from the upper
//! turning point with a classical Runge–Kutta scheme. Nothing here touches
//! the collocation solver.

use crate::error::{Error, Result};
use crate::model::{potential_prime_unchecked, potential_second_unchecked, potential_unchecked, HamiltonianParams, K0};
use crate::phase::{energy_interval, find_fixed_points, orbit_integrals_from, OrbitIntegrals};
use crate::profile::PeriodicProfile;
use crate::spectral::CosineGrid;
use std::f64::consts::PI;

const SHOOT_TOL: f64 = 1e-13;
const SHOOT_MAX_ITER: usize = 60;
/// RK4 substeps per grid interval.
const SUBSTEPS: usize = 16;

/// Result of a shooting solve.
#[derive(Debug, Clone)]
pub struct ShootingSolution {
    pub marangoni: f64,
    pub mass_constant: f64,
    pub energy: f64,
    /// Orbit samples on the `[-π/k0, π/k0)` grid.
    pub samples: Vec<f64>,
    /// Cosine re-expansion of the samples.
    pub profile: PeriodicProfile,
    /// `|v(π/k0) - q0|`: closure defect of the integrated half orbit.
    pub closure_defect: f64,
}

fn integrals(g: f64, m: f64, k: f64, e: f64) -> Result<OrbitIntegrals> {
    let p = HamiltonianParams { g, marangoni: m, mass_constant: k };
    if k > K0 {
        return Err(Error::Domain(format!("K = {k} above K(0)")));
    }
    let fp = find_fixed_points(&p)?;
    orbit_integrals_from(e, &p, &fp)
}

fn solve2(a: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    Some([
        (b[0] * a[1][1] - b[1] * a[0][1]) / det,
        (a[0][0] * b[1] - a[1][0] * b[0]) / det,
    ])
}

/// Steady state at Marangoni number `M` with roughly the given amplitude.
///
/// Requires `M > 4g` so that the center carries periodic orbits.
pub fn shoot_solution(
    marangoni: f64,
    g: f64,
    k0: f64,
    amplitude_hint: f64,
    n_points: usize,
) -> Result<ShootingSolution> {
    if marangoni <= 4.0 * g {
        return Err(Error::NoSolution(format!(
            "M = {marangoni} ≤ 4g: no center with periodic orbits"
        )));
    }
    let target = 2.0 * PI / k0;
    let a = amplitude_hint.abs().max(1e-4);
    // small-amplitude guess: K(v) ≈ K(0) + ω''(0) a²/4, E ≈ G(v_l) + G''(v_l) a²/2
    let mut k = K0 - a * a / 8.0;
    let center = |k: f64| -> Result<(f64, f64, f64)> {
        let p = HamiltonianParams { g, marangoni, mass_constant: k };
        let fp = find_fixed_points(&p)?;
        Ok((fp.v_l, potential_unchecked(fp.v_l, &p), potential_second_unchecked(fp.v_l, &p)))
    };
    let (_, e_c, curv) = center(k)?;
    let window = energy_interval(&HamiltonianParams { g, marangoni, mass_constant: k })?;
    let mut e = (e_c + 0.5 * curv * a * a).min(e_c + 0.9 * (window.e_max - e_c));
    let mut defect = f64::INFINITY;
    for _ in 0..SHOOT_MAX_ITER {
        let base = integrals(g, marangoni, k, e)?;
        let f = [base.period - target, base.mean];
        defect = f[0].abs().max(f[1].abs());
        if f[0].abs() < SHOOT_TOL * target && f[1].abs() < SHOOT_TOL {
            return finish(g, marangoni, k0, k, e, n_points);
        }
        let hk = 1e-7 * k.abs().max(1e-3);
        let he = 1e-7 * (e - center(k)?.1).abs().max(1e-12);
        let dk = integrals(g, marangoni, k - hk, e)?;
        let de = integrals(g, marangoni, k, e + he)?;
        let jac = [
            [(base.period - dk.period) / hk, (de.period - base.period) / he],
            [(base.mean - dk.mean) / hk, (de.mean - base.mean) / he],
        ];
        let step = solve2(jac, [-f[0], -f[1]])
            .ok_or_else(|| Error::NoSolution("singular shooting Jacobian".into()))?;
        // backtrack until the update stays inside the admissible window
        let mut lambda = 1.0;
        loop {
            let (nk, ne) = (k + lambda * step[0], e + lambda * step[1]);
            if nk < K0 && integrals(g, marangoni, nk, ne).is_ok() {
                k = nk;
                e = ne;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return Err(Error::NoSolution(format!("shooting left the orbit window at K = {k}")));
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: SHOOT_MAX_ITER,
        residual: defect,
    })
}

/// Steady state whose maximum is `v(0) = peak`, solving for `(M, K)`.
///
/// As `peak → 0` the recovered `M` tends to the bifurcation point `M*(k0)`.
pub fn shoot_at_peak(peak: f64, g: f64, k0: f64, n_points: usize) -> Result<ShootingSolution> {
    if !(peak > 0.0) {
        return Err(Error::Domain(format!("peak = {peak} must be positive")));
    }
    let target = 2.0 * PI / k0;
    let k2 = k0 * k0;
    let c = (g + k2) * (8.0 * g + 41.0 * k2) / (12.0 * k2);
    let mut m = 4.0 * g + 4.0 * k2 - c * peak * peak;
    let mut k = K0 - peak * peak / 8.0;
    let eval = |m: f64, k: f64| -> Result<OrbitIntegrals> {
        let p = HamiltonianParams { g, marangoni: m, mass_constant: k };
        let e = potential_unchecked(peak, &p);
        integrals(g, m, k, e)
    };
    let mut defect = f64::INFINITY;
    for _ in 0..SHOOT_MAX_ITER {
        let base = eval(m, k)?;
        let f = [base.period - target, base.mean];
        defect = f[0].abs().max(f[1].abs());
        if f[0].abs() < SHOOT_TOL * target && f[1].abs() < SHOOT_TOL {
            let p = HamiltonianParams { g, marangoni: m, mass_constant: k };
            return finish(g, m, k0, k, potential_unchecked(peak, &p), n_points);
        }
        let hm = 1e-7 * m;
        let hk = 1e-7 * k.abs().max(1e-3);
        let dm = eval(m + hm, k)?;
        let dk = eval(m, k - hk)?;
        let jac = [
            [(dm.period - base.period) / hm, (base.period - dk.period) / hk],
            [(dm.mean - base.mean) / hm, (base.mean - dk.mean) / hk],
        ];
        let step = solve2(jac, [-f[0], -f[1]])
            .ok_or_else(|| Error::NoSolution("singular shooting Jacobian".into()))?;
        let mut lambda = 1.0;
        loop {
            let (nm, nk) = (m + lambda * step[0], k + lambda * step[1]);
            if nk < K0 && nm > 0.0 && eval(nm, nk).is_ok() {
                m = nm;
                k = nk;
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-12 {
                return Err(Error::NoSolution(format!("no orbit with peak {peak}")));
            }
        }
    }
    Err(Error::NonConvergence {
        iterations: SHOOT_MAX_ITER,
        residual: defect,
    })
}

/// Integrates the half orbit from `(q1, 0)` and samples it on the grid.
fn finish(g: f64, m: f64, k0: f64, k: f64, e: f64, n_points: usize) -> Result<ShootingSolution> {
    assert!(n_points.is_multiple_of(2), "grid size must be even");
    let p = HamiltonianParams { g, marangoni: m, mass_constant: k };
    let fp = find_fixed_points(&p)?;
    let orbit = orbit_integrals_from(e, &p, &fp)?;
    let half = n_points / 2;
    let dx = PI / (k0 * half as f64);
    let h = dx / SUBSTEPS as f64;
    let force = |v: f64| -potential_prime_unchecked(v, &p);
    // values at x = j dx, j = 0..=half
    let mut right = Vec::with_capacity(half + 1);
    let (mut v, mut w) = (orbit.turning.q1, 0.0);
    right.push(v);
    for _ in 0..half {
        for _ in 0..SUBSTEPS {
            let (k1v, k1w) = (w, force(v));
            let (k2v, k2w) = (w + 0.5 * h * k1w, force(v + 0.5 * h * k1v));
            let (k3v, k3w) = (w + 0.5 * h * k2w, force(v + 0.5 * h * k2v));
            let (k4v, k4w) = (w + h * k3w, force(v + h * k3v));
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
            w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        }
        right.push(v);
    }
    let closure_defect = (right[half] - orbit.turning.q0).abs();
    // grid point i sits at x = -π/k0 + i dx, i.e. |x| = (half - i) dx for i ≤ half
    let samples: Vec<f64> = (0..n_points)
        .map(|i| if i <= half { right[half - i] } else { right[i - half] })
        .collect();
    let grid = CosineGrid::new(k0, n_points);
    let profile = PeriodicProfile::new(k0, grid.project(&samples, n_points / 4));
    Ok(ShootingSolution {
        marangoni: m,
        mass_constant: k,
        energy: e,
        samples,
        profile,
        closure_defect,
    })
}
