//! Phase-plane analysis of the planar Hamiltonian system
//! `v' = w, w' = -G'(v)`.
//!
//! Periodic orbits circle the center `(v_l, 0)` and fill the energy window
//! `(H(v_l,0), min(H(-1,0), H(v_u,0)))`. Periods are computed from the
//! quadrature `√2 ∫ dv / √(E - G(v))` between the turning points.

use crate::error::{Error, Result};
use crate::model::{
    omega_prime, omega_unchecked, potential_prime_unchecked, potential_second_unchecked,
    potential_unchecked, HamiltonianParams, K0,
};
use crate::par::{self, Exec};
use crate::quadrature::GaussLegendre;
use crate::roots::{bisect, newton_bisect};
use std::sync::OnceLock;

/// Number of Gauss–Legendre nodes in the period quadrature.
pub const PERIOD_NODES: usize = 200;

/// Smallest admissible distance from the boundary `v = -1`.
const BOUNDARY_GAP: f64 = 1e-14;

/// Threshold on `|G''|` below which a fixed point counts as degenerate.
const DEGENERATE_TOL: f64 = 1e-10;

fn period_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(PERIOD_NODES))
}

fn gap_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(12))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedPointKind {
    CenterMinimum,
    Saddle,
    Degenerate,
    Unclassified,
}

/// The two fixed points `(v_l, 0)` and `(v_u, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointPair {
    pub v_l: f64,
    pub v_u: f64,
    pub kind_l: FixedPointKind,
    pub kind_u: FixedPointKind,
}

/// Energies carrying periodic orbits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyInterval {
    pub e_min: f64,
    pub e_max: f64,
    /// True when the saddle level closes before the boundary level, i.e.
    /// a homoclinic orbit bounds the periodic region.
    pub has_homoclinic: bool,
}

impl EnergyInterval {
    pub fn contains(&self, e: f64) -> bool {
        e > self.e_min && e < self.e_max
    }
}

/// Lower and upper turning points of the orbit at a given energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoints {
    pub q0: f64,
    pub q1: f64,
}

/// `ω(v) - K - (g/M) v`; fixed points are its zeros.
fn fixed_point_fn(v: f64, p: &HamiltonianParams) -> (f64, f64) {
    let ratio = p.g / p.marangoni;
    (
        omega_unchecked(v) - p.mass_constant - ratio * v,
        omega_prime(v) - ratio,
    )
}

/// Solves `(g/M) v = ω(v) - K` for the two fixed points.
///
/// Concavity of `ω` gives exactly two roots (possibly coinciding at the
/// origin when `K = K(0)` and `M = 4g`).
pub fn find_fixed_points(p: &HamiltonianParams) -> Result<FixedPointPair> {
    if p.mass_constant > K0 + 1e-15 {
        return Err(Error::Domain(format!("K = {} exceeds K(0)", p.mass_constant)));
    }
    let at_flat = p.mass_constant == K0;
    let ratio = p.g / p.marangoni;
    if at_flat && (p.marangoni - 4.0 * p.g).abs() < 1e-12 {
        return Ok(unclassified(0.0, 0.0));
    }
    // the maximiser of the concave function solves ω'(v) = g/M
    let peak = bisect(|v| omega_prime(v) - ratio, -1.0 + 1e-15, 1e6, 1e-15)?;
    let peak_value = fixed_point_fn(peak, p).0;
    if peak_value <= 0.0 {
        // tangency up to round-off
        return Ok(unclassified(peak, peak));
    }
    let f = |v: f64| fixed_point_fn(v, p);
    let v_l = if at_flat && peak >= 0.0 {
        0.0
    } else {
        newton_bisect(f, -1.0 + 1e-300_f64.max(BOUNDARY_GAP * 1e-2), peak)?
    };
    let v_u = if at_flat && peak <= 0.0 {
        0.0
    } else {
        let mut hi = peak.abs().max(1.0) * 2.0;
        while fixed_point_fn(hi, p).0 > 0.0 {
            hi *= 2.0;
            if hi > 1e15 {
                return Err(Error::NoSolution("upper fixed point not bracketed".into()));
            }
        }
        newton_bisect(f, peak, hi)?
    };
    Ok(unclassified(v_l, v_u))
}

fn unclassified(v_l: f64, v_u: f64) -> FixedPointPair {
    FixedPointPair {
        v_l,
        v_u,
        kind_l: FixedPointKind::Unclassified,
        kind_u: FixedPointKind::Unclassified,
    }
}

fn kind_of(curvature: f64) -> FixedPointKind {
    if curvature.abs() < DEGENERATE_TOL {
        FixedPointKind::Degenerate
    } else if curvature > 0.0 {
        FixedPointKind::CenterMinimum
    } else {
        FixedPointKind::Saddle
    }
}

/// Tags each fixed point by the sign of `G''`.
pub fn classify_fixed_points(p: &HamiltonianParams, fp: FixedPointPair) -> FixedPointPair {
    FixedPointPair {
        kind_l: kind_of(potential_second_unchecked(fp.v_l, p)),
        kind_u: kind_of(potential_second_unchecked(fp.v_u, p)),
        ..fp
    }
}

/// Fixed points, classified.
pub fn fixed_points(p: &HamiltonianParams) -> Result<FixedPointPair> {
    Ok(classify_fixed_points(p, find_fixed_points(p)?))
}

/// Energy window of the periodic orbits around the center.
pub fn energy_interval(p: &HamiltonianParams) -> Result<EnergyInterval> {
    let fp = find_fixed_points(p)?;
    energy_interval_from(p, &fp)
}

fn energy_interval_from(p: &HamiltonianParams, fp: &FixedPointPair) -> Result<EnergyInterval> {
    if fp.v_l >= fp.v_u {
        return Err(Error::Degenerate(fp.v_l));
    }
    let boundary = potential_unchecked(-1.0, p);
    let saddle = potential_unchecked(fp.v_u, p);
    Ok(EnergyInterval {
        e_min: potential_unchecked(fp.v_l, p),
        e_max: boundary.min(saddle),
        has_homoclinic: boundary >= saddle,
    })
}

/// Roots `q0 < v_l < q1` of `G(q) = E`.
pub fn turning_points(e: f64, p: &HamiltonianParams) -> Result<TurningPoints> {
    let fp = find_fixed_points(p)?;
    turning_points_from(e, p, &fp)
}

fn turning_points_from(e: f64, p: &HamiltonianParams, fp: &FixedPointPair) -> Result<TurningPoints> {
    let window = energy_interval_from(p, fp)?;
    if !window.contains(e) {
        return Err(Error::OutOfRange {
            energy: e,
            lower: window.e_min,
            upper: window.e_max,
        });
    }
    let f = |v: f64| (potential_unchecked(v, p) - e, potential_prime_unchecked(v, p));
    let q0 = newton_bisect(f, -1.0 + BOUNDARY_GAP, fp.v_l)?;
    let q1 = newton_bisect(f, fp.v_l, fp.v_u)?;
    Ok(TurningPoints { q0, q1 })
}

/// Period and orbit average of `v` at energy `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitIntegrals {
    pub period: f64,
    pub mean: f64,
    pub turning: TurningPoints,
}

/// `√2 ∫ φ(v) / √(E - G(v)) dv` over `[q0, q1]` for `φ = 1` and `φ = v`.
///
/// Substituting `v = q0 + (q1 - q0) sin²θ` turns the integrand into
/// `2 √((v - q0)(q1 - v) / (E - G(v)))`, which is smooth on `[0, π/2]`.
pub fn orbit_integrals(e: f64, p: &HamiltonianParams) -> Result<OrbitIntegrals> {
    let fp = find_fixed_points(p)?;
    orbit_integrals_from(e, p, &fp)
}

pub(crate) fn orbit_integrals_from(
    e: f64,
    p: &HamiltonianParams,
    fp: &FixedPointPair,
) -> Result<OrbitIntegrals> {
    let tp = turning_points_from(e, p, fp)?;
    let (q0, q1) = (tp.q0, tp.q1);
    let width = q1 - q0;
    let rule = period_rule();
    let gap_rule = gap_rule();
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut period = 0.0;
    let mut first_moment = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let theta = 0.5 * half_pi * (t + 1.0);
        let s = theta.sin();
        let v = q0 + width * s * s;
        let a = v - q0;
        let b = q1 - v;
        // E - G(v) integrated from the nearer turning point, free of cancellation
        let gap = if a < b {
            -gap_rule.integrate(q0, v, |u| potential_prime_unchecked(u, p))
        } else {
            gap_rule.integrate(v, q1, |u| potential_prime_unchecked(u, p))
        };
        if !(gap > 0.0) {
            return Err(Error::Domain(format!("energy {e} does not bound an orbit")));
        }
        let density = 2.0 * (a * b / gap).sqrt() * (0.5 * half_pi) * w;
        period += density;
        first_moment += density * v;
    }
    let scale = std::f64::consts::SQRT_2;
    period *= scale;
    first_moment *= scale;
    Ok(OrbitIntegrals {
        period,
        mean: first_moment / period,
        turning: tp,
    })
}

/// Period of the orbit at energy `E`.
pub fn period(e: f64, p: &HamiltonianParams) -> Result<f64> {
    Ok(orbit_integrals(e, p)?.period)
}

/// Periods at many energies.
pub fn period_sweep(exec: Exec, energies: &[f64], p: &HamiltonianParams) -> Vec<Result<f64>> {
    match find_fixed_points(p) {
        Ok(fp) => par::map(exec, energies, |&e| {
            orbit_integrals_from(e, p, &fp).map(|o| o.period)
        }),
        Err(_) => energies.iter().map(|&e| period(e, p)).collect(),
    }
}

/// Sampled phase-space trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    /// Set when the orbit reached `v ≤ -1 + 1e-12` and stopped early.
    pub hit_boundary: bool,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Largest `|H(v(t), w(t)) - H(v(0), w(0))|` along the trajectory.
    pub fn energy_deviation(&self, p: &HamiltonianParams) -> f64 {
        let energy = |i: usize| 0.5 * self.w[i] * self.w[i] + potential_unchecked(self.v[i], p);
        let e0 = energy(0);
        (0..self.len()).map(|i| (energy(i) - e0).abs()).fold(0.0, f64::max)
    }
}

/// Fixed-step Störmer–Verlet integration of `v' = w, w' = -G'(v)`.
pub fn integrate_orbit(
    v0: f64,
    w0: f64,
    t_end: f64,
    dt: f64,
    p: &HamiltonianParams,
) -> Result<Trajectory> {
    if v0 <= -1.0 {
        return Err(Error::Domain(format!("v0 = {v0} must exceed -1")));
    }
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("dt = {dt} must be positive")));
    }
    let steps = (t_end / dt).round().max(0.0) as usize;
    let mut traj = Trajectory {
        t: Vec::with_capacity(steps + 1),
        v: Vec::with_capacity(steps + 1),
        w: Vec::with_capacity(steps + 1),
        hit_boundary: false,
    };
    let (mut v, mut w) = (v0, w0);
    traj.t.push(0.0);
    traj.v.push(v);
    traj.w.push(w);
    let mut force = -potential_prime_unchecked(v, p);
    for i in 1..=steps {
        w += 0.5 * dt * force;
        v += dt * w;
        if v <= -1.0 + 1e-12 {
            traj.hit_boundary = true;
            break;
        }
        force = -potential_prime_unchecked(v, p);
        w += 0.5 * dt * force;
        traj.t.push(i as f64 * dt);
        traj.v.push(v);
        traj.w.push(w);
    }
    Ok(traj)
}

/// Time of the first return to `w = 0` with `w` crossing from positive to
/// negative, starting at a turning point `(q1, 0)`.
///
/// Crossings are located by cubic Hermite interpolation of `w` using
/// `w' = -G'(v)`.
pub fn return_time(trajectory: &Trajectory, p: &HamiltonianParams) -> Option<f64> {
    let n = trajectory.len();
    let mut seen_positive = false;
    for i in 1..n {
        let (w0, w1) = (trajectory.w[i - 1], trajectory.w[i]);
        if w1 > 0.0 {
            seen_positive = true;
        }
        if seen_positive && w0 > 0.0 && w1 <= 0.0 {
            let dt = trajectory.t[i] - trajectory.t[i - 1];
            let d0 = -potential_prime_unchecked(trajectory.v[i - 1], p) * dt;
            let d1 = -potential_prime_unchecked(trajectory.v[i], p) * dt;
            let hermite = |s: f64| {
                let s2 = s * s;
                let s3 = s2 * s;
                (2.0 * s3 - 3.0 * s2 + 1.0) * w0
                    + (s3 - 2.0 * s2 + s) * d0
                    + (-2.0 * s3 + 3.0 * s2) * w1
                    + (s3 - s2) * d1
            };
            let s = bisect(hermite, 0.0, 1.0, 1e-15).unwrap_or(0.5);
            return Some(trajectory.t[i - 1] + s * dt);
        }
    }
    None
}

/// Limit of the upper turning point as `M → ∞`:
/// `v_max,∞ = -(2e^K - 1)/(e^K - 1)`.
pub fn v_max_infinity(k: f64) -> Result<f64> {
    if k >= 0.0 {
        return Err(Error::Domain(format!("K = {k} must be negative")));
    }
    let ek = k.exp();
    Ok(-(2.0 * ek - 1.0) / (ek - 1.0))
}

/// Eigenvalues `±√(g - M/4)` of the linearisation at the origin, returned
/// as `(re, im)` of the `+` branch.
pub fn origin_eigenvalue(g: f64, marangoni: f64) -> (f64, f64) {
    let d = g - 0.25 * marangoni;
    if d >= 0.0 {
        (d.sqrt(), 0.0)
    } else {
        (0.0, (-d).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{hamiltonian, potential_g, Order};
    use std::f64::consts::PI;

    fn g_inf(v: f64, k: f64) -> f64 {
        (1.0 + v) * ((1.0 + v) / (2.0 + v)).ln() - k * v
    }

    #[test]
    fn degenerate_at_onset() {
        let fp = fixed_points(&HamiltonianParams::flat(1.0, 4.0)).unwrap();
        assert_eq!((fp.v_l, fp.v_u), (0.0, 0.0));
        assert_eq!(fp.kind_l, FixedPointKind::Degenerate);
        assert!(matches!(
            energy_interval(&HamiltonianParams::flat(1.0, 4.0)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn above_onset_upper_point_positive() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let fp = fixed_points(&p).unwrap();
        assert_eq!(fp.v_l, 0.0);
        // independent oracle: plain bisection on the scalar fixed-point equation
        let oracle = bisect(|v| v / 8.0 - omega_unchecked(v) + K0, 1e-8, 100.0, 1e-15).unwrap();
        assert!((fp.v_u - oracle).abs() < 1e-12);
        assert!((fp.v_u / 8.0 - omega_unchecked(fp.v_u) + K0).abs() < 1e-12);
        assert_eq!(fp.kind_l, FixedPointKind::CenterMinimum);
        assert_eq!(fp.kind_u, FixedPointKind::Saddle);
        assert_eq!(potential_g(0.0, &p, Order::Second).unwrap(), 1.0);
    }

    #[test]
    fn below_onset_lower_point_negative() {
        let fp = fixed_points(&HamiltonianParams::flat(1.0, 2.0)).unwrap();
        assert!(fp.v_l < 0.0 && fp.v_l > -1.0);
        assert_eq!(fp.v_u, 0.0);
        assert_eq!(fp.kind_l, FixedPointKind::CenterMinimum);
        assert_eq!(fp.kind_u, FixedPointKind::Saddle);
    }

    #[test]
    fn reduced_mass_constant() {
        let p = HamiltonianParams::new(1.0, 8.0, -0.4).unwrap();
        let fp = fixed_points(&p).unwrap();
        assert!(fp.v_l < 0.0 && fp.v_u > 0.0);
        for v in [fp.v_l, fp.v_u] {
            assert!(potential_g(v, &p, Order::First).unwrap().abs() < 1e-11);
        }
        assert_eq!(fp.kind_l, FixedPointKind::CenterMinimum);
        assert_eq!(fp.kind_u, FixedPointKind::Saddle);
    }

    #[test]
    fn upper_point_grows_as_k_decreases() {
        let mut last = 0.0;
        for i in 0..20 {
            let k = K0 - 0.02 * i as f64;
            let fp = find_fixed_points(&HamiltonianParams::new(1.0, 8.0, k).unwrap()).unwrap();
            assert!(fp.v_u > last, "K = {k}");
            last = fp.v_u;
        }
    }

    #[test]
    fn energy_window_at_flat_constant() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let w = energy_interval(&p).unwrap();
        assert!((w.e_min - 8.0 * 0.5f64.ln()).abs() < 1e-14);
        assert!(w.e_max > w.e_min);
        assert!(w.has_homoclinic);
    }

    #[test]
    fn homoclinic_predicate_flips_with_k() {
        // oracle: bisection on H(-1,0) - H(v_u,0) as a function of K
        let gap = |k: f64| {
            let p = HamiltonianParams::new(1.0, 8.0, k).unwrap();
            let fp = find_fixed_points(&p).unwrap();
            hamiltonian(-1.0, 0.0, &p).unwrap() - hamiltonian(fp.v_u, 0.0, &p).unwrap()
        };
        let k_cross = bisect(gap, -3.0, K0, 1e-13).unwrap();
        let above = HamiltonianParams::new(1.0, 8.0, k_cross + 1e-6).unwrap();
        let below = HamiltonianParams::new(1.0, 8.0, k_cross - 1e-6).unwrap();
        assert!(energy_interval(&above).unwrap().has_homoclinic);
        assert!(!energy_interval(&below).unwrap().has_homoclinic);
    }

    #[test]
    fn turning_point_residuals() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let w = energy_interval(&p).unwrap();
        let e = 0.5 * (w.e_min + w.e_max);
        let tp = turning_points(e, &p).unwrap();
        assert!(tp.q0 < 0.0 && tp.q1 > 0.0);
        for q in [tp.q0, tp.q1] {
            assert!((potential_unchecked(q, &p) - e).abs() < 1e-12);
        }
        let tiny = turning_points(w.e_min + 1e-12, &p).unwrap();
        assert!(tiny.q1 - tiny.q0 < 1e-5);
        let big = turning_points(w.e_max - 1e-10, &p).unwrap();
        let fp = find_fixed_points(&p).unwrap();
        assert!(big.q1 < fp.v_u && fp.v_u - big.q1 < 1e-3);
        assert!(turning_points(w.e_max + 1.0, &p).is_err());
        assert!(turning_points(w.e_min - 1.0, &p).is_err());
    }

    #[test]
    fn period_tends_to_linear_value() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let w = energy_interval(&p).unwrap();
        let t = period(w.e_min + 1e-6, &p).unwrap();
        assert!((t / (2.0 * PI) - 1.0).abs() < 1e-3, "{t}");
    }

    #[test]
    fn period_increases_toward_homoclinic() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let w = energy_interval(&p).unwrap();
        let energies: Vec<f64> = (1..=9)
            .map(|i| w.e_max - (w.e_max - w.e_min) * 10f64.powi(-i))
            .collect();
        let periods: Vec<f64> = period_sweep(Exec::Sequential, &energies, &p)
            .into_iter()
            .map(Result::unwrap)
            .collect();
        for pair in periods.windows(2) {
            assert!(pair[1] > pair[0]);
        }
        // logarithmic divergence: roughly constant increments per decade
        let inc: Vec<f64> = periods.windows(2).map(|p| p[1] - p[0]).collect();
        let last = inc[inc.len() - 1];
        let prev = inc[inc.len() - 2];
        assert!((last / prev - 1.0).abs() < 0.1, "{inc:?}");
    }

    #[test]
    fn period_matches_time_of_flight() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let w = energy_interval(&p).unwrap();
        let e = 0.5 * (w.e_min + w.e_max);
        let orbit = orbit_integrals(e, &p).unwrap();
        let traj = integrate_orbit(orbit.turning.q1, 0.0, 1.2 * orbit.period, 1e-3, &p).unwrap();
        let t = return_time(&traj, &p).unwrap();
        assert!((t / orbit.period - 1.0).abs() < 1e-6, "{t} vs {}", orbit.period);
        // returns to the starting turning point
        let idx = (orbit.period / 1e-3).round() as usize;
        assert!((traj.v[idx] - orbit.turning.q1).abs() < 1e-5);
    }

    #[test]
    fn fixed_point_is_stationary() {
        let p = HamiltonianParams::new(1.0, 8.0, -0.4).unwrap();
        let fp = find_fixed_points(&p).unwrap();
        let traj = integrate_orbit(fp.v_l, 0.0, 5.0, 1e-3, &p).unwrap();
        assert!(traj.v.iter().all(|v| (v - fp.v_l).abs() < 1e-12));
    }

    #[test]
    fn verlet_energy_error_scales_quadratically() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let w = energy_interval(&p).unwrap();
        let e = w.e_min + 0.1 * (w.e_max - w.e_min);
        let orbit = orbit_integrals(e, &p).unwrap();
        let dev = |dt: f64| {
            integrate_orbit(orbit.turning.q1, 0.0, orbit.period, dt, &p)
                .unwrap()
                .energy_deviation(&p)
        };
        let coarse = dev(1e-3);
        assert!(coarse < 1e-8, "{coarse}");
        let ratio = coarse / dev(5e-4);
        assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
    }

    #[test]
    fn boundary_flag() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let traj = integrate_orbit(-0.5, -50.0, 1.0, 1e-3, &p).unwrap();
        assert!(traj.hit_boundary);
    }

    #[test]
    fn v_max_infinity_values() {
        let k = -0.4;
        let v = v_max_infinity(k).unwrap();
        // closed form evaluated by hand: e^-0.4 = 0.6703200460356393
        let ek = 0.6703200460356393f64;
        assert!((v - (1.0 - 2.0 * ek) / (ek - 1.0)).abs() < 1e-14);
        assert!((v - 1.0332).abs() < 1e-4, "{v}");
        // G∞(-1) = K by continuous extension
        assert!((g_inf(v, k) - k).abs() < 1e-10);
        assert!((v_max_infinity(-30.0).unwrap() + 1.0).abs() < 1e-8);
        let v0 = v_max_infinity(K0).unwrap();
        assert!(v0 > 0.0);
        assert!((g_inf(v0, K0) - K0).abs() < 1e-10);
        assert!(v_max_infinity(0.0).is_err());
    }

    #[test]
    fn origin_eigenvalue_regimes() {
        for (m, real) in [(2.0, true), (4.0, true), (8.0, false)] {
            let (re, im) = origin_eigenvalue(1.0, m);
            let curvature = potential_second_unchecked(0.0, &HamiltonianParams::flat(1.0, m));
            // λ² = -G''(0)
            assert!((re * re - im * im + curvature).abs() < 1e-14);
            assert_eq!(im == 0.0, real);
        }
        assert_eq!(origin_eigenvalue(1.0, 4.0), (0.0, 0.0));
    }
}
