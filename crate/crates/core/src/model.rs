//! Model parameters and the pointwise nonlinearities of the steady problem.
//!
//! Heights are written `h = 1 + v`. Steady periodic states solve
//! `v'' = g v - M ω(v) + M K` with the nonlocal constant `K = K(v)`, which is
//! the Hamiltonian system generated by `H(v, w) = w²/2 + G(v)`.

use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::profile::PeriodicProfile;

/// `K(0) = 1/2 + log(1/2)`, the mass constant of the flat film.
pub const K0: f64 = 0.5 - std::f64::consts::LN_2;

/// Below this value `(1+v) log((1+v)/(2+v))` is replaced by its limit 0.
const BOUNDARY_EPS: f64 = 1e-300;

/// Physical parameters of the thin-film model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Gravitational constant.
    pub g: f64,
    /// Scaled Marangoni number.
    pub marangoni: f64,
    /// Wave number of the periodic states.
    pub k0: f64,
}

impl ModelParams {
    pub fn new(g: f64, marangoni: f64, k0: f64) -> Result<Self> {
        for (name, value) in [("g", g), ("M", marangoni), ("k0", k0)] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {value}")));
            }
        }
        Ok(Self { g, marangoni, k0 })
    }

    /// `M* = 4g`: onset of the long-wave instability.
    pub fn m_star(&self) -> f64 {
        4.0 * self.g
    }

    /// `M*(k0) = 4g + 4k0²`: bifurcation point of `2π/k0`-periodic states.
    pub fn m_star_k0(&self) -> f64 {
        4.0 * self.g + 4.0 * self.k0 * self.k0
    }

    pub fn with_marangoni(self, marangoni: f64) -> Self {
        Self { marangoni, ..self }
    }

    pub fn hamiltonian(&self, mass_constant: f64) -> HamiltonianParams {
        HamiltonianParams {
            g: self.g,
            marangoni: self.marangoni,
            mass_constant,
        }
    }
}

/// Parameters `(g, M, K)` of the planar Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    pub g: f64,
    pub marangoni: f64,
    /// Integration constant `K`, required to satisfy `K ≤ K(0)`.
    pub mass_constant: f64,
}

impl HamiltonianParams {
    pub fn new(g: f64, marangoni: f64, mass_constant: f64) -> Result<Self> {
        if !(g > 0.0 && marangoni > 0.0) {
            return Err(Error::Domain(format!("g and M must be positive, got g = {g}, M = {marangoni}")));
        }
        if !(mass_constant <= K0 + 1e-15) {
            return Err(Error::Domain(format!("K = {mass_constant} exceeds K(0) = {K0}")));
        }
        Ok(Self { g, marangoni, mass_constant })
    }

    /// Shorthand at the flat-film constant `K = K(0)`.
    pub fn flat(g: f64, marangoni: f64) -> Self {
        Self { g, marangoni, mass_constant: K0 }
    }
}

fn check_domain(v: f64) -> Result<()> {
    if v > -1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("v = {v} must exceed -1")))
    }
}

/// `ω(v) = 1/(2+v) + log((1+v)/(2+v))`, strictly concave on `(-1, ∞)`.
pub fn omega(v: f64) -> Result<f64> {
    check_domain(v)?;
    Ok(omega_unchecked(v))
}

#[inline]
pub(crate) fn omega_unchecked(v: f64) -> f64 {
    1.0 / (2.0 + v) + ((1.0 + v) / (2.0 + v)).ln()
}

/// `ω'(v) = 1/((1+v)(2+v)²)`.
#[inline]
pub fn omega_prime(v: f64) -> f64 {
    1.0 / ((1.0 + v) * (2.0 + v) * (2.0 + v))
}

/// `ω''(v)`.
#[inline]
pub fn omega_second(v: f64) -> f64 {
    let a = 1.0 + v;
    let b = 2.0 + v;
    -(b + 2.0 * a) / (a * a * b * b * b)
}

/// `(1+v) log((1+v)/(2+v))`, continuously extended by 0 at `v = -1`.
fn boundary_term(v: f64) -> f64 {
    let a = 1.0 + v;
    if a < BOUNDARY_EPS {
        0.0
    } else {
        a * (a / (1.0 + a)).ln()
    }
}

/// Period average of `ω(v)`, the nonlocal mass constant `K(v)`.
///
/// Trapezoid rule with `8N` points; spectrally accurate for smooth profiles.
pub fn mass_constant_k(v: &PeriodicProfile) -> Result<f64> {
    let n = (8 * v.n_modes()).max(16);
    mass_constant_k_with(v, n)
}

/// [`mass_constant_k`] on an explicit number of quadrature points.
pub fn mass_constant_k_with(v: &PeriodicProfile, n_quad: usize) -> Result<f64> {
    let samples = v.sample(n_quad, 0);
    let mut sum = 0.0;
    for &s in &samples {
        if s <= -1.0 {
            return Err(Error::Positivity { min_height: 1.0 + s });
        }
        sum += omega_unchecked(s);
    }
    Ok(sum / n_quad as f64)
}

/// [`mass_constant_k`] over a batch of profiles.
pub fn mass_constant_batch(exec: Exec, profiles: &[PeriodicProfile]) -> Vec<Result<f64>> {
    par::map(exec, profiles, mass_constant_k)
}

/// `H(v, w) = w²/2 - (g/2) v² + M (1+v) log((1+v)/(2+v)) - M K v`.
///
/// Defined on the closed half plane `v ≥ -1`.
pub fn hamiltonian(v: f64, w: f64, p: &HamiltonianParams) -> Result<f64> {
    if v < -1.0 {
        return Err(Error::Domain(format!("v = {v} below -1")));
    }
    Ok(0.5 * w * w + potential_unchecked(v, p))
}

pub(crate) fn potential_unchecked(v: f64, p: &HamiltonianParams) -> f64 {
    -0.5 * p.g * v * v + p.marangoni * boundary_term(v) - p.marangoni * p.mass_constant * v
}

/// Force `G'(v) = -g v + M ω(v) - M K`.
#[inline]
pub(crate) fn potential_prime_unchecked(v: f64, p: &HamiltonianParams) -> f64 {
    -p.g * v + p.marangoni * omega_unchecked(v) - p.marangoni * p.mass_constant
}

#[inline]
pub(crate) fn potential_second_unchecked(v: f64, p: &HamiltonianParams) -> f64 {
    -p.g + p.marangoni * omega_prime(v)
}

/// Derivative order of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Value,
    First,
    Second,
}

/// The potential part `G` of `H = w²/2 + G(v)` and its first two derivatives.
pub fn potential_g(v: f64, p: &HamiltonianParams, order: Order) -> Result<f64> {
    check_domain(v)?;
    Ok(match order {
        Order::Value => potential_unchecked(v, p),
        Order::First => potential_prime_unchecked(v, p),
        Order::Second => potential_second_unchecked(v, p),
    })
}

/// Pointwise flux `h³(h''' - g h') + M h²/(1+h)² h'`.
///
/// Steady states of the thin-film equation have vanishing flux.
pub fn stationary_flux(h: &[f64], hx: &[f64], hxxx: &[f64], p: &ModelParams) -> Vec<f64> {
    assert!(h.len() == hx.len() && h.len() == hxxx.len());
    h.iter()
        .zip(hx)
        .zip(hxxx)
        .map(|((&h, &hx), &h3)| flux_density(h, hx, h3, p.g, p.marangoni))
        .collect()
}

#[inline]
pub(crate) fn flux_density(h: f64, hx: f64, hxxx: f64, g: f64, marangoni: f64) -> f64 {
    let hp = 1.0 + h;
    h * h * h * (hxxx - g * hx) + marangoni * h * h / (hp * hp) * hx
}

/// `max |flux|` of `h = 1 + v` on an `n_points` grid.
pub fn max_flux_residual(v: &PeriodicProfile, p: &ModelParams, n_points: usize) -> f64 {
    let h: Vec<f64> = v.sample(n_points, 0).iter().map(|x| 1.0 + x).collect();
    let hx = v.sample(n_points, 1);
    let hxxx = v.sample(n_points, 3);
    stationary_flux(&h, &hx, &hxxx, p)
        .into_iter()
        .fold(0.0, |m, f| m.max(f.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn omega_values() {
        assert!((omega(0.0).unwrap() - (0.5 + 0.5f64.ln())).abs() < 1e-16);
        assert!((omega(0.0).unwrap() - (-0.193147)).abs() < 1e-6);
        assert!(omega(-1.0 + 1e-8).unwrap() < -15.0);
        assert!((omega(1.0).unwrap() - (1.0 / 3.0 + (2.0f64 / 3.0).ln())).abs() < 1e-15);
        assert!((omega(1.0).unwrap() + 0.0721).abs() < 1e-4);
        assert!(omega(-1.0).is_err());
        assert!(omega(-2.0).is_err());
    }

    #[test]
    fn omega_derivatives_match_finite_differences() {
        for v in [-0.5, 0.0, 1.0, 3.0] {
            let h = 1e-5;
            let fd1 = (omega_unchecked(v + h) - omega_unchecked(v - h)) / (2.0 * h);
            let fd2 = (omega_prime(v + h) - omega_prime(v - h)) / (2.0 * h);
            assert!((fd1 - omega_prime(v)).abs() < 1e-8 * omega_prime(v).abs().max(1.0));
            assert!((fd2 - omega_second(v)).abs() < 1e-7 * omega_second(v).abs().max(1.0));
        }
        assert!((omega_prime(0.0) - 0.25).abs() < 1e-16);
        assert!((omega_second(0.0) + 0.5).abs() < 1e-16);
    }

    #[test]
    fn mass_constant_of_flat_film() {
        let k = mass_constant_k(&PeriodicProfile::zero(1.0, 16)).unwrap();
        assert!((k - K0).abs() < 1e-15);
    }

    #[test]
    fn mass_constant_strictly_below_k0() {
        let k = mass_constant_k(&PeriodicProfile::single_mode(1.0, 0.1, 8)).unwrap();
        assert!(k < K0);
    }

    #[test]
    fn mass_constant_matches_refined_quadrature() {
        // brute force: 10^6-point midpoint sum of the integrand
        let n = 1_000_000;
        let brute: f64 = (0..n)
            .map(|i| {
                let x = -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64;
                omega_unchecked(0.3 * x.cos())
            })
            .sum::<f64>()
            / n as f64;
        let k = mass_constant_k(&PeriodicProfile::single_mode(1.0, 0.3, 8)).unwrap();
        assert!((k - brute).abs() < 1e-10, "{k} vs {brute}");
    }

    #[test]
    fn mass_constant_rejects_nonpositive_height() {
        let err = mass_constant_k(&PeriodicProfile::single_mode(1.0, 1.2, 4)).unwrap_err();
        assert!(matches!(err, Error::Positivity { .. }));
    }

    #[test]
    fn hamiltonian_values() {
        let p = HamiltonianParams::flat(1.0, 8.0);
        let h00 = hamiltonian(0.0, 0.0, &p).unwrap();
        assert!((h00 - 8.0 * 0.5f64.ln()).abs() < 1e-14);
        assert!((h00 + 5.5452).abs() < 1e-4);
        // continuous extension at the boundary: (1+v) log term vanishes
        let hb = hamiltonian(-1.0, 0.0, &p).unwrap();
        assert!((hb - (-0.5 * p.g + p.marangoni * p.mass_constant)).abs() < 1e-14);
        let near = hamiltonian(-1.0 + 1e-12, 0.0, &p).unwrap();
        assert!((near - hb).abs() < 1e-9);
        assert!(hamiltonian(-1.1, 0.0, &p).is_err());
    }

    #[test]
    fn potential_curvature_at_onset() {
        let p = HamiltonianParams::flat(1.0, 4.0);
        assert_eq!(potential_g(0.0, &p, Order::Second).unwrap(), 0.0);
        let p = HamiltonianParams::flat(1.0, 8.0);
        assert_eq!(potential_g(0.0, &p, Order::Second).unwrap(), 1.0);
        assert!(potential_g(0.0, &p, Order::First).unwrap().abs() < 1e-15);
    }

    #[test]
    fn potential_derivatives_match_finite_differences() {
        let p = HamiltonianParams::new(1.0, 8.0, -0.4).unwrap();
        for v in [-0.5, 0.0, 1.0] {
            let h = 1e-5;
            let g = |o, x| potential_g(x, &p, o).unwrap();
            let fd1 = (g(Order::Value, v + h) - g(Order::Value, v - h)) / (2.0 * h);
            let fd2 = (g(Order::First, v + h) - g(Order::First, v - h)) / (2.0 * h);
            let d1 = g(Order::First, v);
            let d2 = g(Order::Second, v);
            assert!((fd1 - d1).abs() <= 1e-6 * d1.abs().max(1.0));
            assert!((fd2 - d2).abs() <= 1e-6 * d2.abs().max(1.0));
        }
    }

    #[test]
    fn flux_of_flat_film_vanishes() {
        let p = ModelParams::new(1.0, 8.0, 1.0).unwrap();
        let f = stationary_flux(&[1.0; 8], &[0.0; 8], &[0.0; 8], &p);
        assert!(f.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(-1.0, 8.0, 1.0).is_err());
        let p = ModelParams::new(1.0, 8.0, 1.0).unwrap();
        assert_eq!((p.m_star(), p.m_star_k0()), (4.0, 8.0));
        assert!(HamiltonianParams::new(1.0, 8.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn omega_is_concave(a in -0.99f64..10.0, b in -0.99f64..10.0) {
            let mid = omega_unchecked(0.5 * (a + b));
            let avg = 0.5 * (omega_unchecked(a) + omega_unchecked(b));
            prop_assert!(mid >= avg - 1e-15);
        }

        #[test]
        fn kinetic_part_separates(v in -0.99f64..5.0, w in -10.0f64..10.0) {
            let p = HamiltonianParams::new(1.0, 8.0, -0.3).unwrap();
            let d = hamiltonian(v, w, &p).unwrap() - hamiltonian(v, 0.0, &p).unwrap();
            prop_assert!((d - 0.5 * w * w).abs() <= 1e-12 * (1.0 + 0.5 * w * w));
        }
    }
}
