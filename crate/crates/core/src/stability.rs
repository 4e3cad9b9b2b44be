//! Linear stability of the flat film and of periodic steady states.
//!
//! The linearisation about `h` is
//! `L u = -∂ₓ[h³(u''' - g u') + 3h²(h''' - g h')u + M h²/(1+h)² u' + 2M h h'/(1+h)³ u]`,
//! discretised by Fourier collocation on an odd number of points over one
//! full period (perturbations need not be even).

use crate::continuation::BranchPoint;
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::par::{self, Exec};
use crate::profile::PeriodicProfile;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Largest number of retained Fourier modes (matrix size `2m + 1 ≤ 511`).
pub const MAX_SPECTRAL_MODES: usize = 255;
/// Smallest number of retained modes.
pub const MIN_SPECTRAL_MODES: usize = 16;
/// Relative energy of `v` beyond the retained modes that is still accepted.
pub const RESOLUTION_TOL: f64 = 1e-8;

/// `−ℓ⁴ + (M/4 − g)ℓ²`, the growth rate of `cos(ℓx)` about `h ≡ 1`.
pub fn constant_state_symbol(ell: f64, p: &ModelParams) -> f64 {
    let l2 = ell * ell;
    -l2 * l2 + (p.marangoni / 4.0 - p.g) * l2
}

/// `(M*, M*(k0)) = (4g, 4g + 4k0²)`.
pub fn critical_marangoni(g: f64, k0: f64) -> Result<(f64, f64)> {
    if !(g > 0.0 && k0 > 0.0) {
        return Err(Error::Domain(format!("g = {g}, k0 = {k0} must be positive")));
    }
    Ok((4.0 * g, 4.0 * g + 4.0 * k0 * k0))
}

/// Wavenumbers `0 < ℓ < sqrt(M/4 - g)` with positive symbol, if any.
pub fn unstable_band(p: &ModelParams) -> Option<(f64, f64)> {
    let top = p.marangoni / 4.0 - p.g;
    (top > 0.0).then(|| (0.0, top.sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseState {
    Constant,
    Periodic { marangoni: f64, min_h: f64 },
}

#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub base: BaseState,
    /// Bloch parameter `σ` (0 for co-periodic perturbations).
    pub bloch: f64,
    /// Sorted by descending real part.
    pub eigenvalues: Vec<Complex64>,
    pub leading: f64,
    pub unstable_band: Option<(f64, f64)>,
}

fn sort_descending(eigs: &mut [Complex64]) {
    eigs.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Fourier differentiation matrix on `n` (odd) equispaced points over a period `length`.
fn differentiation_matrix(n: usize, length: f64) -> DMatrix<f64> {
    assert!(n % 2 == 1, "odd grid required");
    let scale = 2.0 * PI / length;
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            let d = i as isize - j as isize;
            let sign = if d.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            scale * 0.5 * sign / (d as f64 * PI / n as f64).sin()
        }
    })
}

/// Retained mode count for `v`, or a resolution error.
///
/// The smallest `m ≥ MIN_SPECTRAL_MODES` leaving relative energy below
/// `1e-24` beyond it; a large `m` inflates `‖L‖ ~ m⁴` and with it the
/// round-off in every eigenvalue.
fn spectral_modes(v: &PeriodicProfile) -> Result<usize> {
    let cap = v.n_modes().min(MAX_SPECTRAL_MODES);
    let mut m = MIN_SPECTRAL_MODES.min(cap.max(1));
    while m < cap && v.tail_energy(m) > 1e-24 {
        m += 8;
    }
    let m = m.clamp(MIN_SPECTRAL_MODES, MAX_SPECTRAL_MODES);
    let tail = v.tail_energy(m);
    if tail > RESOLUTION_TOL {
        return Err(Error::Resolution { tail });
    }
    Ok(m)
}

/// Pointwise coefficients of the linearised flux about `h = 1 + v`:
/// `h³`, `M h²/(1+h)²` and `3h²(h''' - g h') + 2M h h'/(1+h)³` on `n` points.
fn flux_coefficients(v: &PeriodicProfile, p: &ModelParams, n: usize) -> Vec<(f64, f64, f64)> {
    let dx = 2.0 * PI / (p.k0 * n as f64);
    (0..n)
        .map(|i| {
            let x = -PI / p.k0 + i as f64 * dx;
            let h = 1.0 + v.eval(x);
            let hx = v.eval_derivative(x, 1);
            let hxxx = v.eval_derivative(x, 3);
            let thermo = p.marangoni * h * h / ((1.0 + h) * (1.0 + h));
            let reaction = 3.0 * h * h * (hxxx - p.g * hx) + 2.0 * p.marangoni * h * hx / (1.0 + h).powi(3);
            (h * h * h, thermo, reaction)
        })
        .collect()
}

/// `L = -D A` with `A u` the linearised flux, for any derivative matrix `D`.
fn assemble<T>(d: &DMatrix<T>, coeffs: &[(f64, f64, f64)], g: f64) -> DMatrix<T>
where
    T: nalgebra::ComplexField<RealField = f64> + Copy,
{
    let d3 = d * d * d;
    let n = d.nrows();
    let mut a = DMatrix::<T>::zeros(n, n);
    for (i, &(mobility, thermo, reaction)) in coeffs.iter().enumerate() {
        for j in 0..n {
            a[(i, j)] = (d3[(i, j)] - d[(i, j)].scale(g)).scale(mobility) + d[(i, j)].scale(thermo);
        }
        a[(i, i)] += T::from_real(reaction);
    }
    -(d * a)
}

fn report(base: BaseState, bloch: f64, mut eigs: Vec<Complex64>, n_eigs: usize, p: &ModelParams) -> SpectrumReport {
    sort_descending(&mut eigs);
    eigs.truncate(n_eigs.max(1));
    SpectrumReport {
        base,
        bloch,
        leading: eigs[0].re,
        eigenvalues: eigs,
        unstable_band: unstable_band(p),
    }
}

/// Spectrum of the linearisation about `h = 1 + v` for perturbations
/// `e^{iσx} u(x)` with `u` of period `2π/k0`.
pub fn profile_spectrum(v: &PeriodicProfile, p: &ModelParams, bloch: f64, n_eigs: usize) -> Result<Vec<Complex64>> {
    let m = spectral_modes(v)?;
    let n = 2 * m + 1;
    let coeffs = flux_coefficients(v, p, n);
    let d = differentiation_matrix(n, 2.0 * PI / p.k0);
    let mut eigs = if bloch == 0.0 {
        assemble(&d, &coeffs, p.g).complex_eigenvalues().as_slice().to_vec()
    } else {
        // ∂ₓ → ∂ₓ + iσ in every derivative
        let shift = DMatrix::from_diagonal_element(n, n, Complex64::new(0.0, bloch));
        let dc = d.map(|x| Complex64::new(x, 0.0)) + shift;
        assemble(&dc, &coeffs, p.g)
            .schur()
            .eigenvalues()
            .ok_or_else(|| Error::NoSolution("complex Schur form did not converge".into()))?
            .as_slice()
            .to_vec()
    };
    sort_descending(&mut eigs);
    eigs.truncate(n_eigs.max(1));
    Ok(eigs)
}

/// Discrete spectrum about `h ≡ 1` on `2m + 1` co-periodic modes.
pub fn constant_state_spectrum(p: &ModelParams, m: usize, n_eigs: usize) -> Result<SpectrumReport> {
    let v = PeriodicProfile::zero(p.k0, m.clamp(1, MAX_SPECTRAL_MODES));
    let eigs = profile_spectrum(&v, p, 0.0, usize::MAX)?;
    Ok(report(BaseState::Constant, 0.0, eigs, n_eigs, p))
}

/// Co-periodic spectrum about a branch point.
pub fn periodic_state_spectrum(bp: &BranchPoint, g: f64, n_eigs: usize) -> Result<SpectrumReport> {
    bloch_spectrum(bp, g, 0.0, n_eigs)
}

/// Spectrum about a branch point at Bloch parameter `σ`.
pub fn bloch_spectrum(bp: &BranchPoint, g: f64, bloch: f64, n_eigs: usize) -> Result<SpectrumReport> {
    if !(bp.min_h > 0.05) {
        return Err(Error::Domain(format!("min h = {} too close to rupture for the spectrum", bp.min_h)));
    }
    let p = ModelParams {
        g,
        marangoni: bp.marangoni,
        k0: bp.profile.k0(),
    };
    let eigs = profile_spectrum(&bp.profile, &p, bloch, usize::MAX)?;
    let base = BaseState::Periodic {
        marangoni: bp.marangoni,
        min_h: bp.min_h,
    };
    Ok(report(base, bloch, eigs, n_eigs, &p))
}

/// Spectra at `n_sigma` Bloch parameters evenly spaced in `[0, k0)`.
pub fn bloch_sweep(exec: Exec, bp: &BranchPoint, g: f64, n_sigma: usize, n_eigs: usize) -> Vec<Result<SpectrumReport>> {
    let k0 = bp.profile.k0();
    par::map_range(exec, n_sigma, |i| {
        bloch_spectrum(bp, g, k0 * i as f64 / n_sigma as f64, n_eigs)
    })
}

/// Fills `leading_eig` for every point with `min_h > 0.05`; others stay NaN.
pub fn fill_leading_eigenvalues(exec: Exec, points: &mut [BranchPoint], g: f64) {
    let leads = par::map(exec, points, |bp| {
        periodic_state_spectrum(bp, g, 1).map_or(f64::NAN, |r| r.leading)
    });
    for (bp, l) in points.iter_mut().zip(leads) {
        bp.leading_eig = l;
    }
}

/// Largest distance between the top `2J + 1` eigenvalues and the symbol at
/// the co-periodic wavenumbers `j k0`, `|j| ≤ J`, both sorted by real part.
pub fn symbol_deviation(eigs: &[Complex64], p: &ModelParams, j_max: usize) -> f64 {
    let mut symbols: Vec<f64> = (-(j_max as isize)..=j_max as isize)
        .map(|j| constant_state_symbol(j as f64 * p.k0, p))
        .collect();
    symbols.sort_by(|a, b| b.total_cmp(a));
    symbols
        .iter()
        .zip(eigs)
        .map(|(s, e)| (e - s).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steady::{local_expansion, SteadySolver};

    fn params(m: f64) -> ModelParams {
        ModelParams::new(1.0, m, 1.0).unwrap()
    }

    fn branch_point(s: f64) -> BranchPoint {
        let solver = SteadySolver::new(1.0, 1.0, 64);
        let (guess, m) = local_expansion(1.0, 1.0, s, 64);
        let st = solver.solve_at_amplitude(s, &guess, m).unwrap();
        BranchPoint::new(s, st.profile, st.marangoni, 1.0, st.residual).unwrap()
    }

    #[test]
    fn symbol_values() {
        assert_eq!(constant_state_symbol(0.0, &params(3.0)), 0.0);
        let top = constant_state_symbol(std::f64::consts::FRAC_1_SQRT_2, &params(8.0));
        assert!((top - 0.25).abs() < 1e-15);
        for i in 0..200 {
            assert!(constant_state_symbol(i as f64 * 0.05, &params(4.0)) <= 0.0);
        }
        assert_eq!(constant_state_symbol(1.0, &params(8.0)), 0.0);
        assert_eq!(critical_marangoni(1.0, 1.0).unwrap(), (4.0, 8.0));
    }

    #[test]
    fn constant_state_matches_symbol() {
        let p = params(8.5);
        let rep = constant_state_spectrum(&p, 12, usize::MAX).unwrap();
        let dev = symbol_deviation(&rep.eigenvalues, &p, 12);
        assert!(dev < 1e-8 * 12f64.powi(4), "{dev}");
        assert!((rep.leading - 0.125).abs() < 1e-10);
        assert_eq!(rep.unstable_band, Some((0.0, (8.5f64 / 4.0 - 1.0).sqrt())));
    }

    #[test]
    fn small_periodic_state_is_unstable_with_neutral_modes() {
        let bp = branch_point(0.05);
        let rep = periodic_state_spectrum(&bp, 1.0, 8).unwrap();
        assert!(rep.leading > 0.0, "{:?}", rep.eigenvalues);
        let zeros = rep.eigenvalues.iter().filter(|e| e.norm() < 1e-8).count();
        assert!(zeros >= 2, "{:?}", rep.eigenvalues);
    }

    #[test]
    fn bloch_zero_agrees_with_real_path() {
        let bp = branch_point(0.1);
        let p = params(bp.marangoni);
        let real = profile_spectrum(&bp.profile, &p, 0.0, 5).unwrap();
        let complex = profile_spectrum(&bp.profile, &p, 1e-300, 5).unwrap();
        for (a, b) in real.iter().zip(&complex) {
            assert!((a - b).norm() < 1e-7, "{a} {b}");
        }
    }

    #[test]
    fn bloch_shift_on_flat_film() {
        let p = params(8.5);
        let v = PeriodicProfile::zero(1.0, 16);
        let eigs = profile_spectrum(&v, &p, 0.3, usize::MAX).unwrap();
        let best = (-16..=16)
            .map(|j| constant_state_symbol(j as f64 + 0.3, &p))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((eigs[0].re - best).abs() < 1e-9 && eigs[0].im.abs() < 1e-9);
    }

    #[test]
    fn resolution_guard() {
        let mut v = PeriodicProfile::zero(1.0, 512);
        v.coeffs_mut()[0] = 0.1;
        v.coeffs_mut()[400] = 1e-3;
        assert!(matches!(
            profile_spectrum(&v, &params(8.0), 0.0, 1),
            Err(Error::Resolution { .. })
        ));
    }
}
