//! Even, mean-zero periodic perturbations `v(x) = Σ aℓ cos(ℓ k0 x)`.

use crate::spectral::CosineGrid;
use std::f64::consts::PI;

/// An even, mean-zero, `2π/k0`-periodic perturbation of the flat film.
///
/// There is no constant mode, so every profile has zero mean over a period.
/// The film height is `h = 1 + v`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicProfile {
    k0: f64,
    coeffs: Vec<f64>,
}

impl PeriodicProfile {
    pub fn new(k0: f64, coeffs: Vec<f64>) -> Self {
        assert!(k0 > 0.0, "wave number must be positive");
        Self { k0, coeffs }
    }

    pub fn zero(k0: f64, modes: usize) -> Self {
        Self::new(k0, vec![0.0; modes])
    }

    /// `s cos(k0 x)` truncated to `modes` modes.
    pub fn single_mode(k0: f64, amplitude: f64, modes: usize) -> Self {
        let mut coeffs = vec![0.0; modes.max(1)];
        coeffs[0] = amplitude;
        Self::new(k0, coeffs)
    }

    /// Cosine coefficients of samples on the standard grid of
    /// [`CosineGrid`] with `samples.len()` points.
    pub fn from_samples(k0: f64, samples: &[f64], modes: usize) -> Self {
        let grid = CosineGrid::new(k0, samples.len());
        Self::new(k0, grid.project(samples, modes))
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn n_modes(&self) -> usize {
        self.coeffs.len()
    }

    /// Half period `π/k0`.
    pub fn half_period(&self) -> f64 {
        PI / self.k0
    }

    /// Coefficient of `cos(k0 x)`; the branch parameter near onset.
    pub fn amplitude(&self) -> f64 {
        self.coeffs.first().copied().unwrap_or(0.0)
    }

    /// Copy with `modes` coefficients (zero-padded or truncated).
    pub fn resized(&self, modes: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(modes, 0.0);
        Self::new(self.k0, coeffs)
    }

    /// `d^order v / dx^order` at `x`.
    pub fn eval_derivative(&self, x: f64, order: u32) -> f64 {
        let phase = order as f64 * PI / 2.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let w = (i + 1) as f64 * self.k0;
                a * w.powi(order as i32) * (w * x + phase).cos()
            })
            .sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_derivative(x, 0)
    }

    /// Default sampling grid size: `8N` points, at least 256.
    pub fn default_grid_size(&self) -> usize {
        (8 * self.n_modes()).max(256)
    }

    pub fn grid(&self, n_points: usize) -> CosineGrid {
        CosineGrid::new(self.k0, n_points)
    }

    /// Samples of the `order`-th derivative on an `n_points` uniform grid.
    pub fn sample(&self, n_points: usize, order: u32) -> Vec<f64> {
        self.grid(n_points).synthesize(&self.coeffs, order)
    }

    /// Minimum of the height `1 + v` over the default sampling grid.
    pub fn min_height(&self) -> f64 {
        1.0 + self
            .sample(self.default_grid_size(), 0)
            .into_iter()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_height(&self) -> f64 {
        1.0 + self
            .sample(self.default_grid_size(), 0)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max |v^(order)|` over the default sampling grid.
    pub fn sup_norm(&self, order: u32) -> f64 {
        self.sample(self.default_grid_size(), order)
            .into_iter()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `L²(-π/k0, π/k0)` norm.
    pub fn l2_norm(&self) -> f64 {
        (self.half_period() * self.coeffs.iter().map(|a| a * a).sum::<f64>()).sqrt()
    }

    /// `H²(-π/k0, π/k0)` norm.
    pub fn h2_norm(&self) -> f64 {
        let s: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let w2 = ((i + 1) as f64 * self.k0).powi(2);
                (1.0 + w2 + w2 * w2) * a * a
            })
            .sum();
        (self.half_period() * s).sqrt()
    }

    /// `W^{2,4}(-π/k0, π/k0)` norm by trapezoid quadrature.
    pub fn w24_norm(&self) -> f64 {
        let n = self.default_grid_size();
        let dx = 2.0 * PI / (self.k0 * n as f64);
        let s: f64 = (0..3u32)
            .map(|order| self.sample(n, order).iter().map(|v| v.powi(4)).sum::<f64>())
            .sum();
        (s * dx).powf(0.25)
    }

    /// `|a_N| / max |a_ℓ|`, the resolution indicator.
    pub fn tail_ratio(&self) -> f64 {
        let max = self.coeffs.iter().fold(0.0f64, |m, a| m.max(a.abs()));
        if max == 0.0 {
            return 0.0;
        }
        self.coeffs.last().map_or(0.0, |a| a.abs() / max)
    }

    /// Relative energy carried by modes above `modes`.
    pub fn tail_energy(&self, modes: usize) -> f64 {
        let total: f64 = self.coeffs.iter().map(|a| a * a).sum();
        if total == 0.0 {
            return 0.0;
        }
        self.coeffs.iter().skip(modes).map(|a| a * a).sum::<f64>() / total
    }

    /// Largest coefficient difference, a cheap L∞ bound on `self - other`.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        let n = self.n_modes().max(other.n_modes());
        let a = self.resized(n);
        let b = other.resized(n);
        let diff = PeriodicProfile::new(self.k0, a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect());
        diff.sup_norm(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_and_mean_zero() {
        let p = PeriodicProfile::new(1.5, vec![0.3, -0.2, 0.1]);
        for x in [0.1, 0.7, 1.9] {
            assert!((p.eval(x) - p.eval(-x)).abs() < 1e-15);
        }
        let s = p.sample(128, 0);
        assert!(s.iter().sum::<f64>().abs() < 1e-13);
    }

    #[test]
    fn heights_and_norms() {
        let p = PeriodicProfile::single_mode(1.0, 0.4, 8);
        assert!((p.min_height() - 0.6).abs() < 1e-14);
        assert!((p.max_height() - 1.4).abs() < 1e-14);
        assert!((p.l2_norm() - 0.4 * PI.sqrt()).abs() < 1e-14);
        assert!((p.sup_norm(2) - 0.4).abs() < 1e-14);
        assert_eq!(p.tail_ratio(), 0.0);
    }

    #[test]
    fn samples_roundtrip_through_projection() {
        let p = PeriodicProfile::new(2.0, vec![0.1, 0.02, -0.003, 0.0004]);
        let q = PeriodicProfile::from_samples(2.0, &p.sample(64, 0), 4);
        for (a, b) in p.coeffs().iter().zip(q.coeffs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
