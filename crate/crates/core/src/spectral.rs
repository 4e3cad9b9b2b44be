//! FFT-backed transforms for even cosine series and full periodic grids.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Uniform grid on `[-π/k0, π/k0)` carrying even cosine series
/// `v(x) = Σ_{ℓ≥1} a_ℓ cos(ℓ k0 x)`.
#[derive(Clone)]
pub struct CosineGrid {
    k0: f64,
    n_points: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for CosineGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CosineGrid")
            .field("k0", &self.k0)
            .field("n_points", &self.n_points)
            .finish()
    }
}

impl CosineGrid {
    pub fn new(k0: f64, n_points: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            k0,
            n_points,
            forward: planner.plan_fft_forward(n_points),
            inverse: planner.plan_fft_inverse(n_points),
        }
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.n_points == 0
    }

    /// Grid spacing.
    pub fn dx(&self) -> f64 {
        2.0 * PI / (self.k0 * self.n_points as f64)
    }

    pub fn points(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.n_points).map(|i| -PI / self.k0 + i as f64 * dx).collect()
    }

    /// Samples the `order`-th derivative of the cosine series on the grid.
    pub fn synthesize(&self, coeffs: &[f64], order: u32) -> Vec<f64> {
        let n = self.n_points;
        assert!(coeffs.len() < n, "grid too coarse for {} modes", coeffs.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let i_pow = Complex64::new(0.0, 1.0).powu(order);
        for (idx, &a) in coeffs.iter().enumerate() {
            let l = idx + 1;
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let factor = i_pow * (l as f64 * self.k0).powi(order as i32);
            buf[l] = factor * (a * sign);
        }
        self.inverse.process(&mut buf);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Discrete cosine moments `Q_j = (1/n) Σ_i f(x_i) cos(j k0 x_i)` for
    /// `j = 0..n`.
    pub fn cosine_moments(&self, values: &[f64]) -> Vec<f64> {
        let n = self.n_points;
        assert_eq!(values.len(), n);
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        let scale = 1.0 / n as f64;
        buf.iter()
            .enumerate()
            .map(|(j, c)| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * c.re * scale
            })
            .collect()
    }

    /// Cosine coefficients `a_1..a_modes` of grid values (mean discarded).
    pub fn project(&self, values: &[f64], modes: usize) -> Vec<f64> {
        let q = self.cosine_moments(values);
        (1..=modes).map(|l| 2.0 * q[l]).collect()
    }
}

/// Uniform grid over one full period `[0, length)` for general (not
/// necessarily even) periodic fields.
#[derive(Clone)]
pub struct FourierGrid {
    length: f64,
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    wavenumbers: Vec<f64>,
}

impl std::fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierGrid")
            .field("length", &self.length)
            .field("n", &self.n)
            .finish()
    }
}

impl FourierGrid {
    pub fn new(length: f64, n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let base = 2.0 * PI / length;
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as i64 } else { j as i64 - n as i64 };
                m as f64 * base
            })
            .collect();
        Self {
            length,
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            wavenumbers,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| i as f64 * self.dx()).collect()
    }

    /// Signed wavenumber of each FFT slot.
    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    /// Index of the Nyquist slot for even `n`.
    fn nyquist(&self) -> Option<usize> {
        self.n.is_multiple_of(2).then_some(self.n / 2)
    }

    pub fn to_spectral(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn to_physical(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut buf = spectrum.to_vec();
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.n as f64;
        buf.into_iter().map(|c| c.re * scale).collect()
    }

    /// Spectral derivative of order `order`. The Nyquist mode is dropped for
    /// odd orders.
    pub fn derivative(&self, values: &[f64], order: u32) -> Vec<f64> {
        let mut spec = self.to_spectral(values);
        self.differentiate_spectrum(&mut spec, order);
        self.to_physical(&spec)
    }

    pub fn differentiate_spectrum(&self, spec: &mut [Complex64], order: u32) {
        let i = Complex64::new(0.0, 1.0);
        for (c, &k) in spec.iter_mut().zip(&self.wavenumbers) {
            *c *= (i * k).powu(order);
        }
        if order % 2 == 1 {
            if let Some(ny) = self.nyquist() {
                spec[ny] = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Modulus of the Fourier coefficient of integer mode `m` (as a
    /// real amplitude: `f = A cos(...)` gives `A`).
    pub fn mode_amplitude(&self, values: &[f64], m: usize) -> f64 {
        let spec = self.to_spectral(values);
        2.0 * spec[m].norm() / self.n as f64
    }

    pub fn mean(&self, values: &[f64]) -> f64 {
        values.iter().sum::<f64>() / values.len() as f64
    }
}
