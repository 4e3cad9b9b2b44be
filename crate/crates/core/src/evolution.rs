//! Time stepping of the thin-film equation and of its long-wave amplitude
//! equation `V_T = -V'''' - V'' - 2g (V V')'`.
//!
//! Both use a first-order implicit–explicit Fourier scheme with every
//! explicit term in divergence form, so the mean (mass) is carried by the
//! zero mode and never touched.

use crate::error::{Error, Result};
use crate::spectral::FourierGrid;
use num_complex::Complex64;

/// Evolution halts once `min h` drops below this.
pub const HEIGHT_FLOOR: f64 = 1e-4;
/// `‖V‖∞` above which the amplitude equation is considered blown up.
pub const OVERFLOW: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState {
    pub t: f64,
    /// Heights on the uniform grid `x_i = i L / n`.
    pub h: Vec<f64>,
    /// Last step taken.
    pub dt: f64,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepControl {
    /// Upper bound on a single step.
    pub dt_max: f64,
    /// The explicit increment per step is kept below `cfl · min h`.
    pub cfl: f64,
    pub h_floor: f64,
    /// A bound-limited step below this is reported as a failure.
    pub dt_min: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            dt_max: 1e-2,
            cfl: 0.05,
            h_floor: HEIGHT_FLOOR,
            dt_min: 1e-7,
        }
    }
}

/// Thin-film equation `h_t + ∂ₓ[h³(h''' - g h') + M h²/(1+h)² h'] = 0` on a
/// periodic domain.
#[derive(Debug)]
pub struct ThinFilm {
    pub g: f64,
    pub marangoni: f64,
    grid: FourierGrid,
    pub control: StepControl,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

impl ThinFilm {
    pub fn new(g: f64, marangoni: f64, length: f64, n: usize) -> Result<Self> {
        if !(g > 0.0 && marangoni >= 0.0 && length > 0.0) || n < 8 {
            return Err(Error::Domain("need g > 0, M ≥ 0, L > 0 and n ≥ 8".into()));
        }
        Ok(Self {
            g,
            marangoni,
            grid: FourierGrid::new(length, n),
            control: StepControl::default(),
        })
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    pub fn state(&self, h: Vec<f64>) -> EvolutionState {
        EvolutionState {
            t: 0.0,
            mass: self.mass(&h),
            h,
            dt: 0.0,
        }
    }

    /// `∫ h dx` by the trapezoid rule.
    pub fn mass(&self, h: &[f64]) -> f64 {
        h.iter().sum::<f64>() * self.grid.dx()
    }

    fn flux_from_spectrum(&self, h: &[f64], spec: &[Complex64]) -> Vec<f64> {
        let mut s1 = spec.to_vec();
        self.grid.differentiate_spectrum(&mut s1, 1);
        let hx = self.grid.to_physical(&s1);
        let mut s3 = spec.to_vec();
        self.grid.differentiate_spectrum(&mut s3, 3);
        let hxxx = self.grid.to_physical(&s3);
        h.iter()
            .zip(hx.iter().zip(&hxxx))
            .map(|(&h, (&d1, &d3))| {
                let thermo = self.marangoni * h * h / ((1.0 + h) * (1.0 + h));
                h * h * h * (d3 - self.g * d1) + thermo * d1
            })
            .collect()
    }

    /// Flux `J(h)` on the grid.
    pub fn flux(&self, h: &[f64]) -> Vec<f64> {
        self.flux_from_spectrum(h, &self.grid.to_spectral(h))
    }

    /// `-∂ₓ J(h)` on the grid.
    pub fn rhs(&self, h: &[f64]) -> Vec<f64> {
        let mut spec = self.grid.to_spectral(&self.flux(h));
        self.grid.differentiate_spectrum(&mut spec, 1);
        self.grid.to_physical(&spec).into_iter().map(|x| -x).collect()
    }

    /// One step of at most `dt`, shortened to respect the explicit-increment
    /// bound. Returns the new state with the step actually taken.
    pub fn step(&self, state: &EvolutionState, dt: f64) -> Result<EvolutionState> {
        let h = &state.h;
        let spec = self.grid.to_spectral(h);
        let mut rhs = self.grid.to_spectral(&self.flux_from_spectrum(h, &spec));
        self.grid.differentiate_spectrum(&mut rhs, 1);
        let stab = h.iter().fold(0.0f64, |m, &x| m.max(x * x * x));
        let ks = self.grid.wavenumbers();
        // explicit part F - P h with P = -S k⁴
        let explicit: Vec<Complex64> = rhs
            .iter()
            .zip(&spec)
            .zip(ks)
            .map(|((r, s), &k)| -r + s * (stab * k.powi(4)))
            .collect();
        let bound = explicit.iter().map(|c| c.norm()).sum::<f64>() / ks.len() as f64;
        let min_h = min(h);
        let mut dt = dt.min(self.control.dt_max);
        if bound > 0.0 {
            let limit = self.control.cfl * min_h / bound;
            if limit < dt && limit < self.control.dt_min {
                return Err(Error::StepTooSmall { t: state.t, dt: limit, min_height: min_h });
            }
            dt = dt.min(limit);
        }
        let next: Vec<Complex64> = spec
            .iter()
            .zip(&explicit)
            .zip(ks)
            .map(|((s, e), &k)| (s + e * dt) / (1.0 + dt * stab * k.powi(4)))
            .collect();
        let h_new = self.grid.to_physical(&next);
        let min_new = min(&h_new);
        let t = state.t + dt;
        if !(min_new > self.control.h_floor) {
            return Err(Error::HeightFloor { t, min_height: min_new });
        }
        Ok(EvolutionState {
            t,
            mass: self.mass(&h_new),
            h: h_new,
            dt,
        })
    }

    /// Steps until exactly `t_end`, with steps no larger than `dt`.
    pub fn advance(&self, state: &EvolutionState, t_end: f64, dt: f64) -> Result<EvolutionState> {
        let mut s = state.clone();
        while s.t < t_end {
            let remaining = t_end - s.t;
            let last_t = s.t;
            s = self.step(&s, dt.min(remaining))?;
            if remaining - (s.t - last_t) < 1e-12 * t_end.max(1.0) {
                s.t = t_end;
            }
        }
        Ok(s)
    }

    /// `max_m≥1 |mode m|` as a real amplitude.
    pub fn max_mode(&self, h: &[f64]) -> f64 {
        let spec = self.grid.to_spectral(h);
        let n = h.len();
        spec.iter().take(n / 2 + 1).skip(1).map(|c| 2.0 * c.norm() / n as f64).fold(0.0, f64::max)
    }

    /// `‖h''‖∞`.
    pub fn curvature(&self, h: &[f64]) -> f64 {
        sup(&self.grid.derivative(h, 2))
    }
}

/// Least-squares slope of `y` against `x`.
fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    sxy / sxx
}

/// Fits `d log|a|/dt` for a single-mode seed of amplitude `1e-6`.
///
/// Growing modes are fitted while `|a| ∈ [1e-6, 1e-4]`; decaying modes while
/// `|a| ∈ [1e-10, 1e-6]`. Fails if the amplitude never leaves that window.
fn fit_mode_rate(mut step: impl FnMut() -> Result<(f64, f64)>, t_max: f64) -> Result<f64> {
    let mut pts = vec![(0.0, 1e-6f64.ln())];
    loop {
        let (t, a) = step()?;
        if !(1e-10..=1e-4).contains(&a) {
            break;
        }
        pts.push((t, a.ln()));
        if t > t_max {
            return Err(Error::WindowNotReached(format!(
                "amplitude {a:e} still inside [1e-10, 1e-4] at t = {t}"
            )));
        }
    }
    if pts.len() < 3 {
        return Err(Error::WindowNotReached("fewer than three samples in the fit window".into()));
    }
    Ok(slope(&pts))
}

/// Growth rate of `cos(ℓx)` about `h ≡ 1` on the `2π`-periodic domain.
pub fn measure_growth_rate(ell: usize, marangoni: f64, g: f64, n: usize) -> Result<f64> {
    if ell == 0 || 2 * ell >= n {
        return Err(Error::Domain(format!("mode {ell} not resolved on {n} points")));
    }
    let tf = ThinFilm::new(g, marangoni, 2.0 * std::f64::consts::PI, n)?;
    let x = tf.grid().points();
    let h: Vec<f64> = x.iter().map(|&x| 1.0 + 1e-6 * (ell as f64 * x).cos()).collect();
    let mut state = tf.state(h);
    let dt = 1e-3 / (ell as f64).powi(4);
    fit_mode_rate(
        || {
            state = tf.step(&state, dt)?;
            Ok((state.t, tf.grid().mode_amplitude(&state.h, ell)))
        },
        200.0,
    )
}

/// Amplitude equation `V_T = -V'''' - V'' - 2g (V V')'`.
#[derive(Debug)]
pub struct Sivashinsky {
    pub g: f64,
    grid: FourierGrid,
}

impl Sivashinsky {
    pub fn new(g: f64, length: f64, n: usize) -> Self {
        Self {
            g,
            grid: FourierGrid::new(length, n),
        }
    }

    pub fn grid(&self) -> &FourierGrid {
        &self.grid
    }

    /// Right-hand side, spectrally.
    pub fn rhs(&self, v: &[f64]) -> Vec<f64> {
        let spec = self.grid.to_spectral(v);
        let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
        let nl = self.grid.to_spectral(&sq);
        let out: Vec<Complex64> = spec
            .iter()
            .zip(&nl)
            .zip(self.grid.wavenumbers())
            .map(|((s, q), &k)| s * (-k.powi(4) + k * k) + q * (self.g * k * k))
            .collect();
        self.grid.to_physical(&out)
    }

    /// One step: linear part implicit, `-g (V²)''` explicit. The flag is set
    /// when `‖V‖∞` exceeds the overflow level.
    pub fn step(&self, v: &[f64], dt: f64) -> (Vec<f64>, bool) {
        let spec = self.grid.to_spectral(v);
        let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
        let nl = self.grid.to_spectral(&sq);
        let next: Vec<Complex64> = spec
            .iter()
            .zip(&nl)
            .zip(self.grid.wavenumbers())
            .map(|((s, q), &k)| (s + q * (dt * self.g * k * k)) / (1.0 + dt * (k.powi(4) - k * k)))
            .collect();
        let out = self.grid.to_physical(&next);
        let overflow = !(sup(&out) <= OVERFLOW);
        (out, overflow)
    }

    /// `‖V''‖∞`.
    pub fn curvature(&self, v: &[f64]) -> f64 {
        sup(&self.grid.derivative(v, 2))
    }
}

/// Decay/growth rate of `cos(κX)`, `κ = 2π m / L`, seeded at `1e-6`.
pub fn measure_sivashinsky_rate(mode: usize, length: f64, g: f64, n: usize) -> Result<f64> {
    if mode == 0 || 2 * mode >= n {
        return Err(Error::Domain(format!("mode {mode} not resolved on {n} points")));
    }
    let eq = Sivashinsky::new(g, length, n);
    let kappa = 2.0 * std::f64::consts::PI * mode as f64 / length;
    let mut v: Vec<f64> = eq.grid().points().iter().map(|&x| 1e-6 * (kappa * x).cos()).collect();
    let lambda = (kappa.powi(4) - kappa * kappa).abs().max(0.1);
    let dt = 1e-3 / lambda;
    let mut t = 0.0;
    fit_mode_rate(
        || {
            let (next, _) = eq.step(&v, dt);
            v = next;
            t += dt;
            Ok((t, eq.grid().mode_amplitude(&v, mode)))
        },
        1e4,
    )
}

/// Running trapezoid integral of `‖V''‖∞²` over snapshots spaced `dt` apart.
pub fn blowup_indicator(curvatures: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(curvatures.len());
    let mut acc = 0.0;
    for (i, c) in curvatures.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * dt * (curvatures[i - 1].powi(2) + c.powi(2));
        }
        out.push(acc);
    }
    out
}

/// Settings for comparing the thin-film flow with the amplitude equation.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceSettings {
    /// Period in the slow variable `X`.
    pub length: f64,
    pub n: usize,
    /// Step in slow time `T`.
    pub dt: f64,
    /// Comparison times in `T`.
    pub times: Vec<f64>,
}

impl Default for CorrespondenceSettings {
    fn default() -> Self {
        Self {
            length: 4.0 * std::f64::consts::PI,
            n: 256,
            dt: 1e-4,
            times: vec![0.25, 0.5, 0.75, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceReport {
    pub eps: f64,
    /// Long-wave scale `δ = ε/2`: `h = 1 - δ² V(δ⁴ t, δ x)`.
    pub delta: f64,
    pub times: Vec<f64>,
    /// `‖(1 - h)/δ² - V‖∞` at each comparison time.
    pub discrepancies: Vec<f64>,
    pub max_discrepancy: f64,
}

/// Long-wave scale for `M = 4g + ε²`.
pub fn long_wave_scale(eps: f64) -> f64 {
    0.5 * eps
}

/// Evolves the thin-film equation at `M = 4g + ε²` from `1 - δ² V₀(δx)` and the
/// amplitude equation from `V₀`, comparing on the shared grid.
pub fn amplitude_correspondence(
    eps: f64,
    g: f64,
    v0: impl Fn(f64) -> f64,
    settings: &CorrespondenceSettings,
) -> Result<CorrespondenceReport> {
    if !(eps > 0.0 && eps <= 0.3) {
        return Err(Error::Domain(format!("eps = {eps} outside (0, 0.3]")));
    }
    let delta = long_wave_scale(eps);
    let d2 = delta * delta;
    let d4 = d2 * d2;
    let amp = Sivashinsky::new(g, settings.length, settings.n);
    let mut film = ThinFilm::new(g, 4.0 * g + eps * eps, settings.length / delta, settings.n)?;
    film.control.dt_max = settings.dt / d4;
    let mut v: Vec<f64> = amp.grid().points().iter().map(|&x| v0(x)).collect();
    let mut state = film.state(v.iter().map(|x| 1.0 - d2 * x).collect());
    let mut t_slow = 0.0;
    let mut discrepancies = Vec::new();
    for &target in &settings.times {
        while t_slow < target - 1e-12 {
            let dt = settings.dt.min(target - t_slow);
            v = amp.step(&v, dt).0;
            t_slow += dt;
        }
        t_slow = target;
        state = film.advance(&state, target / d4, settings.dt / d4)?;
        let d = state
            .h
            .iter()
            .zip(&v)
            .map(|(h, v)| ((1.0 - h) / d2 - v).abs())
            .fold(0.0, f64::max);
        discrepancies.push(d);
    }
    Ok(CorrespondenceReport {
        eps,
        delta,
        times: settings.times.clone(),
        max_discrepancy: discrepancies.iter().copied().fold(0.0, f64::max),
        discrepancies,
    })
}

/// `‖∂ₜh + ∂ₓJ(h)‖∞` for `h = 1 - δ² V(δ⁴t, δx)` with `V_T` given by the
/// amplitude equation, evaluated at a snapshot `v` on an `X`-period `length`.
pub fn amplitude_residual(eps: f64, g: f64, v: &[f64], length: f64) -> Result<f64> {
    let delta = long_wave_scale(eps);
    let d2 = delta * delta;
    let d6 = d2 * d2 * d2;
    let amp = Sivashinsky::new(g, length, v.len());
    let film = ThinFilm::new(g, 4.0 * g + eps * eps, length / delta, v.len())?;
    let vt = amp.rhs(v);
    let h: Vec<f64> = v.iter().map(|x| 1.0 - d2 * x).collect();
    let div = film.rhs(&h);
    // ∂ₜh = -δ⁶ V_T and ∂ₜh = -∂ₓJ should agree
    Ok(vt.iter().zip(&div).map(|(a, b)| (-d6 * a - b).abs()).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn flat_film_is_fixed() {
        let tf = ThinFilm::new(1.0, 8.5, 2.0 * PI, 64).unwrap();
        let s = tf.state(vec![1.0; 64]);
        let next = tf.advance(&s, 1.0, 1e-2).unwrap();
        assert!(next.h.iter().all(|&h| (h - 1.0).abs() < 1e-15));
    }

    #[test]
    fn mass_conserved_per_step() {
        let tf = ThinFilm::new(1.0, 8.5, 2.0 * PI, 128).unwrap();
        let x = tf.grid().points();
        let h: Vec<f64> = x.iter().map(|&x| 1.0 + 0.3 * x.cos() + 0.1 * (3.0 * x).sin()).collect();
        let mut s = tf.state(h);
        let m0 = s.mass;
        for _ in 0..200 {
            let m = s.mass;
            s = tf.step(&s, 1e-3).unwrap();
            assert!(((s.mass - m) / m0).abs() < 1e-12);
        }
    }

    #[test]
    fn dispersion_rates() {
        let r = measure_growth_rate(1, 8.5, 1.0, 64).unwrap();
        assert!((r - 0.125).abs() < 0.02 * 0.125, "{r}");
        let r = measure_growth_rate(2, 8.0, 1.0, 64).unwrap();
        assert!((r + 12.0).abs() < 0.02 * 12.0, "{r}");
        for ell in 1..4 {
            assert!(measure_growth_rate(ell, 4.0, 1.0, 64).unwrap() <= 0.0);
        }
        assert!(matches!(measure_growth_rate(1, 8.0, 1.0, 64), Err(Error::WindowNotReached(_))));
    }

    #[test]
    fn sivashinsky_linear_rates_and_mean() {
        for (mode, length) in [(2usize, 2.0 * PI), (3, 2.0 * PI), (1, 4.0 * PI)] {
            let k = 2.0 * PI * mode as f64 / length;
            let exact = -k.powi(4) + k * k;
            let r = measure_sivashinsky_rate(mode, length, 1.0, 64).unwrap();
            assert!((r - exact).abs() < 0.02 * exact.abs(), "{mode}: {r} vs {exact}");
        }
        let eq = Sivashinsky::new(1.0, 2.0 * PI, 64);
        let mut v: Vec<f64> = eq.grid().points().iter().map(|&x| 0.5 + x.cos() + 0.3 * (2.0 * x).sin()).collect();
        let m0 = eq.grid().mean(&v);
        for _ in 0..100 {
            v = eq.step(&v, 1e-3).0;
        }
        assert!((eq.grid().mean(&v) - m0).abs() < 1e-14);
        assert!(eq.step(&vec![0.0; 64], 0.1).0.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn indicator_is_monotone() {
        let ind = blowup_indicator(&[1.0, 0.5, 2.0, 0.0, 3.0], 0.1);
        assert!(ind.windows(2).all(|w| w[1] >= w[0]));
        assert!((ind[1] - 0.5 * 0.1 * 1.25).abs() < 1e-15);
    }

    #[test]
    fn zero_data_stays_constant() {
        let settings = CorrespondenceSettings {
            n: 32,
            dt: 1e-2,
            times: vec![0.1],
            ..Default::default()
        };
        let rep = amplitude_correspondence(0.1, 1.0, |_| 0.0, &settings).unwrap();
        assert_eq!(rep.max_discrepancy, 0.0);
    }
}
