//! The acceptance suite, shared by the integration test and `thinfilm verify`.

use crate::continuation::{
    branch_bounds_check, detect_rupture, fit_curvature, minimum_location, monitor_nodal, BranchPoint, Continuation,
    ContinuationSettings, Termination,
};
use crate::error::{Error, Result};
use crate::evolution::{amplitude_correspondence, measure_growth_rate, measure_sivashinsky_rate, CorrespondenceSettings, ThinFilm};
use crate::model::{hamiltonian, mass_constant_batch, mass_constant_k, HamiltonianParams, ModelParams, K0};
use crate::par::Exec;
use crate::phase::{energy_interval, integrate_orbit, orbit_integrals, period};
use crate::profile::PeriodicProfile;
use crate::shooting::shoot_solution;
use crate::stability::{critical_marangoni, periodic_state_spectrum, symbol_deviation};
use crate::steady::{add_scaled, local_expansion, CollocationSystem, SteadySolver};
use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} [{:.3} s / {} s]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs()
        )
    }
}

type Check = fn(u64) -> Result<(bool, String)>;

pub const CRITERIA: [(usize, &str, u64, Check); 12] = [
    (1, "critical Marangoni numbers", 1, critical_values),
    (2, "subcritical curvature", 30, subcritical_curvature),
    (3, "period limit", 1, period_limit),
    (4, "oracle equivalence", 10, oracle_equivalence),
    (5, "Hamiltonian conservation", 1, hamiltonian_conservation),
    (6, "Jensen invariant", 5, jensen_invariant),
    (7, "Jacobian correctness", 5, jacobian_correctness),
    (8, "branch to rupture", 300, branch_to_rupture),
    (9, "constant-state dispersion", 60, dispersion),
    (10, "instability of small periodic states", 60, small_state_instability),
    (11, "amplitude correspondence", 120, amplitude_equation),
    (12, "mass conservation", 60, mass_conservation),
];

/// Runs criterion `id` (1-based) with the given RNG seed.
pub fn run(id: usize, seed: u64) -> Option<CriterionResult> {
    let &(id, name, budget, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let budget = Duration::from_secs(budget);
    let start = Instant::now();
    let outcome = check(seed);
    let elapsed = start.elapsed();
    let (ok, detail) = match outcome {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let within = elapsed < budget;
    let detail = if within { detail } else { format!("{detail}; over time budget") };
    Some(CriterionResult {
        id,
        name,
        passed: ok && within,
        detail,
        elapsed,
        budget,
    })
}

pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run(c.0, seed)).collect()
}

fn critical_values(_: u64) -> Result<(bool, String)> {
    let (m, mk) = critical_marangoni(1.0, 1.0)?;
    let sys = CollocationSystem::new(1.0, 1.0, 64);
    let jac = sys.jacobian(&PeriodicProfile::zero(1.0, 64), 8.0)?;
    let kernel = jac[(0, 0)].abs();
    let others = (1..64).map(|i| jac[(i, i)].abs()).fold(f64::INFINITY, f64::min);
    let ok = m == 4.0 && mk == 8.0 && kernel < 1e-10 && others > 1.0;
    Ok((ok, format!("M* = {m}, M*(1) = {mk}, |J11| = {kernel:e}, min other |Jll| = {others}")))
}

fn default_branch(threshold: f64) -> Result<Vec<BranchPoint>> {
    let mut c = Continuation::new(ContinuationSettings {
        rupture_threshold: threshold,
        ..Default::default()
    })?;
    let rec = c.trace()?;
    if rec.termination != Termination::RuptureThreshold {
        return Err(Error::NoSolution(format!("branch ended by {}", rec.termination.as_str())));
    }
    Ok(rec.points)
}

fn subcritical_curvature(_: u64) -> Result<(bool, String)> {
    let pts = default_branch(0.05)?;
    let curv = fit_curvature(&pts[..10], 1.0, 1.0)?;
    let target = -49.0 / 3.0;
    let rel = (curv - target).abs() / target.abs();
    Ok((rel < 0.05, format!("d2M/ds2(0) = {curv:.5} vs {target:.5} (rel {rel:.2e})")))
}

fn period_limit(_: u64) -> Result<(bool, String)> {
    let p = HamiltonianParams::new(1.0, 8.0, K0)?;
    let w = energy_interval(&p)?;
    let t = period(w.e_min + 1e-6, &p)?;
    let rel = (t - 2.0 * PI).abs() / (2.0 * PI);
    Ok((rel < 1e-3, format!("T = {t:.9}, rel. deviation from 2π {rel:.2e}")))
}

fn oracle_equivalence(_: u64) -> Result<(bool, String)> {
    let solver = SteadySolver::new(1.0, 1.0, 64);
    let s = ((8.0_f64 - 7.9) / (49.0 / 6.0)).sqrt();
    let (guess, _) = local_expansion(1.0, 1.0, s, 64);
    let colloc = solver.newton_solve(&guess, 7.9)?;
    let shot = shoot_solution(7.9, 1.0, 1.0, colloc.profile.amplitude(), 512)?;
    let d = colloc.profile.sup_distance(&shot.profile);
    Ok((d < 1e-6, format!("L∞ distance {d:.2e}, K = {:.12}", shot.mass_constant)))
}

fn hamiltonian_conservation(_: u64) -> Result<(bool, String)> {
    let p = HamiltonianParams::flat(1.0, 8.0);
    let w = energy_interval(&p)?;
    let e = w.e_min + 0.5 * (w.e_max - w.e_min);
    let orbit = orbit_integrals(e, &p)?;
    let traj = integrate_orbit(orbit.turning.q1, 0.0, orbit.period, 1e-3, &p)?;
    let last = traj.len() - 1;
    let drift = (hamiltonian(traj.v[last], traj.w[last], &p)? - hamiltonian(traj.v[0], traj.w[0], &p)?).abs();
    Ok((drift < 1e-8, format!("|H(T) - H(0)| = {drift:.2e} over T = {:.6}", orbit.period)))
}

fn jensen_invariant(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let profiles: Vec<PeriodicProfile> = (0..1000)
        .map(|_| {
            let modes = 8;
            let mut v = PeriodicProfile::new(
                1.0,
                (0..modes).map(|l| rng.gen_range(-1.0..1.0) / (1.0 + l as f64).powi(2)).collect(),
            );
            // rescale so that min(1 + v) lands in (0.05, 1)
            let lowest = 1.0 - v.min_height();
            let target = rng.gen_range(0.0..0.95);
            if lowest > 0.0 {
                let c = target / lowest;
                v.coeffs_mut().iter_mut().for_each(|a| *a *= c);
            }
            v
        })
        .collect();
    let ks = mass_constant_batch(Exec::default(), &profiles);
    let mut worst = f64::NEG_INFINITY;
    let mut ok = true;
    for (v, k) in profiles.iter().zip(ks) {
        let k = k?;
        ok &= v.min_height() > 0.05 && k < K0;
        worst = worst.max(k - K0);
    }
    let k_flat = mass_constant_k(&PeriodicProfile::zero(1.0, 8))?;
    let eq = (k_flat - K0).abs();
    Ok((ok && eq < 1e-14, format!("max K - K(0) = {worst:.3e} over 1000 profiles, |K(0) - K0| = {eq:.1e}")))
}

fn jacobian_correctness(seed: u64) -> Result<(bool, String)> {
    let pts = default_branch(0.05)?;
    let picks = [0, pts.len() / 2, pts.len() - 1];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for &i in &picks {
        let bp = &pts[i];
        let n = bp.profile.n_modes();
        let sys = CollocationSystem::new(1.0, 1.0, n);
        let jac = sys.jacobian(&bp.profile, bp.marangoni)?;
        for _ in 0..10 {
            // directions scaled like the solution so the perturbed profile stays positive
            let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0) * 0.1).collect();
            let eps = 1e-6;
            let rp = sys.residual(&add_scaled(&bp.profile, &u, eps), bp.marangoni)?;
            let rm = sys.residual(&add_scaled(&bp.profile, &u, -eps), bp.marangoni)?;
            let fd = DVector::from_iterator(n, rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * eps)));
            let ju = &jac * DVector::from_vec(u);
            worst = worst.max((&fd - &ju).norm() / ju.norm());
        }
    }
    Ok((worst < 1e-6, format!("max relative FD error {worst:.2e} at points {picks:?}")))
}

fn branch_to_rupture(_: u64) -> Result<(bool, String)> {
    let threshold = 0.05;
    let mut c = Continuation::new(ContinuationSettings {
        rupture_threshold: threshold,
        ..Default::default()
    })?;
    let rec = c.trace()?;
    let pts = &rec.points;
    let reached = rec.termination == Termination::RuptureThreshold;
    let all_ok = pts.iter().all(|p| {
        p.residual < 1e-11 && p.flux_residual < 1e-6 && monitor_nodal(&p.profile) && p.mass_constant < K0 && p.min_h > 0.0
    });
    let bounds = branch_bounds_check(&rec);
    let diag = detect_rupture(&rec, threshold)?;
    let located = pts.iter().all(|p| {
        let (x, cell) = minimum_location(&p.profile);
        let half = PI / p.profile.k0();
        (x + half).abs().min((x - half).abs()) <= cell
    });
    let nearest = |key: &dyn Fn(&BranchPoint) -> f64, target: f64| {
        pts.iter().min_by(|a, b| (key(a) - target).abs().total_cmp(&(key(b) - target).abs())).unwrap()
    };
    let at_half = nearest(&|p| p.min_h, 0.5);
    let at_s1 = nearest(&|p| p.s, 1.0);
    let end = &pts[diag.index];
    let curvature_grows = end.curvature > at_half.curvature;
    let w24_ratio = end.w24_norm / at_s1.w24_norm;
    let ok = reached && all_ok && bounds.is_ok() && located && curvature_grows && w24_ratio < 10.0;
    Ok((
        ok,
        format!(
            "{} points, min h = {:.4} at M = {:.4}; all invariants {}; minima at ±π {}; max|v''| {:.3} -> {:.3}; W24 ratio {:.2}; M_inf ≈ {:.3}",
            pts.len(),
            end.min_h,
            end.marangoni,
            all_ok && bounds.is_ok(),
            located,
            at_half.curvature,
            end.curvature,
            w24_ratio,
            diag.m_infinity
        ),
    ))
}

fn dispersion(_: u64) -> Result<(bool, String)> {
    let grow = measure_growth_rate(1, 8.5, 1.0, 256)?;
    let decay = measure_growth_rate(2, 8.0, 1.0, 256)?;
    let e1 = (grow - 0.125).abs() / 0.125;
    let e2 = (decay + 12.0).abs() / 12.0;
    Ok((e1 < 0.02 && e2 < 0.02, format!("rate(l=1, M=8.5) = {grow:.6} (rel {e1:.1e}); rate(l=2, M=8) = {decay:.5} (rel {e2:.1e})")))
}

fn small_state(s: f64) -> Result<BranchPoint> {
    let solver = SteadySolver::new(1.0, 1.0, 64);
    let (guess, m) = local_expansion(1.0, 1.0, s, 64);
    let st = solver.solve_at_amplitude(s, &guess, m)?;
    BranchPoint::new(s, st.profile, st.marangoni, 1.0, st.residual)
}

fn small_state_instability(_: u64) -> Result<(bool, String)> {
    let lead = periodic_state_spectrum(&small_state(0.05)?, 1.0, 4)?.leading;
    let ss = [0.01, 0.02, 0.04];
    let mut devs = Vec::new();
    for &s in &ss {
        let bp = small_state(s)?;
        let rep = periodic_state_spectrum(&bp, 1.0, 64)?;
        let p = ModelParams::new(1.0, bp.marangoni, 1.0)?;
        devs.push(symbol_deviation(&rep.eigenvalues, &p, 3));
    }
    let slope = (devs[2] / devs[0]).ln() / (ss[2] / ss[0]).ln();
    Ok((
        lead > 0.0 && slope >= 0.8,
        format!("leading eigenvalue at s = 0.05: {lead:.4e}; deviations {:?}; log-log slope {slope:.3}", devs.iter().map(|d| format!("{d:.3e}")).collect::<Vec<_>>()),
    ))
}

fn amplitude_equation(_: u64) -> Result<(bool, String)> {
    let v0 = |x: f64| 0.8 * (0.5 * x).cos() + 0.3 * x.sin();
    let settings = CorrespondenceSettings::default();
    let coarse = amplitude_correspondence(0.2, 1.0, v0, &settings)?.max_discrepancy;
    let fine = amplitude_correspondence(0.1, 1.0, v0, &settings)?.max_discrepancy;
    let mut worst = 0.0f64;
    for (mode, length) in [(2usize, 2.0 * PI), (3, 2.0 * PI), (1, 4.0 * PI)] {
        let k = 2.0 * PI * mode as f64 / length;
        let exact = -k.powi(4) + k * k;
        let r = measure_sivashinsky_rate(mode, length, 1.0, 256)?;
        worst = worst.max((r - exact).abs() / exact.abs());
    }
    Ok((
        fine < coarse && worst < 0.02,
        format!("discrepancy eps=0.2: {coarse:.3e}, eps=0.1: {fine:.3e}; worst linear-rate error {worst:.1e}"),
    ))
}

fn mass_conservation(seed: u64) -> Result<(bool, String)> {
    let tf = ThinFilm::new(1.0, 8.5, 2.0 * PI, 256)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = tf.grid().points();
    let phases: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
    let h: Vec<f64> = x
        .iter()
        .map(|&x| 1.0 + 0.1 * x.cos() + phases.iter().enumerate().map(|(j, ph)| 0.01 * ((j + 2) as f64 * x + ph).cos()).sum::<f64>())
        .collect();
    let mut s = tf.state(h);
    let m0 = s.mass;
    for _ in 0..10_000 {
        s = tf.step(&s, 1e-4)?;
    }
    let drift = ((s.mass - m0) / m0).abs();
    Ok((drift < 1e-8, format!("relative drift {drift:.2e} after 10^4 steps (t = {:.4})", s.t)))
}
