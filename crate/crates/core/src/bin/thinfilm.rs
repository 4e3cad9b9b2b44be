//! Command-line front end.
//!
//! Every subcommand reads an optional `key = value` file (`--config`), applies
//! flag overrides, writes the resolved configuration to `config.resolved` in
//! the output directory and then its own CSV files next to it.
//!
//! Exit status: 0 on success, 1 on numerical failure, 2 on bad configuration.

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thinfilm::config::{parse_config_with_lines, RunConfig};
use thinfilm::continuation::{BranchPoint, Continuation, ContinuationSettings};
use thinfilm::evolution::{blowup_indicator, Sivashinsky, ThinFilm, OVERFLOW};
use thinfilm::io::{
    emit_bifurcation, emit_branch, profile_path, read_branch, read_profile, write_profile, write_resolved_config,
    write_table, DIAGNOSTICS_HEADER,
};
use thinfilm::phase::{energy_interval, fixed_points, integrate_orbit, period_sweep, turning_points};
use thinfilm::shooting::shoot_solution;
use thinfilm::stability::{bloch_sweep, fill_leading_eigenvalues, periodic_state_spectrum, SpectrumReport};
use thinfilm::steady::{local_expansion, SteadySolver, SteadyState};
use thinfilm::{acceptance, Error, Exec, HamiltonianParams, Result};

#[derive(Parser)]
#[command(name = "thinfilm", version, about = "Periodic steady states and dynamics of thermocapillary thin films")]
struct Cli {
    /// `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    g: Option<String>,
    #[arg(long, global = true)]
    k0: Option<String>,
    /// Marangoni number.
    #[arg(long = "M", global = true)]
    marangoni: Option<String>,
    /// Mass constant.
    #[arg(long = "K", global = true)]
    mass_constant: Option<String>,
    #[arg(long, global = true)]
    energy: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    amplitude: Option<String>,
    #[arg(long, global = true)]
    eps: Option<String>,
    #[arg(long, global = true)]
    modes: Option<String>,
    #[arg(long, global = true)]
    ds: Option<String>,
    #[arg(long, global = true)]
    ds_max: Option<String>,
    #[arg(long, global = true)]
    max_steps: Option<String>,
    #[arg(long, global = true)]
    rupture_threshold: Option<String>,
    #[arg(long, global = true)]
    start_amplitude: Option<String>,
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    dt: Option<String>,
    #[arg(long, global = true)]
    t_end: Option<String>,
    #[arg(long, global = true)]
    snapshot_every: Option<String>,
    #[arg(long, global = true)]
    mode: Option<String>,
    #[arg(long, global = true)]
    noise: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    n_eigs: Option<String>,
    #[arg(long, global = true)]
    bloch_sweep: Option<String>,
    #[arg(long, global = true)]
    point_index: Option<String>,
    #[arg(long, global = true)]
    branch_file: Option<String>,
    #[arg(long, global = true)]
    n_energies: Option<String>,
    #[arg(long, global = true, env = "THINFILM_OUTPUT_DIR")]
    output_dir: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("g", &self.g),
            ("k0", &self.k0),
            ("M", &self.marangoni),
            ("K", &self.mass_constant),
            ("energy", &self.energy),
            ("amplitude", &self.amplitude),
            ("eps", &self.eps),
            ("modes", &self.modes),
            ("ds", &self.ds),
            ("ds_max", &self.ds_max),
            ("max_steps", &self.max_steps),
            ("rupture_threshold", &self.rupture_threshold),
            ("start_amplitude", &self.start_amplitude),
            ("grid", &self.grid),
            ("dt", &self.dt),
            ("t_end", &self.t_end),
            ("snapshot_every", &self.snapshot_every),
            ("mode", &self.mode),
            ("noise", &self.noise),
            ("seed", &self.seed),
            ("n_eigs", &self.n_eigs),
            ("bloch_sweep", &self.bloch_sweep),
            ("point_index", &self.point_index),
            ("branch_file", &self.branch_file),
            ("n_energies", &self.n_energies),
            ("output_dir", &self.output_dir),
        ]
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fixed points of the planar system and the energy window of periodic orbits.
    FixedPoints,
    /// Orbit samples `v, w, t` for `n_energies` energies (or the given `energy`).
    PhasePortrait,
    /// Period against energy.
    Period,
    /// One steady profile at given `M` or given first-mode amplitude.
    Solve,
    /// Arclength continuation of the bifurcating branch toward rupture.
    ContinueBranch,
    /// Linearised spectrum about a stored branch point.
    Spectrum,
    /// Time-steps the thin-film equation.
    Evolve,
    /// Time-steps the long-wave amplitude equation.
    Amplitude,
    /// Runs the acceptance criteria.
    Verify,
}

fn resolve(cli: &Cli) -> Result<RunConfig> {
    let (mut cfg, mut lines) = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::Config {
                line: 0,
                message: format!("cannot read {}: {e}", path.display()),
            })?;
            parse_config_with_lines(&text)?
        }
        None => (RunConfig::default(), BTreeMap::new()),
    };
    for (key, value) in cli.overrides.pairs() {
        if let Some(v) = value {
            if v == "auto" {
                match key {
                    "M" => cfg.marangoni = None,
                    "energy" => cfg.energy = None,
                    "amplitude" => cfg.amplitude = None,
                    "branch_file" => cfg.branch_file = None,
                    _ => cfg.set(key, v, 0)?,
                }
            } else {
                cfg.set(key, v, 0)?;
            }
            lines.insert(key.to_string(), 0);
        }
    }
    cfg.validate(&lines)?;
    Ok(cfg)
}

fn config_error(message: String) -> Error {
    Error::Config { line: 0, message }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = resolve(&cli).and_then(|cfg| {
        if matches!(cli.command, Command::Verify) {
            return Ok(verify(&cfg));
        }
        write_resolved_config(&cfg.output_dir, &cfg.echo())?;
        run(&cli.command, &cfg).map(|()| true)
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: &Command, cfg: &RunConfig) -> Result<()> {
    match command {
        Command::FixedPoints => cmd_fixed_points(cfg),
        Command::PhasePortrait => cmd_phase_portrait(cfg),
        Command::Period => cmd_period(cfg),
        Command::Solve => cmd_solve(cfg),
        Command::ContinueBranch => cmd_continue(cfg),
        Command::Spectrum => cmd_spectrum(cfg),
        Command::Evolve => cmd_evolve(cfg),
        Command::Amplitude => cmd_amplitude(cfg),
        Command::Verify => unreachable!("handled before dispatch"),
    }
}

/// Planar-system parameters; `M` defaults to `M*(k0)`.
fn hamiltonian_params(cfg: &RunConfig) -> Result<HamiltonianParams> {
    let m = cfg.marangoni.unwrap_or(cfg.m_star_k0());
    HamiltonianParams::new(cfg.g, m, cfg.mass_constant).map_err(|e| config_error(e.to_string()))
}

/// `n` energies strictly inside `(e_min, e_max)`, or the configured one.
fn energies(cfg: &RunConfig, p: &HamiltonianParams) -> Result<Vec<f64>> {
    if let Some(e) = cfg.energy {
        return Ok(vec![e]);
    }
    let window = energy_interval(p)?;
    let n = cfg.n_energies;
    Ok((1..=n)
        .map(|i| window.e_min + (window.e_max - window.e_min) * i as f64 / (n + 1) as f64)
        .collect())
}

fn cmd_fixed_points(cfg: &RunConfig) -> Result<()> {
    let p = hamiltonian_params(cfg)?;
    let fp = fixed_points(&p)?;
    let window = energy_interval(&p)?;
    let path = cfg.output_dir.join("fixed_points.csv");
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(&path)?;
    w.write_record(["name", "v", "kind"])?;
    w.write_record(["v_l", &thinfilm::io::format_f64(fp.v_l), &format!("{:?}", fp.kind_l)])?;
    w.write_record(["v_u", &thinfilm::io::format_f64(fp.v_u), &format!("{:?}", fp.kind_u)])?;
    w.flush()?;
    println!("v_l = {:.12} ({:?})", fp.v_l, fp.kind_l);
    println!("v_u = {:.12} ({:?})", fp.v_u, fp.kind_u);
    println!(
        "periodic orbits for E in ({:.12}, {:.12}), homoclinic: {}",
        window.e_min, window.e_max, window.has_homoclinic
    );
    Ok(())
}

fn cmd_phase_portrait(cfg: &RunConfig) -> Result<()> {
    let p = hamiltonian_params(cfg)?;
    let es = energies(cfg, &p)?;
    let periods = period_sweep(Exec::default(), &es, &p);
    for (i, (e, t)) in es.iter().zip(periods).enumerate() {
        let t = t?;
        let tp = turning_points(*e, &p)?;
        let traj = integrate_orbit(tp.q0, 0.0, t, t / 2000.0, &p)?;
        let rows: Vec<Vec<f64>> = (0..traj.len()).map(|j| vec![traj.v[j], traj.w[j], traj.t[j]]).collect();
        write_table(cfg.output_dir.join(format!("orbit_{i}.csv")), &["v", "w", "t"], &rows)?;
    }
    println!("{} orbits written to {}", es.len(), cfg.output_dir.display());
    Ok(())
}

fn cmd_period(cfg: &RunConfig) -> Result<()> {
    let p = hamiltonian_params(cfg)?;
    let es = energies(cfg, &p)?;
    let periods = period_sweep(Exec::default(), &es, &p).into_iter().collect::<Result<Vec<f64>>>()?;
    let rows: Vec<Vec<f64>> = es.iter().zip(&periods).map(|(e, t)| vec![*e, *t]).collect();
    write_table(cfg.output_dir.join("period.csv"), &["E", "T"], &rows)?;
    for (e, t) in es.iter().zip(&periods) {
        println!("E = {e:.12}  T = {t:.12}");
    }
    Ok(())
}

/// Walks the first-mode amplitude from the onset in steps of at most 0.05.
fn solve_by_amplitude(cfg: &RunConfig, target: f64) -> Result<SteadyState> {
    let mut solver = SteadySolver::new(cfg.g, cfg.k0, cfg.modes);
    let steps = (target.abs() / 0.05).ceil().max(1.0) as usize;
    let a0 = target / steps as f64;
    let (guess, m) = local_expansion(cfg.g, cfg.k0, a0, cfg.modes);
    let mut st = solver.solve_at_amplitude(a0, &guess, m)?;
    for i in 2..=steps {
        st = solver.solve_at_amplitude(a0 * i as f64, &st.profile, st.marangoni)?;
    }
    solver.solve_adaptive(&st.profile, st.marangoni)
}

fn cmd_solve(cfg: &RunConfig) -> Result<()> {
    let st = match (cfg.marangoni, cfg.amplitude) {
        (Some(m), hint) => {
            let shot = shoot_solution(m, cfg.g, cfg.k0, hint.unwrap_or(0.1), 4 * cfg.modes)?;
            let mut solver = SteadySolver::new(cfg.g, cfg.k0, cfg.modes);
            solver.solve_adaptive(&shot.profile, m)?
        }
        (None, Some(a)) if a.abs() < 1.0 => solve_by_amplitude(cfg, a)?,
        (None, Some(a)) => return Err(config_error(format!("steady amplitude must lie in (-1, 1), got {a}"))),
        (None, None) => return Err(config_error("solve needs M or amplitude".into())),
    };
    write_profile(cfg.output_dir.join("solution.csv"), &st.profile)?;
    let k = thinfilm::model::mass_constant_k(&st.profile)?;
    println!(
        "M = {:.12}  K = {:.12}  min h = {:.6}  modes = {}  residual = {:.3e}  flux = {:.3e}",
        st.marangoni,
        k,
        st.profile.min_height(),
        st.profile.n_modes(),
        st.residual,
        st.flux_residual(cfg.g)
    );
    Ok(())
}

fn cmd_continue(cfg: &RunConfig) -> Result<()> {
    let settings = ContinuationSettings {
        g: cfg.g,
        k0: cfg.k0,
        ds: cfg.ds,
        ds_max: cfg.ds_max,
        max_steps: cfg.max_steps,
        rupture_threshold: cfg.rupture_threshold,
        start_amplitude: cfg.start_amplitude,
        modes: cfg.modes,
        ..ContinuationSettings::default()
    };
    let mut cont = Continuation::new(settings)?;
    let mut record = cont.trace()?;
    fill_leading_eigenvalues(Exec::default(), &mut record.points, cfg.g);
    let files = emit_branch(&record, &cfg.output_dir)?;
    emit_bifurcation(&record, &cfg.output_dir)?;
    let last = record.points.last().expect("non-empty record");
    println!(
        "{} points, stopped by {}: M = {:.9}, min h = {:.6e}, files = {}",
        record.points.len(),
        record.termination.as_str(),
        last.marangoni,
        last.min_h,
        files.len() + 1
    );
    Ok(())
}

/// Reads point `index` of a stored branch and its profile file.
fn load_point(branch: &Path, index: usize, cfg: &RunConfig) -> Result<BranchPoint> {
    if !branch.exists() {
        return Err(config_error(format!("branch file {} not found", branch.display())));
    }
    let rows = read_branch(branch)?;
    let row = rows.get(index).ok_or_else(|| {
        config_error(format!("point_index {index} out of range: branch has {} points", rows.len()))
    })?;
    let dir = branch.parent().unwrap_or_else(|| Path::new("."));
    let profile = read_profile(profile_path(dir, index), cfg.k0)?;
    BranchPoint::new(row.s, profile, row.marangoni, cfg.g, 0.0)
}

fn write_spectrum(path: PathBuf, report: &SpectrumReport, n_eigs: usize) -> Result<()> {
    let rows: Vec<Vec<f64>> = report.eigenvalues.iter().take(n_eigs).map(|z| vec![z.re, z.im]).collect();
    write_table(path, &["re", "im"], &rows)
}

fn cmd_spectrum(cfg: &RunConfig) -> Result<()> {
    let branch = cfg.branch_file.clone().unwrap_or_else(|| cfg.output_dir.join("branch.csv"));
    let bp = load_point(&branch, cfg.point_index, cfg)?;
    let report = periodic_state_spectrum(&bp, cfg.g, cfg.n_eigs)?;
    write_spectrum(cfg.output_dir.join("spectrum.csv"), &report, cfg.n_eigs)?;
    println!("M = {:.12}  leading eigenvalue = {:.6e}", bp.marangoni, report.leading);
    if cfg.bloch_sweep > 0 {
        let sweep = bloch_sweep(Exec::default(), &bp, cfg.g, cfg.bloch_sweep, cfg.n_eigs);
        let mut summary = Vec::with_capacity(sweep.len());
        for (i, r) in sweep.into_iter().enumerate() {
            let r = r?;
            write_spectrum(cfg.output_dir.join(format!("spectrum_bloch_{i}.csv")), &r, cfg.n_eigs)?;
            summary.push(vec![r.bloch, r.leading]);
        }
        write_table(cfg.output_dir.join("bloch.csv"), &["sigma", "leading"], &summary)?;
    }
    Ok(())
}

/// `amplitude cos(mode k0 x)` plus zero-mean uniform noise of size `noise`.
fn initial_perturbation(cfg: &RunConfig, points: &[f64]) -> Vec<f64> {
    let a = cfg.amplitude.unwrap_or(0.1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v: Vec<f64> = points
        .iter()
        .map(|&x| a * (cfg.mode as f64 * cfg.k0 * x).cos() + cfg.noise * rng.gen_range(-1.0..1.0))
        .collect();
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    if cfg.noise > 0.0 {
        v.iter_mut().for_each(|x| *x -= mean);
    }
    v
}

fn snapshot_count(cfg: &RunConfig) -> usize {
    (cfg.t_end / cfg.snapshot_every).round().max(1.0) as usize
}

/// Diagnostics rows from per-snapshot `(t, mass, min_h, max_mode, curvature)`.
fn diagnostics(samples: &[[f64; 5]], cadence: f64) -> Vec<Vec<f64>> {
    let curv: Vec<f64> = samples.iter().map(|s| s[4]).collect();
    let ind = blowup_indicator(&curv, cadence);
    samples
        .iter()
        .zip(ind)
        .map(|(s, i)| vec![s[0], s[1], s[2], s[3], i])
        .collect()
}

fn cmd_evolve(cfg: &RunConfig) -> Result<()> {
    let m = cfg
        .marangoni
        .ok_or_else(|| config_error("evolve needs M".into()))?;
    let mut film = ThinFilm::new(cfg.g, m, 2.0 * PI / cfg.k0, cfg.grid)?;
    film.control.dt_max = cfg.dt;
    let x = film.grid().points();
    let h: Vec<f64> = initial_perturbation(cfg, &x).iter().map(|v| 1.0 + v).collect();
    if h.iter().any(|&h| h <= 0.0) {
        return Err(config_error("initial film is not positive".into()));
    }
    let mut state = film.state(h);
    let record = |s: &thinfilm::evolution::EvolutionState| {
        let min_h = s.h.iter().copied().fold(f64::INFINITY, f64::min);
        [s.t, s.mass, min_h, film.max_mode(&s.h), film.curvature(&s.h)]
    };
    let write_snapshot = |i: usize, h: &[f64]| {
        let rows: Vec<Vec<f64>> = x.iter().zip(h).map(|(x, h)| vec![*x, *h]).collect();
        write_table(cfg.output_dir.join(format!("snapshot_{i}.csv")), &["x", "h"], &rows)
    };
    let mut samples = vec![record(&state)];
    write_snapshot(0, &state.h)?;
    let mut failure = None;
    for i in 1..=snapshot_count(cfg) {
        match film.advance(&state, i as f64 * cfg.snapshot_every, cfg.dt) {
            Ok(s) => state = s,
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
        samples.push(record(&state));
        write_snapshot(i, &state.h)?;
    }
    let rows = diagnostics(&samples, cfg.snapshot_every);
    write_table(cfg.output_dir.join("diagnostics.csv"), &DIAGNOSTICS_HEADER, &rows)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let last = samples.last().expect("initial sample");
    println!("t = {}  mass drift = {:.3e}  min h = {:.6}", last[0], (last[1] - samples[0][1]).abs(), last[2]);
    Ok(())
}

fn cmd_amplitude(cfg: &RunConfig) -> Result<()> {
    let eq = Sivashinsky::new(cfg.g, 2.0 * PI / cfg.k0, cfg.grid);
    let x = eq.grid().points();
    let length = eq.grid().length();
    let d2 = (0.5 * cfg.eps).powi(2);
    let mut v = initial_perturbation(cfg, &x);
    let record = |t: f64, v: &[f64]| {
        let vmax = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let modes = (1..cfg.grid / 2).map(|m| eq.grid().mode_amplitude(v, m)).fold(0.0, f64::max);
        [t, eq.grid().mean(v) * length, 1.0 - d2 * vmax, modes, eq.curvature(v)]
    };
    let write_snapshot = |i: usize, v: &[f64]| {
        let rows: Vec<Vec<f64>> = x.iter().zip(v).map(|(x, v)| vec![*x, *v]).collect();
        write_table(cfg.output_dir.join(format!("snapshot_{i}.csv")), &["X", "V"], &rows)
    };
    let mut samples = vec![record(0.0, &v)];
    write_snapshot(0, &v)?;
    let per_snapshot = (cfg.snapshot_every / cfg.dt).round().max(1.0) as usize;
    let dt = cfg.snapshot_every / per_snapshot as f64;
    let mut overflow_at = None;
    'outer: for i in 1..=snapshot_count(cfg) {
        for j in 0..per_snapshot {
            let (next, overflow) = eq.step(&v, dt);
            v = next;
            if overflow {
                overflow_at = Some(((i - 1) * per_snapshot + j + 1) as f64 * dt);
                break 'outer;
            }
        }
        samples.push(record(i as f64 * cfg.snapshot_every, &v));
        write_snapshot(i, &v)?;
    }
    let rows = diagnostics(&samples, cfg.snapshot_every);
    write_table(cfg.output_dir.join("diagnostics.csv"), &DIAGNOSTICS_HEADER, &rows)?;
    if let Some(t) = overflow_at {
        return Err(Error::Overflow { t, bound: OVERFLOW });
    }
    let last = samples.last().expect("initial sample");
    println!("T = {}  max|V| mode = {:.6e}  indicator = {:.6e}", last[0], last[3], rows.last().expect("row")[4]);
    Ok(())
}

/// Prints one line per criterion; true when all pass.
fn verify(cfg: &RunConfig) -> bool {
    let results = acceptance::run_all(cfg.seed);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    failed == 0
}
