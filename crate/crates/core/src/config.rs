//! `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, unknown keys are rejected.
//! Every key has a default, so an empty document is a valid configuration.

use crate::error::{Error, Result};
use crate::model::K0;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

/// Fully resolved parameters shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub g: f64,
    pub k0: f64,
    /// Marangoni number; `None` lets the subcommand pick.
    pub marangoni: Option<f64>,
    /// Mass constant for phase-plane commands.
    pub mass_constant: f64,
    /// Energy level for `period` and `phase-portrait`; `None` = mid window.
    pub energy: Option<f64>,
    pub amplitude: Option<f64>,
    pub eps: f64,
    pub modes: usize,
    pub ds: f64,
    pub ds_max: f64,
    pub max_steps: usize,
    pub rupture_threshold: f64,
    pub start_amplitude: f64,
    pub grid: usize,
    pub dt: f64,
    pub t_end: f64,
    pub snapshot_every: f64,
    pub mode: usize,
    pub noise: f64,
    pub seed: u64,
    pub n_eigs: usize,
    /// Number of Bloch parameters in `[0, k0)`; 0 disables the sweep.
    pub bloch_sweep: usize,
    pub point_index: usize,
    pub branch_file: Option<PathBuf>,
    pub n_energies: usize,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            g: 1.0,
            k0: 1.0,
            marangoni: None,
            mass_constant: K0,
            energy: None,
            amplitude: None,
            eps: 0.1,
            modes: 64,
            ds: 0.02,
            ds_max: 0.1,
            max_steps: 2000,
            rupture_threshold: 1e-2,
            start_amplitude: 0.02,
            grid: 256,
            dt: 1e-4,
            t_end: 1.0,
            snapshot_every: 0.1,
            mode: 1,
            noise: 0.0,
            seed: 0,
            n_eigs: 16,
            bloch_sweep: 0,
            point_index: 0,
            branch_file: None,
            n_energies: 50,
            output_dir: PathBuf::from("out"),
        }
    }
}

/// Recognised keys, in echo order.
pub const KEYS: &[&str] = &[
    "g",
    "k0",
    "M",
    "K",
    "energy",
    "amplitude",
    "eps",
    "modes",
    "ds",
    "ds_max",
    "max_steps",
    "rupture_threshold",
    "start_amplitude",
    "grid",
    "dt",
    "t_end",
    "snapshot_every",
    "mode",
    "noise",
    "seed",
    "n_eigs",
    "bloch_sweep",
    "point_index",
    "branch_file",
    "n_energies",
    "output_dir",
];

fn err(line: usize, message: String) -> Error {
    Error::Config { line, message }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| err(line, format!("{key}: cannot parse '{value}'")))
}

impl RunConfig {
    /// Assigns one key. `line` is reported in errors (0 for command-line values).
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let v = value.trim();
        match key {
            "g" => self.g = parse_num(key, v, line)?,
            "k0" => self.k0 = parse_num(key, v, line)?,
            "M" => self.marangoni = Some(parse_num(key, v, line)?),
            "K" => self.mass_constant = parse_num(key, v, line)?,
            "energy" => self.energy = Some(parse_num(key, v, line)?),
            "amplitude" => self.amplitude = Some(parse_num(key, v, line)?),
            "eps" => self.eps = parse_num(key, v, line)?,
            "modes" => self.modes = parse_num(key, v, line)?,
            "ds" => self.ds = parse_num(key, v, line)?,
            "ds_max" => self.ds_max = parse_num(key, v, line)?,
            "max_steps" => self.max_steps = parse_num(key, v, line)?,
            "rupture_threshold" => self.rupture_threshold = parse_num(key, v, line)?,
            "start_amplitude" => self.start_amplitude = parse_num(key, v, line)?,
            "grid" => self.grid = parse_num(key, v, line)?,
            "dt" => self.dt = parse_num(key, v, line)?,
            "t_end" => self.t_end = parse_num(key, v, line)?,
            "snapshot_every" => self.snapshot_every = parse_num(key, v, line)?,
            "mode" => self.mode = parse_num(key, v, line)?,
            "noise" => self.noise = parse_num(key, v, line)?,
            "seed" => self.seed = parse_num(key, v, line)?,
            "n_eigs" => self.n_eigs = parse_num(key, v, line)?,
            "bloch_sweep" => self.bloch_sweep = parse_num(key, v, line)?,
            "point_index" => self.point_index = parse_num(key, v, line)?,
            "branch_file" => self.branch_file = Some(PathBuf::from(v)),
            "n_energies" => self.n_energies = parse_num(key, v, line)?,
            "output_dir" => self.output_dir = PathBuf::from(v),
            _ => return Err(err(line, format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Range checks. `lines` maps keys to the line that set them.
    pub fn validate(&self, lines: &BTreeMap<String, usize>) -> Result<()> {
        let at = |k: &str| lines.get(k).copied().unwrap_or(0);
        let positive = [
            ("g", self.g),
            ("k0", self.k0),
            ("eps", self.eps),
            ("ds", self.ds),
            ("ds_max", self.ds_max),
            ("rupture_threshold", self.rupture_threshold),
            ("start_amplitude", self.start_amplitude),
            ("dt", self.dt),
            ("t_end", self.t_end),
            ("snapshot_every", self.snapshot_every),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(err(at(k), format!("{k} must be positive and finite, got {v}")));
            }
        }
        if let Some(m) = self.marangoni {
            if !(m > 0.0 && m.is_finite()) {
                return Err(err(at("M"), format!("M must be positive and finite, got {m}")));
            }
        }
        if !(self.mass_constant <= K0 + 1e-15) {
            return Err(err(at("K"), format!("K must not exceed {K0}, got {}", self.mass_constant)));
        }
        if let Some(a) = self.amplitude {
            if !a.is_finite() {
                return Err(err(at("amplitude"), format!("amplitude must be finite, got {a}")));
            }
        }
        if self.eps > 0.3 {
            return Err(err(at("eps"), format!("eps must lie in (0, 0.3], got {}", self.eps)));
        }
        if self.ds > self.ds_max {
            return Err(err(at("ds"), format!("ds = {} exceeds ds_max = {}", self.ds, self.ds_max)));
        }
        if self.rupture_threshold >= 1.0 {
            return Err(err(at("rupture_threshold"), "rupture_threshold must be below 1".into()));
        }
        if !(self.noise >= 0.0 && self.noise < 1.0) {
            return Err(err(at("noise"), format!("noise must lie in [0, 1), got {}", self.noise)));
        }
        let counts = [
            ("modes", self.modes, 4),
            ("max_steps", self.max_steps, 2),
            ("grid", self.grid, 16),
            ("mode", self.mode, 1),
            ("n_eigs", self.n_eigs, 1),
            ("n_energies", self.n_energies, 1),
        ];
        for (k, v, lo) in counts {
            if v < lo {
                return Err(err(at(k), format!("{k} must be at least {lo}, got {v}")));
            }
        }
        if self.modes > 1024 {
            return Err(err(at("modes"), "modes must not exceed 1024".into()));
        }
        if 2 * self.mode >= self.grid {
            return Err(err(at("mode"), format!("mode {} not resolved on {} points", self.mode, self.grid)));
        }
        Ok(())
    }

    /// `M* = 4g`.
    pub fn m_star(&self) -> f64 {
        4.0 * self.g
    }

    /// `M*(k0) = 4g + 4k0²`.
    pub fn m_star_k0(&self) -> f64 {
        4.0 * self.g + 4.0 * self.k0 * self.k0
    }

    /// Resolved configuration in the input format, derived values as comments.
    pub fn echo(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "auto".to_string(), |x| format!("{x:?}"));
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("g", format!("{:?}", self.g));
        put("k0", format!("{:?}", self.k0));
        put("M", opt(self.marangoni));
        put("K", format!("{:?}", self.mass_constant));
        put("energy", opt(self.energy));
        put("amplitude", opt(self.amplitude));
        put("eps", format!("{:?}", self.eps));
        put("modes", self.modes.to_string());
        put("ds", format!("{:?}", self.ds));
        put("ds_max", format!("{:?}", self.ds_max));
        put("max_steps", self.max_steps.to_string());
        put("rupture_threshold", format!("{:?}", self.rupture_threshold));
        put("start_amplitude", format!("{:?}", self.start_amplitude));
        put("grid", self.grid.to_string());
        put("dt", format!("{:?}", self.dt));
        put("t_end", format!("{:?}", self.t_end));
        put("snapshot_every", format!("{:?}", self.snapshot_every));
        put("mode", self.mode.to_string());
        put("noise", format!("{:?}", self.noise));
        put("seed", self.seed.to_string());
        put("n_eigs", self.n_eigs.to_string());
        put("bloch_sweep", self.bloch_sweep.to_string());
        put("point_index", self.point_index.to_string());
        put(
            "branch_file",
            self.branch_file.as_ref().map_or_else(|| "auto".into(), |p| p.display().to_string()),
        );
        put("n_energies", self.n_energies.to_string());
        put("output_dir", self.output_dir.display().to_string());
        let _ = writeln!(s, "# M_star = {:?}", self.m_star());
        let _ = writeln!(s, "# M_star_k0 = {:?}", self.m_star_k0());
        s
    }
}

/// Parses a configuration document and applies defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let (cfg, _) = parse_config_with_lines(text)?;
    Ok(cfg)
}

/// As [`parse_config`], also returning the line of every assignment. Values
/// are not range-checked yet so that command-line overrides can follow.
pub fn parse_config_with_lines(text: &str) -> Result<(RunConfig, BTreeMap<String, usize>)> {
    let mut cfg = RunConfig::default();
    let mut lines = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{body}'")))?;
        let key = key.trim();
        if value.trim() == "auto" && matches!(key, "M" | "energy" | "amplitude" | "branch_file") {
            lines.insert(key.to_string(), line);
            continue;
        }
        if lines.contains_key(key) {
            return Err(err(line, format!("duplicate key '{key}'")));
        }
        cfg.set(key, value, line)?;
        lines.insert(key.to_string(), line);
    }
    cfg.validate(&lines)?;
    Ok((cfg, lines))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_echo() {
        let cfg = parse_config("g = 1\nk0 = 1").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert!(cfg.echo().contains("# M_star_k0 = 8.0"));
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
        assert_eq!(parse_config("# only a comment\n\n").unwrap().g, 1.0);
    }

    #[test]
    fn echo_parses_back() {
        let cfg = RunConfig {
            marangoni: Some(7.9),
            seed: 42,
            branch_file: Some("run/branch.csv".into()),
            ..Default::default()
        };
        assert_eq!(parse_config(&cfg.echo()).unwrap(), cfg);
    }

    #[test]
    fn errors_carry_lines_and_keys() {
        match parse_config("k0 = 2\ng = -1") {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains('g'));
            }
            other => panic!("{other:?}"),
        }
        match parse_config("\n\nbogus = 3") {
            Err(Error::Config { line: 3, message }) => assert!(message.contains("bogus")),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("g 1"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("M = x"), Err(Error::Config { line: 1, .. })));
        assert!(matches!(parse_config("g = 1\ng = 2"), Err(Error::Config { line: 2, .. })));
        assert!(matches!(parse_config("eps = 0.5"), Err(Error::Config { line: 1, .. })));
        let e = parse_config("g = -1").unwrap_err().to_string();
        assert!(e.starts_with("line 1: g"), "{e}");
    }
}
