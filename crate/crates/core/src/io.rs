//! CSV output with round-trippable floats (17 significant digits, LF).

use crate::continuation::{BranchPoint, BranchRecord};
use crate::error::{Error, Result};
use crate::profile::PeriodicProfile;
use csv::{Terminator, WriterBuilder};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

pub const BRANCH_HEADER: [&str; 9] = [
    "s",
    "M",
    "K",
    "min_h",
    "max_h",
    "l2_norm",
    "h2_norm",
    "flux_residual",
    "leading_eig",
];
pub const PROFILE_HEADER: [&str; 3] = ["x", "v", "h"];
pub const BIFURCATION_HEADER: [&str; 2] = ["M", "l2_norm"];
pub const DIAGNOSTICS_HEADER: [&str; 5] = ["t", "mass", "min_h", "max_mode", "blowup_indicator"];

/// Scientific notation with 17 significant digits.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Writes a numeric table with the given header.
pub fn write_table<P: AsRef<Path>>(path: P, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::Data(format!("row has {} fields, header {}", row.len(), header.len())));
        }
        w.write_record(row.iter().map(|&x| format_f64(x)))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a numeric table, checking the header.
pub fn read_table<P: AsRef<Path>>(path: P, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut r = csv::ReaderBuilder::new().from_path(path)?;
    let found: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if found != header {
        return Err(Error::Data(format!("unexpected header {found:?}, want {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>().map_err(|_| Error::Data(format!("bad number '{f}'"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// The scalar columns of one branch point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchRow {
    pub s: f64,
    pub marangoni: f64,
    pub mass_constant: f64,
    pub min_h: f64,
    pub max_h: f64,
    pub l2_norm: f64,
    pub h2_norm: f64,
    pub flux_residual: f64,
    pub leading_eig: f64,
}

impl BranchRow {
    fn fields(&self) -> Vec<f64> {
        vec![
            self.s,
            self.marangoni,
            self.mass_constant,
            self.min_h,
            self.max_h,
            self.l2_norm,
            self.h2_norm,
            self.flux_residual,
            self.leading_eig,
        ]
    }

    /// Field-wise equality that treats NaN as equal to NaN.
    pub fn same_bits(&self, other: &Self) -> bool {
        self.fields()
            .iter()
            .zip(other.fields())
            .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl From<&BranchPoint> for BranchRow {
    fn from(p: &BranchPoint) -> Self {
        Self {
            s: p.s,
            marangoni: p.marangoni,
            mass_constant: p.mass_constant,
            min_h: p.min_h,
            max_h: p.max_h,
            l2_norm: p.l2_norm,
            h2_norm: p.h2_norm,
            flux_residual: p.flux_residual,
            leading_eig: p.leading_eig,
        }
    }
}

pub fn profile_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("profile_{index}.csv"))
}

/// Samples `x, v, 1 + v` on the `4N`-point grid `x_i = -π/k0 + i·2π/(4N k0)`.
pub fn write_profile<P: AsRef<Path>>(path: P, v: &PeriodicProfile) -> Result<()> {
    let n = 4 * v.n_modes();
    let vals = v.sample(n, 0);
    let dx = 2.0 * PI / (v.k0() * n as f64);
    let rows: Vec<Vec<f64>> = vals
        .iter()
        .enumerate()
        .map(|(i, &y)| vec![-PI / v.k0() + i as f64 * dx, y, 1.0 + y])
        .collect();
    write_table(path, &PROFILE_HEADER, &rows)
}

/// Inverse of [`write_profile`]: re-expands the samples in `n/4` modes.
pub fn read_profile<P: AsRef<Path>>(path: P, k0: f64) -> Result<PeriodicProfile> {
    let rows = read_table(path, &PROFILE_HEADER)?;
    if rows.len() < 8 || rows.len() % 4 != 0 {
        return Err(Error::Data(format!("profile with {} samples", rows.len())));
    }
    let v: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    Ok(PeriodicProfile::from_samples(k0, &v, rows.len() / 4))
}

/// `branch.csv` plus one `profile_<idx>.csv` per point.
pub fn emit_branch(record: &BranchRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    if record.points.is_empty() {
        return Err(Error::Data("empty branch record".into()));
    }
    fs::create_dir_all(dir)?;
    let branch = dir.join("branch.csv");
    let rows: Vec<Vec<f64>> = record.points.iter().map(|p| BranchRow::from(p).fields()).collect();
    write_table(&branch, &BRANCH_HEADER, &rows)?;
    let mut files = vec![branch];
    for (i, p) in record.points.iter().enumerate() {
        let path = profile_path(dir, i);
        write_profile(&path, &p.profile)?;
        files.push(path);
    }
    Ok(files)
}

/// `bifurcation.csv`: `(M, l2_norm)` in order of arclength.
pub fn emit_bifurcation(record: &BranchRecord, dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut pts: Vec<&BranchPoint> = record.points.iter().collect();
    pts.sort_by(|a, b| a.s.total_cmp(&b.s));
    let rows: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.marangoni, p.l2_norm]).collect();
    let path = dir.join("bifurcation.csv");
    write_table(&path, &BIFURCATION_HEADER, &rows)?;
    Ok(path)
}

pub fn read_branch<P: AsRef<Path>>(path: P) -> Result<Vec<BranchRow>> {
    Ok(read_table(path, &BRANCH_HEADER)?
        .into_iter()
        .map(|r| BranchRow {
            s: r[0],
            marangoni: r[1],
            mass_constant: r[2],
            min_h: r[3],
            max_h: r[4],
            l2_norm: r[5],
            h2_norm: r[6],
            flux_residual: r[7],
            leading_eig: r[8],
        })
        .collect())
}

/// Writes `text` to `dir/config.resolved`.
pub fn write_resolved_config(dir: &Path, text: &str) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("config.resolved");
    fs::write(&path, text)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0, -0.0] {
            let s = format_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert!(format_f64(f64::NAN).parse::<f64>().unwrap().is_nan());
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn profile_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let mut v = PeriodicProfile::zero(1.5, 16);
        v.coeffs_mut()[0] = 0.3;
        v.coeffs_mut()[3] = -0.01;
        let path = dir.path().join("p.csv");
        write_profile(&path, &v).unwrap();
        let back = read_profile(&path, 1.5).unwrap();
        assert!(back.sup_distance(&v) < 1e-15);
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,v,h\n") && !text.contains('\r'));
    }
}
