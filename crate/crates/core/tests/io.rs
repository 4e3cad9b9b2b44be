//! File formats: branch tables, profiles and bifurcation data.

use thinfilm::continuation::{BranchPoint, BranchRecord, Termination};
use thinfilm::io::{
    emit_bifurcation, emit_branch, read_branch, read_profile, read_table, BranchRow, BIFURCATION_HEADER,
};
use thinfilm::steady::local_expansion;

fn record() -> BranchRecord {
    // deliberately out of arclength order to exercise the bifurcation sort
    let points = [0.3, 0.1, 0.2]
        .iter()
        .map(|&s| {
            let (v, m) = local_expansion(1.0, 1.0, s, 16);
            let mut bp = BranchPoint::new(s, v, m, 1.0, 1e-13).unwrap();
            bp.leading_eig = if s < 0.25 { 0.01 * s } else { f64::NAN };
            bp
        })
        .collect();
    BranchRecord { points, termination: Termination::UserBound }
}

#[test]
fn branch_files_round_trip_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let rec = record();
    let files = emit_branch(&rec, dir.path()).unwrap();
    assert_eq!(files.len(), 1 + rec.points.len());
    let text = std::fs::read_to_string(dir.path().join("branch.csv")).unwrap();
    assert!(text.starts_with("s,M,K,min_h,max_h,l2_norm,h2_norm,flux_residual,leading_eig\n"));
    assert!(!text.contains('\r'));
    let rows = read_branch(dir.path().join("branch.csv")).unwrap();
    for (row, bp) in rows.iter().zip(&rec.points) {
        assert!(row.same_bits(&BranchRow::from(bp)));
    }
    for (i, bp) in rec.points.iter().enumerate() {
        let path = dir.path().join(format!("profile_{i}.csv"));
        let head = std::fs::read_to_string(&path).unwrap();
        assert!(head.starts_with("x,v,h\n"));
        let back = read_profile(&path, 1.0).unwrap();
        assert!(back.sup_distance(&bp.profile) < 1e-14);
    }
}

#[test]
fn bifurcation_data_is_sorted_by_arclength() {
    let dir = tempfile::tempdir().unwrap();
    let rec = record();
    let path = emit_bifurcation(&rec, dir.path()).unwrap();
    let rows = read_table(&path, &BIFURCATION_HEADER).unwrap();
    let mut sorted: Vec<&BranchPoint> = rec.points.iter().collect();
    sorted.sort_by(|a, b| a.s.total_cmp(&b.s));
    for (row, bp) in rows.iter().zip(sorted) {
        assert_eq!(row[0].to_bits(), bp.marangoni.to_bits());
        assert_eq!(row[1].to_bits(), bp.l2_norm.to_bits());
    }
}

#[test]
fn empty_record_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let rec = BranchRecord { points: vec![], termination: Termination::StepFailure };
    assert!(emit_branch(&rec, dir.path()).is_err());
}
