mod common;

use std::f64::consts::PI;

use common::{random_triangle, rel_err, rng};
use trispec::constants::{MU1_A, MU1_S2};
use trispec::scanner::{
    bound_violations, evaluate_shape, evaluate_triangle, probe_conjectures, scan, verify_theorems, write_rows,
    FemSetting, Functionals, OutputFormat, ScanConfig, CONJECTURE_NOTE,
};

fn small_scan(jobs: Option<usize>) -> Vec<trispec::scanner::BoundReport> {
    let cfg = ScanConfig::new(7, 6, 0.05, FemSetting::Level(5), jobs).unwrap();
    scan(&cfg).unwrap()
}

#[test]
fn functionals_are_scale_invariant() {
    let mut r = rng(21);
    for _ in 0..4 {
        let t = random_triangle(&mut r);
        let x = evaluate_triangle(&t, FemSetting::Level(4)).unwrap();
        let y = evaluate_triangle(&t.scaled(2.0).unwrap(), FemSetting::Level(4)).unwrap();
        for (name, (u, v)) in Functionals::NAMES.iter().zip(x.functionals.values().iter().zip(y.functionals.values())) {
            assert!(rel_err(v, *u) < 1e-9, "{name}: {u} vs {v}");
        }
        assert!(rel_err(y.mu1, x.mu1) < 1e-9 && rel_err(y.mu2, x.mu2) < 1e-9);
    }
}

#[test]
fn csv_is_byte_identical_across_runs_and_pools() {
    let render = |jobs| {
        let mut buf = Vec::new();
        write_rows(&small_scan(jobs), OutputFormat::Csv, &mut buf).unwrap();
        buf
    };
    let one = render(Some(1));
    assert_eq!(one, render(Some(1)));
    assert_eq!(one, render(Some(3)));
    assert_eq!(one, render(None));
}

#[test]
fn rows_are_row_major_and_include_the_corner() {
    let rows = small_scan(None);
    for w in rows.windows(2) {
        assert!((w[0].r, w[0].s) < (w[1].r, w[1].s));
    }
    assert!(rows.iter().any(|r| r.r == 2.0 && r.s == 0.0));
    assert!(rows.iter().all(|r| r.error.is_none()));
    assert!(rows.iter().all(|r| r.r >= 1.05 - 1e-12 && r.r + r.s <= 2.0 + 1e-12));
}

#[test]
fn closed_form_bounds_dominate_fem() {
    let rows = small_scan(None);
    let v = bound_violations(&rows, 5e-3);
    assert!(v.is_empty(), "{v:?}");
    for row in &rows {
        let min = row.min_mu1_bound().unwrap().value;
        assert!(row.mu1 <= min * (1.0 + 5e-3));
    }
}

#[test]
fn isosceles_slice_peaks_at_equilateral() {
    let vals: Vec<(f64, f64)> = [1.1, 1.25, 1.4, 1.55, 1.7, 1.85, 1.95, 2.0]
        .iter()
        .map(|&r| (r, evaluate_shape(r, 0.0, FemSetting::Level(5)).unwrap().functionals.mu1_a))
        .collect();
    let (argmax, _) = vals.iter().copied().fold((0.0, f64::NEG_INFINITY), |b, x| if x.1 > b.1 { x } else { b });
    assert_eq!(argmax, 2.0, "{vals:?}");
}

#[test]
fn equality_and_oracle_rows() {
    let eq = evaluate_shape(2.0, 0.0, FemSetting::Level(6)).unwrap();
    assert!(rel_err(eq.functionals.mu1_s2, MU1_S2) < 1e-4);
    assert!(rel_err(eq.functionals.mu1_a, MU1_A) < 1e-4);
    let rs = evaluate_shape(2f64.sqrt(), 0.0, FemSetting::Level(6)).unwrap();
    assert!(rel_err(rs.functionals.mu1_a, PI * PI / 2.0) < 1e-4);
}

#[test]
fn verdicts_on_small_scan() {
    let rows = small_scan(None);
    for v in verify_theorems(&rows, "all", 5e-3).unwrap() {
        assert!(v.max <= v.constant * 1.005, "{v:?}");
    }
    let c = probe_conjectures(&rows, 5e-3);
    assert_eq!(c.len(), 2);
    assert!(c.iter().all(|v| v.note == CONJECTURE_NOTE && v.pass));
    assert!(verify_theorems(&rows, "nope", 5e-3).is_err());
}
