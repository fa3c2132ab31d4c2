//! `μ₁S² ≤ 16π²/3` in the `(q, p)` coordinates `q = 3 + a² + b²`, `p = b²`,
//! covered by the best linear trial function below `Q_ℓ` and the transplanted
//! antisymmetric mode above `Q₁`.

use std::f64::consts::PI;

use serde::Serialize;

use super::interval::{certify_sign, ratio, Coeff, ExactPoly, Sign};
use super::{check_samples, sample, Check, CertificateReport, RegionReport, Tally, Theorem};
use crate::constants::MU1_S2;
use crate::error::Result;
use crate::trial_bounds::{best_linear_mu1_bound, transplanted_mu1_bound};

const PI2: f64 = PI * PI;
/// Samples stop this far short of the equilateral corner `q = 6`.
pub const Q_MAX_GAP: f64 = 1e-6;
const CURVE_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCurves {
    /// Lower edge of the constraint region, `−q²/4 + 4q − 12`.
    pub q_c: f64,
    /// Linear trial function works below this.
    pub q_l: f64,
    /// Transplanted mode works above this.
    pub q_1: f64,
}

pub fn region_curves(q: f64) -> RegionCurves {
    RegionCurves {
        q_c: -0.25 * q * q + 4.0 * q - 12.0,
        q_l: 9.0 * (4.0 * PI2 - 27.0) * q * q / (16.0 * PI2 * PI2),
        q_1: ((32.0 * PI2 + 243.0) * q * q - 1458.0 * q) / (384.0 * PI2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingPoints {
    /// `768π²/(128π² + 243)`: above it `Q_c > Q₁`.
    pub q_c1: f64,
    /// `1458π²/(32π⁴ − 621π² + 5832)`: below it `Q_ℓ > Q₁`.
    pub q_l1: f64,
    /// `Q_c > Q₁` at every sampled `q ∈ (q_c1, 6)`.
    pub qc_above_q1: bool,
    /// `Q_ℓ > Q₁` at every sampled `q ∈ (3, q_l1)`.
    pub ql_above_q1: bool,
}

pub fn crossing_points() -> CrossingPoints {
    let q_c1 = 768.0 * PI2 / (128.0 * PI2 + 243.0);
    let q_l1 = 1458.0 * PI2 / (32.0 * PI2 * PI2 - 621.0 * PI2 + 5832.0);
    let open = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / CURVE_SAMPLES as f64;
    let qc_above_q1 = (0..CURVE_SAMPLES).all(|i| {
        let c = region_curves(open(q_c1, 6.0, i));
        c.q_c > c.q_1
    });
    let ql_above_q1 = (0..CURVE_SAMPLES).all(|i| {
        let c = region_curves(open(3.0, q_l1, i));
        c.q_l > c.q_1
    });
    CrossingPoints { q_c1, q_l1, qc_above_q1, ql_above_q1 }
}

/// `384π²(Q_c − Q₁) = (6 − q)((128π² + 243)q − 768π²)`; this is the second factor.
pub fn qc_minus_q1_factor() -> ExactPoly {
    ExactPoly { name: "qc_minus_q1_linear_factor", coeffs: vec![Coeff::new(0, -768, 0), Coeff::new(243, 128, 0)] }
}

/// `384π⁴(Q_ℓ − Q₁) = q((621π² − 32π⁴ − 5832)q + 1458π²)`; this is the second factor.
pub fn ql_minus_q1_factor() -> ExactPoly {
    ExactPoly {
        name: "ql_minus_q1_linear_factor",
        coeffs: vec![Coeff::with_pi4(0, 1458, 0), Coeff::with_pi4(-5832, 621, -32)],
    }
}

/// Which trial functions apply at `(q, p)` and their margins against `16π²/3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseMargins {
    pub linear: Option<f64>,
    pub transplant: Option<f64>,
}

pub fn case_margins(q: f64, p: f64) -> CaseMargins {
    let c = region_curves(q);
    let b = p.sqrt();
    let a = (q - 3.0 - p).max(0.0).sqrt();
    let s2 = 2.0 * q;
    let linear = (p < c.q_l).then(|| MU1_S2 - best_linear_mu1_bound(a, b).value * s2);
    let transplant = (p > c.q_1).then(|| MU1_S2 - transplanted_mu1_bound(a, b).value * s2);
    CaseMargins { linear, transplant }
}

/// Maps `[0,1)²` onto the constraint region with `q ≤ 6 − Q_MAX_GAP`.
pub fn constraint_point(u: f64, v: f64) -> (f64, f64) {
    let q = 3.0 + (1.0 - u) * (3.0 - Q_MAX_GAP);
    let lo = region_curves(q).q_c.max(0.0);
    let hi = q - 3.0;
    let p = hi - v * (hi - lo);
    (q, p)
}

pub fn certify_thm_1ups(samples: usize, strict: bool) -> Result<CertificateReport> {
    check_samples(samples)?;
    let per_case = |pick: fn(&CaseMargins) -> Option<f64>| {
        sample(samples, move |[u, v]| {
            let (q, p) = constraint_point(u, v);
            if p <= 0.0 {
                return Tally::EMPTY;
            }
            let m = case_margins(q, p);
            match pick(&m) {
                Some(margin) => Tally::single(margin, [q, p], false),
                None => Tally::EMPTY,
            }
        })
    };
    let linear = per_case(|m| m.linear);
    let transplant = per_case(|m| m.transplant);
    let cover = sample(samples, |[u, v]| {
        let (q, p) = constraint_point(u, v);
        let m = case_margins(q, p);
        let margin = m.linear.into_iter().chain(m.transplant).fold(f64::NEG_INFINITY, f64::max);
        let mut t = Tally::single(margin, [q, p], false);
        t.uncovered = usize::from(m.linear.is_none() && m.transplant.is_none());
        t
    });

    let regions = vec![
        RegionReport::from_tally("linear_case", "best linear bound * 2q < 16pi^2/3", &linear),
        RegionReport::from_tally("transplant_case", "R[v1] * 2q < 16pi^2/3", &transplant),
        RegionReport::from_tally("dichotomy_cover", "p < Q_l(q) or p > Q_1(q)", &cover),
    ];

    let mut checks = Vec::new();
    checks.push(Check::new(
        "cover",
        cover.uncovered == 0 && cover.count == samples,
        cover.uncovered as f64,
        format!("{} of {} samples outside both cases", cover.uncovered, cover.count),
    ));
    let cp = crossing_points();
    checks.push(Check::new(
        "crossing_q_c1",
        cp.qc_above_q1 && cp.q_c1 < 5.04,
        cp.q_c1,
        "768pi^2/(128pi^2+243) below 5.04 with Q_c > Q_1 beyond it",
    ));
    checks.push(Check::new(
        "crossing_q_l1",
        cp.ql_above_q1 && cp.q_l1 > 5.09,
        cp.q_l1,
        "1458pi^2/(32pi^4-621pi^2+5832) above 5.09 with Q_l > Q_1 below it",
    ));
    let eq = MU1_S2 - transplanted_mu1_bound(0.0, 3f64.sqrt()).value * 12.0;
    checks.push(Check::new("equilateral_equality", eq.abs() < 1e-12, eq, "transplant margin at q = 6, p = 3"));
    let qc6 = region_curves(6.0).q_c;
    checks.push(Check::new("q6_forces_p3", (qc6 - 3.0).abs() < 1e-12, qc6, "Q_c(6)"));

    if strict {
        let c = certify_sign(&qc_minus_q1_factor(), ratio(504, 100), ratio(6, 1), Sign::Positive);
        checks.push(Check::new(
            "strict_qc_above_q1",
            c.certified,
            c.boxes as f64,
            format!("(128pi^2+243)q - 768pi^2 > 0 on [5.04, 6]: {c:?}"),
        ));
        let c = certify_sign(&ql_minus_q1_factor(), ratio(3, 1), ratio(509, 100), Sign::Positive);
        checks.push(Check::new(
            "strict_ql_above_q1",
            c.certified,
            c.boxes as f64,
            format!("(621pi^2-32pi^4-5832)q + 1458pi^2 > 0 on [3, 5.09]: {c:?}"),
        ));
    }
    let mut report = CertificateReport::assemble(Theorem::OneUpS, "q,p", strict, regions, checks);
    report.samples = cover.count;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curve_values() {
        assert!(region_curves(4.0).q_c.abs() < 1e-15);
        assert!((region_curves(6.0).q_c - 3.0).abs() < 1e-15);
        let ql6 = 81.0 * (4.0 * PI2 - 27.0) / (4.0 * PI2 * PI2);
        assert!((region_curves(6.0).q_l - ql6).abs() < 1e-14 && ql6 > 0.0);
        let q16 = ((32.0 * PI2 + 243.0) * 36.0 - 8748.0) / (384.0 * PI2);
        assert!((region_curves(6.0).q_1 - q16).abs() < 1e-14);
    }

    #[test]
    fn crossing_points_and_factors() {
        let cp = crossing_points();
        assert!((cp.q_c1 - 5.0323).abs() < 1e-3 && (cp.q_l1 - 5.1026).abs() < 1e-3);
        assert!(cp.qc_above_q1 && cp.ql_above_q1);
        // factored forms agree with the curves
        for &q in &[3.5, 4.7, 5.3, 5.9] {
            let c = region_curves(q);
            let f = (6.0 - q) * qc_minus_q1_factor().eval(q);
            assert!((384.0 * PI2 * (c.q_c - c.q_1) - f).abs() < 1e-9 * f.abs().max(1.0));
            let g = q * ql_minus_q1_factor().eval(q);
            assert!((384.0 * PI2 * PI2 * (c.q_l - c.q_1) - g).abs() < 1e-9 * g.abs().max(1.0));
        }
        assert!(qc_minus_q1_factor().eval(cp.q_c1).abs() < 1e-9);
        assert!(ql_minus_q1_factor().eval(cp.q_l1).abs() < 1e-9);
    }

    #[test]
    fn example_points() {
        let m = case_margins(4.0, 0.5);
        assert!(region_curves(4.0).q_l > 0.5);
        assert!(m.linear.unwrap() > 0.0);
        let c = region_curves(5.5);
        assert!((c.q_c - 2.4375).abs() < 1e-12 && c.q_c > c.q_1);
        let m = case_margins(5.5, 2.45);
        assert!(m.transplant.unwrap() > 0.0);
        // margin closes toward the equilateral corner
        let near = case_margins(6.0 - 1e-6, 3.0 - 1e-6).transplant.unwrap();
        assert!(near > 0.0 && near < 1e-3);
    }

    #[test]
    fn constraint_points_are_admissible() {
        for n in 0..5000 {
            let [u, v] = super::super::r2_point(n);
            let (q, p) = constraint_point(u, v);
            assert!(q > 3.0 && q <= 6.0 - Q_MAX_GAP + 1e-12);
            assert!(p <= q - 3.0 + 1e-12 && p >= region_curves(q).q_c - 1e-12);
        }
    }

    #[test]
    fn certificate_passes_strict() {
        let rep = certify_thm_1ups(2000, true).unwrap();
        assert!(rep.pass, "{:?}", rep.failed_checks());
        assert!(rep.worst_margin > 0.0);
    }
}
