//! `μ₁(A + (π²/j₀,₁²)E_T) ≤ 4π²/(3√3)` over the moduli triangle
//! `1 < r ≤ 2, 0 ≤ s < 1, r + s ≤ 2`, split into five regions: two handled by
//! Cheng's bound ("sector"), two by the linear trial function ("linearrs")
//! and a trapezoid by the transplanted `v₁ + v₂/3` ("equirs").

use std::f64::consts::PI;

use serde::Serialize;

use super::interval::{certify_sign, ratio, Coeff, ExactPoly, Sign};
use super::{
    check_samples, near_equilateral, sample, Check, CertificateReport, RegionReport, Tally, Theorem,
};
use crate::constants::{J01, MU1_A, SQRT_3};
use crate::error::Result;
use crate::geometry::ShapeParams;
use crate::trial_bounds::{linear_rayleigh, transplanted_mixed_bound};

const PI2: f64 = PI * PI;
const AGREE_TOL: f64 = 1e-9;
const GRID: usize = 10_000;
const COVER_GRID: usize = 500;
const MEMBER_SLACK: f64 = 1e-12;

fn sector_weight() -> f64 {
    1.0 - J01 * J01 / PI2
}

/// Left side of `(r−1)(r+3) − (1 − j²/π²)√(27(r²−1)(1−s²)) < 0`.
pub fn sector_lhs(r: f64, s: f64) -> f64 {
    (r - 1.0) * (r + 3.0) - sector_weight() * (27.0 * (r * r - 1.0) * (1.0 - s * s)).max(0.0).sqrt()
}

/// Left minus right side of
/// `(r+1)² − (7π²/54)(3 + r²s²) < (5/12)√(27(r²−1)(1−s²))`.
pub fn linearrs_lhs(r: f64, s: f64) -> f64 {
    (r + 1.0).powi(2)
        - 7.0 * PI2 / 54.0 * (3.0 + r * r * s * s)
        - 5.0 / 12.0 * (27.0 * (r * r - 1.0) * (1.0 - s * s)).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Uvw {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Uvw {
    /// `UV + W`; the trapezoid inequality asks for this to be negative.
    pub fn combined(&self) -> f64 {
        self.u * self.v + self.w
    }
}

fn u_alpha() -> f64 {
    320.0 * PI2 / 9.0 + 216.0
}

pub fn eval_uvw(r: f64, s: f64) -> Uvw {
    let u = u_alpha() * (r * r + s * s) - 324.0 * SQRT_3 * r * s + 640.0 * PI2 / 9.0 - 864.0;
    let v = 4.0 * (r + 1.0).powi(3) + 45.0 * (r - 1.0) * (s * s - 1.0);
    let w = 4480.0 * PI2 / 3.0 * (r - 1.0) * (r + 1.0).powi(2) * (s * s - 1.0);
    Uvw { u, v, w }
}

/// `∂²(UV + W)/∂s²` from the product rule on the structural form.
pub fn uvw_dss_structural(r: f64, s: f64) -> f64 {
    let Uvw { u, v, .. } = eval_uvw(r, s);
    let du = 2.0 * u_alpha() * s - 324.0 * SQRT_3 * r;
    let ddu = 2.0 * u_alpha();
    let dv = 90.0 * (r - 1.0) * s;
    let ddv = 90.0 * (r - 1.0);
    let ddw = 2.0 * 4480.0 * PI2 / 3.0 * (r - 1.0) * (r + 1.0).powi(2);
    ddu * v + 2.0 * du * dv + u * ddv + ddw
}

/// The expanded second derivative in `x = r − 1`.
pub fn uvw_dss_expanded(r: f64, s: f64) -> f64 {
    let x = r - 1.0;
    432.0 * (32.0 - 132.0 * x + 114.0 * x * x + 49.0 * x.powi(3))
        + 640.0 * PI2 / 9.0 * (32.0 + 306.0 * x + 282.0 * x * x + 91.0 * x.powi(3))
        - 87480.0 * x * (x + 1.0) * SQRT_3 * s
        + 480.0 * (40.0 * PI2 + 243.0) * x * s * s
}

/// Lower bound left after dropping the `s²` term, `√3 s → 1`, `π² → 9`.
pub fn convexity_cubic() -> ExactPoly {
    ExactPoly {
        name: "convexity_cubic",
        coeffs: [34304, 51336, 142248, 79408].iter().map(|&k| Coeff::new(k, 0, 0)).collect(),
    }
}

/// `UV + W` at `s = 0, r = x + 3/2` equals `(8/9)(x − 1/2)` times this quartic.
pub fn boundary_s0_quartic() -> ExactPoly {
    ExactPoly {
        name: "boundary_s0_quartic",
        coeffs: vec![
            Coeff::new(34020, -3100, 0),
            Coeff::new(35235, 3400, 0),
            Coeff::new(32805, 4680, 0),
            Coeff::new(10692, 1760, 0),
            Coeff::new(972, 160, 0),
        ],
    }
}

/// `k_π π² + k_c c` with `c = 4 + 3√3`.
const fn with_c(pi2: i64, kc: i64) -> Coeff {
    Coeff::new(4 * kc, pi2, 3 * kc)
}

/// `UV + W` at `s = 2 − r, r = x + 8/5` equals `(4/5625)(x − 2/5)` times this quartic.
pub fn boundary_diagonal_quartic() -> ExactPoly {
    ExactPoly {
        name: "boundary_diagonal_quartic",
        coeffs: vec![
            with_c(-10_211_200, 11_572_632),
            with_c(7_976_000, 12_510_855),
            with_c(34_200_000, 8_693_325),
            with_c(21_400_000, 15_278_625),
            with_c(7_000_000, 7_441_875),
        ],
    }
}

/// `UV + W` at `s = 2/5, r = x + 3/2` equals `4/1125` times this quintic.
pub fn boundary_s25_quintic() -> ExactPoly {
    ExactPoly {
        name: "boundary_s25_quintic",
        coeffs: vec![
            Coeff::new(-4_211_433, 820_260, -2_383_830),
            Coeff::new(4_352_859, -138_480, -3_623_130),
            Coeff::new(6_530_625, 934_600, -2_996_190),
            Coeff::new(7_341_030, 1_095_600, -1_312_200),
            Coeff::new(2_551_500, 420_000, -145_800),
            Coeff::new(243_000, 40_000, 0),
        ],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OptRegion {
    /// `1 < r ≤ 5/4, 0 ≤ s ≤ 2 − r`
    SectorStrip,
    /// `5/4 ≤ r ≤ 3/2, 0 ≤ s ≤ 1/3`
    SectorRectangle,
    /// `5/4 ≤ r ≤ 3/2, 1/3 ≤ s ≤ 2 − r`
    LinearUpper,
    /// `3/2 ≤ r ≤ 8/5, 2/5 ≤ s ≤ 2 − r`
    LinearWedge,
    /// `3/2 ≤ r ≤ 2, 0 ≤ s ≤ min(2/5, 2 − r)`
    EquiTrapezoid,
}

impl OptRegion {
    pub const ALL: [OptRegion; 5] = [
        OptRegion::SectorStrip,
        OptRegion::SectorRectangle,
        OptRegion::LinearUpper,
        OptRegion::LinearWedge,
        OptRegion::EquiTrapezoid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OptRegion::SectorStrip => "sector_strip",
            OptRegion::SectorRectangle => "sector_rectangle",
            OptRegion::LinearUpper => "linear_upper",
            OptRegion::LinearWedge => "linear_wedge",
            OptRegion::EquiTrapezoid => "equi_trapezoid",
        }
    }

    pub fn inequality(self) -> &'static str {
        match self {
            OptRegion::SectorStrip | OptRegion::SectorRectangle => "sector",
            OptRegion::LinearUpper | OptRegion::LinearWedge => "linearrs",
            OptRegion::EquiTrapezoid => "equirs",
        }
    }

    pub fn contains(self, r: f64, s: f64) -> bool {
        let e = MEMBER_SLACK;
        let within = |x: f64, lo: f64, hi: f64| x >= lo - e && x <= hi + e;
        match self {
            OptRegion::SectorStrip => r > 1.0 && within(r, 1.0, 1.25) && within(s, 0.0, 2.0 - r),
            OptRegion::SectorRectangle => within(r, 1.25, 1.5) && within(s, 0.0, 1.0 / 3.0),
            OptRegion::LinearUpper => within(r, 1.25, 1.5) && within(s, 1.0 / 3.0, 2.0 - r),
            OptRegion::LinearWedge => within(r, 1.5, 1.6) && within(s, 0.4, 2.0 - r),
            OptRegion::EquiTrapezoid => within(r, 1.5, 2.0) && within(s, 0.0, 0.4_f64.min(2.0 - r)),
        }
    }

    /// Maps `[0,1)²` into the region, never onto `r = 1`.
    pub fn point(self, u: f64, v: f64) -> (f64, f64) {
        match self {
            OptRegion::SectorStrip => {
                let r = 1.0 + (1.0 - u) * 0.25;
                (r, v * (2.0 - r))
            }
            OptRegion::SectorRectangle => (1.25 + u * 0.25, v / 3.0),
            OptRegion::LinearUpper => {
                let r = 1.25 + u * 0.25;
                (r, 1.0 / 3.0 + v * (2.0 - r - 1.0 / 3.0))
            }
            OptRegion::LinearWedge => {
                let r = 1.5 + u * 0.1;
                (r, 0.4 + v * (2.0 - r - 0.4))
            }
            OptRegion::EquiTrapezoid => {
                let r = 1.5 + u * 0.5;
                (r, v * 0.4_f64.min(2.0 - r))
            }
        }
    }

    /// `rhs − lhs` of the designated inequality.
    pub fn margin(self, r: f64, s: f64) -> f64 {
        match self.inequality() {
            "sector" => -sector_lhs(r, s),
            "linearrs" => -linearrs_lhs(r, s),
            _ => -eval_uvw(r, s).combined(),
        }
    }

    /// Same inequality evaluated from the triangle itself: the functional it
    /// bounds against the target constant, with `A`, `L` and `E_T` taken from
    /// the vertices.
    pub fn direct_margin(self, r: f64, s: f64) -> Option<f64> {
        let sp = ShapeParams::new(r, s).ok()?;
        let t = sp.triangle().ok()?;
        let g = t.summary();
        let (a, b) = (sp.a(), sp.b());
        Some(match self.inequality() {
            "sector" => MU1_A - (J01 * J01 * g.area + PI2 * g.excess),
            "linearrs" => MU1_A - linear_rayleigh(a, b, 0.0) * (g.area + 12.0 / 7.0 * g.excess),
            _ => {
                let l2 = g.perimeter * g.perimeter;
                28.0 * PI2 / 3.0 - transplanted_mixed_bound(a, b).value * (l2 - 180.0 * g.area * g.area / l2)
            }
        })
    }
}

fn in_shape_triangle(r: f64, s: f64) -> bool {
    r > 1.0 && r <= 2.0 + MEMBER_SLACK && s >= -MEMBER_SLACK && s < 1.0 && r + s <= 2.0 + MEMBER_SLACK
}

fn sample_region(region: OptRegion, samples: usize) -> Tally {
    sample(samples, |[u, v]| {
        let (r, s) = region.point(u, v);
        let margin = region.margin(r, s);
        let exempt = near_equilateral(r, s);
        let mut t = Tally::single(margin, [r, s], exempt);
        if !in_shape_triangle(r, s) || !region.contains(r, s) {
            t.uncovered = 1;
        }
        let scale = match region.inequality() {
            "equirs" => 1e-9 * eval_uvw(r, s).u.abs() * eval_uvw(r, s).v.abs(),
            _ => 1e-12,
        };
        match region.direct_margin(r, s) {
            Some(d) if margin.abs() > scale && d.abs() > 1e-12 => {
                if (d > 0.0) != (margin > 0.0) {
                    t.route_mismatches = 1;
                }
            }
            Some(_) => {}
            None => t.route_mismatches = 1,
        }
        t
    })
}

fn open_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..=n).map(move |i| lo + (hi - lo) * i as f64 / n as f64)
}

fn convex_on(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize) -> (bool, f64) {
    let h = (hi - lo) / n as f64;
    let mut worst = f64::INFINITY;
    for i in 1..n {
        let x = lo + h * i as f64;
        worst = worst.min(f(x - h) - 2.0 * f(x) + f(x + h));
    }
    (worst > 0.0, worst)
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Sector inequality at `s = 2 − r`, a function of `r` alone.
pub fn sector_diagonal(r: f64) -> f64 {
    (r + 3.0) - sector_weight() * (27.0 * (r + 1.0) * (3.0 - r)).sqrt()
}

/// Sector inequality at `s = 1/3` with `r + 3 → 9/2`, squared.
pub fn sector_rectangle_linear(r: f64) -> f64 {
    (r - 1.0) * 20.25 - sector_weight().powi(2) * 27.0 * (r + 1.0) * (8.0 / 9.0)
}

/// `linearrs` with `s = s_left` on the left and `s = 2 − r` on the right.
pub fn linearrs_reduced(r: f64, s_left: f64) -> f64 {
    (r + 1.0).powi(2)
        - 7.0 * PI2 / 54.0 * (3.0 + r * r * s_left * s_left)
        - 5.0 / 12.0 * (27.0 * (r * r - 1.0) * (r - 1.0) * (3.0 - r)).max(0.0).sqrt()
}

fn reduction_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let (convex, worst) = convex_on(sector_diagonal, -0.99, 2.99, GRID);
    let (e1, e2) = (sector_diagonal(1.0), sector_diagonal(1.25));
    checks.push(Check::new(
        "sector_diagonal",
        convex && e1 < 0.0 && e2 < 0.0,
        e1.max(e2),
        format!("convex on (-1,3) (min second difference {worst:e}); values {e1:.6} at r=1, {e2:.6} at r=5/4"),
    ));
    let (e1, e2) = (sector_rectangle_linear(1.25), sector_rectangle_linear(1.5));
    checks.push(Check::new(
        "sector_rectangle_linear",
        e1 < 0.0 && e2 < 0.0,
        e1.max(e2),
        format!("linear in r; {e1:.6} at r=5/4, {e2:.6} at r=3/2"),
    ));
    for (name, s_left, lo, hi) in [("linearrs_upper", 1.0 / 3.0, 1.25, 1.5), ("linearrs_wedge", 0.4, 1.5, 1.6)] {
        let f = |r: f64| linearrs_reduced(r, s_left);
        let (convex, worst) = convex_on(f, 1.0 + 1e-3, 3.0 - 1e-3, GRID);
        let (e1, e2) = (f(lo), f(hi));
        checks.push(Check::new(
            name,
            convex && e1 < 0.0 && e2 < 0.0,
            e1.max(e2),
            format!("convex on (1,3) (min second difference {worst:e}); {e1:.6} at r={lo}, {e2:.6} at r={hi}"),
        ));
    }
    checks
}

fn convexity_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let cubic = convexity_cubic();
    let coeffs_positive = cubic.numeric().iter().all(|&c| c > 0.0);
    checks.push(Check::new(
        "convexity_cubic_positive",
        coeffs_positive && cubic.eval(0.0) > 0.0,
        cubic.eval(0.0),
        "34304 + 51336x + 142248x^2 + 79408x^3 has positive coefficients",
    ));
    // the reduction really is a lower bound, and the two forms of the second derivative agree
    let mut worst_gap = f64::INFINITY;
    let mut worst_agree: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    let mut min_dss = f64::INFINITY;
    let n = 200;
    for r in open_grid(1.5, 2.0, n) {
        let smax = 0.4_f64.min(2.0 - r);
        for s in open_grid(0.0, smax, 40) {
            let exp = uvw_dss_expanded(r, s);
            let st = uvw_dss_structural(r, s);
            worst_agree = worst_agree.max(rel_diff(exp, st));
            let h = 1e-3;
            let fd = (eval_uvw(r, s + h).combined() - 2.0 * eval_uvw(r, s).combined() + eval_uvw(r, s - h).combined())
                / (h * h);
            worst_fd = worst_fd.max(rel_diff(fd, st));
            worst_gap = worst_gap.min(exp - cubic.eval(r - 1.0));
            min_dss = min_dss.min(exp);
        }
    }
    checks.push(Check::new(
        "second_derivative_forms",
        worst_agree < AGREE_TOL,
        worst_agree,
        "expanded vs product-rule second derivative in s, relative",
    ));
    checks.push(Check::new(
        "second_derivative_difference",
        worst_fd < 1e-6,
        worst_fd,
        "central second difference (h = 1e-3) vs analytic, relative",
    ));
    checks.push(Check::new(
        "convexity_reduction",
        worst_gap >= 0.0 && min_dss > 0.0,
        min_dss,
        format!("second derivative minus reduced cubic >= {worst_gap:.3} over the closed trapezoid"),
    ));
    checks
}

struct Boundary {
    poly: ExactPoly,
    x_hi: f64,
    /// `(r, s)` at `x`.
    path: fn(f64) -> (f64, f64),
    /// `UV + W` as given by the expanded polynomial.
    expanded: fn(&ExactPoly, f64) -> f64,
    sign: Sign,
    x_hi_rational: (i64, i64),
}

fn boundaries() -> Vec<Boundary> {
    vec![
        Boundary {
            poly: boundary_s0_quartic(),
            x_hi: 0.5,
            path: |x| (x + 1.5, 0.0),
            expanded: |p, x| 8.0 / 9.0 * (x - 0.5) * p.eval(x),
            sign: Sign::Positive,
            x_hi_rational: (1, 2),
        },
        Boundary {
            poly: boundary_diagonal_quartic(),
            x_hi: 0.4,
            path: |x| (x + 1.6, 0.4 - x),
            expanded: |p, x| 4.0 / 5625.0 * (x - 0.4) * p.eval(x),
            sign: Sign::Positive,
            x_hi_rational: (2, 5),
        },
        Boundary {
            poly: boundary_s25_quintic(),
            x_hi: 0.1,
            path: |x| (x + 1.5, 0.4),
            expanded: |p, x| 4.0 / 1125.0 * p.eval(x),
            sign: Sign::Negative,
            x_hi_rational: (1, 10),
        },
    ]
}

fn boundary_checks(strict: bool) -> Vec<Check> {
    let mut checks = Vec::new();
    for b in boundaries() {
        let name = b.poly.name;
        let mut agree: f64 = 0.0;
        let mut sign_ok = true;
        for x in open_grid(0.0, b.x_hi, GRID) {
            let (r, s) = (b.path)(x);
            agree = agree.max(rel_diff((b.expanded)(&b.poly, x), eval_uvw(r, s).combined()));
            let v = b.poly.eval(x);
            sign_ok &= match b.sign {
                Sign::Positive => v > 0.0,
                Sign::Negative => v < 0.0,
            };
        }
        checks.push(Check::new(
            format!("{name}_forms"),
            agree < AGREE_TOL,
            agree,
            "expanded coefficients vs U*V+W along the boundary, relative",
        ));
        // the argument as written: sign of the coefficients, or convexity plus endpoints
        let c = b.poly.numeric();
        let (reason_ok, reason) = match b.sign {
            Sign::Positive => (c.iter().all(|&v| v > 0.0), "all coefficients positive".to_string()),
            Sign::Negative => {
                let convex = c[2..].iter().all(|&v| v > 0.0);
                let (e0, e1) = (b.poly.eval(0.0), b.poly.eval(b.x_hi));
                (convex && e0 < 0.0 && e1 < 0.0, format!("x^2..x^5 coefficients positive; {e0:.1} at 0, {e1:.1} at {}", b.x_hi))
            }
        };
        checks.push(Check::new(
            format!("{name}_sign"),
            reason_ok && sign_ok,
            b.poly.eval(0.0),
            format!("{reason}; dense grid sign {}", if sign_ok { "holds" } else { "fails" }),
        ));
        if strict {
            let (num, den) = b.x_hi_rational;
            let cert = certify_sign(&b.poly, ratio(0, 1), ratio(num, den), b.sign);
            checks.push(Check::new(
                format!("{name}_strict"),
                cert.certified,
                cert.boxes as f64,
                format!("{cert:?}"),
            ));
        }
    }
    if strict {
        let cert = certify_sign(&convexity_cubic(), ratio(0, 1), ratio(1, 1), Sign::Positive);
        checks.push(Check::new("convexity_cubic_strict", cert.certified, cert.boxes as f64, format!("{cert:?}")));
    }
    checks
}

fn spot_checks() -> Vec<Check> {
    let mut checks = Vec::new();
    let eq = eval_uvw(2.0, 0.0);
    let scale = eq.u.abs() * eq.v.abs();
    checks.push(Check::new(
        "equilateral_root",
        eq.combined().abs() < AGREE_TOL * scale,
        eq.combined(),
        "U*V+W at (2,0)",
    ));
    let w = eval_uvw(1.0, 1.0).w;
    checks.push(Check::new("w_vanishes_at_1_1", w == 0.0, w, "W at (1,1)"));
    let h = 1e-2;
    let d2 = eval_uvw(1.7, 0.2 + h).combined() - 2.0 * eval_uvw(1.7, 0.2).combined() + eval_uvw(1.7, 0.2 - h).combined();
    checks.push(Check::new("s_second_difference_1_7_0_2", d2 > 0.0, d2, "second difference in s at (1.7, 0.2)"));
    checks
}

/// Membership of every grid point of the moduli triangle (minus `(2,0)`) in
/// some region.
pub fn region_grid_cover(n: usize) -> (usize, usize) {
    let mut total = 0;
    let mut missed = 0;
    for i in 1..=n {
        let r = 1.0 + i as f64 / n as f64;
        for j in 0..n {
            let s = j as f64 / n as f64;
            if r + s > 2.0 + MEMBER_SLACK || (i == n && j == 0) {
                continue;
            }
            total += 1;
            if !OptRegion::ALL.iter().any(|g| g.contains(r, s)) {
                missed += 1;
            }
        }
    }
    (total, missed)
}

pub fn certify_thm_1opt(samples: usize, strict: bool) -> Result<CertificateReport> {
    check_samples(samples)?;
    let regions: Vec<RegionReport> = OptRegion::ALL
        .iter()
        .map(|&g| RegionReport::from_tally(g.name(), g.inequality(), &sample_region(g, samples)))
        .collect();
    let mut checks = reduction_checks();
    checks.extend(convexity_checks());
    checks.extend(boundary_checks(strict));
    checks.extend(spot_checks());
    let (total, missed) = region_grid_cover(COVER_GRID);
    checks.push(Check::new(
        "region_cover",
        missed == 0,
        missed as f64,
        format!("{missed} of {total} points on a {COVER_GRID}x{COVER_GRID} grid outside every region"),
    ));
    Ok(CertificateReport::assemble(Theorem::OneOpt, "r,s", strict, regions, checks))
}
