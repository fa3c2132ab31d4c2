mod common;

use std::f64::consts::PI;

use proptest::prelude::*;
use trispec::certificates::one_opt::{eval_uvw, uvw_dss_expanded, uvw_dss_structural, OptRegion};
use trispec::certificates::{crossing_points, r2_point, region_curves, Worst};
use trispec::constants::SQRT_3;
use trispec::equilateral::EquilateralMode;
use trispec::geometry::{check_lemma_s2_excess, check_mean_chain, means, normalize, summarize, Point};
use trispec::transplant::{ortho_gamma, transplanted_rayleigh, AffineMap};
use trispec::trial_bounds::{
    all_bounds, best_linear_mu1_bound, harmonic_case, linear_mu1_bound, transplanted_mu1_bound,
};
use trispec::{ShapeParams, Triangle};

fn triangle() -> impl Strategy<Value = Triangle> {
    let coord = -5.0..5.0f64;
    [(coord.clone(), coord.clone()), (coord.clone(), coord.clone()), (coord.clone(), coord)]
        .prop_filter_map("degenerate", |c| {
            let t = Triangle::from_coords(c).ok()?;
            let g = t.summary();
            (g.area > 1e-3 * g.diameter * g.diameter).then_some(t)
        })
}

/// Admissible moduli `(r, s)` with `1 < r ≤ 2`, `0 ≤ s < 1`, `r + s ≤ 2`.
fn moduli() -> impl Strategy<Value = (f64, f64)> {
    (1e-6..1.0f64, 0.0..1.0f64).prop_map(|(u, v)| {
        let r = 1.0 + u;
        (r, v * (2.0 - r).min(1.0 - 1e-9))
    })
}

fn apex() -> impl Strategy<Value = (f64, f64)> {
    (0.02..1.0f64, 0.0..1.0f64).prop_map(|(u, v)| {
        let r = 1.0 + u;
        ShapeParams::new(r, v * (2.0 - r).min(0.98)).unwrap().apex()
    })
}

fn in_equilateral() -> impl Strategy<Value = (f64, f64)> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(u, v)| {
        let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
        (u + 0.5 * v, SQRT_3 / 2.0 * v)
    })
}

proptest! {
    #[test]
    fn summary_scales_with_similarity(t in triangle(), ki in 0usize..3) {
        let k = [0.5, 2.0, 3.7][ki];
        let g = summarize(&t);
        let h = summarize(&t.scaled(k).unwrap());
        let k2 = k * k;
        prop_assert!((h.area - k2 * g.area).abs() <= 1e-12 * k2 * g.area.max(1.0));
        prop_assert!((h.perimeter - k * g.perimeter).abs() <= 1e-12 * k * g.perimeter);
        prop_assert!((h.sumsq - k2 * g.sumsq).abs() <= 1e-12 * k2 * g.sumsq);
        prop_assert!((h.excess - k2 * g.excess).abs() <= 1e-10 * k2 * g.sumsq);
    }

    #[test]
    fn mean_chain_holds(t in triangle()) {
        let g = summarize(&t);
        let (left, right) = check_mean_chain(&t);
        let l2 = g.perimeter * g.perimeter;
        prop_assert!(left >= -1e-12 * l2 && right >= -1e-12 * l2);
        prop_assert!(g.excess >= -1e-12 * l2);
        let [l1, l2s, l3] = g.sides;
        prop_assert!(l1 >= l2s && l2s >= l3 && l3 > 0.0);
        prop_assert!((g.perimeter - (l1 + l2s + l3)).abs() < 1e-12 * g.perimeter);
        let m = means(&g.sides).unwrap();
        prop_assert!((3.0 * m.quadratic.powi(2) - g.sumsq).abs() < 1e-12 * g.sumsq);
        prop_assert!((9.0 * m.arithmetic.powi(2) - g.perimeter.powi(2)).abs() < 1e-12 * g.sumsq);
    }

    #[test]
    fn means_are_ordered(v in prop::collection::vec(0.01..100.0f64, 1..8)) {
        let m = means(&v).unwrap();
        let tol = 1e-12 * m.quadratic;
        prop_assert!(m.harmonic <= m.geometric + tol);
        prop_assert!(m.geometric <= m.arithmetic + tol);
        prop_assert!(m.arithmetic <= m.quadratic + tol);
    }

    #[test]
    fn normalize_is_idempotent(t in triangle()) {
        let (c, scale) = normalize(&t);
        let v = c.vertices();
        prop_assert!(v[2].x >= 0.0 && v[2].y > 0.0);
        prop_assert!((v[2].x + 1.0).powi(2) + v[2].y.powi(2) <= 4.0 + 1e-12);
        prop_assert!((summarize(&c).area * scale * scale - summarize(&t).area).abs() < 1e-10 * summarize(&t).area);
        let (cc, s2) = normalize(&c);
        prop_assert!((s2 - 1.0).abs() < 1e-12);
        prop_assert!((cc.vertices()[2] - v[2]).norm() < 1e-12);
    }

    #[test]
    fn moduli_round_trip((r, s) in moduli()) {
        let sp = ShapeParams::new(r, s).unwrap();
        let (a, b) = sp.apex();
        let back = ShapeParams::from_apex(a, b).unwrap();
        prop_assert!((back.r - r).abs() < 1e-10 && (back.s - s).abs() < 1e-10);
        prop_assert!((sp.q() - (a * a + b * b + 3.0)).abs() < 1e-12);
        prop_assert!((sp.q() - (r * r + s * s + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn excess_lemma_slack((r, s) in moduli()) {
        let c = check_lemma_s2_excess(r, s).unwrap();
        prop_assert!(c.slack >= -1e-12);
        prop_assert!(c.squared_form >= -1e-12);
        prop_assert!(c.identity_residual() < 1e-10);
    }

    #[test]
    fn equilateral_mode_symmetry((x, y) in in_equilateral()) {
        let u1 = EquilateralMode::Antisymmetric;
        let u2 = EquilateralMode::Symmetric;
        prop_assert!((u1.value(1.0 - x, y) + u1.value(x, y)).abs() < 1e-12);
        prop_assert!((u2.value(1.0 - x, y) - u2.value(x, y)).abs() < 1e-12);
    }

    #[test]
    fn affine_map_inverts((a, b) in apex(), (x, y) in in_equilateral()) {
        let m = AffineMap::new(a, b).unwrap();
        let p = Point::new(x, y);
        prop_assert!((m.inverse(m.forward(p)) - p).norm() < 1e-12);
    }

    #[test]
    fn rayleigh_is_homogeneous((a, b) in apex(), g in -3.0..3.0f64, d in -3.0..3.0f64, c in 0.1..10.0f64) {
        prop_assume!(g.abs() + d.abs() > 1e-3);
        let x = transplanted_rayleigh(g, d, a, b).unwrap();
        let y = transplanted_rayleigh(c * g, c * d, a, b).unwrap();
        prop_assert!((x - y).abs() < 1e-12 * x);
        prop_assert_eq!(transplanted_rayleigh(1.0, 0.0, a, b).unwrap(), transplanted_mu1_bound(a, b).value);
    }

    #[test]
    fn ortho_gamma_sign((a, b) in apex()) {
        let g = ortho_gamma(a, b).unwrap();
        prop_assert!(a == 0.0 || g.signum() == a.signum());
        let q = a * a + b * b + 3.0;
        prop_assert!((32.0 * PI * PI + 243.0) * q - 1458.0 > 96.0 * PI * PI - 729.0 - 1e-9);
    }

    #[test]
    fn best_linear_is_minimal((a, b) in apex()) {
        let best = best_linear_mu1_bound(a, b).value;
        for g in [-1.0, 0.0, 1.0] {
            prop_assert!(best <= linear_mu1_bound(a, b, g).value * (1.0 + 1e-12));
        }
    }

    #[test]
    fn bounds_scale_inverse_square(t in triangle(), k in 0.2..5.0f64) {
        let a = all_bounds(&t);
        let b = all_bounds(&t.scaled(k).unwrap());
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(x.name, y.name);
            prop_assert!((y.value * k * k - x.value).abs() < 1e-9 * x.value);
        }
    }

    #[test]
    fn harmonic_cases_cover((a, b) in apex()) {
        let c = harmonic_case(a, b);
        prop_assert!(c.covered, "{:?}", c);
    }

    #[test]
    fn uvw_routes_agree((r, s) in moduli()) {
        let x = uvw_dss_structural(r, s);
        let y = uvw_dss_expanded(r, s);
        prop_assert!((x - y).abs() <= 1e-9 * x.abs().max(y.abs()).max(1.0));
        let u = eval_uvw(r, s);
        prop_assert!(u.combined().is_finite());
    }

    #[test]
    fn dichotomy_covers_region(u in 0.0..1.0f64, v in 0.0..1.0f64) {
        let q = 3.0 + 1e-9 + u * (5.99 - 3.0 - 1e-9);
        let c = region_curves(q);
        let p = c.q_c.max(0.0) + 1e-12 + v * (q - 3.0 - c.q_c.max(0.0) - 1e-12);
        prop_assert!(p < c.q_l || p > c.q_1, "q={q} p={p}");
    }

    #[test]
    fn opt_regions_cover_triangle((r, s) in moduli()) {
        prop_assume!((r - 2.0).abs() + s > 1e-6);
        prop_assert!(OptRegion::ALL.iter().any(|g| g.contains(r, s)));
    }

    #[test]
    fn worst_merge_is_order_independent(m in prop::collection::vec((-1.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 1..20)) {
        let ws: Vec<Worst> = m.iter().map(|&(x, r, s)| Worst { margin: x, at: [r, s] }).collect();
        let fwd = ws.iter().fold(Worst::NONE, |acc, w| acc.min(*w));
        let rev = ws.iter().rev().fold(Worst::NONE, |acc, w| acc.min(*w));
        prop_assert_eq!(fwd, rev);
    }

    #[test]
    fn r2_points_in_unit_square(n in 0u64..1_000_000) {
        let [u, v] = r2_point(n);
        prop_assert!((0.0..1.0).contains(&u) && (0.0..1.0).contains(&v));
    }
}

#[test]
fn crossing_points_ordered() {
    let cp = crossing_points();
    assert!(cp.q_c1 < 5.04 && 5.09 < cp.q_l1);
}
