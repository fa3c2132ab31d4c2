#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trispec::geometry::Point;
use trispec::quadrature::TriangleRule;
use trispec::{ShapeParams, Triangle};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Canonical apex `(a, b)` of a random admissible shape, kept away from `r = 1`.
pub fn random_apex(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let r: f64 = rng.random_range(1.08..2.0);
    let s = rng.random_range(0.0..(2.0 - r).min(0.92));
    ShapeParams::new(r, s).unwrap().apex()
}

/// A random non-degenerate triangle in general position.
pub fn random_triangle(rng: &mut ChaCha8Rng) -> Triangle {
    loop {
        let mut p = || (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let coords = [p(), p(), p()];
        if let Ok(t) = Triangle::from_coords(coords) {
            let g = t.summary();
            if g.area > 0.05 * g.diameter * g.diameter {
                return t;
            }
        }
    }
}

pub fn canonical_triangle(a: f64, b: f64) -> Triangle {
    Triangle::canonical(a, b).unwrap()
}

/// High-order rule on the canonical triangle, used as an independent
/// integration route in oracle tests.
pub fn rule(a: f64, b: f64) -> TriangleRule {
    TriangleRule::collapsed(&canonical_triangle(a, b), 40)
}

pub fn integrate<F: FnMut(Point) -> f64>(a: f64, b: f64, f: F) -> f64 {
    rule(a, b).integrate(f)
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}
