//! Gauss–Legendre rules and their collapsed-square (Duffy) tensorization on
//! triangles.

use crate::geometry::{Point, Triangle};

/// `n`-point Gauss–Legendre rule on `[0, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = ((4 * i + 3) as f64 * std::f64::consts::PI / (4 * n + 2) as f64).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((0.5 * (1.0 - x), 0.5 * w));
    }
    rule.sort_by(|a, b| a.0.total_cmp(&b.0));
    rule
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature points and weights on a triangle.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Collapsed-square rule with `n × n` Gauss–Legendre nodes; exact for
    /// polynomials of total degree `2n − 2`.
    pub fn collapsed(t: &Triangle, n: usize) -> Self {
        let gl = gauss_legendre(n);
        let [p0, p1, p2] = *t.vertices();
        let e1 = p1 - p0;
        let e2 = p2 - p0;
        let jac = e1.perp(&e2).abs();
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for &(u, wu) in &gl {
            for &(v, wv) in &gl {
                // (u, v) in the unit square ↦ (ξ, η) = (u, v(1−u)) in the reference triangle
                let xi = u;
                let eta = v * (1.0 - u);
                points.push(p0 + e1 * xi + e2 * eta);
                weights.push(wu * wv * (1.0 - u) * jac);
            }
        }
        TriangleRule { points, weights }
    }

    pub fn integrate<F: FnMut(Point) -> f64>(&self, mut f: F) -> f64 {
        self.points.iter().zip(&self.weights).map(|(p, w)| w * f(*p)).sum()
    }
}
