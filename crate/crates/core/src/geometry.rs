//! Triangles, their canonical position, the `(r, s)` moduli coordinates and
//! the elementary geometric functionals (area, perimeter, sum of squared
//! sides, diameter, triangular isoperimetric excess).

use nalgebra::{Point2, Vector2};
use serde::{Deserialize, Serialize};

use crate::constants::SQRT_3;
use crate::error::{Error, Result};

pub type Point = Point2<f64>;

/// Triangles with `area < DEGENERACY_RATIO * L²` are rejected.
pub const DEGENERACY_RATIO: f64 = 1e-14;

/// Relative side-length spread below which a triangle counts as equilateral.
pub const EQUILATERAL_TOL: f64 = 1e-9;

const REGION_SLACK: f64 = 1e-12;

/// A non-degenerate planar triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    vertices: [Point; 3],
}

impl Triangle {
    pub fn new(v1: Point, v2: Point, v3: Point) -> Result<Self> {
        if [v1, v2, v3].iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
            return Err(Error::NonFinite);
        }
        let t = Triangle { vertices: [v1, v2, v3] };
        let area = t.signed_area().abs();
        let perimeter = t.perimeter();
        let threshold = DEGENERACY_RATIO * perimeter * perimeter;
        if !(area > threshold) {
            return Err(Error::DegenerateTriangle { area, threshold });
        }
        Ok(t)
    }

    pub fn from_coords(coords: [(f64, f64); 3]) -> Result<Self> {
        let [a, b, c] = coords.map(|(x, y)| Point::new(x, y));
        Self::new(a, b, c)
    }

    /// Unit-side equilateral triangle `(0,0), (1,0), (1/2, √3/2)`.
    pub fn unit_equilateral() -> Self {
        Triangle {
            vertices: [
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(0.5, SQRT_3 / 2.0),
            ],
        }
    }

    /// Canonical triangle `(-1,0), (1,0), (a,b)`.
    pub fn canonical(a: f64, b: f64) -> Result<Self> {
        Self::new(Point::new(-1.0, 0.0), Point::new(1.0, 0.0), Point::new(a, b))
    }

    pub fn vertices(&self) -> &[Point; 3] {
        &self.vertices
    }

    /// Signed area, positive for counter-clockwise vertex order.
    pub fn signed_area(&self) -> f64 {
        let [p, q, r] = self.vertices;
        0.5 * ((q - p).perp(&(r - p)))
    }

    /// The same triangle with vertices in counter-clockwise order.
    pub fn counter_clockwise(&self) -> Triangle {
        if self.signed_area() >= 0.0 {
            *self
        } else {
            let [p, q, r] = self.vertices;
            Triangle { vertices: [p, r, q] }
        }
    }

    pub fn scaled(&self, k: f64) -> Result<Triangle> {
        let [p, q, r] = self.vertices;
        Triangle::new(
            Point::from(p.coords * k),
            Point::from(q.coords * k),
            Point::from(r.coords * k),
        )
    }

    /// Side lengths sorted so that `l₁ ≥ l₂ ≥ l₃`.
    pub fn sorted_sides(&self) -> [f64; 3] {
        let [p, q, r] = self.vertices;
        let mut sides = [(q - p).norm(), (r - q).norm(), (p - r).norm()];
        sides.sort_by(|x, y| y.total_cmp(x));
        sides
    }

    pub fn perimeter(&self) -> f64 {
        self.sorted_sides().iter().sum()
    }

    pub fn summary(&self) -> GeometricSummary {
        summarize(self)
    }

    /// True when the relative spread of the side lengths is below [`EQUILATERAL_TOL`].
    pub fn is_equilateral(&self) -> bool {
        let [l1, _, l3] = self.sorted_sides();
        (l1 - l3) / l1 < EQUILATERAL_TOL
    }

    pub fn canonical_form(&self) -> CanonicalForm {
        canonical_form(self)
    }
}

/// Geometric functionals of one triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricSummary {
    pub area: f64,
    pub perimeter: f64,
    pub sumsq: f64,
    pub diameter: f64,
    pub excess: f64,
    pub sides: [f64; 3],
}

/// Area by Heron's formula (in its cancellation-free ordering), perimeter,
/// `S²`, diameter and the triangular excess `E_T = L²/(12√3) − A`.
pub fn summarize(t: &Triangle) -> GeometricSummary {
    let sides = t.sorted_sides();
    let [a, b, c] = sides;
    let area = 0.25 * ((a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))).sqrt();
    let perimeter = a + b + c;
    let sumsq = a * a + b * b + c * c;
    let excess = perimeter * perimeter / (12.0 * SQRT_3) - area;
    GeometricSummary { area, perimeter, sumsq, diameter: a, excess, sides }
}

/// Apex `(a, b)` of the similar triangle `(-1,0), (1,0), (a,b)` with the
/// longest side on the base, `a ≥ 0`, `b > 0`, together with the similarity
/// ratio `scale` (original = scale · canonical).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalForm {
    pub a: f64,
    pub b: f64,
    pub scale: f64,
}

impl CanonicalForm {
    pub fn triangle(&self) -> Triangle {
        Triangle {
            vertices: [Point::new(-1.0, 0.0), Point::new(1.0, 0.0), Point::new(self.a, self.b)],
        }
    }

    pub fn q(&self) -> f64 {
        self.a * self.a + self.b * self.b + 3.0
    }
}

pub fn canonical_form(t: &Triangle) -> CanonicalForm {
    let v = t.vertices;
    let longest = t.sorted_sides()[0];
    let mut best: Option<CanonicalForm> = None;
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let base: Vector2<f64> = v[j] - v[i];
        let len = base.norm();
        if len < longest * (1.0 - 1e-12) {
            continue;
        }
        let u = base / len;
        let w = v[k] - v[i];
        let along = w.dot(&u);
        let perp = u.perp(&w).abs();
        let a = (-1.0 + 2.0 * along / len).abs();
        let b = 2.0 * perp / len;
        let cand = CanonicalForm { a, b, scale: len / 2.0 };
        if best.is_none_or(|bst| cand.a > bst.a) {
            best = Some(cand);
        }
    }
    best.expect("longest side is always a candidate")
}

/// Similar triangle in canonical position and the similarity ratio.
/// Eigenvalues transform as `μ(t) = μ(canonical) / scale²`.
pub fn normalize(t: &Triangle) -> (Triangle, f64) {
    let c = canonical_form(t);
    (c.triangle(), c.scale)
}

/// Moduli coordinates `r = (l₂+l₃)/2`, `s = (l₂−l₃)/2` of a canonical triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeParams {
    pub r: f64,
    pub s: f64,
}

impl ShapeParams {
    /// Checks `1 < r ≤ 2`, `0 ≤ s < 1`, `r + s ≤ 2`.
    pub fn new(r: f64, s: f64) -> Result<Self> {
        let inside = r > 1.0
            && r <= 2.0 + REGION_SLACK
            && s >= -REGION_SLACK
            && s < 1.0
            && r + s <= 2.0 + REGION_SLACK;
        if !inside || !r.is_finite() || !s.is_finite() {
            return Err(Error::OutsideShapeRegion { r, s });
        }
        Ok(ShapeParams { r: r.min(2.0), s: s.max(0.0) })
    }

    pub fn equilateral() -> Self {
        ShapeParams { r: 2.0, s: 0.0 }
    }

    /// From the canonical apex; requires `b > 0` and `(a+1)² + b² ≤ 4`.
    pub fn from_apex(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !a.is_finite() {
            return Err(Error::domain(format!("apex ({a}, {b}) needs b > 0")));
        }
        let l2 = ((a.abs() + 1.0).powi(2) + b * b).sqrt();
        let l3 = ((a.abs() - 1.0).powi(2) + b * b).sqrt();
        if l2 > 2.0 + 1e-12 {
            return Err(Error::domain(format!("apex ({a}, {b}) makes the base non-longest")));
        }
        ShapeParams::new((l2 + l3) / 2.0, (l2 - l3) / 2.0)
    }

    pub fn from_triangle(t: &Triangle) -> Result<Self> {
        let c = canonical_form(t);
        Self::from_apex(c.a, c.b)
    }

    /// `(a, b) = (rs, √((r²−1)(1−s²)))`.
    pub fn apex(&self) -> (f64, f64) {
        (self.a(), self.b())
    }

    pub fn a(&self) -> f64 {
        self.r * self.s
    }

    pub fn b(&self) -> f64 {
        ((self.r * self.r - 1.0) * (1.0 - self.s * self.s)).sqrt()
    }

    /// `p = b²`.
    pub fn p(&self) -> f64 {
        (self.r * self.r - 1.0) * (1.0 - self.s * self.s)
    }

    /// `q = a² + b² + 3 = r² + s² + 2`.
    pub fn q(&self) -> f64 {
        self.r * self.r + self.s * self.s + 2.0
    }

    pub fn triangle(&self) -> Result<Triangle> {
        let (a, b) = self.apex();
        Triangle::canonical(a, b)
    }

    pub fn is_equilateral(&self) -> bool {
        (self.r - 2.0).abs() < EQUILATERAL_TOL && self.s.abs() < EQUILATERAL_TOL
    }
}

pub fn arithmetic_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn geometric_mean(values: &[f64]) -> f64 {
    values.iter().product::<f64>().powf(1.0 / values.len() as f64)
}

pub fn quadratic_mean(values: &[f64]) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() / values.len() as f64).sqrt()
}

pub fn harmonic_mean(values: &[f64]) -> Result<f64> {
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::domain("harmonic mean needs strictly positive values"));
    }
    Ok(values.len() as f64 / values.iter().map(|v| 1.0 / v).sum::<f64>())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Means {
    pub arithmetic: f64,
    pub harmonic: f64,
    pub geometric: f64,
    pub quadratic: f64,
}

/// All four means; `H ≤ G ≤ M ≤ Q`.
pub fn means(values: &[f64]) -> Result<Means> {
    if values.is_empty() {
        return Err(Error::domain("means of an empty list"));
    }
    if values.iter().any(|&v| v < 0.0 || !v.is_finite()) {
        return Err(Error::domain("means need finite nonnegative values"));
    }
    Ok(Means {
        arithmetic: arithmetic_mean(values),
        harmonic: harmonic_mean(values)?,
        geometric: geometric_mean(values),
        quadratic: quadratic_mean(values),
    })
}

/// Slacks `(L² − 12√3 A, 3S² − L²)` of the chain `12√3 A ≤ L² ≤ 3S²`.
pub fn check_mean_chain(t: &Triangle) -> (f64, f64) {
    let g = summarize(t);
    let l2 = g.perimeter * g.perimeter;
    (l2 - 12.0 * SQRT_3 * g.area, 3.0 * g.sumsq - l2)
}

/// Both routes to `S² ≤ (12/√3)(A + (3/2) E_T)` in moduli coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcessLemmaCheck {
    /// `2r − (1+s²) − √(3(r²−1)(1−s²))`
    pub slack: f64,
    /// `(1+3s²)(r − 2(1+s²)/(1+3s²))² + 3s²(1−s²)²/(1+3s²)`
    pub squared_form: f64,
    /// `(2r − (1+s²))² − 3(r²−1)(1−s²)`
    pub square_difference: f64,
}

impl ExcessLemmaCheck {
    pub fn identity_residual(&self) -> f64 {
        (self.squared_form - self.square_difference).abs()
    }
}

pub fn check_lemma_s2_excess(r: f64, s: f64) -> Result<ExcessLemmaCheck> {
    let sp = ShapeParams::new(r, s)?;
    let (r, s) = (sp.r, sp.s);
    let s2 = s * s;
    let lhs = 2.0 * r - (1.0 + s2);
    let slack = lhs - (3.0 * (r * r - 1.0) * (1.0 - s2)).sqrt();
    let w = 1.0 + 3.0 * s2;
    let squared_form =
        w * (r - 2.0 * (1.0 + s2) / w).powi(2) + 3.0 * s2 * (1.0 - s2).powi(2) / w;
    let square_difference = lhs * lhs - 3.0 * (r * r - 1.0) * (1.0 - s2);
    Ok(ExcessLemmaCheck { slack, squared_form, square_difference })
}
