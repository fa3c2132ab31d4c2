//! Closed-form upper bounds for `μ₁`, `H(μ₁, μ₂)` and `M(μ₁, μ₂)` of the
//! canonical triangle `(−1,0), (1,0), (a,b)`, from polynomial and transplanted
//! trial functions, plus Cheng's diameter bound.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{J01, MU1_A, SQRT_3};
use crate::geometry::{canonical_form, Triangle};
use crate::transplant::{major_coeff, minor_coeff, ortho_gamma, transplanted_rayleigh};

const PI2: f64 = PI * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    Mu1,
    HarmonicMean,
    ArithmeticMean,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub name: &'static str,
    /// Upper bound on the eigenvalue functional named by `kind`.
    pub value: f64,
    pub kind: FunctionalKind,
    /// False when the preconditions (`b > 0`, finite inputs) failed.
    pub valid: bool,
}

impl BoundValue {
    fn new(name: &'static str, kind: FunctionalKind, b: f64, value: f64) -> Self {
        let valid = b > 0.0 && b.is_finite() && value.is_finite() && value > 0.0;
        BoundValue { name, value, kind, valid }
    }

    fn scaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self
    }
}

fn q_of(a: f64, b: f64) -> f64 {
    a * a + b * b + 3.0
}

fn harmonic2(x: f64, y: f64) -> f64 {
    2.0 * x * y / (x + y)
}

/// `R[f + γg] = 18(1+γ²) / (3 + (a+γb)²)` with `f = x − a/3`, `g = y − b/3`.
pub fn linear_rayleigh(a: f64, b: f64, gamma: f64) -> f64 {
    18.0 * (1.0 + gamma * gamma) / (3.0 + (a + gamma * b).powi(2))
}

pub fn linear_mu1_bound(a: f64, b: f64, gamma: f64) -> BoundValue {
    BoundValue::new("linear", FunctionalKind::Mu1, b, linear_rayleigh(a, b, gamma))
}

/// Minimizer of [`linear_rayleigh`] over `γ ∈ ℝ ∪ {∞}`; `None` stands for
/// `γ → ±∞`, i.e. the trial function `g` alone with quotient `18/b²`.
pub fn best_linear_gamma(a: f64, b: f64) -> Option<f64> {
    // stationary points solve ab γ² + (3 + a² − b²) γ − ab = 0
    let qa = a * b;
    let qb = 3.0 + a * a - b * b;
    let mut candidates: Vec<f64> = Vec::with_capacity(3);
    if qa.abs() > 1e-300 {
        let disc = (qb * qb + 4.0 * qa * qa).sqrt();
        // cancellation-free pair of roots
        let t = -0.5 * (qb + qb.signum() * disc);
        if t != 0.0 {
            candidates.push(t / qa);
            candidates.push(-qa / t);
        } else {
            candidates.push(1.0);
            candidates.push(-1.0);
        }
    } else {
        candidates.push(0.0);
    }
    let limit = 18.0 / (b * b);
    let mut best: Option<(f64, f64)> = None;
    for g in candidates {
        let v = linear_rayleigh(a, b, g);
        if best.is_none_or(|(_, bv)| v < bv) {
            best = Some((g, v));
        }
    }
    match best {
        Some((g, v)) if v <= limit => Some(g),
        _ => None,
    }
}

pub fn best_linear_mu1_bound(a: f64, b: f64) -> BoundValue {
    let value = match best_linear_gamma(a, b) {
        Some(g) => linear_rayleigh(a, b, g),
        None => 18.0 / (b * b),
    };
    BoundValue::new("best_linear", FunctionalKind::Mu1, b, value)
}

/// `R[v₁] = ((32π²+243)q − 1458) / (144b²)`.
pub fn transplanted_mu1_bound(a: f64, b: f64) -> BoundValue {
    let q = q_of(a, b);
    let value = (major_coeff() * q - 1458.0) / (144.0 * b * b);
    BoundValue::new("transplant_v1", FunctionalKind::Mu1, b, value)
}

/// `R[v₂] = ((32π²−243)q + 1458) / (144b²)`.
pub fn transplanted_v2_bound(a: f64, b: f64) -> BoundValue {
    let q = q_of(a, b);
    let value = (minor_coeff() * q + 1458.0) / (144.0 * b * b);
    BoundValue::new("transplant_v2", FunctionalKind::Mu1, b, value)
}

/// `R[v₁ + v₂/3]`.
pub fn transplanted_mixed_bound(a: f64, b: f64) -> BoundValue {
    let value = if b > 0.0 { transplanted_rayleigh(1.0, 1.0 / 3.0, a, b).unwrap_or(f64::NAN) } else { f64::NAN };
    BoundValue::new("transplant_mixed", FunctionalKind::Mu1, b, value)
}

/// Smallest Rayleigh quotient over `span{v₁, v₂}`. Since `v₁ ⊥ v₂` with equal
/// norms, this is the smaller eigenvalue of the 2×2 stiffness matrix.
pub fn transplanted_span_bound(a: f64, b: f64) -> BoundValue {
    let q = q_of(a, b);
    let k11 = major_coeff() * q - 1458.0;
    let k22 = minor_coeff() * q + 1458.0;
    let k12 = -486.0 * SQRT_3 * a;
    let mean = 0.5 * (k11 + k22);
    let half = (0.25 * (k11 - k22).powi(2) + k12 * k12).sqrt();
    let value = (mean - half) / (144.0 * b * b);
    BoundValue::new("transplant_span", FunctionalKind::Mu1, b, value)
}

/// `R[f₂] = 360 / (7(3+a²))` with `f₂ = (x − a/3)² − (3+a²)/18`.
pub fn quadratic_poly_bound(a: f64, b: f64) -> BoundValue {
    BoundValue::new("poly_f2", FunctionalKind::Mu1, b, 360.0 / (7.0 * (3.0 + a * a)))
}

/// Cheng's bound `μ₁ < 4 j₀,₁² / D²`.
pub fn cheng_mu1_bound(diameter: f64) -> BoundValue {
    BoundValue::new("cheng", FunctionalKind::Mu1, diameter, 4.0 * J01 * J01 / (diameter * diameter))
}

/// `H(R[f₁], R[f₂]) = 80 / (3(3+a²))`; multiply by `A = b` for the functional.
pub fn harmonic_poly_bound(a: f64, b: f64) -> BoundValue {
    BoundValue::new("harmonic_poly", FunctionalKind::HarmonicMean, b, 80.0 / (3.0 * (3.0 + a * a)))
}

/// `H(R[v₁], R[γv₁ + v₂]) · A = ((1024π⁴ − 243²)q² + 12·243² b²) / (4608π² b q)`
/// with the gradient-orthogonalizing `γ`.
pub fn harmonic_transplant_functional(a: f64, b: f64) -> f64 {
    let q = q_of(a, b);
    ((1024.0 * PI2 * PI2 - 243.0 * 243.0) * q * q + 12.0 * 243.0 * 243.0 * b * b)
        / (4608.0 * PI2 * b * q)
}

/// Bound on `H(μ₁, μ₂)` itself, [`harmonic_transplant_functional`] divided by `A = b`.
pub fn harmonic_transplant_bound(a: f64, b: f64) -> BoundValue {
    BoundValue::new(
        "harmonic_transplant",
        FunctionalKind::HarmonicMean,
        b,
        harmonic_transplant_functional(a, b) / b,
    )
}

/// The same bound evaluated from its two Rayleigh quotients rather than the
/// simplified closed form.
pub fn harmonic_transplant_from_quotients(a: f64, b: f64) -> Option<f64> {
    let g = ortho_gamma(a, b).ok()?;
    let r1 = transplanted_rayleigh(1.0, 0.0, a, b).ok()?;
    let r2 = transplanted_rayleigh(g, 1.0, a, b).ok()?;
    Some(harmonic2(r1, r2))
}

/// `M(R[v₁], R[v₂]) = 2π²q / (9b²)`.
pub fn arithmetic_transplant_bound(a: f64, b: f64) -> BoundValue {
    BoundValue::new(
        "arithmetic_transplant",
        FunctionalKind::ArithmeticMean,
        b,
        2.0 * PI2 * q_of(a, b) / (9.0 * b * b),
    )
}

/// Every bound for `t`, rescaled from the canonical triangle to `t`'s own size.
pub fn all_bounds(t: &Triangle) -> Vec<BoundValue> {
    let c = canonical_form(t);
    let (a, b) = (c.a, c.b);
    let k = 1.0 / (c.scale * c.scale);
    let mut out = canonical_bounds(a, b);
    for bv in out.iter_mut() {
        *bv = bv.clone().scaled(k);
    }
    out
}

/// Every bound for the canonical triangle with apex `(a, b)`.
pub fn canonical_bounds(a: f64, b: f64) -> Vec<BoundValue> {
    vec![
        linear_mu1_bound(a, b, 0.0),
        best_linear_mu1_bound(a, b),
        quadratic_poly_bound(a, b),
        transplanted_mu1_bound(a, b),
        transplanted_v2_bound(a, b),
        transplanted_mixed_bound(a, b),
        transplanted_span_bound(a, b),
        cheng_mu1_bound(2.0),
        harmonic_poly_bound(a, b),
        harmonic_transplant_bound(a, b),
        arithmetic_transplant_bound(a, b),
    ]
}

/// Smallest valid bound of the given kind.
pub fn min_bound(bounds: &[BoundValue], kind: FunctionalKind) -> Option<&BoundValue> {
    bounds
        .iter()
        .filter(|b| b.valid && b.kind == kind)
        .min_by(|x, y| x.value.total_cmp(&y.value))
}

/// Upper end `2√3·243² / (1024π⁴ − 243²) ≈ 5.026` of the `q/b` window in which
/// the transplanted harmonic bound is below `4π²/(3√3)`.
pub fn harmonic_transplant_threshold() -> f64 {
    2.0 * SQRT_3 * 243.0 * 243.0 / (1024.0 * PI2 * PI2 - 243.0 * 243.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicCase {
    /// `q/b = 2√3`.
    Equilateral,
    /// `2√3 < q/b < 5`.
    Transplant,
    /// `q/b ≥ 5`, which forces `b < 1`.
    Polynomial,
}

/// The three-way split behind `H(μ₁, μ₂) A ≤ 4π²/(3√3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicCaseReport {
    pub q_over_b: f64,
    pub case: HarmonicCase,
    /// Transplanted functional below the sharp constant.
    pub transplant_strict: bool,
    /// `b + 20√3/π² < q/b`, equivalently the polynomial functional below it.
    pub poly_strict: bool,
    /// The inequality required by `case` holds.
    pub covered: bool,
}

pub fn harmonic_case(a: f64, b: f64) -> HarmonicCaseReport {
    let qb = q_of(a, b) / b;
    let equilateral = (qb - 2.0 * SQRT_3).abs() <= 1e-12;
    let transplant_strict = qb > 2.0 * SQRT_3 && qb < harmonic_transplant_threshold()
        && harmonic_transplant_functional(a, b) < MU1_A;
    let poly_strict = b + 20.0 * SQRT_3 / PI2 < qb && harmonic_poly_bound(a, b).value * b < MU1_A;
    let case = if equilateral {
        HarmonicCase::Equilateral
    } else if qb < 5.0 {
        HarmonicCase::Transplant
    } else {
        HarmonicCase::Polynomial
    };
    let covered = match case {
        HarmonicCase::Equilateral => true,
        HarmonicCase::Transplant => transplant_strict,
        HarmonicCase::Polynomial => b < 1.0 && poly_strict,
    };
    HarmonicCaseReport { q_over_b: qb, case, transplant_strict, poly_strict, covered }
}
