//! The first Neumann modes of the equilateral triangle
//! `E = (0,0), (1,0), (1/2, √3/2)` and the integrals of their products.
//!
//! `u₀ ≡ 1` with `μ₀ = 0`, and the double eigenvalue `μ₁ = μ₂ = 16π²/9` with
//!
//! ```text
//! u₁(x,y) = 2 [cos(π(2x−1)/3) + cos(2πy/√3)] sin(π(2x−1)/3)
//! u₂(x,y) = cos(2π(2x−1)/3) − 2 cos(π(2x−1)/3) cos(2πy/√3)
//! ```
//!
//! `u₁` is odd and `u₂` even under the reflection `x ↦ 1 − x`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::{EQUILATERAL_MU, SQRT_3};
use crate::error::{Error, Result};
use crate::geometry::{Point, Triangle};
use crate::quadrature::TriangleRule;

const THETA_X: f64 = 2.0 * PI / 3.0;
const PHI_Y: f64 = 2.0 * PI / SQRT_3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquilateralMode {
    Constant,
    /// `u₁`, antisymmetric about `x = 1/2`.
    Antisymmetric,
    /// `u₂`, symmetric about `x = 1/2`.
    Symmetric,
}

impl EquilateralMode {
    pub fn from_index(index: usize) -> Result<Self> {
        match index {
            0 => Ok(Self::Constant),
            1 => Ok(Self::Antisymmetric),
            2 => Ok(Self::Symmetric),
            _ => Err(Error::domain(format!("equilateral mode index {index} not in {{0, 1, 2}}"))),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Self::Constant => 0,
            Self::Antisymmetric => 1,
            Self::Symmetric => 2,
        }
    }

    /// Eigenvalue on the unit-side triangle.
    pub fn eigenvalue(self) -> f64 {
        match self {
            Self::Constant => 0.0,
            _ => EQUILATERAL_MU,
        }
    }

    pub fn value(self, x: f64, y: f64) -> f64 {
        let (t, p) = angles(x, y);
        match self {
            Self::Constant => 1.0,
            Self::Antisymmetric => 2.0 * (t.cos() + p.cos()) * t.sin(),
            Self::Symmetric => (2.0 * t).cos() - 2.0 * t.cos() * p.cos(),
        }
    }

    /// `(∂u/∂x, ∂u/∂y)`.
    pub fn gradient(self, x: f64, y: f64) -> (f64, f64) {
        let (t, p) = angles(x, y);
        match self {
            Self::Constant => (0.0, 0.0),
            Self::Antisymmetric => (
                THETA_X * (2.0 * (2.0 * t).cos() + 2.0 * p.cos() * t.cos()),
                -2.0 * PHI_Y * p.sin() * t.sin(),
            ),
            Self::Symmetric => (
                THETA_X * (-2.0 * (2.0 * t).sin() + 2.0 * t.sin() * p.cos()),
                2.0 * PHI_Y * t.cos() * p.sin(),
            ),
        }
    }

    /// `(u_xx, u_xy, u_yy)`.
    pub fn hessian(self, x: f64, y: f64) -> (f64, f64, f64) {
        let (t, p) = angles(x, y);
        let tx2 = THETA_X * THETA_X;
        let py2 = PHI_Y * PHI_Y;
        match self {
            Self::Constant => (0.0, 0.0, 0.0),
            Self::Antisymmetric => (
                tx2 * (-4.0 * (2.0 * t).sin() - 2.0 * p.cos() * t.sin()),
                -2.0 * THETA_X * PHI_Y * p.sin() * t.cos(),
                -2.0 * py2 * p.cos() * t.sin(),
            ),
            Self::Symmetric => (
                tx2 * (-4.0 * (2.0 * t).cos() + 2.0 * t.cos() * p.cos()),
                -2.0 * THETA_X * PHI_Y * t.sin() * p.sin(),
                2.0 * py2 * t.cos() * p.cos(),
            ),
        }
    }
}

fn angles(x: f64, y: f64) -> (f64, f64) {
    (PI / 3.0 * (2.0 * x - 1.0), PHI_Y * y)
}

pub fn eval_mode(index: usize, x: f64, y: f64) -> Result<f64> {
    Ok(EquilateralMode::from_index(index)?.value(x, y))
}

pub fn eval_grad(index: usize, x: f64, y: f64) -> Result<(f64, f64)> {
    Ok(EquilateralMode::from_index(index)?.gradient(x, y))
}

/// Exact values of the integrals over `E`.
pub mod exact {
    use super::*;

    pub fn mode_sq() -> f64 {
        3.0 * SQRT_3 / 8.0
    }
    /// `∫ (∂ₓu₁)² = ∫ (∂ᵧu₂)²`
    pub fn grad_major() -> f64 {
        (32.0 * PI * PI + 243.0) / (32.0 * SQRT_3)
    }
    /// `∫ (∂ᵧu₁)² = ∫ (∂ₓu₂)²`
    pub fn grad_minor() -> f64 {
        (32.0 * PI * PI - 243.0) / (32.0 * SQRT_3)
    }
    /// `∫ ∂ₓu₁ ∂ᵧu₂`
    pub fn cross_xy() -> f64 {
        81.0 * SQRT_3 / 32.0 + PI
    }
    /// `∫ ∂ᵧu₁ ∂ₓu₂`
    pub fn cross_yx() -> f64 {
        81.0 * SQRT_3 / 32.0 - PI
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralRow {
    pub name: &'static str,
    pub computed: f64,
    pub exact: f64,
    pub error: f64,
    /// `"relative"` for nonzero exact values, `"absolute"` for zeros.
    pub kind: &'static str,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralReport {
    pub quadrature_order: usize,
    pub rows: Vec<IntegralRow>,
}

impl IntegralReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }
}

pub const DEFAULT_QUADRATURE_ORDER: usize = 24;
pub const TABLE_REL_TOL: f64 = 1e-8;
pub const TABLE_ABS_TOL: f64 = 1e-10;

/// Integrates every product in the table with an `order × order`
/// collapsed Gauss–Legendre rule on `E`.
pub fn verify_integral_table(quadrature_order: usize) -> IntegralReport {
    verify_integral_table_with(quadrature_order, TABLE_REL_TOL, TABLE_ABS_TOL)
}

pub fn verify_integral_table_with(
    quadrature_order: usize,
    rel_tol: f64,
    abs_tol: f64,
) -> IntegralReport {
    use EquilateralMode::{Antisymmetric as U1, Symmetric as U2};

    let rule = TriangleRule::collapsed(&Triangle::unit_equilateral(), quadrature_order);
    // accumulate all thirteen products in one pass over the nodes
    let mut sums = [0.0f64; 13];
    for (p, w) in rule.points.iter().zip(&rule.weights) {
        let (x, y) = (p.x, p.y);
        let (u1, u2) = (U1.value(x, y), U2.value(x, y));
        let (u1x, u1y) = U1.gradient(x, y);
        let (u2x, u2y) = U2.gradient(x, y);
        let terms = [
            u1 * u1,
            u2 * u2,
            u1x * u1x,
            u2y * u2y,
            u1y * u1y,
            u2x * u2x,
            u1x * u1y,
            u2x * u2y,
            u1 * u2,
            u1x * u2x,
            u1y * u2y,
            u1x * u2y,
            u1y * u2x,
        ];
        for (s, t) in sums.iter_mut().zip(terms) {
            *s += w * t;
        }
    }
    let names_exact: [(&str, f64); 13] = [
        ("u1^2", exact::mode_sq()),
        ("u2^2", exact::mode_sq()),
        ("(d_x u1)^2", exact::grad_major()),
        ("(d_y u2)^2", exact::grad_major()),
        ("(d_y u1)^2", exact::grad_minor()),
        ("(d_x u2)^2", exact::grad_minor()),
        ("d_x u1 d_y u1", 0.0),
        ("d_x u2 d_y u2", 0.0),
        ("u1 u2", 0.0),
        ("d_x u1 d_x u2", 0.0),
        ("d_y u1 d_y u2", 0.0),
        ("d_x u1 d_y u2", exact::cross_xy()),
        ("d_y u1 d_x u2", exact::cross_yx()),
    ];
    let rows = names_exact
        .iter()
        .zip(sums)
        .map(|(&(name, exact), computed)| {
            let (kind, error, tolerance) = if exact == 0.0 {
                ("absolute", computed.abs(), abs_tol)
            } else {
                ("relative", ((computed - exact) / exact).abs(), rel_tol)
            };
            IntegralRow { name, computed, exact, error, kind, tolerance, pass: error <= tolerance }
        })
        .collect();
    IntegralReport { quadrature_order, rows }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeResidual {
    /// `max |Δu + μu|` over the interior samples.
    pub laplacian: f64,
    /// `max |∂u/∂n|` over the boundary samples.
    pub normal_derivative: f64,
}

/// Outward unit normals of the three edges of `E`, with a point map
/// `t ∈ [0,1] ↦` edge point.
fn edges() -> [((f64, f64), (f64, f64), (f64, f64)); 3] {
    let h = SQRT_3 / 2.0;
    [
        ((0.0, 0.0), (1.0, 0.0), (0.0, -1.0)),
        ((1.0, 0.0), (0.5, h), (h, 0.5)),
        ((0.5, h), (0.0, 0.0), (-h, 0.5)),
    ]
}

/// Residuals of `−Δu = μu` at `interior` points and of `∂u/∂n = 0` at
/// `per_edge` equally spaced points on each edge (midpoints included when
/// `per_edge` is odd).
pub fn pde_residual(index: usize, interior: &[Point], per_edge: usize) -> Result<PdeResidual> {
    let mode = EquilateralMode::from_index(index)?;
    let mu = mode.eigenvalue();
    let laplacian = interior
        .iter()
        .map(|p| {
            let (uxx, _, uyy) = mode.hessian(p.x, p.y);
            (uxx + uyy + mu * mode.value(p.x, p.y)).abs()
        })
        .fold(0.0, f64::max);
    let mut normal_derivative: f64 = 0.0;
    for (start, end, n) in edges() {
        for i in 0..per_edge {
            let t = (i as f64 + 0.5) / per_edge as f64;
            let x = start.0 + t * (end.0 - start.0);
            let y = start.1 + t * (end.1 - start.1);
            let (ux, uy) = mode.gradient(x, y);
            normal_derivative = normal_derivative.max((ux * n.0 + uy * n.1).abs());
        }
    }
    Ok(PdeResidual { laplacian, normal_derivative })
}
