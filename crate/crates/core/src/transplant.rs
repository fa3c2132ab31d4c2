//! Affine transplantation of the equilateral modes onto the canonical
//! triangle `T = (−1,0), (1,0), (a,b)` and the closed-form Rayleigh quotients
//! of the transplanted functions.

use std::f64::consts::PI;

use serde::Serialize;

use crate::constants::SQRT_3;
use crate::equilateral::EquilateralMode;
use crate::error::{Error, Result};
use crate::geometry::Point;

const PI2: f64 = PI * PI;

/// `(32π² + 243)`, the coefficient of `q` in `R[v₁]`.
pub fn major_coeff() -> f64 {
    32.0 * PI2 + 243.0
}

/// `(32π² − 243)`, the coefficient of `q` in `R[v₂]`.
pub fn minor_coeff() -> f64 {
    32.0 * PI2 - 243.0
}

fn check_b(b: f64) -> Result<()> {
    if b > 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("apex height b = {b} must be positive")))
    }
}

/// The affine map `τ` taking `E` onto the canonical triangle with apex `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineMap {
    pub a: f64,
    pub b: f64,
}

impl AffineMap {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        check_b(b)?;
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(AffineMap { a, b })
    }

    /// `τ(ξ, η)`.
    pub fn forward(&self, p: Point) -> Point {
        let y = 2.0 * self.b * p.y / SQRT_3;
        Point::new(2.0 * p.x - 1.0 + self.a * y / self.b, y)
    }

    /// `τ⁻¹(x, y) = ((1 + x − ay/b)/2, √3 y/(2b))`.
    pub fn inverse(&self, p: Point) -> Point {
        Point::new(
            (1.0 + p.x - self.a * p.y / self.b) / 2.0,
            SQRT_3 * p.y / (2.0 * self.b),
        )
    }

    /// Ratio `|T| / |E|` of the areas.
    pub fn area_ratio(&self) -> f64 {
        4.0 * self.b / SQRT_3
    }

    /// Rows of the Jacobian of `τ⁻¹`: `(∂ξ/∂x, ∂ξ/∂y)` and `(∂η/∂x, ∂η/∂y)`.
    pub fn inverse_jacobian(&self) -> [[f64; 2]; 2] {
        [[0.5, -self.a / (2.0 * self.b)], [0.0, SQRT_3 / (2.0 * self.b)]]
    }
}

/// Coefficients of `v = (γ u₁ + δ u₂) ∘ τ⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransplantCoeffs {
    pub gamma: f64,
    pub delta: f64,
}

impl TransplantCoeffs {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if gamma == 0.0 && delta == 0.0 {
            return Err(Error::domain("trial function coefficients are both zero"));
        }
        if !gamma.is_finite() || !delta.is_finite() {
            return Err(Error::NonFinite);
        }
        Ok(TransplantCoeffs { gamma, delta })
    }
}

/// `[(32π²+243)q − 1458]γ² − 972√3 aγδ + [(32π²−243)q + 1458]δ²` over
/// `144 b² (γ² + δ²)`.
pub fn transplanted_rayleigh(gamma: f64, delta: f64, a: f64, b: f64) -> Result<f64> {
    check_b(b)?;
    let c = TransplantCoeffs::new(gamma, delta)?;
    let q = a * a + b * b + 3.0;
    let num = (major_coeff() * q - 1458.0) * c.gamma * c.gamma
        - 972.0 * SQRT_3 * a * c.gamma * c.delta
        + (minor_coeff() * q + 1458.0) * c.delta * c.delta;
    Ok(num / (144.0 * b * b * (c.gamma * c.gamma + c.delta * c.delta)))
}

/// Rayleigh quotient on `T` of `u ∘ τ⁻¹` from integrals of `u` over `E`:
/// `[(a²+b²) ∫u_x² − 2√3 a ∫u_x u_y + 3 ∫u_y²] / (4b² ∫u²)`.
pub fn general_rayleigh(
    iux2: f64,
    iuy2: f64,
    iuxy: f64,
    iu2: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    check_b(b)?;
    if !(iu2 > 0.0) {
        return Err(Error::domain(format!("∫u² = {iu2} must be positive")));
    }
    Ok(((a * a + b * b) * iux2 - 2.0 * SQRT_3 * a * iuxy + 3.0 * iuy2) / (4.0 * b * b * iu2))
}

/// `∫∇v₁·∇v₂ / ∫|∇v₁|² = −486√3 a / ((32π²+243)q − 1458)`.
pub fn gradient_coupling(a: f64, b: f64) -> Result<f64> {
    check_b(b)?;
    let q = a * a + b * b + 3.0;
    Ok(-486.0 * SQRT_3 * a / (major_coeff() * q - 1458.0))
}

/// The `γ` making `∇v₁` and `∇(γ v₁ + v₂)` orthogonal in `L²(T)`,
/// `γ = 486√3 a / ((32π²+243)q − 1458)`.
pub fn ortho_gamma(a: f64, b: f64) -> Result<f64> {
    Ok(-gradient_coupling(a, b)?)
}

/// `v = (γ u₁ + δ u₂) ∘ τ⁻¹` with its first and second derivatives on `T`.
#[derive(Debug, Clone, Copy)]
pub struct TransplantedMode {
    pub map: AffineMap,
    pub coeffs: TransplantCoeffs,
}

impl TransplantedMode {
    pub fn new(a: f64, b: f64, gamma: f64, delta: f64) -> Result<Self> {
        Ok(TransplantedMode { map: AffineMap::new(a, b)?, coeffs: TransplantCoeffs::new(gamma, delta)? })
    }

    pub fn value(&self, p: Point) -> f64 {
        let e = self.map.inverse(p);
        let TransplantCoeffs { gamma, delta } = self.coeffs;
        gamma * EquilateralMode::Antisymmetric.value(e.x, e.y)
            + delta * EquilateralMode::Symmetric.value(e.x, e.y)
    }

    pub fn gradient(&self, p: Point) -> (f64, f64) {
        let e = self.map.inverse(p);
        let TransplantCoeffs { gamma, delta } = self.coeffs;
        let (g1x, g1y) = EquilateralMode::Antisymmetric.gradient(e.x, e.y);
        let (g2x, g2y) = EquilateralMode::Symmetric.gradient(e.x, e.y);
        let (ux, uy) = (gamma * g1x + delta * g2x, gamma * g1y + delta * g2y);
        let [[xi_x, xi_y], [_, eta_y]] = self.map.inverse_jacobian();
        (ux * xi_x, ux * xi_y + uy * eta_y)
    }

    pub fn laplacian(&self, p: Point) -> f64 {
        let e = self.map.inverse(p);
        let TransplantCoeffs { gamma, delta } = self.coeffs;
        let (h1xx, h1xy, h1yy) = EquilateralMode::Antisymmetric.hessian(e.x, e.y);
        let (h2xx, h2xy, h2yy) = EquilateralMode::Symmetric.hessian(e.x, e.y);
        let uxx = gamma * h1xx + delta * h2xx;
        let uxy = gamma * h1xy + delta * h2xy;
        let uyy = gamma * h1yy + delta * h2yy;
        let [[xi_x, xi_y], [_, eta_y]] = self.map.inverse_jacobian();
        uxx * (xi_x * xi_x + xi_y * xi_y) + 2.0 * uxy * xi_y * eta_y + uyy * eta_y * eta_y
    }
}

/// `Δv / v` of any transplanted combination at the base midpoint `(0,0)` and
/// at the apex `(a,b)`: `(2π²/9b²)(a²+b²−9)` and `−(2π²/9b²)(a²+b²+3)`.
pub fn laplacian_ratio_vertices(a: f64, b: f64) -> Result<(f64, f64)> {
    check_b(b)?;
    let k = 2.0 * PI2 / (9.0 * b * b);
    let r2 = a * a + b * b;
    Ok((k * (r2 - 9.0), -k * (r2 + 3.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * (1.0 + y.abs())
    }

    #[test]
    fn rayleigh_on_side_two_equilateral() {
        let b = SQRT_3;
        let v = transplanted_rayleigh(1.0, 0.0, 0.0, b).unwrap();
        assert!(close(v, 4.0 * PI2 / 9.0, 1e-14));
        let v = transplanted_rayleigh(0.0, 1.0, 0.0, b).unwrap();
        assert!(close(v, 4.0 * PI2 / 9.0, 1e-14));
        let v = transplanted_rayleigh(0.6, -0.8, 0.0, b).unwrap();
        assert!(close(v, 4.0 * PI2 / 9.0, 1e-14));
    }

    #[test]
    fn rayleigh_homogeneous_and_errors() {
        for &(a, b) in &[(0.3, 0.7), (0.0, 1.0), (0.9, 0.2)] {
            let r1 = transplanted_rayleigh(1.0, 0.0, a, b).unwrap();
            let r2 = transplanted_rayleigh(2.0, 0.0, a, b).unwrap();
            assert!(close(r1, r2, 1e-15));
            let r1 = transplanted_rayleigh(1.0, 0.4, a, b).unwrap();
            let r2 = transplanted_rayleigh(-3.0, -1.2, a, b).unwrap();
            assert!(close(r1, r2, 1e-14));
        }
        assert!(transplanted_rayleigh(0.0, 0.0, 0.2, 1.0).is_err());
        assert!(transplanted_rayleigh(1.0, 0.0, 0.2, 0.0).is_err());
        assert!(transplanted_rayleigh(1.0, 0.0, 0.2, -1.0).is_err());
    }

    #[test]
    fn general_rayleigh_matches_closed_form() {
        use crate::equilateral::exact;
        for &(a, b) in &[(0.0, SQRT_3), (0.4, 1.1), (0.8, 0.3)] {
            let g = general_rayleigh(exact::grad_major(), exact::grad_minor(), 0.0, exact::mode_sq(), a, b)
                .unwrap();
            assert!(close(g, transplanted_rayleigh(1.0, 0.0, a, b).unwrap(), 1e-13));
            let g = general_rayleigh(exact::grad_minor(), exact::grad_major(), 0.0, exact::mode_sq(), a, b)
                .unwrap();
            assert!(close(g, transplanted_rayleigh(0.0, 1.0, a, b).unwrap(), 1e-13));
        }
        let g = general_rayleigh(2.0, 5.0, 7.0, 1.5, 0.0, 0.5).unwrap();
        assert!(close(g, (0.25 * 2.0 + 15.0) / (4.0 * 0.25 * 1.5), 1e-15));
        assert!(general_rayleigh(1.0, 1.0, 0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn ortho_gamma_sign_and_zero() {
        assert_eq!(ortho_gamma(0.0, 1.3).unwrap(), 0.0);
        let g = ortho_gamma(0.5, 1.0).unwrap();
        let expected = 486.0 * SQRT_3 * 0.5 / (major_coeff() * 4.25 - 1458.0);
        assert!(close(g, expected, 1e-15) && g > 0.0);
        assert!(96.0 * PI2 - 729.0 > 0.0);
    }

    #[test]
    fn affine_map_round_trip() {
        let m = AffineMap::new(0.4, 1.1).unwrap();
        let e = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.5, SQRT_3 / 2.0)];
        let t = [Point::new(-1.0, 0.0), Point::new(1.0, 0.0), Point::new(0.4, 1.1)];
        for (pe, pt) in e.iter().zip(&t) {
            assert!((m.forward(*pe) - pt).norm() < 1e-15);
            assert!((m.inverse(*pt) - pe).norm() < 1e-15);
        }
        let p = Point::new(0.1, 0.3);
        assert!((m.forward(m.inverse(p)) - p).norm() < 1e-15);
    }

    #[test]
    fn laplacian_ratio_examples() {
        let (o, t) = laplacian_ratio_vertices(0.0, SQRT_3).unwrap();
        assert!(close(o, -4.0 * PI2 / 9.0, 1e-14) && close(t, -4.0 * PI2 / 9.0, 1e-14));
        let (o, t) = laplacian_ratio_vertices(0.0, 1.0).unwrap();
        assert!(close(o, -16.0 * PI2 / 9.0, 1e-14) && close(t, -8.0 * PI2 / 9.0, 1e-14));
    }

    #[test]
    fn analytic_laplacian_gives_vertex_ratios() {
        let (a, b) = (0.3, 1.2);
        let v = TransplantedMode::new(a, b, 1.0, 0.5).unwrap();
        let (o, t) = laplacian_ratio_vertices(a, b).unwrap();
        let p0 = Point::new(0.0, 0.0);
        let pa = Point::new(a, b);
        assert!(close(v.laplacian(p0) / v.value(p0), o, 1e-12));
        assert!(close(v.laplacian(pa) / v.value(pa), t, 1e-12));
    }
}
