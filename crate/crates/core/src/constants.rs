//! Bessel roots and the sharp constants of the triangle inequalities.

use std::f64::consts::PI;

/// First positive zero of `J_0`.
pub const J01: f64 = 2.404_825_557_695_773;
/// First positive zero of `J_1`.
pub const J11: f64 = 3.831_705_970_207_512;
/// First positive zero of `J_1'`.
pub const J11_PRIME: f64 = 1.841_183_781_340_659;

pub const SQRT_3: f64 = 1.732_050_807_568_877_2;

/// `16π²/9`, the double eigenvalue `μ₁ = μ₂` of the unit equilateral triangle.
pub const EQUILATERAL_MU: f64 = 16.0 * PI * PI / 9.0;

/// Sharp constant for `μ₁ S²`.
pub const MU1_S2: f64 = 16.0 * PI * PI / 3.0;
/// Sharp constant for `μ₁ L²` (and the conjectured `H(μ₁, μ₂) L²`).
pub const MU1_L2: f64 = 16.0 * PI * PI;
/// Sharp constant for `μ₁ A`, `H(μ₁, μ₂) A` and `μ₁ (A + δ E_T)`.
pub const MU1_A: f64 = 4.0 * PI * PI / (3.0 * SQRT_3);
/// Sharp constant for `M(μ₁, μ₂) A² / S²`.
pub const ARITH_A2_S2: f64 = PI * PI / 9.0;
/// Sharp constant for `μ₁ μ₂ A³ / S²`.
pub const GEOM_A3_S2: f64 = 4.0 * PI * PI * PI * PI / (27.0 * SQRT_3);
/// Conjectured sharp constant for `μ₁ μ₂ A²`.
pub const PROD_A2: f64 = 16.0 * PI * PI * PI * PI / 27.0;

/// Excess weight `π² / j₀,₁²` for which equality is still attained by the
/// equilateral triangle.
pub fn excess_weight_opt() -> f64 {
    PI * PI / (J01 * J01)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_roots_match_four_decimals() {
        assert!((J01 - 2.4048).abs() < 5e-5);
        assert!((J11 - 3.8317).abs() < 5e-5);
        assert!((J11_PRIME - 1.8412).abs() < 5e-5);
    }

    #[test]
    fn sqrt3_literal() {
        assert_eq!(SQRT_3, 3f64.sqrt());
    }

    #[test]
    fn sharp_constants_numeric() {
        assert!((MU1_S2 - 52.637_890).abs() < 1e-5);
        assert!((MU1_L2 - 157.913_670).abs() < 1e-5);
        assert!((MU1_A - 7.597_632).abs() < 1e-5);
        assert!((ARITH_A2_S2 - 1.096_623).abs() < 1e-5);
        assert!((PROD_A2 - 57.724_0).abs() < 1e-3);
        // equilateral unit side: A = √3/4, S² = 3, L = 3
        let a = SQRT_3 / 4.0;
        assert!((EQUILATERAL_MU * 3.0 - MU1_S2).abs() < 1e-12);
        assert!((EQUILATERAL_MU * 9.0 - MU1_L2).abs() < 1e-12);
        assert!((EQUILATERAL_MU * a - MU1_A).abs() < 1e-12);
        assert!((EQUILATERAL_MU * EQUILATERAL_MU * a * a - PROD_A2).abs() < 1e-10);
        assert!((EQUILATERAL_MU * EQUILATERAL_MU * a.powi(3) / 3.0 - GEOM_A3_S2).abs() < 1e-10);
    }
}
