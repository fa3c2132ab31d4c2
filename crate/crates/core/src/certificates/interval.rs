//! Closed intervals with exact rational endpoints, and sign certification of
//! polynomials whose coefficients are integer combinations of `1`, `π²`
//! and `√3`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use serde::Serialize;

use crate::constants::SQRT_3;

#[derive(Debug, Clone, PartialEq)]
pub struct RatInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

impl RatInterval {
    pub fn point(q: BigRational) -> Self {
        RatInterval { lo: q.clone(), hi: q }
    }

    pub fn int(k: i64) -> Self {
        Self::point(rat(k, 1))
    }

    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "empty interval");
        RatInterval { lo, hi }
    }

    pub fn add(&self, o: &Self) -> Self {
        RatInterval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    pub fn sub(&self, o: &Self) -> Self {
        RatInterval { lo: &self.lo - &o.hi, hi: &self.hi - &o.lo }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().expect("four products").clone();
        let hi = c.iter().max().expect("four products").clone();
        RatInterval { lo, hi }
    }

    pub fn scale(&self, k: i64) -> Self {
        self.mul(&Self::int(k))
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        match BigRational::from_f64(x) {
            Some(q) => self.lo <= q && q <= self.hi,
            None => false,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        use num_traits::ToPrimitive;
        (self.lo.to_f64().unwrap_or(f64::NAN), self.hi.to_f64().unwrap_or(f64::NAN))
    }
}

/// `π ∈ [3.14159265358979, 3.14159265358980]`.
pub fn pi_enclosure() -> RatInterval {
    let den = 100_000_000_000_000i64;
    RatInterval::new(rat(314_159_265_358_979, den), rat(314_159_265_358_980, den))
}

pub fn pi_squared_enclosure() -> RatInterval {
    let p = pi_enclosure();
    p.mul(&p)
}

/// `√3` between the binary neighbours of the `f64` value widened by `1e−15`,
/// verified by squaring.
pub fn sqrt3_enclosure() -> RatInterval {
    let lo = BigRational::from_f64(SQRT_3 - 1e-15).expect("finite");
    let hi = BigRational::from_f64(SQRT_3 + 1e-15).expect("finite");
    let three = rat(3, 1);
    assert!(&lo * &lo < three && &hi * &hi > three, "sqrt(3) enclosure failed");
    RatInterval::new(lo, hi)
}

/// `k₀ + k₂ π² + k₄ π⁴ + k₃ √3` with integer weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Coeff {
    pub k0: i64,
    pub pi2: i64,
    pub pi4: i64,
    pub sqrt3: i64,
}

impl Coeff {
    pub const fn new(k0: i64, pi2: i64, sqrt3: i64) -> Self {
        Coeff { k0, pi2, pi4: 0, sqrt3 }
    }

    pub const fn with_pi4(k0: i64, pi2: i64, pi4: i64) -> Self {
        Coeff { k0, pi2, pi4, sqrt3: 0 }
    }

    pub fn eval(&self) -> f64 {
        let p2 = std::f64::consts::PI.powi(2);
        self.k0 as f64 + self.pi2 as f64 * p2 + self.pi4 as f64 * p2 * p2 + self.sqrt3 as f64 * SQRT_3
    }

    pub fn enclose(&self, pi2: &RatInterval, sqrt3: &RatInterval) -> RatInterval {
        RatInterval::int(self.k0)
            .add(&pi2.scale(self.pi2))
            .add(&pi2.mul(pi2).scale(self.pi4))
            .add(&sqrt3.scale(self.sqrt3))
    }
}

/// Polynomial in one variable, ascending coefficients.
#[derive(Debug, Clone, Serialize)]
pub struct ExactPoly {
    pub name: &'static str,
    pub coeffs: Vec<Coeff>,
}

impl ExactPoly {
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.eval())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Numeric values of the coefficients.
    pub fn numeric(&self) -> Vec<f64> {
        self.coeffs.iter().map(Coeff::eval).collect()
    }

    pub fn enclosures(&self) -> Vec<RatInterval> {
        let pi2 = pi_squared_enclosure();
        let s3 = sqrt3_enclosure();
        self.coeffs.iter().map(|c| c.enclose(&pi2, &s3)).collect()
    }
}

fn horner(coeffs: &[RatInterval], x: &RatInterval) -> RatInterval {
    let mut acc = RatInterval::int(0);
    for c in coeffs.iter().rev() {
        acc = acc.mul(x).add(c);
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignCertificate {
    pub poly: &'static str,
    pub interval: (f64, f64),
    pub sign: Sign,
    pub certified: bool,
    /// Subintervals in the final cover.
    pub boxes: usize,
    /// Subinterval where certification failed, when it did.
    pub failed_at: Option<(f64, f64)>,
}

const MAX_BOXES: usize = 1 << 16;
/// Deepest bisection before a subinterval counts as a failure.
const MAX_DEPTH: u32 = 60;

/// Proves `sign(p(x))` constant on `[lo, hi]` by interval Horner evaluation
/// with bisection.
pub fn certify_sign(poly: &ExactPoly, lo: BigRational, hi: BigRational, sign: Sign) -> SignCertificate {
    let coeffs = poly.enclosures();
    let interval = (RatInterval::point(lo.clone()).to_f64_pair().0, RatInterval::point(hi.clone()).to_f64_pair().0);
    let mut stack = vec![(lo, hi, 0u32)];
    let mut boxes = 0usize;
    let mut visited = 0usize;
    let two = BigRational::from_integer(BigInt::from(2));
    while let Some((a, b, depth)) = stack.pop() {
        visited += 1;
        let x = RatInterval::new(a.clone(), b.clone());
        let v = horner(&coeffs, &x);
        let ok = match sign {
            Sign::Positive => v.is_positive(),
            Sign::Negative => v.is_negative(),
        };
        if ok {
            boxes += 1;
            continue;
        }
        let tiny = (&b - &a).is_zero() || depth >= MAX_DEPTH || visited > MAX_BOXES;
        if tiny {
            let f = RatInterval::new(a, b).to_f64_pair();
            return SignCertificate { poly: poly.name, interval, sign, certified: false, boxes, failed_at: Some(f) };
        }
        let mid = (&a + &b) / &two;
        stack.push((mid.clone(), b, depth + 1));
        stack.push((a, mid, depth + 1));
    }
    SignCertificate { poly: poly.name, interval, sign, certified: true, boxes, failed_at: None }
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    rat(num, den)
}
