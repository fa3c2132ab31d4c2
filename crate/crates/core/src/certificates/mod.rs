//! Sampled re-verification of the case analyses behind the `μ₁S²` and
//! `μ₁(A + (π²/j₀,₁²)E_T)` inequalities, and of the squared form of the
//! excess lemma.
//!
//! Each certificate samples its parameter region with a fixed R2
//! low-discrepancy sequence and records the worst margin, where the margin
//! is `rhs − lhs` of the required strict inequality (positive means
//! satisfied). One-dimensional reductions are checked separately, and with
//! `strict` the polynomial sign claims are proved in exact rational interval
//! arithmetic.

pub mod interval;
pub mod one_opt;
pub mod one_up_s;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::check_lemma_s2_excess;

pub use one_opt::{certify_thm_1opt, eval_uvw, Uvw};
pub use one_up_s::{certify_thm_1ups, crossing_points, region_curves, CrossingPoints, RegionCurves};

/// Fewest samples accepted by any certificate.
pub const MIN_SAMPLES: usize = 1000;
/// Radius around the equilateral point `(r,s) = (2,0)` inside which margins
/// are reported but never fail.
pub const EQUALITY_RADIUS: f64 = 1e-6;

const PLASTIC: f64 = 1.324_717_957_244_746;

/// `n`-th point of the R2 sequence in `[0,1)²`.
pub fn r2_point(n: u64) -> [f64; 2] {
    let a1 = 1.0 / PLASTIC;
    let a2 = 1.0 / (PLASTIC * PLASTIC);
    let n = n as f64;
    [(0.5 + a1 * n).fract(), (0.5 + a2 * n).fract()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    #[serde(rename = "1upS")]
    OneUpS,
    #[serde(rename = "1opt")]
    OneOpt,
    #[serde(rename = "lemma83")]
    Lemma83,
}

impl Theorem {
    pub fn id(self) -> &'static str {
        match self {
            Theorem::OneUpS => "1upS",
            Theorem::OneOpt => "1opt",
            Theorem::Lemma83 => "lemma83",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1upS" | "1ups" => Ok(Theorem::OneUpS),
            "1opt" => Ok(Theorem::OneOpt),
            "lemma83" => Ok(Theorem::Lemma83),
            other => Err(Error::Config(format!("unknown theorem `{other}` (expected 1upS, 1opt or lemma83)"))),
        }
    }
}

/// Smallest margin seen and where.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Worst {
    pub margin: f64,
    pub at: [f64; 2],
}

impl Worst {
    pub const NONE: Worst = Worst { margin: f64::INFINITY, at: [f64::NAN, f64::NAN] };

    /// Order-independent minimum: by margin, then lexicographically by location.
    pub fn min(self, other: Worst) -> Worst {
        let key = |w: &Worst| (w.margin, w.at[0], w.at[1]);
        let (a, b) = (key(&self), key(&other));
        let ord = a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.total_cmp(&b.2));
        if ord.is_le() {
            self
        } else {
            other
        }
    }
}

/// Per-shard accumulator for one sampled inequality.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tally {
    pub count: usize,
    pub worst: Worst,
    /// Worst among samples outside the equality radius.
    pub worst_counted: Worst,
    pub exempt: usize,
    /// Samples where the independently computed functional disagreed in sign.
    pub route_mismatches: usize,
    pub uncovered: usize,
    /// Largest auxiliary error (e.g. an identity residual).
    pub max_aux: f64,
}

impl Tally {
    pub const EMPTY: Tally = Tally {
        count: 0,
        worst: Worst::NONE,
        worst_counted: Worst::NONE,
        exempt: 0,
        route_mismatches: 0,
        uncovered: 0,
        max_aux: 0.0,
    };

    pub fn merge(self, o: Tally) -> Tally {
        Tally {
            count: self.count + o.count,
            worst: self.worst.min(o.worst),
            worst_counted: self.worst_counted.min(o.worst_counted),
            exempt: self.exempt + o.exempt,
            route_mismatches: self.route_mismatches + o.route_mismatches,
            uncovered: self.uncovered + o.uncovered,
            max_aux: self.max_aux.max(o.max_aux),
        }
    }

    pub fn single(margin: f64, at: [f64; 2], exempt: bool) -> Tally {
        let w = Worst { margin, at };
        Tally {
            count: 1,
            worst: w,
            worst_counted: if exempt { Worst::NONE } else { w },
            exempt: usize::from(exempt),
            ..Tally::EMPTY
        }
    }
}

/// Evaluates `f` on R2 points `0..samples` in parallel and merges.
pub(crate) fn sample<F>(samples: usize, f: F) -> Tally
where
    F: Fn([f64; 2]) -> Tally + Sync,
{
    (0..samples as u64)
        .into_par_iter()
        .map(|n| f(r2_point(n)))
        .reduce(|| Tally::EMPTY, Tally::merge)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionReport {
    pub name: String,
    pub inequality: &'static str,
    pub samples: usize,
    pub worst_margin: f64,
    pub at: [f64; 2],
    pub exempt: usize,
    pub route_mismatches: usize,
    pub pass: bool,
}

impl RegionReport {
    pub(crate) fn from_tally(name: &str, inequality: &'static str, t: &Tally) -> Self {
        let pass = t.count > 0 && t.worst_counted.margin > 0.0 && t.route_mismatches == 0 && t.uncovered == 0;
        RegionReport {
            name: name.to_string(),
            inequality,
            samples: t.count,
            worst_margin: t.worst.margin,
            at: t.worst.at,
            exempt: t.exempt,
            route_mismatches: t.route_mismatches,
            pass,
        }
    }
}

/// A single named verification step.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, value: f64, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, value, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub theorem: String,
    pub samples: usize,
    pub worst_margin: f64,
    pub at: [f64; 2],
    pub pass: bool,
    /// Names of the two sampled coordinates, e.g. `"q,p"`.
    pub coordinates: &'static str,
    pub strict: bool,
    pub regions: Vec<RegionReport>,
    pub checks: Vec<Check>,
}

impl CertificateReport {
    pub(crate) fn assemble(
        theorem: Theorem,
        coordinates: &'static str,
        strict: bool,
        regions: Vec<RegionReport>,
        checks: Vec<Check>,
    ) -> Self {
        let worst = regions
            .iter()
            .map(|r| Worst { margin: r.worst_margin, at: r.at })
            .fold(Worst::NONE, Worst::min);
        let pass = regions.iter().all(|r| r.pass) && checks.iter().all(|c| c.pass);
        CertificateReport {
            theorem: theorem.id().to_string(),
            samples: regions.iter().map(|r| r.samples).sum(),
            worst_margin: worst.margin,
            at: worst.at,
            pass,
            coordinates,
            strict,
            regions,
            checks,
        }
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.regions.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
        out.extend(self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()));
        out
    }
}

pub(crate) fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return Err(Error::Config(format!("at least {MIN_SAMPLES} samples required, got {samples}")));
    }
    Ok(())
}

pub(crate) fn near_equilateral(r: f64, s: f64) -> bool {
    ((r - 2.0).powi(2) + s * s).sqrt() < EQUALITY_RADIUS
}

/// Identity tolerance for the squared form of the excess lemma.
pub const LEMMA_RESIDUAL_TOL: f64 = 1e-10;

/// Samples the full shape region `1 < r ≤ 2, 0 ≤ s < 1, r + s ≤ 2` and checks
/// that the squared form equals `(2r − (1+s²))² − 3(r²−1)(1−s²)` and is
/// nonnegative. The margin is the unsquared slack
/// `2r − (1+s²) − √(3(r²−1)(1−s²))`.
pub fn certify_lemma_83(samples: usize) -> Result<CertificateReport> {
    check_samples(samples)?;
    let tally = sample(samples, |[u, v]| {
        let r = 1.0 + (1.0 - u).max(f64::EPSILON);
        let s = v * (2.0 - r);
        let c = match check_lemma_s2_excess(r, s) {
            Ok(c) => c,
            Err(_) => return Tally { uncovered: 1, count: 1, ..Tally::EMPTY },
        };
        let exempt = near_equilateral(r, s);
        let mut t = Tally::single(c.slack, [r, s], exempt);
        if c.squared_form < 0.0 || c.squared_form.is_nan() {
            t.route_mismatches = 1;
        }
        t.max_aux = c.identity_residual();
        t
    });
    let mut region = RegionReport::from_tally("shape_region", "slack >= 0", &tally);
    // equality is attained only at (2,0), so margins elsewhere only need to be nonnegative
    region.pass = tally.count > 0 && tally.worst_counted.margin >= 0.0 && tally.route_mismatches == 0 && tally.uncovered == 0;

    let mut checks = vec![Check::new(
        "identity_residual",
        tally.max_aux < LEMMA_RESIDUAL_TOL,
        tally.max_aux,
        format!("max |squared form − square difference| over {} samples", tally.count),
    )];
    let eq = check_lemma_s2_excess(2.0, 0.0)?;
    checks.push(Check::new(
        "equality_at_equilateral",
        eq.squared_form.abs() < 1e-14 && eq.slack.abs() < 1e-14,
        eq.squared_form,
        "squared form at (r,s) = (2,0)",
    ));
    let inner = check_lemma_s2_excess(1.4, 0.5)?;
    checks.push(Check::new("positive_interior", inner.squared_form > 0.0, inner.squared_form, "squared form at (1.4, 0.5)"));
    Ok(CertificateReport::assemble(Theorem::Lemma83, "r,s", false, vec![region], checks))
}

/// Runs the certificate for `theorem`.
pub fn certify(theorem: Theorem, samples: usize, strict: bool) -> Result<CertificateReport> {
    match theorem {
        Theorem::OneUpS => certify_thm_1ups(samples, strict),
        Theorem::OneOpt => certify_thm_1opt(samples, strict),
        Theorem::Lemma83 => certify_lemma_83(samples),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r2_points_fill_the_square() {
        let mut cells = [0usize; 16];
        for n in 0..1600 {
            let [u, v] = r2_point(n);
            assert!((0.0..1.0).contains(&u) && (0.0..1.0).contains(&v));
            cells[(u * 4.0) as usize * 4 + (v * 4.0) as usize] += 1;
        }
        assert!(cells.iter().all(|&c| (90..=110).contains(&c)), "{cells:?}");
    }

    #[test]
    fn worst_min_is_order_independent() {
        let a = Worst { margin: 1.0, at: [0.5, 0.1] };
        let b = Worst { margin: 1.0, at: [0.4, 0.9] };
        let c = Worst { margin: 2.0, at: [0.0, 0.0] };
        assert_eq!(a.min(b), b);
        assert_eq!(b.min(a), b);
        assert_eq!(c.min(a).min(b), a.min(b).min(c));
    }

    #[test]
    fn excess_lemma_certificate_passes() {
        let rep = certify_lemma_83(2000).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.samples, 2000);
        assert!(certify_lemma_83(999).is_err());
    }

    #[test]
    fn theorem_ids_round_trip() {
        for t in [Theorem::OneUpS, Theorem::OneOpt, Theorem::Lemma83] {
            assert_eq!(t.id().parse::<Theorem>().unwrap(), t);
        }
        assert!("2opt".parse::<Theorem>().is_err());
    }
}
