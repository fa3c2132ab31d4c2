//! Sweeps over the moduli triangle `1 < r ≤ 2, 0 ≤ s < 1, r + s ≤ 2`
//! comparing finite element eigenvalues against the sharp constants and the
//! closed-form trial bounds.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{excess_weight_opt, ARITH_A2_S2, GEOM_A3_S2, MU1_A, MU1_L2, MU1_S2, PROD_A2};
use crate::error::{Error, Result};
use crate::fem::{converged_eigs, neumann_eigs, SpectrumEstimate, DEFAULT_LEVEL};
use crate::geometry::{GeometricSummary, ShapeParams, Triangle};
use crate::trial_bounds::{canonical_bounds, min_bound, BoundValue, FunctionalKind};

/// Relative slack allowed above a sharp constant, for discretization bias.
pub const DEFAULT_VERDICT_TOL: f64 = 5e-3;
pub const DEFAULT_EPS: f64 = 0.05;
/// Significant digits in CSV output.
pub const CSV_DIGITS: usize = 12;
const CORNER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FemSetting {
    /// Fixed finest level, extrapolated from it and the level below.
    Level(u8),
    /// Refine until successive extrapolations agree to this relative tolerance.
    Tol(f64),
}

impl Default for FemSetting {
    fn default() -> Self {
        FemSetting::Level(DEFAULT_LEVEL)
    }
}

impl FemSetting {
    pub fn solve(self, t: &Triangle, k: usize) -> Result<SpectrumEstimate> {
        match self {
            FemSetting::Level(l) => neumann_eigs(t, l, k),
            FemSetting::Tol(tol) => converged_eigs(t, k, tol),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanConfig {
    pub n_r: usize,
    pub n_s: usize,
    pub eps: f64,
    pub fem: FemSetting,
    /// Worker threads; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl ScanConfig {
    pub fn new(n_r: usize, n_s: usize, eps: f64, fem: FemSetting, jobs: Option<usize>) -> Result<Self> {
        if n_r < 2 || n_s < 2 {
            return Err(Error::Config(format!("grid {n_r}x{n_s} needs at least 2 points per axis")));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::Config(format!("eps {eps} outside (0, 0.5)")));
        }
        if jobs == Some(0) {
            return Err(Error::Config("jobs must be positive".into()));
        }
        Ok(ScanConfig { n_r, n_s, eps, fem, jobs })
    }

    /// Admissible grid points in row-major `(r, s)` order, always including
    /// the equilateral corner `(2, 0)`.
    pub fn grid(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::new();
        for i in 0..self.n_r {
            let r = if i + 1 == self.n_r {
                2.0
            } else {
                1.0 + self.eps + i as f64 * (1.0 - self.eps) / (self.n_r - 1) as f64
            };
            for j in 0..self.n_s {
                let s = j as f64 * (1.0 - self.eps) / (self.n_s - 1) as f64;
                if s <= 2.0 - r + CORNER_TOL {
                    pts.push((r, s.min(2.0 - r)));
                }
            }
        }
        if !pts.iter().any(|&(r, s)| is_corner(r, s)) {
            pts.push((2.0, 0.0));
        }
        pts
    }
}

fn is_corner(r: f64, s: f64) -> bool {
    (r - 2.0).abs() < CORNER_TOL && s.abs() < CORNER_TOL
}

/// Scale-invariant eigenvalue functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Functionals {
    pub mu1_s2: f64,
    pub mu1_l2: f64,
    pub mu1_a: f64,
    /// `μ₁(A + E_T)`
    pub mu1_excess_1: f64,
    /// `μ₁(A + (3/2)E_T)`
    pub mu1_excess_3_2: f64,
    /// `μ₁(A + (π²/j₀,₁²)E_T)`
    pub mu1_excess_opt: f64,
    pub harmonic_a: f64,
    pub arith_a2_s2: f64,
    pub geom_a3_s2: f64,
    pub harmonic_l2: f64,
    pub prod_a2: f64,
}

impl Functionals {
    pub const NAMES: [&'static str; 11] = [
        "mu1_s2",
        "mu1_l2",
        "mu1_a",
        "mu1_excess_1",
        "mu1_excess_3_2",
        "mu1_excess_opt",
        "harmonic_a",
        "arith_a2_s2",
        "geom_a3_s2",
        "harmonic_l2",
        "prod_a2",
    ];

    pub fn compute(g: &GeometricSummary, mu1: f64, mu2: f64) -> Self {
        let (a, l2, s2, e) = (g.area, g.perimeter * g.perimeter, g.sumsq, g.excess);
        let h = 2.0 * mu1 * mu2 / (mu1 + mu2);
        let m = 0.5 * (mu1 + mu2);
        Functionals {
            mu1_s2: mu1 * s2,
            mu1_l2: mu1 * l2,
            mu1_a: mu1 * a,
            mu1_excess_1: mu1 * (a + e),
            mu1_excess_3_2: mu1 * (a + 1.5 * e),
            mu1_excess_opt: mu1 * (a + excess_weight_opt() * e),
            harmonic_a: h * a,
            arith_a2_s2: m * a * a / s2,
            geom_a3_s2: mu1 * mu2 * a.powi(3) / s2,
            harmonic_l2: h * l2,
            prod_a2: mu1 * mu2 * a * a,
        }
    }

    pub fn values(&self) -> [f64; 11] {
        [
            self.mu1_s2,
            self.mu1_l2,
            self.mu1_a,
            self.mu1_excess_1,
            self.mu1_excess_3_2,
            self.mu1_excess_opt,
            self.harmonic_a,
            self.arith_a2_s2,
            self.geom_a3_s2,
            self.harmonic_l2,
            self.prod_a2,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::NAMES.iter().position(|n| *n == name).map(|i| self.values()[i])
    }

    fn nan() -> Self {
        Self::compute(
            &GeometricSummary { area: f64::NAN, perimeter: f64::NAN, sumsq: f64::NAN, diameter: f64::NAN, excess: f64::NAN, sides: [f64::NAN; 3] },
            f64::NAN,
            f64::NAN,
        )
    }
}

/// One scan row, in the canonical scale (longest side 2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub r: f64,
    pub s: f64,
    pub a: f64,
    pub b: f64,
    pub geometry: GeometricSummary,
    pub mu1: f64,
    pub mu2: f64,
    pub mu1_err: f64,
    pub mu2_err: f64,
    pub level: u8,
    pub converged: bool,
    pub max_residual: f64,
    pub functionals: Functionals,
    pub bounds: Vec<BoundValue>,
    /// Solver failure, when the row could not be computed.
    pub error: Option<String>,
}

impl BoundReport {
    pub fn min_mu1_bound(&self) -> Option<&BoundValue> {
        min_bound(&self.bounds, FunctionalKind::Mu1)
    }

    pub fn harmonic_mean(&self) -> f64 {
        2.0 * self.mu1 * self.mu2 / (self.mu1 + self.mu2)
    }

    pub fn arithmetic_mean(&self) -> f64 {
        0.5 * (self.mu1 + self.mu2)
    }

    pub fn is_corner(&self) -> bool {
        is_corner(self.r, self.s)
    }
}

/// Evaluates `t` as given: functionals from its own vertices, eigenvalues and
/// bounds reported for the similar canonical triangle.
pub fn evaluate_triangle(t: &Triangle, fem: FemSetting) -> Result<BoundReport> {
    let sp = ShapeParams::from_triangle(t)?;
    let cf = t.canonical_form();
    let geometry = cf.triangle().summary();
    let bounds = canonical_bounds(cf.a, cf.b);
    let base = BoundReport {
        r: sp.r,
        s: sp.s,
        a: cf.a,
        b: cf.b,
        geometry,
        mu1: f64::NAN,
        mu2: f64::NAN,
        mu1_err: f64::NAN,
        mu2_err: f64::NAN,
        level: 0,
        converged: false,
        max_residual: f64::NAN,
        functionals: Functionals::nan(),
        bounds,
        error: None,
    };
    let est = match fem.solve(t, 2) {
        Ok(e) => e,
        Err(e) => return Ok(BoundReport { error: Some(e.to_string()), ..base }),
    };
    let ext = est.extrapolated.clone();
    let canon = est.canonical_extrapolated();
    let errs = est.canonical_errors();
    let functionals = Functionals::compute(&t.summary(), ext[0], ext[1]);
    let converged = est.converged;
    Ok(BoundReport {
        mu1: canon[0],
        mu2: canon[1],
        mu1_err: errs[0],
        mu2_err: errs[1],
        level: est.finest_level(),
        converged,
        max_residual: est.max_residual,
        functionals,
        ..base
    })
}

/// [`evaluate_triangle`] at moduli `(r, s)`, reporting the requested moduli
/// rather than the ones recovered from the vertices.
pub fn evaluate_shape(r: f64, s: f64, fem: FemSetting) -> Result<BoundReport> {
    let sp = ShapeParams::new(r, s)?;
    let row = evaluate_triangle(&sp.triangle()?, fem)?;
    Ok(BoundReport { r: sp.r, s: sp.s, ..row })
}

pub fn scan(cfg: &ScanConfig) -> Result<Vec<BoundReport>> {
    let pts = cfg.grid();
    let run = || -> Vec<Result<BoundReport>> {
        pts.par_iter().map(|&(r, s)| evaluate_shape(r, s, cfg.fem)).collect()
    };
    let rows = match cfg.jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };
    rows.into_iter().collect()
}

/// Verdict on one functional over a scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub theorem: &'static str,
    pub functional: &'static str,
    pub constant: f64,
    pub max: f64,
    pub argmax: [f64; 2],
    /// `(constant − max) / constant`; negative when the constant is exceeded.
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Value at the most degenerate isosceles row over the constant, when tracked.
    pub degenerate_ratio: Option<f64>,
    pub note: &'static str,
    /// Rows skipped because the solver failed.
    pub skipped: usize,
}

struct FunctionalSpec {
    theorem: &'static str,
    functional: &'static str,
    constant: f64,
    degenerate_ok: bool,
}

fn theorem_specs() -> Vec<FunctionalSpec> {
    let spec = |theorem, functional, constant, degenerate_ok| FunctionalSpec { theorem, functional, constant, degenerate_ok };
    vec![
        spec("1upS", "mu1_s2", MU1_S2, false),
        spec("1upS", "mu1_l2", MU1_L2, false),
        spec("1upS", "mu1_a", MU1_A, false),
        spec("1opt", "mu1_excess_opt", MU1_A, true),
        spec("1opt", "mu1_excess_3_2", MU1_A, false),
        spec("1opt", "mu1_excess_1", MU1_A, false),
        spec("12upA", "harmonic_a", MU1_A, false),
        spec("12upAS", "arith_a2_s2", ARITH_A2_S2, false),
        spec("geom", "geom_a3_s2", GEOM_A3_S2, false),
    ]
}

pub const THEOREM_IDS: [&str; 5] = ["1upS", "1opt", "12upA", "12upAS", "geom"];
pub const CONJECTURE_NOTE: &str = "conjecture: numerical evidence only";

fn verdict(rows: &[BoundReport], spec: &FunctionalSpec, tol: f64, note: &'static str) -> Verdict {
    let mut best: Option<(f64, [f64; 2])> = None;
    let mut skipped = 0;
    for row in rows {
        let v = row.functionals.get(spec.functional).unwrap_or(f64::NAN);
        if !v.is_finite() {
            skipped += 1;
            continue;
        }
        if best.is_none_or(|(b, _)| v > b) {
            best = Some((v, [row.r, row.s]));
        }
    }
    let (max, argmax) = best.unwrap_or((f64::NAN, [f64::NAN, f64::NAN]));
    let min_r = rows.iter().map(|r| r.r).fold(f64::INFINITY, f64::min);
    let at_corner = is_corner(argmax[0], argmax[1]);
    let at_degenerate = spec.degenerate_ok && (argmax[0] - min_r).abs() < CORNER_TOL;
    let degenerate_ratio = spec.degenerate_ok.then(|| {
        rows.iter()
            .filter(|r| (r.r - min_r).abs() < CORNER_TOL && r.s.abs() < CORNER_TOL)
            .filter_map(|r| r.functionals.get(spec.functional))
            .next()
            .map(|v| v / spec.constant)
    });
    Verdict {
        theorem: spec.theorem,
        functional: spec.functional,
        constant: spec.constant,
        max,
        argmax,
        margin: (spec.constant - max) / spec.constant,
        tolerance: tol,
        pass: max <= spec.constant * (1.0 + tol) && (at_corner || at_degenerate),
        degenerate_ratio: degenerate_ratio.flatten(),
        note,
        skipped,
    }
}

/// Per-functional verdicts for `which` (`"all"` or one of [`THEOREM_IDS`]).
pub fn verify_theorems(rows: &[BoundReport], which: &str, tol: f64) -> Result<Vec<Verdict>> {
    if which != "all" && !THEOREM_IDS.contains(&which) {
        return Err(Error::Config(format!("unknown theorem `{which}`")));
    }
    Ok(theorem_specs()
        .iter()
        .filter(|s| which == "all" || s.theorem == which)
        .map(|s| verdict(rows, s, tol, "theorem"))
        .collect())
}

/// `H(μ₁,μ₂)L² ≤ 16π²` and `μ₁μ₂A² ≤ 16π⁴/27`.
pub fn probe_conjectures(rows: &[BoundReport], tol: f64) -> Vec<Verdict> {
    [
        FunctionalSpec { theorem: "conj_harmonic_perimeter", functional: "harmonic_l2", constant: MU1_L2, degenerate_ok: false },
        FunctionalSpec { theorem: "conj_product_area", functional: "prod_a2", constant: PROD_A2, degenerate_ok: false },
    ]
    .iter()
    .map(|s| verdict(rows, s, tol, CONJECTURE_NOTE))
    .collect()
}

/// Rows where a closed-form bound falls below the FEM value by more than `tol`
/// relative: `(row index, bound name, bound, fem value)`.
pub fn bound_violations(rows: &[BoundReport], tol: f64) -> Vec<(usize, &'static str, f64, f64)> {
    let mut out = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        for b in row.bounds.iter().filter(|b| b.valid) {
            let fem = match b.kind {
                FunctionalKind::Mu1 => row.mu1,
                FunctionalKind::HarmonicMean => row.harmonic_mean(),
                FunctionalKind::ArithmeticMean => row.arithmetic_mean(),
            };
            if fem.is_finite() && b.value < fem * (1.0 - tol) {
                out.push((i, b.name, b.value, fem));
            }
        }
    }
    out
}

/// `%.{digits}g`-style formatting.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mant, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -5 || exp >= digits as i32 {
        let mant = trim_zeros(mant);
        return format!("{mant}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Column names of the CSV schema; bound columns follow the order of
/// [`canonical_bounds`].
pub fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "r", "s", "a", "b", "area", "perimeter", "sumsq", "diameter", "excess", "mu1", "mu2", "mu1_err", "mu2_err",
        "level", "converged", "max_residual",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(Functionals::NAMES.iter().map(|s| s.to_string()));
    h.extend(canonical_bounds(0.5, 1.0).iter().map(|b| format!("bound_{}", b.name)));
    h.push("error".into());
    h
}

fn csv_record(row: &BoundReport) -> Vec<String> {
    let f = |v: f64| format_sig(v, CSV_DIGITS);
    let g = &row.geometry;
    let mut rec: Vec<String> = [row.r, row.s, row.a, row.b, g.area, g.perimeter, g.sumsq, g.diameter, g.excess, row.mu1, row.mu2, row.mu1_err, row.mu2_err]
        .iter()
        .map(|&v| f(v))
        .collect();
    rec.push(row.level.to_string());
    rec.push(row.converged.to_string());
    rec.push(f(row.max_residual));
    rec.extend(row.functionals.values().iter().map(|&v| f(v)));
    rec.extend(row.bounds.iter().map(|b| if b.valid { f(b.value) } else { String::new() }));
    rec.push(row.error.clone().unwrap_or_default());
    rec
}

pub fn write_rows<W: Write>(rows: &[BoundReport], format: OutputFormat, out: W) -> Result<()> {
    let io = |e: std::io::Error| Error::Output(e.to_string());
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let csv_err = |e: csv::Error| Error::Output(e.to_string());
            w.write_record(csv_header()).map_err(csv_err)?;
            for row in rows {
                w.write_record(csv_record(row)).map_err(csv_err)?;
            }
            w.flush().map_err(io)?;
        }
        OutputFormat::Json => {
            let mut out = out;
            for row in rows {
                let line = serde_json::to_string(row).map_err(|e| Error::Output(e.to_string()))?;
                writeln!(out, "{line}").map_err(io)?;
            }
            out.flush().map_err(io)?;
        }
    }
    Ok(())
}
