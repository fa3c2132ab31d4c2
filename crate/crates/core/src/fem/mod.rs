//! Conforming P1 finite elements for the Neumann Laplacian on a triangle.
//!
//! Discrete eigenvalues approximate the exact ones from above and converge
//! like `h²`, so two consecutive levels are combined by Richardson
//! extrapolation `μ_ext = (4μ_ℓ − μ_{ℓ−1}) / 3` with error estimate
//! `|μ_ext − μ_ℓ|`.

pub mod assembly;
pub mod eigen;
pub mod mesh;
pub mod sparse;

use serde::Serialize;

pub use assembly::assemble;
pub use mesh::{prolongate, refine, Mesh, MAX_LEVEL};

use crate::error::{Error, Result};
use crate::geometry::{canonical_form, Triangle};
use crate::trial_bounds::{all_bounds, min_bound, FunctionalKind};
use eigen::{dense_eigs, subspace_eigs, EigenPairs};

/// Levels up to this use the dense generalized solver under [`SolverKind::Auto`].
pub const DENSE_MAX_LEVEL: u8 = 4;
/// Aspect ratio `l₁ / h` (longest side over the height onto it) above which
/// levels below [`THIN_MIN_LEVEL`] are refused.
pub const THIN_ASPECT: f64 = 20.0;
pub const THIN_MIN_LEVEL: u8 = 4;
/// Eigenvalues below this fraction of the next one are the constant mode.
pub const ZERO_MODE_RATIO: f64 = 1e-8;
pub const DEFAULT_LEVEL: u8 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum SolverKind {
    #[default]
    Auto,
    Dense,
    Sparse,
}

/// One discretization level.
#[derive(Debug, Clone)]
pub struct LevelSolve {
    pub mesh: Mesh,
    /// Nonzero eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// The discarded near-zero eigenvalue.
    pub zero_mode: f64,
    pub max_residual: f64,
    /// Eigenvectors including the constant mode, used to seed finer levels.
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEstimate {
    /// `μ₁ … μ_k` at the finest level, for the triangle as given.
    pub eigenvalues: Vec<f64>,
    /// The same at the next coarser level, when one was solved.
    pub coarse: Option<Vec<f64>>,
    pub extrapolated: Vec<f64>,
    pub error_estimates: Vec<f64>,
    pub levels: Vec<u8>,
    /// Similarity ratio to the canonical triangle (given = scale · canonical).
    pub scale: f64,
    /// `l₁ / h`.
    pub aspect_ratio: f64,
    /// Discarded zero eigenvalue relative to `μ₁`, finest level.
    pub zero_mode_ratio: f64,
    pub max_residual: f64,
    pub converged: bool,
    /// Relative agreement reached between successive extrapolations, when tracked.
    pub achieved_rel_tol: Option<f64>,
}

impl SpectrumEstimate {
    /// Extrapolated values converted to the canonical triangle.
    pub fn canonical_extrapolated(&self) -> Vec<f64> {
        self.extrapolated.iter().map(|v| v * self.scale * self.scale).collect()
    }

    pub fn canonical_errors(&self) -> Vec<f64> {
        self.error_estimates.iter().map(|v| v * self.scale * self.scale).collect()
    }

    pub fn finest_level(&self) -> u8 {
        *self.levels.last().expect("at least one level")
    }
}

/// `l₁ / h` with `h` the height onto the longest side.
pub fn aspect_ratio(t: &Triangle) -> f64 {
    let g = t.summary();
    g.diameter * g.diameter / (2.0 * g.area)
}

fn guard_level(t: &Triangle, level: u8) -> Result<()> {
    if level > MAX_LEVEL {
        return Err(Error::LevelOutOfRange { level, max: MAX_LEVEL });
    }
    let aspect = aspect_ratio(t);
    if aspect > THIN_ASPECT && level < THIN_MIN_LEVEL {
        return Err(Error::domain(format!(
            "aspect ratio {aspect:.1} exceeds {THIN_ASPECT}; level {level} is below the minimum {THIN_MIN_LEVEL}"
        )));
    }
    Ok(())
}

fn block_size(k: usize) -> usize {
    k + 1 + (k / 2).max(5)
}

/// Monomials `x^a y^b` in coordinates centred and scaled to the triangle,
/// in order of total degree.
fn polynomial_start(mesh: &Mesh, count: usize) -> Vec<Vec<f64>> {
    let (mut cx, mut cy) = (0.0, 0.0);
    for p in &mesh.vertices {
        cx += p.x;
        cy += p.y;
    }
    let nv = mesh.vertices.len() as f64;
    cx /= nv;
    cy /= nv;
    let r = mesh
        .vertices
        .iter()
        .map(|p| ((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut out = Vec::with_capacity(count);
    let mut degree = 0;
    'outer: loop {
        for b in 0..=degree {
            let a = degree - b;
            out.push(
                mesh.vertices
                    .iter()
                    .map(|p| ((p.x - cx) / r).powi(a as i32) * ((p.y - cy) / r).powi(b as i32))
                    .collect(),
            );
            if out.len() == count {
                break 'outer;
            }
        }
        degree += 1;
    }
    out
}

fn split_zero_mode(pairs: EigenPairs, k: usize) -> Result<(f64, Vec<f64>, f64, Vec<Vec<f64>>)> {
    let EigenPairs { values, vectors, max_residual, .. } = pairs;
    let zeros = values
        .windows(2)
        .filter(|w| w[0].abs() < ZERO_MODE_RATIO * w[1].abs())
        .count();
    let first_is_zero = values.len() >= 2 && values[0].abs() < ZERO_MODE_RATIO * values[1].abs();
    if zeros != 1 || !first_is_zero {
        return Err(Error::Eigensolver(format!(
            "expected exactly one constant mode, spectrum starts {:?}",
            &values[..values.len().min(4)]
        )));
    }
    let nonzero = values[1..=k].to_vec();
    Ok((values[0], nonzero, max_residual, vectors))
}

/// Lowest `k` nonzero eigenvalues at a single level. `seed` (the next coarser
/// level) provides the starting block for the iterative solver.
pub fn solve_level(
    t: &Triangle,
    level: u8,
    k: usize,
    solver: SolverKind,
    seed: Option<&LevelSolve>,
) -> Result<LevelSolve> {
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    guard_level(t, level)?;
    let mesh = refine(t, level)?;
    let dof = mesh.num_vertices();
    if k + 1 > dof {
        return Err(Error::domain(format!("k = {k} exceeds the {} nonzero modes at level {level}", dof - 1)));
    }
    let (kmat, mmat) = assemble(&mesh);
    let block = block_size(k);
    let use_dense = match solver {
        SolverKind::Dense => true,
        SolverKind::Sparse => block + 2 > dof,
        SolverKind::Auto => level <= DENSE_MAX_LEVEL || block + 2 > dof,
    };
    let pairs = if use_dense {
        dense_eigs(&kmat, &mmat, (k + 1).max(block.min(dof)))?
    } else {
        let mut start: Vec<Vec<f64>> = Vec::with_capacity(block);
        if let Some(coarse) = seed.filter(|c| c.mesh.level + 1 == level) {
            for v in coarse.vectors.iter().take(block) {
                start.push(prolongate(&coarse.mesh, &mesh, v));
            }
        }
        if start.len() < block {
            let poly = polynomial_start(&mesh, block);
            start.extend(poly.into_iter().take(block - start.len()));
        }
        let guess = seed
            .and_then(|c| c.eigenvalues.first().copied())
            .or_else(|| min_bound(&all_bounds(t), FunctionalKind::Mu1).map(|b| b.value))
            .unwrap_or(1.0);
        subspace_eigs(&kmat, &mmat, k + 1, 0.1 * guess, start)?
    };
    let (zero_mode, mut eigenvalues, max_residual, vectors) = split_zero_mode(pairs, k)?;
    eigenvalues.truncate(k);
    Ok(LevelSolve { mesh, eigenvalues, zero_mode, max_residual, vectors })
}

fn richardson(fine: &[f64], coarse: &[f64]) -> (Vec<f64>, Vec<f64>) {
    fine.iter()
        .zip(coarse)
        .map(|(f, c)| {
            let e = (4.0 * f - c) / 3.0;
            (e, (e - f).abs())
        })
        .unzip()
}

fn estimate_from(t: &Triangle, fine: &LevelSolve, coarse: Option<&LevelSolve>) -> SpectrumEstimate {
    let (extrapolated, error_estimates, levels) = match coarse {
        Some(c) => {
            let (e, err) = richardson(&fine.eigenvalues, &c.eigenvalues);
            (e, err, vec![c.mesh.level, fine.mesh.level])
        }
        None => (
            fine.eigenvalues.clone(),
            vec![f64::INFINITY; fine.eigenvalues.len()],
            vec![fine.mesh.level],
        ),
    };
    let max_residual = coarse.map_or(fine.max_residual, |c| c.max_residual.max(fine.max_residual));
    SpectrumEstimate {
        eigenvalues: fine.eigenvalues.clone(),
        coarse: coarse.map(|c| c.eigenvalues.clone()),
        extrapolated,
        error_estimates,
        levels,
        scale: canonical_form(t).scale,
        aspect_ratio: aspect_ratio(t),
        zero_mode_ratio: fine.zero_mode.abs() / fine.eigenvalues[0],
        max_residual,
        converged: true,
        achieved_rel_tol: None,
    }
}

/// First `k` nonzero Neumann eigenvalues of `t` at `level`, extrapolated with
/// `level − 1` when `level ≥ 1`.
pub fn neumann_eigs(t: &Triangle, level: u8, k: usize) -> Result<SpectrumEstimate> {
    neumann_eigs_with(t, level, k, SolverKind::Auto)
}

pub fn neumann_eigs_with(t: &Triangle, level: u8, k: usize, solver: SolverKind) -> Result<SpectrumEstimate> {
    guard_level(t, level)?;
    if level == 0 {
        let fine = solve_level(t, 0, k, solver, None)?;
        return Ok(estimate_from(t, &fine, None));
    }
    let coarse_level = level - 1;
    // a thin triangle may refuse the coarse level; fall back to a single level
    let coarse = match solve_level(t, coarse_level, k, solver, None) {
        Ok(c) => Some(c),
        Err(Error::Domain(_)) if guard_level(t, coarse_level).is_err() => None,
        Err(e) => return Err(e),
    };
    let fine = solve_level(t, level, k, solver, coarse.as_ref())?;
    Ok(estimate_from(t, &fine, coarse.as_ref()))
}

/// Refines until successive extrapolations agree to `rel_tol` for all `k`
/// eigenvalues or `MAX_LEVEL` is reached.
pub fn converged_eigs(t: &Triangle, k: usize, rel_tol: f64) -> Result<SpectrumEstimate> {
    converged_eigs_capped(t, k, rel_tol, MAX_LEVEL)
}

pub fn converged_eigs_capped(t: &Triangle, k: usize, rel_tol: f64, cap: u8) -> Result<SpectrumEstimate> {
    if !(rel_tol >= 1e-6) {
        return Err(Error::Config(format!("rel_tol {rel_tol} must be at least 1e-6")));
    }
    if cap > MAX_LEVEL {
        return Err(Error::LevelOutOfRange { level: cap, max: MAX_LEVEL });
    }
    let start = if aspect_ratio(t) > THIN_ASPECT { THIN_MIN_LEVEL } else { 2 };
    if cap < start + 2 {
        return Err(Error::Config(format!("level cap {cap} leaves fewer than three levels above {start}")));
    }
    let mut prev = solve_level(t, start, k, SolverKind::Auto, None)?;
    let mut cur = solve_level(t, start + 1, k, SolverKind::Auto, Some(&prev))?;
    let mut last_ext = richardson(&cur.eigenvalues, &prev.eigenvalues).0;
    let mut level = start + 1;
    loop {
        level += 1;
        let next = solve_level(t, level, k, SolverKind::Auto, Some(&cur))?;
        let ext = richardson(&next.eigenvalues, &cur.eigenvalues).0;
        let achieved = ext
            .iter()
            .zip(&last_ext)
            .map(|(a, b)| ((a - b) / a).abs())
            .fold(0.0, f64::max);
        prev = cur;
        cur = next;
        last_ext = ext;
        if achieved <= rel_tol || level >= cap {
            let mut est = estimate_from(t, &cur, Some(&prev));
            est.converged = achieved <= rel_tol;
            est.achieved_rel_tol = Some(achieved);
            return Ok(est);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::EQUILATERAL_MU;
    use std::f64::consts::PI;

    #[test]
    fn right_isosceles_levels() {
        let t = Triangle::from_coords([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]).unwrap();
        let est = neumann_eigs(&t, 5, 2).unwrap();
        let pi2 = PI * PI;
        assert!((est.extrapolated[0] - pi2).abs() / pi2 < 1e-3);
        assert!((est.extrapolated[1] - 2.0 * pi2).abs() / (2.0 * pi2) < 2e-3);
        assert!(est.eigenvalues[0] >= pi2 && est.coarse.as_ref().unwrap()[0] >= est.eigenvalues[0]);
    }

    #[test]
    fn equilateral_double_eigenvalue() {
        let est = neumann_eigs(&Triangle::unit_equilateral(), 6, 2).unwrap();
        for v in &est.extrapolated {
            assert!((v - EQUILATERAL_MU).abs() / EQUILATERAL_MU < 1e-4, "{v}");
        }
        assert!(est.zero_mode_ratio < 1e-10, "{}", est.zero_mode_ratio);
    }

    #[test]
    fn thin_guard() {
        let t = Triangle::canonical(0.5, 0.05).unwrap();
        assert!(aspect_ratio(&t) > THIN_ASPECT);
        assert!(neumann_eigs(&t, 3, 1).is_err());
        assert!(neumann_eigs(&t, 5, 1).is_ok());
    }

    #[test]
    fn k_too_large() {
        let t = Triangle::unit_equilateral();
        assert!(matches!(neumann_eigs(&t, 1, 10), Err(Error::Domain(_))));
        assert!(neumann_eigs(&t, 1, 0).is_err());
    }
}
