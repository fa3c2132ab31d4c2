//! Smallest eigenpairs of the pencil `K x = μ M x`.

use nalgebra::{DMatrix, SymmetricEigen};

use super::sparse::{CsrMatrix, SkylineCholesky};
use crate::error::{Error, Result};

/// Backward-error target for every returned pair.
pub const RESIDUAL_TOL: f64 = 1e-10;
/// Above this the solve is reported as a failure.
pub const RESIDUAL_FAIL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 2000;
/// Stop once the residual has not halved over this many iterations.
const STAGNATION_WINDOW: usize = 40;

#[derive(Debug, Clone)]
pub struct EigenPairs {
    /// Ascending, zero mode included.
    pub values: Vec<f64>,
    /// `M`-orthonormal eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    /// Largest backward error, see [`residuals`].
    pub max_residual: f64,
    pub iterations: usize,
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// Normwise backward errors `‖Kx − μMx‖ / ((‖K‖ + |μ| ‖M‖) ‖x‖)`, with
/// `‖·‖` the max-row-sum norm for the matrices.
pub fn residuals(k: &CsrMatrix, m: &CsrMatrix, values: &[f64], vectors: &[Vec<f64>]) -> Vec<f64> {
    let nk = k.norm_inf();
    let nm = m.norm_inf();
    values
        .iter()
        .zip(vectors)
        .map(|(&mu, x)| {
            let kx = k.apply(x);
            let mx = m.apply(x);
            let r: Vec<f64> = kx.iter().zip(&mx).map(|(a, b)| a - mu * b).collect();
            norm(&r) / ((nk + mu.abs() * nm) * norm(x))
        })
        .collect()
}

/// Full generalized solve through `M = LLᵀ` and the symmetric matrix
/// `L⁻¹ K L⁻ᵀ`; returns the `count` smallest pairs.
pub fn dense_eigs(k: &CsrMatrix, m: &CsrMatrix, count: usize) -> Result<EigenPairs> {
    let n = k.n;
    if count > n {
        return Err(Error::domain(format!("{count} eigenpairs requested from {n} unknowns")));
    }
    let kd = k.to_dense();
    let md = m.to_dense();
    let chol = md
        .cholesky()
        .ok_or_else(|| Error::Eigensolver("mass matrix not positive definite".into()))?;
    let l = chol.l();
    let lk = l
        .solve_lower_triangular(&kd)
        .ok_or_else(|| Error::Eigensolver("singular mass factor".into()))?;
    let mut c = l
        .solve_lower_triangular(&lk.transpose())
        .ok_or_else(|| Error::Eigensolver("singular mass factor".into()))?;
    c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lt = l.transpose();
    let mut values = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for &idx in order.iter().take(count) {
        values.push(eig.eigenvalues[idx]);
        let z = eig.eigenvectors.column(idx).into_owned();
        let x = lt
            .solve_upper_triangular(&z)
            .ok_or_else(|| Error::Eigensolver("singular mass factor".into()))?;
        vectors.push(x.iter().copied().collect());
    }
    let max_residual = residuals(k, m, &values, &vectors).into_iter().fold(0.0, f64::max);
    Ok(EigenPairs { values, vectors, max_residual, iterations: 1 })
}

/// `M`-orthonormalizes `vs` in place by modified Gram–Schmidt (two passes);
/// nearly dependent vectors are replaced by the next fallback.
fn m_orthonormalize(m: &CsrMatrix, vs: &mut Vec<Vec<f64>>, fallback: &mut dyn FnMut(usize) -> Vec<f64>) {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    let mut mout: Vec<Vec<f64>> = Vec::with_capacity(vs.len());
    let mut attempts = 0usize;
    let mut queue: std::collections::VecDeque<Vec<f64>> = vs.drain(..).collect();
    let target = queue.len();
    while out.len() < target {
        let mut v = match queue.pop_front() {
            Some(v) => v,
            None => {
                attempts += 1;
                fallback(attempts)
            }
        };
        let before = m.bilinear(&v, &v).sqrt();
        for _ in 0..2 {
            for (q, mq) in out.iter().zip(&mout) {
                let c = dot(&v, mq);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let mv = m.apply(&v);
        let nv = dot(&v, &mv).sqrt();
        if !(nv > 1e-10 * before) || !nv.is_finite() {
            continue;
        }
        let inv = 1.0 / nv;
        v.iter_mut().for_each(|x| *x *= inv);
        out.push(v);
        mout.push(mv.into_iter().map(|x| x * inv).collect());
    }
    *vs = out;
}

/// Block subspace iteration on `(K + αM)⁻¹ M` with Rayleigh–Ritz in `K`,
/// returning the `count` smallest pairs. `start` seeds the block; its length
/// is the block size and must exceed `count`.
pub fn subspace_eigs(
    k: &CsrMatrix,
    m: &CsrMatrix,
    count: usize,
    shift: f64,
    start: Vec<Vec<f64>>,
) -> Result<EigenPairs> {
    let n = k.n;
    let block = start.len();
    if count >= block || block > n {
        return Err(Error::domain(format!(
            "block size {block} must exceed the {count} requested pairs and not exceed {n} unknowns"
        )));
    }
    if !(shift > 0.0) {
        return Err(Error::Eigensolver(format!("shift {shift} must be positive")));
    }
    let shifted = k.axpy_same_pattern(shift, m);
    let chol = SkylineCholesky::factor(&shifted)?;

    // deterministic fallbacks for vectors lost to dependence
    let mut fallback = |seed: usize| -> Vec<f64> {
        (0..n).map(|i| ((i * (seed + 7) + seed * 13) as f64 * 0.618_033_988_749_894_9).fract() - 0.5).collect()
    };

    let mut x = start;
    m_orthonormalize(m, &mut x, &mut fallback);
    let mut values = vec![0.0; block];
    let mut max_res = f64::INFINITY;
    let mut best = (f64::INFINITY, 0usize);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // Y = (K + αM)⁻¹ M X
        let mut y: Vec<Vec<f64>> = x
            .iter()
            .map(|xi| {
                let mut v = m.apply(xi);
                chol.solve_in_place(&mut v);
                v
            })
            .collect();
        m_orthonormalize(m, &mut y, &mut fallback);
        let ky: Vec<Vec<f64>> = y.iter().map(|v| k.apply(v)).collect();
        let h = DMatrix::from_fn(block, block, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..block).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let mut new_x = vec![vec![0.0; n]; block];
        for (slot, &idx) in order.iter().enumerate() {
            values[slot] = eig.eigenvalues[idx];
            let z = eig.eigenvectors.column(idx);
            let target = &mut new_x[slot];
            for (c, yc) in y.iter().enumerate() {
                let w = z[c];
                for (t, v) in target.iter_mut().zip(yc) {
                    *t += w * v;
                }
            }
        }
        x = new_x;
        let res = residuals(k, m, &values[..count], &x[..count]);
        max_res = res.into_iter().fold(0.0, f64::max);
        if max_res < RESIDUAL_TOL {
            break;
        }
        if max_res < 0.5 * best.0 {
            best = (max_res, iterations);
        } else if iterations - best.1 > STAGNATION_WINDOW {
            break;
        }
    }
    if !(max_res < RESIDUAL_FAIL) {
        return Err(Error::Eigensolver(format!(
            "subspace iteration stalled at residual {max_res:e} after {iterations} iterations"
        )));
    }
    x.truncate(count);
    values.truncate(count);
    Ok(EigenPairs { values, vectors: x, max_residual: max_res, iterations })
}
