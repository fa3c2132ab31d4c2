//! Compressed-row symmetric matrices and an envelope (skyline) Cholesky
//! factorization.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col: Vec<usize>,
    pub val: Vec<f64>,
}

impl CsrMatrix {
    /// Zero matrix with the given sorted column pattern per row.
    pub fn from_pattern(pattern: &[Vec<usize>]) -> Self {
        let n = pattern.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut col = Vec::new();
        for row in pattern {
            col.extend_from_slice(row);
            row_ptr.push(col.len());
        }
        let nnz = col.len();
        CsrMatrix { n, row_ptr, col, val: vec![0.0; nnz] }
    }

    fn position(&self, i: usize, j: usize) -> Option<usize> {
        let row = &self.col[self.row_ptr[i]..self.row_ptr[i + 1]];
        row.binary_search(&j).ok().map(|k| self.row_ptr[i] + k)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.position(i, j).map_or(0.0, |k| self.val[k])
    }

    /// Adds `v` at `(i, j)`, which must be in the pattern.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = self.position(i, j).expect("entry outside sparsity pattern");
        self.val[k] += v;
    }

    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.n {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.val[k] * x[self.col[k]];
            }
            y[i] = s;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec(x, &mut y);
        y
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.val[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            let mut r = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                r += self.val[k] * y[self.col[k]];
            }
            s += x[i] * r;
        }
        s
    }

    /// Largest `|A_ij − A_ji|` relative to the largest entry.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.val.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col[k];
                worst = worst.max((self.val[k] - self.get(j, i)).abs());
            }
        }
        worst / scale
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                d[(i, self.col[k])] = self.val[k];
            }
        }
        d
    }

    /// `self + alpha · other`, both on the same pattern.
    pub fn axpy_same_pattern(&self, alpha: f64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.col, other.col);
        let mut out = self.clone();
        for (v, o) in out.val.iter_mut().zip(&other.val) {
            *v += alpha * o;
        }
        out
    }
}

/// Lower-triangular Cholesky factor stored row by row from the first nonzero
/// column of each row to the diagonal.
#[derive(Debug, Clone)]
pub struct SkylineCholesky {
    n: usize,
    first: Vec<usize>,
    start: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n;
        let mut first = vec![0usize; n];
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            let lo = a.col[a.row_ptr[i]..a.row_ptr[i + 1]].iter().copied().filter(|&j| j <= i).min();
            first[i] = lo.unwrap_or(i);
            start[i + 1] = start[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; start[n]];
        for i in 0..n {
            for k in a.row_ptr[i]..a.row_ptr[i + 1] {
                let j = a.col[k];
                if j <= i {
                    data[start[i] + j - first[i]] = a.val[k];
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            let (done, rest) = data.split_at_mut(start[i]);
            let row_i = &mut rest[..i - fi + 1];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let row_j = &done[start[j]..start[j] + (j - fj + 1)];
                let s: f64 = row_i[lo - fi..j - fi]
                    .iter()
                    .zip(&row_j[lo - fj..j - fj])
                    .map(|(x, y)| x * y)
                    .sum();
                row_i[j - fi] = (row_i[j - fi] - s) / row_j[j - fj];
            }
            let s: f64 = row_i[..i - fi].iter().map(|x| x * x).sum();
            let d = row_i[i - fi] - s;
            if !(d > 0.0) {
                return Err(Error::Eigensolver(format!("matrix not positive definite at row {i}")));
            }
            row_i[i - fi] = d.sqrt();
        }
        Ok(SkylineCholesky { n, first, start, data })
    }

    /// Overwrites `b` with `A⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            let s: f64 = row[..i - fi].iter().zip(&b[fi..i]).map(|(l, y)| l * y).sum();
            b[i] = (b[i] - s) / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.start[i]..self.start[i + 1]];
            b[i] /= row[i - fi];
            let xi = b[i];
            for (bk, l) in b[fi..i].iter_mut().zip(&row[..i - fi]) {
                *bk -= l * xi;
            }
        }
    }

    /// Stored entries, a measure of the factor's memory footprint.
    pub fn stored_entries(&self) -> usize {
        self.data.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiagonal(n: usize) -> CsrMatrix {
        let pattern: Vec<Vec<usize>> = (0..n)
            .map(|i| (i.saturating_sub(1)..(i + 2).min(n)).collect())
            .collect();
        let mut a = CsrMatrix::from_pattern(&pattern);
        for i in 0..n {
            a.add(i, i, 4.0);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
                a.add(i + 1, i, -1.0);
            }
        }
        a
    }

    #[test]
    fn skyline_solves_tridiagonal() {
        let a = tridiagonal(50);
        let chol = SkylineCholesky::factor(&a).unwrap();
        let x: Vec<f64> = (0..50).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = a.apply(&x);
        chol.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(&x) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn skyline_matches_dense_on_wide_profile() {
        // arrowhead-ish matrix with long rows
        let n = 12;
        let mut pattern: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut entries = Vec::new();
        for i in 0..n {
            entries.push((i, i, 10.0 + i as f64));
            if i >= 5 {
                entries.push((i, i - 5, 0.7));
                entries.push((i - 5, i, 0.7));
            }
            if i >= 1 {
                entries.push((i, i - 1, -1.3));
                entries.push((i - 1, i, -1.3));
            }
        }
        for &(i, j, _) in &entries {
            pattern[i].push(j);
        }
        for row in pattern.iter_mut() {
            row.sort_unstable();
            row.dedup();
        }
        let mut a = CsrMatrix::from_pattern(&pattern);
        for (i, j, v) in entries {
            a.add(i, j, v);
        }
        let chol = SkylineCholesky::factor(&a).unwrap();
        let b: Vec<f64> = (0..n).map(|i| i as f64 - 3.0).collect();
        let mut x = b.clone();
        chol.solve_in_place(&mut x);
        let dense = a.to_dense().cholesky().unwrap();
        let y = dense.solve(&nalgebra::DVector::from_vec(b));
        for (u, v) in x.iter().zip(y.iter()) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_indefinite() {
        let mut a = tridiagonal(3);
        a.add(1, 1, -10.0);
        assert!(SkylineCholesky::factor(&a).is_err());
    }
}
