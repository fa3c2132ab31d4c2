//! Uniform refinement of a single triangle.
//!
//! Level `ℓ` splits every edge into `n = 2^ℓ` pieces. Vertices sit on the
//! lattice `v₀ + (i/n)(v₁ − v₀) + (j/n)(v₂ − v₀)` with `i + j ≤ n`, stored row
//! by row in `j`, which keeps the matrix profile close to `n` per row. The
//! elements coincide with those of `ℓ` rounds of midpoint subdivision.

use crate::error::{Error, Result};
use crate::geometry::{Point, Triangle};

pub const MAX_LEVEL: u8 = 9;

#[derive(Debug, Clone)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    /// Counter-clockwise vertex triples.
    pub elements: Vec<[usize; 3]>,
    pub level: u8,
}

impl Mesh {
    /// Edge subdivisions `2^level`.
    pub fn divisions(&self) -> usize {
        1 << self.level
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Index of lattice point `(i, j)`.
    pub fn lattice_index(&self, i: usize, j: usize) -> usize {
        lattice_index(self.divisions(), i, j)
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.elements[e].map(|k| self.vertices[k]);
        0.5 * (b - a).perp(&(c - a))
    }
}

fn lattice_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i + j <= n);
    j * (n + 1) - j * (j.saturating_sub(1)) / 2 + i
}

pub fn refine(t: &Triangle, level: u8) -> Result<Mesh> {
    if level > MAX_LEVEL {
        return Err(Error::LevelOutOfRange { level, max: MAX_LEVEL });
    }
    let [p0, p1, p2] = *t.counter_clockwise().vertices();
    let n = 1usize << level;
    let e1 = (p1 - p0) / n as f64;
    let e2 = (p2 - p0) / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for j in 0..=n {
        for i in 0..=(n - j) {
            vertices.push(p0 + e1 * i as f64 + e2 * j as f64);
        }
    }
    let mut elements = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..(n - j) {
            elements.push([
                lattice_index(n, i, j),
                lattice_index(n, i + 1, j),
                lattice_index(n, i, j + 1),
            ]);
            if i + j + 2 <= n {
                elements.push([
                    lattice_index(n, i + 1, j),
                    lattice_index(n, i + 1, j + 1),
                    lattice_index(n, i, j + 1),
                ]);
            }
        }
    }
    Ok(Mesh { vertices, elements, level })
}

/// Piecewise-linear interpolation of a nodal vector from level `ℓ` to `ℓ + 1`.
pub fn prolongate(coarse: &Mesh, fine: &Mesh, values: &[f64]) -> Vec<f64> {
    assert_eq!(fine.level, coarse.level + 1);
    let nf = fine.divisions();
    let c = |i: usize, j: usize| values[coarse.lattice_index(i, j)];
    let mut out = vec![0.0; fine.num_vertices()];
    for jj in 0..=nf {
        for ii in 0..=(nf - jj) {
            let v = match (ii % 2, jj % 2) {
                (0, 0) => c(ii / 2, jj / 2),
                (1, 0) => 0.5 * (c(ii / 2, jj / 2) + c(ii / 2 + 1, jj / 2)),
                (0, 1) => 0.5 * (c(ii / 2, jj / 2) + c(ii / 2, jj / 2 + 1)),
                _ => 0.5 * (c(ii / 2, jj / 2 + 1) + c(ii / 2 + 1, jj / 2)),
            };
            out[fine.lattice_index(ii, jj)] = v;
        }
    }
    out
}
