//! P1 stiffness and consistent mass matrices.

use super::mesh::Mesh;
use super::sparse::CsrMatrix;

/// Element matrices of the linear triangle `(p₀, p₁, p₂)`:
/// `K_ij = (∇φ_i · ∇φ_j) A` and `M_ij = A (1 + δ_ij) / 12`.
pub fn element_matrices(p: [nalgebra::Point2<f64>; 3]) -> ([[f64; 3]; 3], [[f64; 3]; 3]) {
    let area = 0.5 * (p[1] - p[0]).perp(&(p[2] - p[0]));
    // gradient of φ_i is the inward normal of the opposite edge over 2A
    let edge = |i: usize| p[(i + 2) % 3] - p[(i + 1) % 3];
    let mut k = [[0.0; 3]; 3];
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = edge(i).dot(&edge(j)) / (4.0 * area);
            m[i][j] = area * if i == j { 2.0 } else { 1.0 } / 12.0;
        }
    }
    (k, m)
}

/// Global stiffness and mass matrices on a shared sparsity pattern.
pub fn assemble(mesh: &Mesh) -> (CsrMatrix, CsrMatrix) {
    let n = mesh.num_vertices();
    let mut pattern: Vec<Vec<usize>> = vec![Vec::with_capacity(7); n];
    for e in &mesh.elements {
        for &a in e {
            for &b in e {
                pattern[a].push(b);
            }
        }
    }
    for row in pattern.iter_mut() {
        row.sort_unstable();
        row.dedup();
    }
    let mut k = CsrMatrix::from_pattern(&pattern);
    let mut m = CsrMatrix::from_pattern(&pattern);
    for e in &mesh.elements {
        let (ke, me) = element_matrices(e.map(|i| mesh.vertices[i]));
        for a in 0..3 {
            for b in 0..3 {
                k.add(e[a], e[b], ke[a][b]);
                m.add(e[a], e[b], me[a][b]);
            }
        }
    }
    (k, m)
}
