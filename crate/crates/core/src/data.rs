//! Bundled example data.
//!
//! Irrational entries are computed from their closed forms at full double
//! precision; decimal tables are copied verbatim.

use std::f64::consts::PI;

use crate::linalg::Matrix;

/// Extreme rays `(cos 2πi/5, sin 2πi/5, √(−cos 4π/5))`, i = 0..4, of a cone over a regular pentagon.
pub fn pentagon_rays() -> Vec<Vec<f64>> {
    let h = (-(4.0 * PI / 5.0).cos()).sqrt();
    (0..5)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / 5.0;
            vec![t.cos(), t.sin(), h]
        })
        .collect()
}

/// The circulant PSD slack of the pentagon cone: diagonal `1 + cos(π/5)`,
/// cyclic neighbours `√5/2`, zeros elsewhere.
pub fn pentagon_slack() -> Matrix {
    let diag = 1.0 + (PI / 5.0).cos();
    let adj = 5f64.sqrt() / 2.0;
    Matrix::from_fn(5, 5, |i, j| {
        let d = (i + 5 - j) % 5;
        match d {
            0 => diag,
            1 | 4 => adj,
            _ => 0.0,
        }
    })
}

/// Seven rays of the cone over a negatively self-polar roofed triangular prism, in the listed order.
pub fn prism_rays() -> Vec<Vec<f64>> {
    let a = -1.0 / 2f64.sqrt();
    let b = (1.5f64).sqrt();
    let c = 2f64.sqrt();
    vec![
        vec![1.0, a, b, 0.0],
        vec![1.0, a, -b, 0.0],
        vec![1.0, c, 0.0, 0.0],
        vec![1.0, a, b, -1.0],
        vec![1.0, a, -b, -1.0],
        vec![1.0, c, 0.0, -1.0],
        vec![1.0, 0.0, 0.0, 1.0],
    ]
}

/// Rank-4 PSD slack of the prism cone; equals the Gram matrix of [`prism_rays`].
pub fn prism_slack() -> Matrix {
    int_matrix(&[
        [3, 0, 0, 3, 0, 0, 1],
        [0, 3, 0, 0, 3, 0, 1],
        [0, 0, 3, 0, 0, 3, 1],
        [3, 0, 0, 4, 1, 1, 0],
        [0, 3, 0, 1, 4, 1, 0],
        [0, 0, 3, 1, 1, 4, 0],
        [1, 1, 1, 0, 0, 0, 2],
    ])
}

/// A 7x7 rank-4 extreme DNN matrix from the Hamilton-Jester/Li construction. Not a slack matrix.
pub fn hl96() -> Matrix {
    int_matrix(&[
        [2, 1, 0, 0, 2, 0, 2],
        [1, 2, 1, 0, 0, 0, 0],
        [0, 1, 2, 2, 0, 2, 0],
        [0, 0, 2, 3, 1, 3, 1],
        [2, 0, 0, 1, 3, 1, 3],
        [0, 0, 2, 3, 1, 4, 0],
        [2, 0, 0, 1, 3, 0, 4],
    ])
}

/// The congruence triple `(A, B, M)` with `A = M·B·Mᵀ`, where `A` is [`hl96`],
/// `B` an 8x8 PSD slack of a self-dual cone and `M` nonnegative.
pub fn congruence_triple() -> (Matrix, Matrix, Matrix) {
    let b = int_matrix(&[
        [2, 1, 0, 0, 2, 2, 0, 2],
        [1, 2, 1, 0, 0, 1, 0, 0],
        [0, 1, 2, 2, 0, 0, 2, 0],
        [0, 0, 2, 3, 1, 0, 3, 1],
        [2, 0, 0, 1, 12, 8, 4, 0],
        [2, 1, 0, 0, 8, 6, 2, 0],
        [0, 0, 2, 3, 4, 2, 4, 0],
        [2, 0, 0, 1, 0, 0, 0, 4],
    ]);
    let mut m = Matrix::zeros(7, 8);
    for i in 0..4 {
        m[(i, i)] = 1.0;
    }
    m[(4, 4)] = 0.25;
    m[(4, 7)] = 0.75;
    m[(5, 6)] = 1.0;
    m[(6, 7)] = 1.0;
    (hl96(), b, m)
}

/// Approximate rank-4 PSD matrix with unit diagonal on a 10-vertex
/// strongly involutive support, as printed to five decimals.
pub fn ten_vertex_matrix() -> Matrix {
    const T: [[f64; 10]; 10] = [
        [1.0, 0.85962, 0.63085, 0.60758, 0.0, 0.0, 0.32899, 0.63085, 0.0, 0.60758],
        [0.85962, 1.0, 0.85962, 0.41395, 0.41395, 0.0, 0.0, 0.85962, 0.0, 0.41395],
        [0.63085, 0.85962, 1.0, 0.60758, 0.60758, 0.0, 0.0, 0.63085, 0.32899, 0.0],
        [0.60758, 0.41395, 0.60758, 1.0, 0.0, 0.0, 0.54149, 0.0, 0.54149, 0.0],
        [0.0, 0.41395, 0.60758, 0.0, 1.0, 0.54149, 0.0, 0.60758, 0.54149, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.54149, 1.0, 0.70679, 0.32899, 0.70679, 0.54149],
        [0.32899, 0.0, 0.0, 0.54149, 0.0, 0.70679, 1.0, 0.0, 0.70679, 0.54149],
        [0.63085, 0.85962, 0.63085, 0.0, 0.60758, 0.32899, 0.0, 1.0, 0.0, 0.60758],
        [0.0, 0.0, 0.32899, 0.54149, 0.54149, 0.70679, 0.70679, 0.0, 1.0, 0.0],
        [0.60758, 0.41395, 0.0, 0.0, 0.0, 0.54149, 0.54149, 0.60758, 0.0, 1.0],
    ];
    Matrix::from_rows(&T).expect("constant table is rectangular")
}

/// Vertices (as columns) of the approximately negatively self-polar polytope
/// extracted from [`ten_vertex_matrix`], as printed to five significant digits.
pub fn ten_vertex_polytope_transposed() -> Matrix {
    const W: [[f64; 10]; 3] = [
        [-0.44578, -0.62782, -0.44578, 0.21387, 0.21387, 1.5928, 1.5928, -0.44578, 1.5928, 0.21387],
        [0.42199, 0.0, 0.1889, 1.4123, -0.97561, -0.90532, 0.62537, -0.6109, 0.27994, -0.43672],
        [0.46176, 0.0, -0.59634, -0.31113, -1.0676, 0.19943, 0.68431, 0.13458, -0.88375, 1.3787],
    ];
    Matrix::from_rows(&W).expect("constant table is rectangular")
}

/// Generators of the cone over the regular `k`-gon at height `h`: `(cos 2πi/k, sin 2πi/k, h)`.
pub fn polygon_rays(k: usize, height: f64) -> Vec<Vec<f64>> {
    (0..k)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / k as f64;
            vec![t.cos(), t.sin(), height]
        })
        .collect()
}

/// Height at which the cone over the regular `k`-gon (k odd) is self-dual for the Euclidean product.
pub fn polygon_self_dual_height(k: usize) -> f64 {
    (-(PI * (k as f64 - 1.0) / k as f64).cos()).sqrt()
}

/// Rays `(±1, ±1, 1)` of the cone over the square, in cyclic order.
pub fn square_rays() -> Vec<Vec<f64>> {
    vec![
        vec![1.0, 1.0, 1.0],
        vec![-1.0, 1.0, 1.0],
        vec![-1.0, -1.0, 1.0],
        vec![1.0, -1.0, 1.0],
    ]
}

/// 0/1 support with ones on the diagonal and between cyclic neighbours of an `n`-cycle.
pub fn cycle_support(n: usize) -> Vec<Vec<bool>> {
    (0..n)
        .map(|i| (0..n).map(|j| i == j || (i + 1) % n == j || (j + 1) % n == i).collect())
        .collect()
}

fn int_matrix<const C: usize>(rows: &[[i32; C]]) -> Matrix {
    let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| f64::from(v)).collect()).collect();
    Matrix::from_rows(&rows).expect("constant table is rectangular")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pentagon_slack_is_gram_of_rays() {
        let u = Matrix::from_rows(&pentagon_rays()).unwrap();
        let diff = u.gram().sub(&pentagon_slack()).unwrap();
        assert!(diff.max_abs() < 1e-14);
    }

    #[test]
    fn prism_slack_is_gram_of_rays() {
        let u = Matrix::from_rows(&prism_rays()).unwrap();
        assert!(u.gram().sub(&prism_slack()).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn polygon_height_reproduces_pentagon() {
        let h = polygon_self_dual_height(5);
        assert!((h - pentagon_rays()[0][2]).abs() < 1e-15);
    }

    #[test]
    fn ten_vertex_table_is_symmetric_with_unit_diagonal() {
        let m = ten_vertex_matrix();
        m.ensure_symmetric().unwrap();
        assert!(m.diagonal().iter().all(|&d| d == 1.0));
    }
}
