//! Dense numerical kernels.
//!
//! Everything here works on a small row-major [`Matrix`] type. The symmetric
//! eigensolver is cyclic Jacobi and the singular values come from one-sided
//! (Hestenes) Jacobi, so small singular values are resolved relative to the
//! largest one instead of being squared away through `AᵀA`.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric: |A[{i}][{j}] - A[{j}][{i}]| = {asymmetry:e}")]
    Asymmetric { i: usize, j: usize, asymmetry: f64 },
    #[error("entry buffer has {len} values, expected {rows}x{cols} = {}", rows * cols)]
    BadShape { rows: usize, cols: usize, len: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    RaggedRows { row: usize, len: usize, expected: usize },
    #[error("target rank {rank} is outside 1..={n}")]
    BadRank { rank: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
}

/// Dense real matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::BadShape { rows, cols, len: data.len() });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from equally long rows. An empty slice gives a 0x0 matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::RaggedRows { row: i, len: r.len(), expected: cols });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: rows.len(), cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Matrix::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// `self · selfᵀ`, computed on the upper triangle and mirrored so the result is exactly symmetric.
    pub fn gram(&self) -> Matrix {
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot(self.row(i), self.row(j));
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.zip_with(other, |a, b| a + b)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix, LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// Max-abs-entry norm, written ‖A‖∞ throughout the crate.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    /// Rows permuted so that row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(perm[i], j)])
    }

    /// Columns permuted so that column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_cols(&self, perm: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(i, perm[j])])
    }

    /// `P·A·Pᵀ` for the permutation sending index `i` of the result to `perm[i]`.
    pub fn permute_symmetric(&self, perm: &[usize]) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| self[(perm[i], perm[j])])
    }

    pub fn check_finite(&self) -> Result<(), LinalgError> {
        match self.data.iter().position(|v| !v.is_finite()) {
            Some(p) => Err(LinalgError::NonFinite { i: p / self.cols.max(1), j: p % self.cols.max(1) }),
            None => Ok(()),
        }
    }

    /// Largest `|A_ij − A_ji|` together with its position.
    pub fn asymmetry(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                let d = (self[(i, j)] - self[(j, i)]).abs();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    /// Rejects non-square input and any pair with `|A_ij − A_ji| > 1e-12·max(1, |A_ij|)`.
    pub fn ensure_symmetric(&self) -> Result<(), LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        self.check_finite()?;
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                let a = self[(i, j)];
                let d = (a - self[(j, i)]).abs();
                if d > tol::SYMMETRY * a.abs().max(1.0) {
                    return Err(LinalgError::Asymmetric { i, j, asymmetry: d });
                }
            }
        }
        Ok(())
    }

    /// `(A + Aᵀ)/2`.
    pub fn symmetrized(&self) -> Matrix {
        Matrix::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for v in self.row(i) {
                write!(f, "{v:>12.6} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Eigenpairs of a symmetric matrix, values sorted in descending order.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the same order as `values`.
    pub vectors: Matrix,
}

impl EigenDecomposition {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }

    /// `Σ_k f(λ_k) q_k q_kᵀ` over the first `keep` pairs, mirrored for exact symmetry.
    pub fn reconstruct_with(&self, keep: usize, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.vectors.rows();
        let weights: Vec<f64> = self.values.iter().take(keep).map(|&v| f(v)).collect();
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for (k, w) in weights.iter().enumerate() {
                    if *w != 0.0 {
                        s += self.vectors[(i, k)] * w * self.vectors[(j, k)];
                    }
                }
                out[(i, j)] = s;
                out[(j, i)] = s;
            }
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(self.values.len(), |v| v)
    }
}

const MAX_JACOBI_SWEEPS: usize = 100;

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Sweeps stop once the off-diagonal Frobenius norm drops below
/// `1e-13·‖A‖_F`. Eigenvectors are sign-normalized so that their first
/// component of magnitude above `1e-12` is positive, which makes the output
/// a deterministic function of the input.
pub fn sym_eigen(a: &Matrix) -> Result<EigenDecomposition, LinalgError> {
    a.ensure_symmetric()?;
    let n = a.rows();
    let mut w = a.symmetrized();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius();
    let target = tol::JACOBI_OFF_DIAGONAL * scale;

    if scale > 0.0 {
        for _ in 0..MAX_JACOBI_SWEEPS {
            let off = off_diagonal_norm(&w);
            if off <= target {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = w[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    rotate(&mut w, &mut v, p, q, c, s);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].total_cmp(&w[(i, i)]).then(i.cmp(&j)));
    let values: Vec<f64> = order.iter().map(|&k| w[(k, k)]).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let sign = (0..n)
            .map(|i| v[(i, k)])
            .find(|x| x.abs() > 1e-12)
            .map_or(1.0, |x| x.signum());
        for i in 0..n {
            vectors[(i, col)] = sign * v[(i, k)];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(w: &Matrix) -> f64 {
    let n = w.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += w[(i, j)] * w[(i, j)];
            }
        }
    }
    s.sqrt()
}

// Applies the rotation that annihilates w[p][q]: W <- JᵀWJ, V <- VJ.
fn rotate(w: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = w.rows();
    let app = w[(p, p)];
    let aqq = w[(q, q)];
    let apq = w[(p, q)];
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = w[(k, p)];
        let akq = w[(k, q)];
        let nkp = c * akp - s * akq;
        let nkq = s * akp + c * akq;
        w[(k, p)] = nkp;
        w[(p, k)] = nkp;
        w[(k, q)] = nkq;
        w[(q, k)] = nkq;
    }
    w[(p, p)] = c * c * app - 2.0 * s * c * apq + s * s * aqq;
    w[(q, q)] = s * s * app + 2.0 * s * c * apq + c * c * aqq;
    w[(p, q)] = 0.0;
    w[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Singular values (descending) and the right singular vectors as columns of an orthogonal matrix.
pub struct RightSvd {
    pub singular_values: Vec<f64>,
    pub right: Matrix,
}

/// One-sided Jacobi SVD, keeping only what rank and null-space queries need.
pub fn right_svd(a: &Matrix) -> RightSvd {
    let (m, n) = (a.rows(), a.cols());
    // Work on columns of A.
    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v = Matrix::identity(n);
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]);
                let beta = dot(&cols[q], &cols[q]);
                let gamma = dot(&cols[p], &cols[q]);
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..m {
                    let up = cols[p][i];
                    let uq = cols[q][i];
                    cols[p][i] = c * up - s * uq;
                    cols[q][i] = s * up + c * uq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = c * vp - s * vq;
                    v[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    RightSvd {
        singular_values: order.iter().map(|&k| norms[k]).collect(),
        right: Matrix::from_fn(n, n, |i, j| v[(i, order[j])]),
    }
}

pub fn singular_values(a: &Matrix) -> Vec<f64> {
    // Work on the shorter side; the nonzero singular values agree.
    if a.rows() < a.cols() {
        right_svd(&a.transpose()).singular_values
    } else {
        right_svd(a).singular_values
    }
}

/// Number of singular values above `tol` times the largest one.
pub fn numeric_rank(a: &Matrix, tol: f64) -> usize {
    let sv = singular_values(a);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * top).count()
}

/// Orthonormal basis (as vectors) of the right null space, using a relative singular-value cut.
pub fn null_space(a: &Matrix, tol: f64) -> Vec<Vec<f64>> {
    let n = a.cols();
    let svd = right_svd(a);
    let top = svd.singular_values.first().copied().unwrap_or(0.0);
    (0..n)
        .filter(|&k| top == 0.0 || svd.singular_values[k] <= tol * top)
        .map(|k| svd.right.column(k))
        .collect()
}

/// Frobenius-nearest PSD matrix: negative eigenvalues clipped to zero.
pub fn psd_project(a: &Matrix) -> Result<Matrix, LinalgError> {
    let eig = sym_eigen(a)?;
    Ok(eig.reconstruct_with(eig.values.len(), |v| v.max(0.0)))
}

/// Nearest PSD matrix of rank at most `rank`: the `rank` largest eigenvalues
/// are kept (clipped at zero) and the rest are discarded.
pub fn low_rank_project(a: &Matrix, rank: usize) -> Result<Matrix, LinalgError> {
    let n = a.rows();
    if rank == 0 || rank > n {
        return Err(LinalgError::BadRank { rank, n });
    }
    let eig = sym_eigen(a)?;
    Ok(eig.reconstruct_with(rank, |v| v.max(0.0)))
}

/// Top-`rank` spectral factor `X` (n×rank) with `X·Xᵀ ≈ A`, columns scaled by `√λ`.
pub fn spectral_factor(eig: &EigenDecomposition, rank: usize) -> Matrix {
    let n = eig.vectors.rows();
    Matrix::from_fn(n, rank, |i, k| eig.vectors[(i, k)] * eig.values[k].max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pentagon() -> Matrix {
        crate::data::pentagon_slack()
    }

    #[test]
    fn identity_eigenvalues() {
        let e = sym_eigen(&Matrix::identity(3)).unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pentagon_spectrum_matches_circulant_formula() {
        // Circulant oracle: a + 2b·cos(2πk/5).
        let a = 1.0 + (std::f64::consts::PI / 5.0).cos();
        let b = 5f64.sqrt() / 2.0;
        let mut expected: Vec<f64> = (0..5)
            .map(|k| a + 2.0 * b * (2.0 * std::f64::consts::PI * k as f64 / 5.0).cos())
            .collect();
        expected.sort_by(|x, y| y.total_cmp(x));
        let e = sym_eigen(&pentagon()).unwrap();
        for (got, want) in e.values.iter().zip(&expected) {
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
        assert!((e.values[0] - 4.0450850).abs() < 1e-7);
        assert!((e.values[1] - 2.5).abs() < 1e-9);
        assert!(e.values[3].abs() < 1e-9);
    }

    #[test]
    fn all_ones_is_rank_one() {
        let j = Matrix::from_fn(4, 4, |_, _| 1.0);
        let e = sym_eigen(&j).unwrap();
        assert!((e.values[0] - 4.0).abs() < 1e-12);
        assert!(e.values[1..].iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rejects_asymmetric_and_rectangular() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.1, 1.0]]).unwrap();
        assert!(matches!(sym_eigen(&a), Err(LinalgError::Asymmetric { .. })));
        assert!(matches!(sym_eigen(&Matrix::zeros(2, 3)), Err(LinalgError::NotSquare { .. })));
    }

    #[test]
    fn ranks_of_bundled_matrices() {
        assert_eq!(numeric_rank(&pentagon(), tol::RANK), 3);
        assert_eq!(numeric_rank(&crate::data::prism_slack(), tol::RANK), 4);
        assert_eq!(numeric_rank(&Matrix::zeros(3, 3), tol::RANK), 0);
    }

    #[test]
    fn null_space_examples() {
        assert!(null_space(&Matrix::identity(2), tol::RANK).is_empty());
        let ns = null_space(&Matrix::from_rows(&[[1.0, -1.0]]).unwrap(), tol::RANK);
        assert_eq!(ns.len(), 1);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ns[0][0].abs() - h).abs() < 1e-12 && (ns[0][0] - ns[0][1]).abs() < 1e-12);
        let gens = Matrix::from_rows(&crate::data::pentagon_rays()).unwrap();
        assert!(null_space(&gens, tol::RANK).is_empty());
    }

    #[test]
    fn null_space_of_empty_row_set_is_everything() {
        let ns = null_space(&Matrix::zeros(0, 3), tol::RANK);
        assert_eq!(ns.len(), 3);
    }

    #[test]
    fn psd_projection_examples() {
        let p = psd_project(&Matrix::diag(&[2.0, -1.0])).unwrap();
        assert!(p.sub(&Matrix::diag(&[2.0, 0.0])).unwrap().max_abs() < 1e-15);
        let m = pentagon();
        assert!(psd_project(&m).unwrap().sub(&m).unwrap().max_abs() < 1e-12);
        assert!(psd_project(&Matrix::identity(3).scaled(-1.0)).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn low_rank_projection_examples() {
        let p = low_rank_project(&Matrix::diag(&[3.0, 2.0, 1.0]), 1).unwrap();
        assert!(p.sub(&Matrix::diag(&[3.0, 0.0, 0.0])).unwrap().max_abs() < 1e-15);
        let m = pentagon();
        assert!(low_rank_project(&m, 3).unwrap().sub(&m).unwrap().max_abs() < 1e-9);
        let x = Matrix::from_rows(&[[1.0, 2.0, 0.5], [0.0, 1.0, 1.0]]).unwrap();
        let r2 = x.transpose().gram();
        assert!(low_rank_project(&r2, 2).unwrap().sub(&r2).unwrap().max_abs() < 1e-12);
        assert!(matches!(low_rank_project(&m, 6), Err(LinalgError::BadRank { .. })));
        assert!(matches!(low_rank_project(&m, 0), Err(LinalgError::BadRank { .. })));
    }
}
