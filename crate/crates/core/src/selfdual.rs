//! Self-duality of polyhedral cones via PSD slacks.
//!
//! A pointed full-dimensional cone is self-dual under some inner product iff
//! some row permutation `P` and positive column scaling `D` turn its slack
//! matrix into a symmetric PSD matrix `P·M·D`. The search below enumerates the
//! permutations that make the support symmetric with a full diagonal, solves
//! the scaling equations `M'_ij·d_j = M'_ji·d_i` on a spanning forest of the
//! support graph and keeps the first candidate that is PSD.

use std::collections::VecDeque;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeometryError, PolyhedralCone, SlackMatrix};
use crate::linalg::{self, Matrix};
use crate::{symperm, tol};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SelfDualError {
    #[error("malformed slack matrix: {0}")]
    MalformedSlack(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// Witness that `P·M·D` is PSD for a slack matrix `M`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdSlackCertificate {
    /// Row `i` of the PSD matrix is row `permutation[i]` of the slack.
    pub permutation: Vec<usize>,
    /// Positive column scaling `D`.
    pub scaling: Vec<f64>,
    pub psd_matrix: Matrix,
    pub min_eigenvalue: f64,
}

impl PsdSlackCertificate {
    /// Recomputes `P·M·D` and checks symmetry, PSD-ness and agreement with the stored matrix.
    pub fn verify(&self, slack: &Matrix) -> bool {
        let pm = slack.permute_rows(&self.permutation);
        let pmd = Matrix::from_fn(pm.rows(), pm.cols(), |i, j| pm[(i, j)] * self.scaling[j]);
        let scale = pmd.max_abs().max(f64::MIN_POSITIVE);
        if pmd.sub(&self.psd_matrix).map(|d| d.max_abs()).unwrap_or(f64::INFINITY) > 1e-10 * scale {
            return false;
        }
        if pmd.asymmetry().0 > 1e-9 * scale {
            return false;
        }
        match linalg::sym_eigen(&pmd.symmetrized()) {
            Ok(e) => e.values.last().is_none_or(|&l| l >= -tol::PSD * scale),
            Err(_) => false,
        }
    }
}

fn validate(slack: &SlackMatrix) -> Result<(), SelfDualError> {
    let m = &slack.matrix;
    m.check_finite()?;
    if m.min_entry() < 0.0 {
        return Err(SelfDualError::MalformedSlack("negative entry".into()));
    }
    let zeros = slack.zero_pattern();
    if zeros.iter().any(|r| r.iter().all(|&z| z)) {
        return Err(SelfDualError::MalformedSlack("zero row".into()));
    }
    if (0..m.cols()).any(|j| zeros.iter().all(|r| r[j])) {
        return Err(SelfDualError::MalformedSlack("zero column".into()));
    }
    Ok(())
}

/// Searches for a row permutation and positive column scaling making the slack PSD.
///
/// Returns `None` only after every support-compatible permutation has been tried.
/// Among successes the first one in lexicographic search order is reported.
pub fn find_psd_scaling(slack: &SlackMatrix) -> Result<Option<PsdSlackCertificate>, SelfDualError> {
    validate(slack)?;
    let m = &slack.matrix;
    if !m.is_square() {
        return Ok(None);
    }
    let support = slack.support();
    let max_diag_target = m.diagonal().into_iter().fold(0.0_f64, f64::max);
    let found = symperm::for_each_symmetrizing_permutation(&support, |perm| {
        let permuted = m.permute_rows(perm);
        let Some(scaling) = solve_symmetric_scaling(&permuted) else {
            return ControlFlow::Continue(());
        };
        let mut candidate = Matrix::from_fn(m.rows(), m.cols(), |i, j| permuted[(i, j)] * scaling[j]);
        candidate = candidate.symmetrized();
        let Ok(eig) = linalg::sym_eigen(&candidate) else {
            return ControlFlow::Continue(());
        };
        let min = eig.values.last().copied().unwrap_or(0.0);
        if min < -tol::PSD * candidate.max_abs() {
            return ControlFlow::Continue(());
        }
        // Gauge: largest diagonal entry equals the largest diagonal entry of the slack.
        let top = candidate.diagonal().into_iter().fold(0.0_f64, f64::max);
        let g = if top > 0.0 && max_diag_target > 0.0 { max_diag_target / top } else { 1.0 };
        let scaling: Vec<f64> = scaling.iter().map(|d| d * g).collect();
        let psd_matrix = Matrix::from_fn(m.rows(), m.cols(), |i, j| permuted[(i, j)] * scaling[j]).symmetrized();
        ControlFlow::Break(PsdSlackCertificate {
            permutation: perm.to_vec(),
            scaling,
            psd_matrix,
            min_eigenvalue: min * g,
        })
    });
    Ok(found)
}

/// Solves `A_ij·d_j = A_ji·d_i` over the support graph with `d = 1` at each component root.
/// Returns `None` when a cycle condition fails beyond relative `1e-8`.
fn solve_symmetric_scaling(a: &Matrix) -> Option<Vec<f64>> {
    let n = a.rows();
    let mut d: Vec<Option<f64>> = vec![None; n];
    for root in 0..n {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(1.0);
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let di = d[i].unwrap();
            for j in 0..n {
                if j == i || a[(i, j)] == 0.0 {
                    continue;
                }
                let dj = di * a[(j, i)] / a[(i, j)];
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        queue.push_back(j);
                    }
                    Some(existing) => {
                        if (existing - dj).abs() > tol::SCALING_CYCLE * existing.abs().max(dj.abs()) {
                            return None;
                        }
                    }
                }
            }
        }
    }
    d.into_iter().collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfDualVerdict {
    pub self_dual: bool,
    pub certificate: Option<PsdSlackCertificate>,
}

/// `K` is self-dual under some inner product iff its slack admits a PSD representative.
pub fn is_self_dual(k: &PolyhedralCone) -> Result<SelfDualVerdict, SelfDualError> {
    let slack = geometry::slack_matrix(k)?;
    let certificate = find_psd_scaling(&slack)?;
    Ok(SelfDualVerdict { self_dual: certificate.is_some(), certificate })
}

/// Connectedness of the support graph (edges where `|A_ij| > 1e-10·‖A‖∞`, `i ≠ j`).
pub fn is_irreducible(a: &Matrix) -> bool {
    support_components(a) <= 1
}

/// Number of connected components of the support graph.
pub fn support_components(a: &Matrix) -> usize {
    let n = a.rows();
    let clamp = tol::ZERO_CLAMP * a.max_abs();
    let mut seen = vec![false; n];
    let mut components = 0;
    for root in 0..n {
        if seen[root] {
            continue;
        }
        components += 1;
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            for j in 0..n {
                if !seen[j] && j != i && (a[(i, j)].abs() > clamp || a[(j, i)].abs() > clamp) {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    components
}

/// A slack matrix of a cone in `R^d` is simplicial iff it is `d×d` with the zero pattern of a permuted diagonal.
pub fn is_simplicial(slack: &Matrix, d: usize) -> bool {
    if slack.rows() != d || slack.cols() != d {
        return false;
    }
    let support = geometry::support(slack, tol::ZERO_CLAMP * slack.max_abs());
    let rows_ok = support.iter().all(|r| r.iter().filter(|&&b| b).count() == 1);
    let cols_ok = (0..d).all(|j| support.iter().filter(|r| r[j]).count() == 1);
    rows_ok && cols_ok
}

/// Simpliciality of a pointed full-dimensional cone: as many extreme rays as dimensions.
pub fn is_simplicial_cone(k: &PolyhedralCone) -> Result<bool, SelfDualError> {
    let s = geometry::slack_matrix(k)?;
    Ok(is_simplicial(&s.matrix, k.dim()))
}
