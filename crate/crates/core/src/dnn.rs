//! Doubly nonnegative matrices: membership, extreme-ray certification and
//! verdicts for PSD slacks of self-dual cones.
//!
//! A DNN matrix `A` of rank `k` with factor `X` generates an extreme ray iff
//! the only matrices `X·Q·Xᵀ` (`Q` symmetric `k×k`) vanishing wherever `A`
//! vanishes are multiples of `A`. We parametrize `Q` by an orthonormal basis
//! of symmetric matrices and measure the null space of the zero-pattern
//! constraints.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeometryError, SlackCheck};
use crate::linalg::{self, EigenDecomposition, LinalgError, Matrix};
use crate::selfdual;
use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DnnError {
    #[error("matrix is not doubly nonnegative (min eigenvalue {min_eigenvalue:e}, min entry {min_entry:e})")]
    NotDnn { min_eigenvalue: f64, min_entry: f64 },
    #[error("zero matrix has no extreme-ray structure")]
    ZeroMatrix,
    #[error("expected a 5x5 matrix, got {0}x{1}")]
    NotFiveByFive(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Tolerance for the null space of the zero-pattern system.
const INTERSECTION_TOL: f64 = 1e-8;

/// Smallest eigenvalue and smallest entry, both relative to `‖A‖∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DnnMargins {
    pub min_eigenvalue: f64,
    pub min_entry: f64,
}

pub fn dnn_margins(a: &Matrix) -> Result<DnnMargins, DnnError> {
    a.ensure_symmetric()?;
    a.check_finite()?;
    let scale = a.max_abs();
    if scale == 0.0 {
        return Ok(DnnMargins { min_eigenvalue: 0.0, min_entry: 0.0 });
    }
    let eig = linalg::sym_eigen(a)?;
    let min_eigenvalue = eig.values.last().copied().unwrap_or(0.0) / scale;
    Ok(DnnMargins { min_eigenvalue, min_entry: a.min_entry() / scale })
}

/// PSD and entrywise nonnegative, both up to `tol·‖A‖∞`.
pub fn is_dnn(a: &Matrix, tol: f64) -> Result<bool, DnnError> {
    let m = dnn_margins(a)?;
    Ok(m.min_eigenvalue >= -tol && m.min_entry >= -tol)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub rank: usize,
    pub intersection_dim: usize,
    pub extreme: bool,
    /// Whether the off-diagonal support graph is a 5-cycle; only meaningful for `n = 5`.
    pub support_cycle5: bool,
    /// Present when the rank decision is close to the rank tolerance.
    pub borderline: Option<Borderline>,
}

/// Intersection dimensions recomputed at the neighbouring ranks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Borderline {
    pub eigenvalue_ratio: f64,
    pub dim_at_rank_minus_one: Option<usize>,
    pub dim_at_rank_plus_one: Option<usize>,
}

/// Numeric rank of a PSD matrix from its descending spectrum.
fn spectral_rank(values: &[f64]) -> usize {
    let top = values.first().copied().unwrap_or(0.0).abs();
    if top == 0.0 {
        return 0;
    }
    values.iter().filter(|&&v| v > tol::RANK * top).count()
}

/// Dimension of `{X·Q·Xᵀ} ∩ {B : B_ij = 0 where A_ij = 0}` with `X` the top-`k` eigenvectors.
fn intersection_dim(eig: &EigenDecomposition, zeros: &[Vec<bool>], k: usize) -> usize {
    let n = eig.vectors.rows();
    // Orthonormal basis of k×k symmetric matrices: e_a e_aᵀ and (e_a e_bᵀ + e_b e_aᵀ)/√2.
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|a| (a..k).map(move |b| (a, b))).collect();
    let v = &eig.vectors;
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i..n {
            if !zeros[i][j] {
                continue;
            }
            // Entry (i,j) of V·E_ab·Vᵀ, with the √2 weight of the upper-triangle vectorization.
            let w = if i == j { 1.0 } else { std::f64::consts::SQRT_2 };
            let row: Vec<f64> = pairs
                .iter()
                .map(|&(a, b)| {
                    let e = if a == b {
                        v[(i, a)] * v[(j, a)]
                    } else {
                        (v[(i, a)] * v[(j, b)] + v[(i, b)] * v[(j, a)]) / std::f64::consts::SQRT_2
                    };
                    w * e
                })
                .collect();
            rows.push(row);
        }
    }
    let system = if rows.is_empty() {
        Matrix::zeros(0, pairs.len())
    } else {
        Matrix::from_rows(&rows).expect("rows share the basis length")
    };
    linalg::null_space(&system, INTERSECTION_TOL).len()
}

fn is_cycle5(a: &Matrix) -> bool {
    if a.rows() != 5 {
        return false;
    }
    let support = geometry::support(a, tol::ZERO_CLAMP * a.max_abs());
    let degrees_ok = (0..5).all(|i| (0..5).filter(|&j| j != i && support[i][j]).count() == 2);
    degrees_ok && selfdual::is_irreducible(a)
}

/// Extreme-ray test for the DNN cone.
///
/// `tol` bounds the allowed DNN violation relative to `‖A‖∞`.
pub fn dnn_extremality(a: &Matrix, tol: f64) -> Result<ExtremalityReport, DnnError> {
    let margins = dnn_margins(a)?;
    if a.max_abs() == 0.0 {
        return Err(DnnError::ZeroMatrix);
    }
    if margins.min_eigenvalue < -tol || margins.min_entry < -tol {
        return Err(DnnError::NotDnn { min_eigenvalue: margins.min_eigenvalue, min_entry: margins.min_entry });
    }
    let eig = linalg::sym_eigen(a)?;
    let rank = spectral_rank(&eig.values);
    let zeros = geometry::zero_pattern(a, tol::ZERO_CLAMP * a.max_abs());
    let dim = intersection_dim(&eig, &zeros, rank);

    let top = eig.values[0];
    let ratio = eig.values[rank - 1] / top;
    let next = eig.values.get(rank).map_or(0.0, |v| v / top);
    let borderline = (ratio < 10.0 * tol::RANK || next > tol::RANK / 10.0).then(|| Borderline {
        eigenvalue_ratio: ratio,
        dim_at_rank_minus_one: (rank > 1).then(|| intersection_dim(&eig, &zeros, rank - 1)),
        dim_at_rank_plus_one: (rank < a.rows()).then(|| intersection_dim(&eig, &zeros, rank + 1)),
    });

    Ok(ExtremalityReport {
        rank,
        intersection_dim: dim,
        extreme: dim == 1,
        support_cycle5: is_cycle5(a),
        borderline,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dnn5Class {
    Rank1,
    PentagonSlack,
    NotExtreme,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dnn5Classification {
    pub class: Dnn5Class,
    pub extremality: ExtremalityReport,
    /// Whether the class agrees with the numerical extremality test.
    pub consistent: bool,
}

/// Classifies a 5×5 DNN matrix: extreme rays of the 5×5 DNN cone are rank one or
/// rank-3 matrices supported on a 5-cycle.
pub fn dnn5_classify(a: &Matrix, tol: f64) -> Result<Dnn5Classification, DnnError> {
    if a.rows() != 5 || a.cols() != 5 {
        return Err(DnnError::NotFiveByFive(a.rows(), a.cols()));
    }
    let extremality = dnn_extremality(a, tol)?;
    let class = match extremality.rank {
        1 => Dnn5Class::Rank1,
        3 if extremality.support_cycle5 => Dnn5Class::PentagonSlack,
        _ => Dnn5Class::NotExtreme,
    };
    let consistent = extremality.extreme == (class != Dnn5Class::NotExtreme);
    Ok(Dnn5Classification { class, extremality, consistent })
}

/// Hypotheses under which the PSD-slack theorems apply. Only [`certify_psd_slack`] builds one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackHypotheses {
    cone_dim: usize,
    rank: usize,
    irreducible: bool,
    simplicial: bool,
    diagonal: bool,
}

impl SlackHypotheses {
    pub fn cone_dim(&self) -> usize {
        self.cone_dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn simplicial(&self) -> bool {
        self.simplicial
    }

    pub fn diagonal(&self) -> bool {
        self.diagonal
    }
}

/// Why a matrix could not be certified as the PSD slack of a self-dual cone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertificationFailure {
    NotPsd { min_eigenvalue: f64 },
    RankMismatch { rank: usize, expected: usize },
    SlackConditions { reasons: Vec<String> },
    Factorization { message: String },
    NotSelfDual,
}

impl std::fmt::Display for CertificationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CertificationFailure::NotPsd { min_eigenvalue } => {
                write!(f, "not PSD (min eigenvalue {min_eigenvalue:e})")
            }
            CertificationFailure::RankMismatch { rank, expected } => {
                write!(f, "rank {rank} differs from the cone dimension {expected}")
            }
            CertificationFailure::SlackConditions { reasons } => write!(f, "not a slack matrix: {}", reasons.join("; ")),
            CertificationFailure::Factorization { message } => write!(f, "factor cone rejected: {message}"),
            CertificationFailure::NotSelfDual => write!(f, "factor cone is not self-dual"),
        }
    }
}

/// Certifies that `A` is a PSD slack of a self-dual cone in `R^d`.
///
/// With `A = X·Xᵀ` of rank `d`, the rows of `X` generate a cone `K`. `A` is a PSD
/// slack of a self-dual cone exactly when every row is extreme in `K` and `K`
/// coincides with its Euclidean dual, because then `A_ij = ⟨x_i, x_j⟩` pairs the
/// rays of `K` with those of `K*`.
pub fn certify_psd_slack(a: &Matrix, d: usize) -> Result<Result<SlackHypotheses, CertificationFailure>, DnnError> {
    let margins = dnn_margins(a)?;
    if margins.min_eigenvalue < -tol::PSD {
        return Ok(Err(CertificationFailure::NotPsd { min_eigenvalue: margins.min_eigenvalue }));
    }
    let rank = linalg::numeric_rank(a, tol::RANK);
    if rank != d {
        return Ok(Err(CertificationFailure::RankMismatch { rank, expected: d }));
    }
    let check: SlackCheck = geometry::slack_necessary_check(a, d);
    if !check.passed {
        return Ok(Err(CertificationFailure::SlackConditions { reasons: check.reasons() }));
    }
    let cone = match geometry::cone_from_factorization(a, d) {
        Ok(k) => k,
        Err(e) => return Ok(Err(CertificationFailure::Factorization { message: e.to_string() })),
    };
    let extreme = match geometry::extreme_rays(cone.generators(), d, tol::INCIDENCE) {
        Ok(k) => k,
        Err(e) => return Ok(Err(CertificationFailure::Factorization { message: e.to_string() })),
    };
    if extreme.len() != cone.len() {
        return Ok(Err(CertificationFailure::Factorization {
            message: format!("only {} of {} rows are extreme rays", extreme.len(), cone.len()),
        }));
    }
    let dual = match geometry::dual_cone(&cone) {
        Ok(k) => k,
        Err(e) => return Ok(Err(CertificationFailure::Factorization { message: e.to_string() })),
    };
    if !geometry::same_generators(&cone, &dual, tol::RANK) {
        return Ok(Err(CertificationFailure::NotSelfDual));
    }
    let n = a.rows();
    let clamp = tol::ZERO_CLAMP * a.max_abs();
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || a[(i, j)].abs() <= clamp));
    Ok(Ok(SlackHypotheses {
        cone_dim: d,
        rank,
        irreducible: selfdual::is_irreducible(a),
        simplicial: selfdual::is_simplicial(a, d),
        diagonal,
    }))
}

/// A theorem-backed or numerical verdict. `value = None` means undetermined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: Option<bool>,
    pub provenance: String,
}

impl Verdict {
    fn new(value: Option<bool>, provenance: &str) -> Self {
        Verdict { value, provenance: provenance.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackVerdicts {
    pub dnn_extreme: Verdict,
    pub cp_member: Verdict,
    pub cpsd_member: Verdict,
    /// Numerical extremality test, run independently of the theorem.
    pub extremality: ExtremalityReport,
    /// Whether the numerical test agrees with the theorem-based `dnn_extreme`.
    pub consistent: bool,
}

/// CP / CPSD / extremality verdicts for a certified PSD slack.
pub fn classify_psd_slack(a: &Matrix, hyp: &SlackHypotheses) -> Result<SlackVerdicts, DnnError> {
    let extremality = dnn_extremality(a, tol::PSD)?;
    let dnn_extreme = if hyp.irreducible {
        Verdict::new(Some(true), "psd-slack-irreducible-extreme")
    } else if a.rows() > 1 {
        Verdict::new(Some(false), "reducible-direct-sum")
    } else {
        Verdict::new(Some(true), "rank-one")
    };
    let cp_member = if hyp.diagonal {
        Verdict::new(Some(true), "diagonal-nonnegative")
    } else if hyp.rank >= 2 && dnn_extreme.value == Some(true) {
        Verdict::new(Some(false), "cp-extreme-rays-rank-one")
    } else {
        Verdict::new(None, "undetermined")
    };
    let cpsd_member = if hyp.diagonal {
        Verdict::new(Some(true), "diagonal-nonnegative")
    } else {
        Verdict::new(Some(false), "non-diagonal-psd-slack-not-cpsd")
    };
    let consistent = dnn_extreme.value == Some(extremality.extreme);
    Ok(SlackVerdicts { dnn_extreme, cp_member, cpsd_member, extremality, consistent })
}

/// `‖A − M·B·Mᵀ‖∞ / ‖A‖∞`.
pub fn congruence_residual(a: &Matrix, m: &Matrix, b: &Matrix) -> Result<f64, DnnError> {
    if !a.is_square() || !b.is_square() || m.rows() != a.rows() || m.cols() != b.rows() {
        return Err(DnnError::DimensionMismatch(format!(
            "A {}x{}, M {}x{}, B {}x{}",
            a.rows(),
            a.cols(),
            m.rows(),
            m.cols(),
            b.rows(),
            b.cols()
        )));
    }
    let mbm = m.matmul(b)?.matmul(&m.transpose())?;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    Ok(a.sub(&mbm)?.max_abs() / scale)
}

/// `A = M·B·Mᵀ` within `tol` relative to `‖A‖∞`, with `M` entrywise nonnegative up to `tol`.
pub fn verify_congruence(a: &Matrix, m: &Matrix, b: &Matrix, tol: f64) -> Result<bool, DnnError> {
    let residual = congruence_residual(a, m, b)?;
    Ok(residual <= tol && m.min_entry() >= -tol)
}
