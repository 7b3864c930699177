//! V-representation polyhedral cones: facets, Euclidean duals, extreme rays
//! and slack matrices.
//!
//! Facets are found by scanning every `(d−1)`-subset of generators. That is
//! `O(n^{d−1})` and meant for small cones (d ≤ 6, n ≤ 20).

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, dot, norm, Matrix};
use crate::tol;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("generator {0} is zero")]
    ZeroGenerator(usize),
    #[error("generator {index} has {len} coordinates, expected {dim}")]
    WrongLength { index: usize, len: usize, dim: usize },
    #[error("generators {0} and {1} span the same ray")]
    DuplicateGenerator(usize, usize),
    #[error("cone is not full-dimensional: generators span a {rank}-dimensional subspace of R^{dim}")]
    NotFullDimensional { rank: usize, dim: usize },
    #[error("cone is not pointed: it contains a line")]
    NotPointed,
    #[error("generator {0} is not an extreme ray")]
    NotExtreme(usize),
    #[error("cone must have dimension at least 1 and at least one generator")]
    Empty,
    #[error("origin is not in the interior of the polytope (facet {facet} has offset {offset:e})")]
    OriginNotInterior { facet: usize, offset: f64 },
    #[error("matrix has numeric rank {rank}, expected {expected}")]
    RankMismatch { rank: usize, expected: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {index} is {value:e})")]
    NotPsd { index: usize, value: f64 },
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
}

/// Cone generated by finitely many unit-normalized vectors in `R^dim`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralCone {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl PolyhedralCone {
    /// Normalizes each generator. Zero vectors and repeated rays are rejected.
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self, GeometryError> {
        if dim == 0 || generators.is_empty() {
            return Err(GeometryError::Empty);
        }
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(generators.len());
        for (i, g) in generators.into_iter().enumerate() {
            let g = normalized(i, g, dim)?;
            if let Some(j) = out.iter().position(|h| same_ray(h, &g)) {
                return Err(GeometryError::DuplicateGenerator(j, i));
            }
            out.push(g);
        }
        Ok(PolyhedralCone { dim, generators: out })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn generator_matrix(&self) -> Matrix {
        Matrix::from_rows(&self.generators).expect("generators share a dimension")
    }

    /// Image `T·K` under a linear map given as a `dim×dim` matrix.
    pub fn transform(&self, t: &Matrix) -> Result<PolyhedralCone, GeometryError> {
        if t.rows() != self.dim || t.cols() != self.dim {
            return Err(linalg::LinalgError::DimensionMismatch(format!(
                "map is {}x{}, cone lives in R^{}",
                t.rows(),
                t.cols(),
                self.dim
            ))
            .into());
        }
        let gens = self
            .generators
            .iter()
            .map(|g| (0..self.dim).map(|i| dot(t.row(i), g)).collect())
            .collect();
        PolyhedralCone::new(self.dim, gens)
    }

    /// Index of the generator spanning the same ray as `v`, if any.
    pub fn find_ray(&self, v: &[f64], cosine_tol: f64) -> Option<usize> {
        let nv = norm(v);
        if nv == 0.0 {
            return None;
        }
        self.generators.iter().position(|g| dot(g, v) / nv >= 1.0 - cosine_tol)
    }
}

fn normalized(index: usize, g: Vec<f64>, dim: usize) -> Result<Vec<f64>, GeometryError> {
    if g.len() != dim {
        return Err(GeometryError::WrongLength { index, len: g.len(), dim });
    }
    let n = norm(&g);
    if n == 0.0 || !n.is_finite() {
        return Err(GeometryError::ZeroGenerator(index));
    }
    Ok(g.into_iter().map(|v| v / n).collect())
}

fn same_ray(a: &[f64], b: &[f64]) -> bool {
    dot(a, b) >= 1.0 - tol::COSINE
}

pub fn is_full_dimensional(k: &PolyhedralCone) -> bool {
    linalg::numeric_rank(&k.generator_matrix(), tol::RANK) == k.dim
}

/// A cone is pointed iff its Euclidean dual is full-dimensional within the span of the cone.
///
/// Lower-dimensional cones are first rewritten in coordinates of their own span.
pub fn is_pointed(k: &PolyhedralCone) -> bool {
    let gens = k.generator_matrix();
    let svd = linalg::right_svd(&gens);
    let top = svd.singular_values.first().copied().unwrap_or(0.0);
    let rank = svd.singular_values.iter().filter(|&&s| s > tol::RANK * top).count();
    if rank == 0 {
        return true;
    }
    let local: Vec<Vec<f64>> = if rank == k.dim {
        k.generators.clone()
    } else {
        let basis: Vec<Vec<f64>> = (0..rank).map(|c| svd.right.column(c)).collect();
        k.generators.iter().map(|g| basis.iter().map(|b| dot(g, b)).collect()).collect()
    };
    let normals = supporting_normals(&local, rank, tol::INCIDENCE);
    if normals.is_empty() {
        return false;
    }
    let m = Matrix::from_rows(&normals).expect("normals share a dimension");
    linalg::numeric_rank(&m, tol::RANK) == rank
}

fn ensure_proper(k: &PolyhedralCone) -> Result<(), GeometryError> {
    let rank = linalg::numeric_rank(&k.generator_matrix(), tol::RANK);
    if rank != k.dim {
        return Err(GeometryError::NotFullDimensional { rank, dim: k.dim });
    }
    if !is_pointed(k) {
        return Err(GeometryError::NotPointed);
    }
    Ok(())
}

// Unit inward normals of all facets of cone(gens) in R^dim, assuming full dimension.
fn supporting_normals(gens: &[Vec<f64>], dim: usize, incidence: f64) -> Vec<Vec<f64>> {
    let mut normals: Vec<Vec<f64>> = Vec::new();
    // Facets are identified by the generators they contain, so a facet met through
    // several subsets (or through nearly parallel noisy normals) is kept once.
    let mut seen: Vec<Vec<bool>> = Vec::new();
    for subset in (0..gens.len()).combinations(dim - 1) {
        let rows: Vec<&[f64]> = subset.iter().map(|&i| gens[i].as_slice()).collect();
        let a = if rows.is_empty() {
            Matrix::zeros(0, dim)
        } else {
            Matrix::from_rows(&rows).expect("generators share a dimension")
        };
        let ns = linalg::null_space(&a, tol::RANK);
        if ns.len() != 1 {
            continue;
        }
        let mut n = ns.into_iter().next().unwrap();
        let products: Vec<f64> = gens.iter().map(|g| dot(g, &n)).collect();
        let lo = products.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = products.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo < -incidence && hi > incidence {
            continue;
        }
        if hi <= incidence && lo >= -incidence {
            continue;
        }
        if lo < -incidence {
            n.iter_mut().for_each(|v| *v = -*v);
        }
        let nn = norm(&n);
        n.iter_mut().for_each(|v| *v /= nn);
        let tight: Vec<bool> = products.iter().map(|p| p.abs() <= incidence).collect();
        if seen.contains(&tight) {
            continue;
        }
        seen.push(tight);
        normals.push(n);
    }
    normals
}

/// Unit inward normals of every facet of `K`, in subset-enumeration order.
pub fn facet_normals(k: &PolyhedralCone, incidence: f64) -> Result<Vec<Vec<f64>>, GeometryError> {
    ensure_proper(k)?;
    Ok(supporting_normals(&k.generators, k.dim, incidence))
}

/// Euclidean dual `K* = {y : ⟨x, y⟩ ≥ 0 ∀x ∈ K}`, generated by the facet normals of `K`.
pub fn dual_cone(k: &PolyhedralCone) -> Result<PolyhedralCone, GeometryError> {
    dual_cone_with(k, tol::INCIDENCE)
}

/// [`dual_cone`] with an explicit incidence tolerance, for generators known only approximately.
pub fn dual_cone_with(k: &PolyhedralCone, incidence: f64) -> Result<PolyhedralCone, GeometryError> {
    let normals = facet_normals(k, incidence)?;
    PolyhedralCone::new(k.dim, normals)
}

fn incident_rank(g: &[f64], normals: &[Vec<f64>], incidence: f64) -> usize {
    let tight: Vec<&[f64]> = normals.iter().filter(|n| dot(g, n).abs() <= incidence).map(Vec::as_slice).collect();
    if tight.is_empty() {
        return 0;
    }
    let m = Matrix::from_rows(&tight).expect("normals share a dimension");
    linalg::numeric_rank(&m, tol::RANK.max(incidence))
}

// A nonzero generator cannot be orthogonal to `d` independent normals, so rank `d` only
// arises from noise and is accepted alongside `d − 1`.
fn is_extreme_in(g: &[f64], normals: &[Vec<f64>], dim: usize, incidence: f64) -> bool {
    incident_rank(g, normals, incidence) + 1 >= dim
}

/// Reduces a generating set to one generator per extreme ray.
///
/// A generator is kept when the facets containing it have normals of rank at least `d − 1`.
/// Repeated rays are merged, keeping the first occurrence.
pub fn extreme_rays(generators: &[Vec<f64>], dim: usize, incidence: f64) -> Result<PolyhedralCone, GeometryError> {
    if dim == 0 || generators.is_empty() {
        return Err(GeometryError::Empty);
    }
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        let g = normalized(i, g.clone(), dim)?;
        if !unique.iter().any(|h| same_ray(h, &g)) {
            unique.push(g);
        }
    }
    let all = PolyhedralCone { dim, generators: unique };
    let normals = facet_normals(&all, incidence)?;
    let kept = all
        .generators
        .into_iter()
        .filter(|g| is_extreme_in(g, &normals, dim, incidence))
        .collect();
    Ok(PolyhedralCone { dim, generators: kept })
}

/// Slack matrix `M_ij = ⟨x_i, y_j⟩` of a cone against its Euclidean dual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackMatrix {
    pub matrix: Matrix,
    pub cone_dim: usize,
    /// Generator index of `K` for each row.
    pub row_labels: Vec<usize>,
    /// Generator index of the dual cone for each column.
    pub col_labels: Vec<usize>,
}

impl SlackMatrix {
    pub fn zero_pattern(&self) -> Vec<Vec<bool>> {
        zero_pattern(&self.matrix, 0.0)
    }

    pub fn support(&self) -> Vec<Vec<bool>> {
        support(&self.matrix, 0.0)
    }
}

/// `true` where `|A_ij| ≤ clamp`.
pub fn zero_pattern(a: &Matrix, clamp: f64) -> Vec<Vec<bool>> {
    (0..a.rows()).map(|i| a.row(i).iter().map(|v| v.abs() <= clamp).collect()).collect()
}

/// `true` where `|A_ij| > clamp`.
pub fn support(a: &Matrix, clamp: f64) -> Vec<Vec<bool>> {
    (0..a.rows()).map(|i| a.row(i).iter().map(|v| v.abs() > clamp).collect()).collect()
}

/// Slack matrix of `K` (generators assumed extreme; checked).
///
/// Entries below `1e-10` are clamped to exact zero.
pub fn slack_matrix(k: &PolyhedralCone) -> Result<SlackMatrix, GeometryError> {
    slack_matrix_with(k, tol::INCIDENCE)
}

/// [`slack_matrix`] with an explicit incidence tolerance; entries below it are clamped to zero.
pub fn slack_matrix_with(k: &PolyhedralCone, incidence: f64) -> Result<SlackMatrix, GeometryError> {
    let dual = dual_cone_with(k, incidence)?;
    for (i, g) in k.generators.iter().enumerate() {
        if !is_extreme_in(g, dual.generators(), k.dim, incidence) {
            return Err(GeometryError::NotExtreme(i));
        }
    }
    let clamp = incidence.max(tol::ZERO_CLAMP);
    let matrix = Matrix::from_fn(k.len(), dual.len(), |i, j| {
        let v = dot(&k.generators[i], &dual.generators[j]);
        if v < clamp {
            0.0
        } else {
            v
        }
    });
    Ok(SlackMatrix {
        matrix,
        cone_dim: k.dim,
        row_labels: (0..k.len()).collect(),
        col_labels: (0..dual.len()).collect(),
    })
}

/// A failed necessary condition for being a slack matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SlackDefect {
    NegativeEntry { row: usize, col: usize, value: f64 },
    RankMismatch { rank: usize, expected: usize },
    TooFewZeros { rows: Vec<usize>, zeros: Vec<usize>, required: usize },
    ZeroRow { row: usize },
    ZeroColumn { col: usize },
    RepeatedZeroPattern { first: usize, second: usize },
}

impl std::fmt::Display for SlackDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SlackDefect::NegativeEntry { row, col, value } => {
                write!(f, "entry ({row}, {col}) is negative ({value:e})")
            }
            SlackDefect::RankMismatch { rank, expected } => {
                write!(f, "rank is {rank}, a slack of a {expected}-dimensional cone has rank {expected}")
            }
            SlackDefect::TooFewZeros { rows, zeros, required } => {
                let listed: Vec<String> = rows.iter().zip(zeros).map(|(r, z)| format!("row {r}: {z}")).collect();
                write!(
                    f,
                    "there {} {} with fewer than {required} zeroes ({})",
                    if rows.len() == 1 { "is" } else { "are" },
                    if rows.len() == 1 { "1 row".to_string() } else { format!("{} rows", rows.len()) },
                    listed.join(", ")
                )
            }
            SlackDefect::ZeroRow { row } => write!(f, "row {row} is zero"),
            SlackDefect::ZeroColumn { col } => write!(f, "column {col} is zero"),
            SlackDefect::RepeatedZeroPattern { first, second } => {
                write!(f, "rows {first} and {second} have the same zero pattern")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlackCheck {
    pub cone_dim: usize,
    pub passed: bool,
    pub defects: Vec<SlackDefect>,
}

impl SlackCheck {
    pub fn reasons(&self) -> Vec<String> {
        self.defects.iter().map(ToString::to_string).collect()
    }
}

/// Necessary conditions for `M` to be a slack matrix of a pointed full-dimensional cone in `R^d`:
/// rank `d`, at least `d − 1` zeros per row, no zero rows or columns and no repeated row zero pattern.
///
/// Zeros are entries with `|M_ij| ≤ 1e-10·‖M‖∞`. Row and column indices in the report are 0-based.
pub fn slack_necessary_check(m: &Matrix, d: usize) -> SlackCheck {
    let clamp = tol::ZERO_CLAMP * m.max_abs();
    let mut defects = Vec::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)] < -clamp {
                defects.push(SlackDefect::NegativeEntry { row: i, col: j, value: m[(i, j)] });
            }
        }
    }
    let rank = linalg::numeric_rank(m, tol::RANK);
    if rank != d {
        defects.push(SlackDefect::RankMismatch { rank, expected: d });
    }
    let zeros = zero_pattern(m, clamp);
    let required = d.saturating_sub(1);
    let (short_rows, short_counts): (Vec<usize>, Vec<usize>) = zeros
        .iter()
        .enumerate()
        .map(|(i, r)| (i, r.iter().filter(|&&z| z).count()))
        .filter(|&(_, c)| c < required)
        .unzip();
    if !short_rows.is_empty() {
        defects.push(SlackDefect::TooFewZeros { rows: short_rows, zeros: short_counts, required });
    }
    for (i, r) in zeros.iter().enumerate() {
        if r.iter().all(|&z| z) {
            defects.push(SlackDefect::ZeroRow { row: i });
        }
    }
    for j in 0..m.cols() {
        if zeros.iter().all(|r| r[j]) {
            defects.push(SlackDefect::ZeroColumn { col: j });
        }
    }
    for (a, b) in (0..m.rows()).tuple_combinations() {
        if zeros[a] == zeros[b] {
            defects.push(SlackDefect::RepeatedZeroPattern { first: a, second: b });
        }
    }
    SlackCheck { cone_dim: d, passed: defects.is_empty(), defects }
}

/// Cone in `R^{k+1}` generated by `(1, v_i)` for the vertices `v_i` of a polytope in `R^k`.
///
/// The polytope must be full-dimensional with the origin in its interior.
pub fn cone_over_polytope(vertices: &[Vec<f64>]) -> Result<PolyhedralCone, GeometryError> {
    let k = vertices.first().map(Vec::len).ok_or(GeometryError::Empty)?;
    let lifted: Vec<Vec<f64>> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v.len() != k {
                return Err(GeometryError::WrongLength { index: i, len: v.len(), dim: k });
            }
            Ok(std::iter::once(1.0).chain(v.iter().copied()).collect())
        })
        .collect::<Result<_, _>>()?;
    let cone = PolyhedralCone::new(k + 1, lifted)?;
    let normals = facet_normals(&cone, tol::INCIDENCE)?;
    for (f, n) in normals.iter().enumerate() {
        if n[0] <= tol::INCIDENCE {
            return Err(GeometryError::OriginNotInterior { facet: f, offset: n[0] });
        }
    }
    Ok(cone)
}

/// Cone generated by the rows of the top-`d` spectral factor `X` of `M = X·Xᵀ`.
pub fn cone_from_factorization(m: &Matrix, d: usize) -> Result<PolyhedralCone, GeometryError> {
    m.ensure_symmetric()?;
    let rank = linalg::numeric_rank(m, tol::RANK);
    if rank != d {
        return Err(GeometryError::RankMismatch { rank, expected: d });
    }
    let eig = linalg::sym_eigen(m)?;
    if let Some((index, &value)) = eig.values.iter().take(d).enumerate().find(|(_, &v)| v <= 0.0) {
        return Err(GeometryError::NotPsd { index, value });
    }
    let x = linalg::spectral_factor(&eig, d);
    PolyhedralCone::new(d, x.to_rows())
}

/// Column correspondence and positive scalings relating two matrices with the same row order.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMatch {
    /// Column `j` of `b` corresponds to column `col_perm[j]` of `a`.
    pub col_perm: Vec<usize>,
    pub row_scale: Vec<f64>,
    pub col_scale: Vec<f64>,
}

/// Decides whether `b[i][j] = r_i · a[i][π(j)] · c_j` for a column permutation `π`
/// and positive `r`, `c`, with relative tolerance `rel_tol` on every entry.
///
/// Columns are paired by zero pattern, which is unique for slack matrices.
pub fn match_up_to_scaling(a: &Matrix, b: &Matrix, rel_tol: f64) -> Option<ScaledMatch> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return None;
    }
    let (n, m) = (a.rows(), a.cols());
    let za = zero_pattern(a, tol::ZERO_CLAMP * a.max_abs());
    let zb = zero_pattern(b, tol::ZERO_CLAMP * b.max_abs());
    let col = |z: &[Vec<bool>], j: usize| -> Vec<bool> { (0..n).map(|i| z[i][j]).collect() };
    let mut col_perm = Vec::with_capacity(m);
    let mut used = vec![false; m];
    for j in 0..m {
        let target = col(&zb, j);
        let k = (0..m).find(|&k| !used[k] && col(&za, k) == target)?;
        used[k] = true;
        col_perm.push(k);
    }
    let aligned = a.permute_cols(&col_perm);
    // b_ij / a_ij = r_i c_j on the bipartite support graph; propagate from each component root.
    let mut r: Vec<Option<f64>> = vec![None; n];
    let mut c: Vec<Option<f64>> = vec![None; m];
    for start in 0..n {
        if r[start].is_some() {
            continue;
        }
        r[start] = Some(1.0);
        let mut stack = vec![(true, start)];
        while let Some((is_row, idx)) = stack.pop() {
            if is_row {
                let ri = r[idx].unwrap();
                for j in 0..m {
                    if !zb[idx][j] && c[j].is_none() {
                        c[j] = Some(b[(idx, j)] / (ri * aligned[(idx, j)]));
                        stack.push((false, j));
                    }
                }
            } else {
                let cj = c[idx].unwrap();
                for i in 0..n {
                    if !zb[i][idx] && r[i].is_none() {
                        r[i] = Some(b[(i, idx)] / (cj * aligned[(i, idx)]));
                        stack.push((true, i));
                    }
                }
            }
        }
    }
    let row_scale: Vec<f64> = r.into_iter().map(|v| v.unwrap_or(1.0)).collect();
    let col_scale: Vec<f64> = c.into_iter().map(|v| v.unwrap_or(1.0)).collect();
    if row_scale.iter().chain(&col_scale).any(|&s| s <= 0.0 || !s.is_finite()) {
        return None;
    }
    for i in 0..n {
        for j in 0..m {
            // Zeros already agree: paired columns have identical zero patterns.
            if zb[i][j] {
                continue;
            }
            let predicted = row_scale[i] * aligned[(i, j)] * col_scale[j];
            let actual = b[(i, j)];
            if (predicted - actual).abs() > rel_tol * actual.abs().max(predicted.abs()).max(tol::ZERO_CLAMP) {
                return None;
            }
        }
    }
    Some(ScaledMatch { col_perm, row_scale, col_scale })
}

/// Two cones have the same generator set up to order and positive scaling.
pub fn same_generators(a: &PolyhedralCone, b: &PolyhedralCone, cosine_tol: f64) -> bool {
    if a.dim != b.dim || a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    a.generators.iter().all(|g| match b.generators.iter().enumerate().find(|(j, h)| !used[*j] && dot(g, h) >= 1.0 - cosine_tol) {
        Some((j, _)) => {
            used[j] = true;
            true
        }
        None => false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    fn orthant(d: usize) -> PolyhedralCone {
        PolyhedralCone::new(d, Matrix::identity(d).to_rows()).unwrap()
    }

    #[test]
    fn orthant_is_its_own_dual() {
        let k = orthant(3);
        let normals = facet_normals(&k, tol::INCIDENCE).unwrap();
        assert_eq!(normals.len(), 3);
        assert!(same_generators(&dual_cone(&k).unwrap(), &k, 1e-12));
    }

    #[test]
    fn pentagon_cone_has_five_facets_and_is_euclidean_self_dual() {
        let k = PolyhedralCone::new(3, data::pentagon_rays()).unwrap();
        assert_eq!(facet_normals(&k, tol::INCIDENCE).unwrap().len(), 5);
        assert!(same_generators(&dual_cone(&k).unwrap(), &k, 1e-12));
    }

    #[test]
    fn prism_cone_has_seven_facets() {
        let k = PolyhedralCone::new(4, data::prism_rays()).unwrap();
        assert_eq!(facet_normals(&k, tol::INCIDENCE).unwrap().len(), 7);
        assert!(is_pointed(&k) && is_full_dimensional(&k));
    }

    #[test]
    fn square_dual_is_diamond() {
        let k = PolyhedralCone::new(3, data::square_rays()).unwrap();
        let dual = dual_cone(&k).unwrap();
        let diamond = PolyhedralCone::new(
            3,
            vec![vec![1.0, 0.0, 1.0], vec![-1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0], vec![0.0, -1.0, 1.0]],
        )
        .unwrap();
        assert!(same_generators(&dual, &diamond, 1e-12));
    }

    #[test]
    fn pointedness_examples() {
        let line = PolyhedralCone::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(!is_pointed(&line));
        assert!(is_full_dimensional(&line));
        assert!(matches!(facet_normals(&line, tol::INCIDENCE), Err(GeometryError::NotPointed)));
        let flat = PolyhedralCone::new(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(is_pointed(&flat));
        assert!(!is_full_dimensional(&flat));
        assert!(matches!(dual_cone(&flat), Err(GeometryError::NotFullDimensional { rank: 2, dim: 3 })));
        let plane = PolyhedralCone::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]]).unwrap();
        assert!(!is_pointed(&plane));
    }

    #[test]
    fn extreme_ray_reduction() {
        let k = extreme_rays(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0], vec![2.0, 0.0]], 2, tol::INCIDENCE).unwrap();
        assert_eq!(k.len(), 2);
        let prism = extreme_rays(&data::prism_rays(), 4, tol::INCIDENCE).unwrap();
        assert_eq!(prism.len(), 7);
        let hexagon = extreme_rays(&data::polygon_rays(6, 1.0), 3, tol::INCIDENCE).unwrap();
        assert_eq!(hexagon.len(), 6);
        assert!(matches!(
            extreme_rays(&[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]], 2, tol::INCIDENCE),
            Err(GeometryError::NotPointed)
        ));
    }

    #[test]
    fn orthant_slack_is_a_permuted_identity() {
        let s = slack_matrix(&orthant(4)).unwrap();
        assert!(match_up_to_scaling(&Matrix::identity(4), &s.matrix, 1e-12).is_some());
    }

    #[test]
    fn pentagon_slack_matches_circulant() {
        let k = PolyhedralCone::new(3, data::pentagon_rays()).unwrap();
        let s = slack_matrix(&k).unwrap();
        assert!(match_up_to_scaling(&s.matrix, &data::pentagon_slack(), 1e-9).is_some());
    }

    #[test]
    fn prism_slack_has_the_bundled_zero_pattern() {
        let k = PolyhedralCone::new(4, data::prism_rays()).unwrap();
        let s = slack_matrix(&k).unwrap();
        assert!(match_up_to_scaling(&s.matrix, &data::prism_slack(), 1e-9).is_some());
    }

    #[test]
    fn slack_rejects_non_extreme_generators() {
        let k = PolyhedralCone::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(slack_matrix(&k), Err(GeometryError::NotExtreme(2)));
    }

    #[test]
    fn hl96_fails_slack_necessity_with_two_short_rows() {
        let check = slack_necessary_check(&data::hl96(), 4);
        assert!(!check.passed);
        let short = check.defects.iter().find_map(|d| match d {
            SlackDefect::TooFewZeros { rows, zeros, required } => Some((rows.clone(), zeros.clone(), *required)),
            _ => None,
        });
        assert_eq!(short, Some((vec![3, 4], vec![2, 2], 3)));
        assert!(check.reasons().iter().any(|r| r.starts_with("there are 2 rows with fewer than 3 zeroes")));
    }

    #[test]
    fn slack_necessity_accepts_prism_and_identity() {
        assert!(slack_necessary_check(&data::prism_slack(), 4).passed);
        assert!(slack_necessary_check(&Matrix::identity(4), 4).passed);
        let check = slack_necessary_check(&data::prism_slack(), 3);
        assert!(check.defects.contains(&SlackDefect::RankMismatch { rank: 4, expected: 3 }));
    }

    #[test]
    fn polytope_lifting() {
        let s3 = 3f64.sqrt() / 2.0;
        let tri = cone_over_polytope(&[vec![1.0, 0.0], vec![-0.5, s3], vec![-0.5, -s3]]).unwrap();
        assert_eq!((tri.dim(), tri.len()), (3, 3));
        let square = cone_over_polytope(&[vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(square.len(), 4);
        let prism_vertices: Vec<Vec<f64>> = data::prism_rays().iter().map(|r| r[1..].to_vec()).collect();
        let prism = cone_over_polytope(&prism_vertices).unwrap();
        assert!(same_generators(&prism, &PolyhedralCone::new(4, data::prism_rays()).unwrap(), 1e-12));
        let shifted = cone_over_polytope(&[vec![1.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(matches!(shifted, Err(GeometryError::OriginNotInterior { .. })));
    }

    #[test]
    fn factorization_recovers_cones() {
        let orth = cone_from_factorization(&Matrix::identity(3), 3).unwrap();
        let s = slack_matrix(&orth).unwrap();
        assert!(match_up_to_scaling(&Matrix::identity(3), &s.matrix, 1e-12).is_some());

        let m = data::pentagon_slack();
        let k = cone_from_factorization(&m, 3).unwrap();
        let s = slack_matrix(&k).unwrap();
        assert!(match_up_to_scaling(&s.matrix, &m, 1e-9).is_some());

        let prism = cone_from_factorization(&data::prism_slack(), 4).unwrap();
        assert_eq!(prism.len(), 7);
        assert!(same_generators(&dual_cone(&prism).unwrap(), &prism, 1e-9));

        assert!(matches!(cone_from_factorization(&m, 4), Err(GeometryError::RankMismatch { rank: 3, expected: 4 })));
    }

    #[test]
    fn cone_constructor_rejects_bad_generators() {
        assert_eq!(PolyhedralCone::new(2, vec![vec![0.0, 0.0]]), Err(GeometryError::ZeroGenerator(0)));
        assert_eq!(
            PolyhedralCone::new(2, vec![vec![1.0, 1.0], vec![2.0, 2.0]]),
            Err(GeometryError::DuplicateGenerator(0, 1))
        );
        assert!(matches!(PolyhedralCone::new(2, vec![vec![1.0]]), Err(GeometryError::WrongLength { .. })));
    }
}
