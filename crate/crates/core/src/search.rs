//! Search for self-dual realizations of a combinatorial type.
//!
//! Given a 0/1 slack support, the pipeline
//! 1. looks for a column permutation making the support symmetric with a full diagonal,
//! 2. solves `max Σ c_ij X_ij` over PSD `X` with unit diagonal and the prescribed zeros,
//! 3. pushes the solution to rank `d` by alternating projections,
//! 4. factors `X = U·Uᵀ` and dehomogenizes the rows of `U` to get generators `[1, w_i]`,
//! 5. checks that the resulting cone equals its Euclidean dual with the right slack support.
//!
//! Every reported success has passed step 5. A failure only means nothing was found.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, GeometryError, PolyhedralCone};
use crate::linalg::{self, dot, LinalgError, Matrix};
use crate::symperm;

/// Smallest acceptable on-support entry after refinement, and the relative slack margin in verification.
pub const MIN_ON_SUPPORT: f64 = 1e-4;
/// Refinement stops once both projection residuals fall below this.
pub const REFINE_RESIDUAL: f64 = 1e-12;
/// Stagnation: residual decrease below this over [`STAGNATION_WINDOW`] iterations.
pub const STAGNATION_DECREASE: f64 = 1e-16;
pub const STAGNATION_WINDOW: usize = 100;
const DIAGONAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("invalid support pattern: {0}")]
    InvalidPattern(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("SDP did not converge in {iterations} iterations (primal residual {primal_residual:e}, dual residual {dual_residual:e})")]
    NonConvergence { iterations: usize, primal_residual: f64, dual_residual: f64, last: Box<Matrix> },
    #[error("extraction failed: {0}")]
    Extraction(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Symmetric 0/1 pattern with a full diagonal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportPattern {
    n: usize,
    bits: Vec<Vec<bool>>,
}

impl SupportPattern {
    pub fn new(bits: Vec<Vec<bool>>) -> Result<Self, SearchError> {
        let n = bits.len();
        if n == 0 {
            return Err(SearchError::InvalidPattern("empty pattern".into()));
        }
        if bits.iter().any(|r| r.len() != n) {
            return Err(SearchError::InvalidPattern("pattern is not square".into()));
        }
        for i in 0..n {
            if !bits[i][i] {
                return Err(SearchError::InvalidPattern(format!("diagonal entry {i} is zero")));
            }
            for j in 0..i {
                if bits[i][j] != bits[j][i] {
                    return Err(SearchError::InvalidPattern(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(SupportPattern { n, bits })
    }

    /// Support of a matrix, with entries up to `1e-10·‖A‖∞` counted as zero.
    pub fn from_matrix(a: &Matrix) -> Result<Self, SearchError> {
        Self::new(geometry::support(a, crate::tol::ZERO_CLAMP * a.max_abs()))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> &[Vec<bool>] {
        &self.bits
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i][j]
    }

    /// Relabelled pattern `σ·P·σᵀ`: entry `(i, j)` is entry `(σ[i], σ[j])` of `self`.
    pub fn relabeled(&self, sigma: &[usize]) -> SupportPattern {
        let bits = (0..self.n).map(|i| (0..self.n).map(|j| self.bits[sigma[i]][sigma[j]]).collect()).collect();
        SupportPattern { n: self.n, bits }
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.bits.iter().map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect()).collect()
    }

    /// Overwrites the diagonal with 1 and off-support entries with 0.
    pub fn project_affine(&self, x: &Matrix) -> Matrix {
        Matrix::from_fn(self.n, self.n, |i, j| {
            if i == j {
                1.0
            } else if self.bits[i][j] {
                x[(i, j)]
            } else {
                0.0
            }
        })
    }

    /// Max-abs deviation of `x` from the affine set.
    pub fn affine_violation(&self, x: &Matrix) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i == j {
                    worst = worst.max((x[(i, i)] - 1.0).abs());
                } else if !self.bits[i][j] {
                    worst = worst.max(x[(i, j)].abs());
                }
            }
        }
        worst
    }

    fn off_diagonal_support(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| (i + 1..self.n).filter(move |&j| self.bits[i][j]).map(move |j| (i, j)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub target_rank: usize,
    pub max_iter: usize,
    /// SDP step; `None` means `1/n`.
    pub step_size: Option<f64>,
    pub psd_tol: f64,
    pub support_tol: f64,
    pub rank_tol: f64,
    /// Primal and dual residual threshold of the SDP solver.
    pub sdp_tol: f64,
    /// Cosine tolerance of the final verification.
    pub verify_tol: f64,
    pub seed: u64,
    pub retries: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            target_rank: 3,
            max_iter: 5000,
            step_size: None,
            psd_tol: 1e-9,
            support_tol: 1e-7,
            rank_tol: 1e-8,
            sdp_tol: 1e-10,
            verify_tol: 1e-6,
            seed: 0,
            retries: 20,
        }
    }
}

impl SearchParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        let tolerances = [self.psd_tol, self.support_tol, self.rank_tol, self.sdp_tol, self.verify_tol];
        if tolerances.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
            return Err(SearchError::InvalidParams("tolerances must be positive".into()));
        }
        if let Some(s) = self.step_size {
            if !(s > 0.0 && s.is_finite()) {
                return Err(SearchError::InvalidParams("step size must be positive".into()));
            }
        }
        if self.max_iter == 0 {
            return Err(SearchError::InvalidParams("max_iter must be at least 1".into()));
        }
        if self.target_rank == 0 {
            return Err(SearchError::InvalidParams("target rank must be at least 1".into()));
        }
        if self.retries == 0 {
            return Err(SearchError::InvalidParams("retries must be at least 1".into()));
        }
        Ok(())
    }
}

/// Column permutation `σ` with `S[i][σ(j)] = S[j][σ(i)]` and `S[i][σ(i)] = 1`.
///
/// Returns `None` for non-square input or after exhausting the pruned search.
pub fn sisd_check(s: &[Vec<bool>]) -> Option<Vec<usize>> {
    let n = s.len();
    if n == 0 || s.iter().any(|r| r.len() != n) {
        return None;
    }
    // Permuting the columns of S is permuting the rows of Sᵀ.
    symperm::first_symmetrizing_permutation(&symperm::transpose(s))
}

/// Applies a column permutation: entry `(i, j)` of the result is `s[i][sigma[j]]`.
pub fn permute_columns(s: &[Vec<bool>], sigma: &[usize]) -> Vec<Vec<bool>> {
    s.iter().map(|r| sigma.iter().map(|&c| r[c]).collect()).collect()
}

pub fn uniform_weights(p: &SupportPattern) -> Matrix {
    let mut c = Matrix::zeros(p.n, p.n);
    for (i, j) in p.off_diagonal_support() {
        c[(i, j)] = 1.0;
        c[(j, i)] = 1.0;
    }
    c
}

/// Symmetric weights drawn uniformly from `[0.5, 1.5)` on the off-diagonal support, upper triangle in row-major order.
pub fn random_weights(p: &SupportPattern, rng: &mut impl Rng) -> Matrix {
    let mut c = Matrix::zeros(p.n, p.n);
    for (i, j) in p.off_diagonal_support() {
        let w = rng.random_range(0.5..1.5);
        c[(i, j)] = w;
        c[(j, i)] = w;
    }
    c
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpTracePoint {
    pub iteration: usize,
    pub objective: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpOutcome {
    pub x: Matrix,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: f64,
    /// Number of iterations at which the objective dropped.
    pub objective_decreases: usize,
    pub trace: Vec<SdpTracePoint>,
}

fn sampled(iteration: usize) -> bool {
    iteration <= 10 || iteration.is_multiple_of(50)
}

fn weighted_sum(c: &Matrix, x: &Matrix) -> f64 {
    dot(c.as_slice(), x.as_slice())
}

/// Solves `max Σ c_ij X_ij` s.t. `X ⪰ 0`, `X_ii = 1`, `X_ij = 0` off the support.
///
/// Douglas-Rachford splitting between the affine set and the PSD cone, with the
/// objective entering the affine step as a gradient step of size `step`. The
/// returned iterate is the PSD one.
pub fn sdp_feasibility(p: &SupportPattern, weights: &Matrix, params: &SearchParams) -> Result<SdpOutcome, SearchError> {
    params.validate()?;
    let n = p.n;
    if weights.rows() != n || weights.cols() != n {
        return Err(SearchError::InvalidParams(format!("weights must be {n}x{n}")));
    }
    if weights.min_entry() < 0.0 {
        return Err(SearchError::InvalidParams("weights must be nonnegative".into()));
    }
    let step = params.step_size.unwrap_or(1.0 / n as f64);
    let rho = 1.0 / step;
    let ascent = weights.scaled(step);
    let mut z = Matrix::identity(n);
    let mut u = Matrix::zeros(n, n);
    let mut trace = Vec::new();
    let mut previous = weighted_sum(weights, &z);
    let mut decreases = 0;
    let (mut primal, mut dual) = (f64::INFINITY, f64::INFINITY);
    for k in 1..=params.max_iter {
        let x = p.project_affine(&z.sub(&u)?.add(&ascent)?);
        let z_next = linalg::psd_project(&x.add(&u)?)?;
        let diff = x.sub(&z_next)?;
        u = u.add(&diff)?;
        primal = diff.frobenius();
        dual = rho * z_next.sub(&z)?.frobenius();
        z = z_next;
        let objective = weighted_sum(weights, &z);
        if objective < previous - 1e-12 * previous.abs().max(1.0) {
            decreases += 1;
        }
        previous = objective;
        let done = primal <= params.sdp_tol && dual <= params.sdp_tol;
        if sampled(k) || done {
            trace.push(SdpTracePoint { iteration: k, objective, primal_residual: primal, dual_residual: dual });
        }
        if done {
            let violation = p.affine_violation(&z);
            if violation > params.support_tol {
                break;
            }
            return Ok(SdpOutcome {
                x: z,
                iterations: k,
                primal_residual: primal,
                dual_residual: dual,
                objective,
                objective_decreases: decreases,
                trace,
            });
        }
    }
    Err(SearchError::NonConvergence {
        iterations: params.max_iter,
        primal_residual: primal,
        dual_residual: dual,
        last: Box::new(z),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineStop {
    Converged,
    Stagnated,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineTracePoint {
    pub iteration: usize,
    /// Distance from the affine iterate to the rank-`d` set.
    pub rank_residual: f64,
    /// Distance from the rank-`d` iterate back to the affine set.
    pub affine_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineOutcome {
    pub x: Matrix,
    pub iterations: usize,
    pub stop: RefineStop,
    /// Whether the success thresholds hold for `x`.
    pub accepted: bool,
    pub rejection: Option<String>,
    /// Residuals never increased across half-steps (up to rounding).
    pub residuals_monotone: bool,
    pub eigenvalues: Vec<f64>,
    pub min_on_support: f64,
    pub trace: Vec<RefineTracePoint>,
}

/// Alternates rank-`d` PSD projection with the affine projection of `support`.
///
/// Accepted when the eigenvalues past the `d`-th are below `rank_tol` in absolute
/// value, every on-support off-diagonal entry is at least `1e-4` and the diagonal
/// is within `1e-10` of 1.
pub fn rank_refine(x: &Matrix, support: &SupportPattern, d: usize, params: &SearchParams) -> Result<RefineOutcome, SearchError> {
    params.validate()?;
    let n = support.n;
    if x.rows() != n || x.cols() != n {
        return Err(SearchError::InvalidParams(format!("matrix must be {n}x{n}")));
    }
    if d == 0 || d > n {
        return Err(SearchError::InvalidParams(format!("target rank {d} outside 1..={n}")));
    }
    let mut x = support.project_affine(&x.symmetrized());
    let mut history: Vec<f64> = Vec::new();
    let mut trace = Vec::new();
    let mut monotone = true;
    let mut last_affine = f64::INFINITY;
    let mut stop = RefineStop::MaxIterations;
    let mut iterations = params.max_iter;
    for k in 1..=params.max_iter {
        let y = linalg::low_rank_project(&x, d)?;
        let rank_residual = x.sub(&y)?.frobenius();
        let next = support.project_affine(&y);
        let affine_residual = next.sub(&y)?.frobenius();
        let slack = |r: f64| r * (1.0 + 1e-9) + 1e-15;
        if rank_residual > slack(last_affine) || affine_residual > slack(rank_residual) {
            monotone = false;
        }
        last_affine = affine_residual;
        x = next;
        let converged = rank_residual < REFINE_RESIDUAL && affine_residual < REFINE_RESIDUAL;
        history.push(affine_residual);
        let stagnated = !converged
            && k > STAGNATION_WINDOW
            && history[k - 1 - STAGNATION_WINDOW] - affine_residual < STAGNATION_DECREASE;
        if sampled(k) || converged || stagnated {
            trace.push(RefineTracePoint { iteration: k, rank_residual, affine_residual });
        }
        if converged || stagnated {
            stop = if converged { RefineStop::Converged } else { RefineStop::Stagnated };
            iterations = k;
            break;
        }
    }
    let eig = linalg::sym_eigen(&x)?;
    let trailing = eig.values[d..].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let min_on_support = support.off_diagonal_support().map(|(i, j)| x[(i, j)]).fold(f64::INFINITY, f64::min);
    let diagonal = x.diagonal().iter().fold(0.0_f64, |m, v| m.max((v - 1.0).abs()));
    let rejection = if trailing >= params.rank_tol {
        Some(format!("eigenvalue beyond rank {d} has magnitude {trailing:e}"))
    } else if min_on_support < MIN_ON_SUPPORT {
        Some(format!("on-support entry {min_on_support:e} below {MIN_ON_SUPPORT:e}"))
    } else if diagonal > DIAGONAL_TOL {
        Some(format!("diagonal deviates from 1 by {diagonal:e}"))
    } else {
        None
    };
    Ok(RefineOutcome {
        x,
        iterations,
        stop,
        accepted: rejection.is_none(),
        rejection,
        residuals_monotone: monotone,
        eigenvalues: eig.values,
        min_on_support,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealizationResiduals {
    /// Smallest eigenvalue of `X` relative to `‖X‖∞`.
    pub psd_margin: f64,
    /// Largest off-support `|X_ij|` relative to `‖X‖∞`.
    pub support_violation: f64,
    /// Largest `1 − cos` between a generator of the Euclidean dual and its closest primal generator, and vice versa.
    pub selfdual_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    /// Rows `[1, w_i]`.
    pub generators: Matrix,
    pub cone: PolyhedralCone,
    /// `W̄·W̄ᵀ`.
    pub gram: Matrix,
    pub residuals: RealizationResiduals,
}

fn worst_cosine_gap(a: &PolyhedralCone, b: &PolyhedralCone) -> f64 {
    let one_way = |x: &PolyhedralCone, y: &PolyhedralCone| {
        x.generators()
            .iter()
            .map(|g| 1.0 - y.generators().iter().map(|h| dot(g, h)).fold(f64::NEG_INFINITY, f64::max))
            .fold(0.0_f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

fn constant_sign(v: &[f64]) -> bool {
    let largest = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    largest > 0.0 && (v.iter().all(|&x| x > 1e-12 * largest) || v.iter().all(|&x| x < -1e-12 * largest))
}

fn column_sums(u: &Matrix) -> Vec<f64> {
    (0..u.cols()).map(|j| u.column(j).iter().sum()).collect()
}

/// Orthogonal symmetric `H` with `H·e₁ = q/‖q‖`.
fn householder_to(q: &[f64]) -> Matrix {
    let k = q.len();
    let len = linalg::norm(q);
    if len == 0.0 {
        return Matrix::identity(k);
    }
    let mut w: Vec<f64> = q.iter().map(|v| v / len).collect();
    w[0] -= 1.0;
    let ww = dot(&w, &w);
    if ww < 1e-30 {
        return Matrix::identity(k);
    }
    Matrix::from_fn(k, k, |i, j| f64::from(u8::from(i == j)) - 2.0 * w[i] * w[j] / ww)
}

/// Factors `X ≈ U·Uᵀ` with the top-`d` eigenpairs and dehomogenizes the rows of `U`.
///
/// The leading eigenvector of a nonnegative matrix with connected support has
/// constant sign, so every row of `U` has a nonzero first entry to divide by.
pub fn extract_realization(x: &Matrix, d: usize, support: &SupportPattern) -> Result<Realization, SearchError> {
    x.ensure_symmetric()?;
    x.check_finite()?;
    let n = x.rows();
    if support.n != n {
        return Err(SearchError::InvalidParams(format!("support is {}x{}, matrix is {n}x{n}", support.n, support.n)));
    }
    if d == 0 || d > n {
        return Err(SearchError::InvalidParams(format!("target rank {d} outside 1..={n}")));
    }
    let eig = linalg::sym_eigen(x)?;
    if eig.values[d - 1] <= 0.0 {
        return Err(SearchError::Extraction(format!("eigenvalue {d} is not positive")));
    }
    let mut u = linalg::spectral_factor(&eig, d);
    if !constant_sign(&u.column(0)) {
        // A repeated top eigenvalue leaves the eigenbasis arbitrary; rotate the
        // factor so its first column is the projection of the all-ones vector.
        u = u.matmul(&householder_to(&column_sums(&u)))?;
    }
    let first = u.column(0);
    if !constant_sign(&first) {
        return Err(SearchError::Extraction("leading eigenvector has mixed signs".into()));
    }
    if first[0] < 0.0 {
        for i in 0..n {
            u[(i, 0)] = -u[(i, 0)];
        }
    }
    let generators = Matrix::from_fn(n, d, |i, j| if j == 0 { 1.0 } else { u[(i, j)] / u[(i, 0)] });
    let gram = generators.gram();
    let cone = PolyhedralCone::new(d, generators.to_rows())?;
    let dual = geometry::dual_cone(&cone).map_err(|e| SearchError::Extraction(format!("dual cone: {e}")))?;
    let scale = x.max_abs();
    let mut violation = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            if i != j && !support.get(i, j) {
                violation = violation.max(x[(i, j)].abs());
            }
        }
    }
    let residuals = RealizationResiduals {
        psd_margin: eig.values[n - 1] / scale,
        support_violation: violation / scale,
        selfdual_gap: worst_cosine_gap(&cone, &dual),
    };
    Ok(Realization { generators, cone, gram, residuals })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    /// Dual generators pair bijectively with primal generators at cosine ≥ 1 − tol.
    pub generator_match: bool,
    /// Dual generator `j` matched to primal generator `matching[j]`.
    pub matching: Option<Vec<usize>>,
    /// Supports of the aligned slack and of the Gram matrix equal the pattern.
    pub support_match: bool,
    /// `W̄·W̄ᵀ` agrees with the stored Gram matrix within `1e-8·‖gram‖∞`.
    pub gram_consistent: bool,
    /// Smallest on-support slack entry relative to the largest one.
    pub min_slack_ratio: Option<f64>,
    pub slack_margin_ok: bool,
    pub failures: Vec<String>,
}

fn support_equals(a: &Matrix, p: &SupportPattern, rel: f64) -> bool {
    let cut = rel * a.max_abs();
    (0..p.n).all(|i| (0..p.n).all(|j| (a[(i, j)].abs() > cut) == p.get(i, j)))
}

/// Checks that the realized cone is its own Euclidean dual with slack support `p`.
pub fn verify_realization(r: &Realization, p: &SupportPattern, tol: f64) -> VerificationReport {
    let mut failures = Vec::new();
    let n = r.cone.len();
    let gram_check = r.generators.gram();
    let gram_consistent = r.gram.rows() == gram_check.rows()
        && r.gram.cols() == gram_check.cols()
        && gram_check.sub(&r.gram).map(|d| d.max_abs()).unwrap_or(f64::INFINITY) <= 1e-8 * r.gram.max_abs();
    if !gram_consistent {
        failures.push("stored Gram matrix differs from the generators' Gram matrix".into());
    }
    let gram_support = p.n == n && r.gram.rows() == n && support_equals(&r.gram, p, tol);
    if !gram_support {
        failures.push("Gram support differs from the pattern".into());
    }

    let dual = match geometry::dual_cone(&r.cone) {
        Ok(d) => Some(d),
        Err(e) => {
            failures.push(format!("dual cone: {e}"));
            None
        }
    };
    let matching = dual.as_ref().and_then(|dual| {
        if dual.len() != n {
            failures.push(format!("dual has {} generators, primal has {n}", dual.len()));
            return None;
        }
        let mut used = vec![false; n];
        let mut matching = Vec::with_capacity(n);
        for h in dual.generators() {
            let best = (0..n)
                .filter(|&i| !used[i])
                .map(|i| (i, dot(h, &r.cone.generators()[i])))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((i, c)) if c >= 1.0 - tol => {
                    used[i] = true;
                    matching.push(i);
                }
                _ => {
                    failures.push("a dual generator has no matching primal generator".into());
                    return None;
                }
            }
        }
        Some(matching)
    });
    let generator_match = matching.is_some();

    let mut slack_support = false;
    let mut min_slack_ratio = None;
    if let (Some(dual), Some(matching)) = (&dual, &matching) {
        // Column i holds the dual generator matched to primal generator i.
        let mut aligned = vec![0; n];
        for (j, &i) in matching.iter().enumerate() {
            aligned[i] = j;
        }
        let slack = Matrix::from_fn(n, n, |i, j| dot(&r.cone.generators()[i], &dual.generators()[aligned[j]]));
        slack_support = p.n == n && support_equals(&slack, p, tol);
        if !slack_support {
            failures.push("slack support differs from the pattern".into());
        }
        let top = slack.max_abs();
        let min_on = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| p.n == n && p.get(i, j))
            .map(|(i, j)| slack[(i, j)])
            .fold(f64::INFINITY, f64::min);
        min_slack_ratio = Some(min_on / top);
    }
    let slack_margin_ok = min_slack_ratio.is_some_and(|m| m >= MIN_ON_SUPPORT);
    if min_slack_ratio.is_some() && !slack_margin_ok {
        failures.push(format!("smallest on-support slack is below {MIN_ON_SUPPORT:e} of the largest"));
    }
    let support_match = gram_support && slack_support;
    VerificationReport {
        passed: generator_match && support_match && gram_consistent && slack_margin_ok,
        generator_match,
        matching,
        support_match,
        gram_consistent,
        min_slack_ratio,
        slack_margin_ok,
        failures,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightKind {
    Uniform,
    Random,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SdpSummary {
    pub converged: bool,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub objective: Option<f64>,
    pub objective_decreases: Option<usize>,
    pub trace: Vec<SdpTracePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefineSummary {
    pub stop: RefineStop,
    pub accepted: bool,
    pub rejection: Option<String>,
    pub iterations: usize,
    pub residuals_monotone: bool,
    pub eigenvalues: Vec<f64>,
    pub min_on_support: f64,
    pub trace: Vec<RefineTracePoint>,
}

impl From<&RefineOutcome> for RefineSummary {
    fn from(o: &RefineOutcome) -> Self {
        RefineSummary {
            stop: o.stop,
            accepted: o.accepted,
            rejection: o.rejection.clone(),
            iterations: o.iterations,
            residuals_monotone: o.residuals_monotone,
            eigenvalues: o.eigenvalues.clone(),
            min_on_support: o.min_on_support,
            trace: o.trace.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttemptTrace {
    pub attempt: usize,
    pub weights: WeightKind,
    pub sdp: SdpSummary,
    pub refine: Option<RefineSummary>,
    pub extraction_error: Option<String>,
    pub verification: Option<VerificationReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSuccess {
    pub attempt: usize,
    pub x: Matrix,
    pub realization: Realization,
    pub verification: VerificationReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RetryOutcome {
    pub attempts: Vec<AttemptTrace>,
    pub success: Option<SearchSuccess>,
}

/// Runs up to `params.retries` attempts, stopping at the first verified realization.
///
/// Attempt 0 uses uniform weights; later attempts draw weights from a ChaCha8
/// stream seeded with `params.seed`.
pub fn randomized_retry(p: &SupportPattern, params: &SearchParams) -> Result<RetryOutcome, SearchError> {
    params.validate()?;
    let d = params.target_rank;
    if d > p.n {
        return Err(SearchError::InvalidParams(format!("target rank {d} exceeds pattern size {}", p.n)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut attempts = Vec::new();
    for attempt in 0..params.retries {
        let (kind, weights) = if attempt == 0 {
            (WeightKind::Uniform, uniform_weights(p))
        } else {
            (WeightKind::Random, random_weights(p, &mut rng))
        };
        let mut trace = AttemptTrace {
            attempt,
            weights: kind,
            sdp: SdpSummary {
                converged: false,
                iterations: 0,
                primal_residual: f64::NAN,
                dual_residual: f64::NAN,
                objective: None,
                objective_decreases: None,
                trace: Vec::new(),
            },
            refine: None,
            extraction_error: None,
            verification: None,
        };
        let sdp = match sdp_feasibility(p, &weights, params) {
            Ok(s) => s,
            Err(SearchError::NonConvergence { iterations, primal_residual, dual_residual, .. }) => {
                trace.sdp.iterations = iterations;
                trace.sdp.primal_residual = primal_residual;
                trace.sdp.dual_residual = dual_residual;
                attempts.push(trace);
                continue;
            }
            Err(e) => return Err(e),
        };
        trace.sdp = SdpSummary {
            converged: true,
            iterations: sdp.iterations,
            primal_residual: sdp.primal_residual,
            dual_residual: sdp.dual_residual,
            objective: Some(sdp.objective),
            objective_decreases: Some(sdp.objective_decreases),
            trace: sdp.trace,
        };
        let refined = rank_refine(&sdp.x, p, d, params)?;
        trace.refine = Some(RefineSummary::from(&refined));
        if !refined.accepted {
            attempts.push(trace);
            continue;
        }
        let realization = match extract_realization(&refined.x, d, p) {
            Ok(r) => r,
            Err(e) => {
                trace.extraction_error = Some(e.to_string());
                attempts.push(trace);
                continue;
            }
        };
        let verification = verify_realization(&realization, p, params.verify_tol);
        trace.verification = Some(verification.clone());
        attempts.push(trace);
        if verification.passed {
            return Ok(RetryOutcome {
                attempts,
                success: Some(SearchSuccess { attempt, x: refined.x, realization, verification }),
            });
        }
    }
    Ok(RetryOutcome { attempts, success: None })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    Realized,
    NotStronglyInvolutive,
    NoRealizationFound,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchInput {
    pub n: usize,
    pub support: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchTranscript {
    pub version: String,
    pub input: SearchInput,
    pub params: SearchParams,
    pub status: SearchStatus,
    /// Column permutation making the input symmetric with a full diagonal.
    pub column_permutation: Option<Vec<usize>>,
    pub pattern: Option<Vec<String>>,
    pub attempts: Vec<AttemptTrace>,
    pub result: Option<SearchSuccess>,
}

fn pattern_strings(s: &[Vec<bool>]) -> Vec<String> {
    s.iter().map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect()).collect()
}

/// Runs the whole pipeline on a square 0/1 slack support.
pub fn run_search(support: &[Vec<bool>], params: &SearchParams) -> Result<SearchTranscript, SearchError> {
    params.validate()?;
    let n = support.len();
    if n == 0 || support.iter().any(|r| r.len() != n) {
        return Err(SearchError::InvalidPattern("support must be a nonempty square 0/1 matrix".into()));
    }
    let mut transcript = SearchTranscript {
        version: crate::VERSION.to_string(),
        input: SearchInput { n, support: pattern_strings(support) },
        params: params.clone(),
        status: SearchStatus::NotStronglyInvolutive,
        column_permutation: None,
        pattern: None,
        attempts: Vec::new(),
        result: None,
    };
    let Some(sigma) = sisd_check(support) else {
        return Ok(transcript);
    };
    let pattern = SupportPattern::new(permute_columns(support, &sigma))?;
    transcript.column_permutation = Some(sigma);
    transcript.pattern = Some(pattern.to_strings());
    let outcome = randomized_retry(&pattern, params)?;
    transcript.attempts = outcome.attempts;
    transcript.status = if outcome.success.is_some() { SearchStatus::Realized } else { SearchStatus::NoRealizationFound };
    transcript.result = outcome.success;
    Ok(transcript)
}
