//! One-shot analysis of a symmetric matrix, serialized as JSON by the CLI.

use serde::{Deserialize, Serialize};

use crate::dnn::{self, Dnn5Classification, DnnError, ExtremalityReport, SlackVerdicts, Verdict};
use crate::geometry::{self, SlackCheck};
use crate::linalg::{self, Matrix};
use crate::selfdual;
use crate::tol;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisParams {
    pub tol: f64,
    /// Cone dimension used for the slack tests; defaults to the numeric rank.
    pub rank: Option<usize>,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams { tol: tol::PSD, rank: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDescriptor {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsdSlackSection {
    /// Dimension `d` the slack tests were run in.
    pub cone_dim: usize,
    pub slack_check: SlackCheck,
    pub certified: Verdict,
    /// Why the theorem-based verdicts were not issued.
    pub withheld: Option<String>,
    pub verdicts: Option<SlackVerdicts>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: String,
    pub input: InputDescriptor,
    pub params: AnalysisParams,
    pub dnn: Verdict,
    pub rank: usize,
    /// Smallest eigenvalue relative to `‖A‖∞`.
    pub psd_margin: f64,
    /// Smallest entry relative to `‖A‖∞`.
    pub entry_margin: f64,
    pub extreme: Verdict,
    pub extremality: Option<ExtremalityReport>,
    pub irreducible: bool,
    pub support_components: usize,
    pub simplicial: bool,
    pub psd_slack: PsdSlackSection,
    pub dnn5: Option<Dnn5Classification>,
}

/// Runs every applicable test on `a`. Rejects non-square, asymmetric or non-finite input.
pub fn analyze(a: &Matrix, name: &str, params: &AnalysisParams) -> Result<AnalysisReport, DnnError> {
    let margins = dnn::dnn_margins(a)?;
    if a.max_abs() == 0.0 {
        return Err(DnnError::ZeroMatrix);
    }
    let is_dnn = margins.min_eigenvalue >= -params.tol && margins.min_entry >= -params.tol;
    let rank = linalg::numeric_rank(a, tol::RANK);
    let extremality = if is_dnn { Some(dnn::dnn_extremality(a, params.tol)?) } else { None };
    let extreme = match &extremality {
        Some(e) => Verdict { value: Some(e.extreme), provenance: "numerical".into() },
        None => Verdict { value: None, provenance: "requires-dnn".into() },
    };
    let d = params.rank.unwrap_or(rank);
    let slack_check = geometry::slack_necessary_check(a, d);
    let (certified, withheld, verdicts) = match dnn::certify_psd_slack(a, d)? {
        Ok(hyp) => (
            Verdict { value: Some(true), provenance: "numerical".into() },
            None,
            Some(dnn::classify_psd_slack(a, &hyp)?),
        ),
        Err(failure) => (Verdict { value: Some(false), provenance: "numerical".into() }, Some(failure.to_string()), None),
    };
    let dnn5 = if a.rows() == 5 && is_dnn { Some(dnn::dnn5_classify(a, params.tol)?) } else { None };
    Ok(AnalysisReport {
        version: crate::VERSION.to_string(),
        input: InputDescriptor { name: name.to_string(), rows: a.rows(), cols: a.cols() },
        params: params.clone(),
        dnn: Verdict { value: Some(is_dnn), provenance: "numerical".into() },
        rank,
        psd_margin: margins.min_eigenvalue,
        entry_margin: margins.min_entry,
        extreme,
        extremality,
        irreducible: selfdual::is_irreducible(a),
        support_components: selfdual::support_components(a),
        simplicial: selfdual::is_simplicial(a, d),
        psd_slack: PsdSlackSection { cone_dim: d, slack_check, certified, withheld, verdicts },
        dnn5,
    })
}
