//! Browser bindings for `selfdual-core`. Every export returns a JSON string;
//! failures are reported as `{"error": "..."}`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use selfdual_core::geometry::{self, PolyhedralCone};
use selfdual_core::report::{self, AnalysisParams};
use selfdual_core::search::{self, SearchParams, SearchStatus};
use selfdual_core::{data, io, selfdual, Matrix};

#[derive(Serialize)]
struct Failure {
    error: String,
}

fn respond<T: Serialize>(r: Result<T, String>) -> String {
    let out = match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&Failure { error }),
    };
    out.unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

#[derive(Serialize)]
pub struct PolygonView {
    pub k: usize,
    pub height: f64,
    /// Height at which the cone is equal to its Euclidean dual (odd k only).
    pub self_dual_height: Option<f64>,
    pub rays: Vec<Vec<f64>>,
    pub dual_rays: Vec<Vec<f64>>,
    pub slack: Matrix,
    pub self_dual: bool,
    /// Equal to its dual for the standard dot product.
    pub euclidean_self_dual: bool,
    pub psd_scaling: Option<Vec<f64>>,
}

pub fn polygon_view(k: usize, height: f64) -> Result<PolygonView, String> {
    if !(3..=40).contains(&k) {
        return Err(format!("k = {k} is outside 3..=40"));
    }
    if !(height.is_finite() && height > 0.0) {
        return Err("height must be positive".into());
    }
    let cone = PolyhedralCone::new(3, data::polygon_rays(k, height)).map_err(|e| e.to_string())?;
    let dual = geometry::dual_cone(&cone).map_err(|e| e.to_string())?;
    let slack = geometry::slack_matrix(&cone).map_err(|e| e.to_string())?;
    let verdict = selfdual::is_self_dual(&cone).map_err(|e| e.to_string())?;
    Ok(PolygonView {
        k,
        height,
        self_dual_height: (k % 2 == 1).then(|| data::polygon_self_dual_height(k)),
        rays: cone.generators().to_vec(),
        dual_rays: dual.generators().to_vec(),
        slack: slack.matrix,
        self_dual: verdict.self_dual,
        euclidean_self_dual: geometry::same_generators(&cone, &dual, 1e-9),
        psd_scaling: verdict.certificate.map(|c| c.scaling),
    })
}

/// Cone over the regular `k`-gon at `height`, its dual and slack matrix.
#[wasm_bindgen]
pub fn polygon_cone(k: usize, height: f64) -> String {
    respond(polygon_view(k, height))
}

#[derive(Serialize)]
pub struct SearchView {
    pub status: SearchStatus,
    pub attempts: usize,
    pub successful_attempt: Option<usize>,
    pub column_permutation: Option<Vec<usize>>,
    pub generators: Option<Vec<Vec<f64>>>,
    pub gram: Option<Matrix>,
    pub sdp_iterations: Vec<usize>,
}

pub fn search_view(support: &str, d: usize, seed: u64) -> Result<SearchView, String> {
    let s = io::parse_support(support).map_err(|e| e.to_string())?;
    if s.len() > 16 {
        return Err("supports larger than 16x16 are not run in the browser".into());
    }
    let params = SearchParams { target_rank: d, seed, ..SearchParams::default() };
    let t = search::run_search(&s, &params).map_err(|e| e.to_string())?;
    Ok(SearchView {
        status: t.status,
        attempts: t.attempts.len(),
        successful_attempt: t.result.as_ref().map(|r| r.attempt),
        column_permutation: t.column_permutation,
        generators: t.result.as_ref().map(|r| r.realization.cone.generators().to_vec()),
        gram: t.result.map(|r| r.realization.gram),
        sdp_iterations: t.attempts.iter().map(|a| a.sdp.iterations).collect(),
    })
}

/// Runs the realization search on a support given in the text format (`n`, then `n` rows of 0/1).
#[wasm_bindgen]
pub fn search_support(text: &str, d: usize, seed: u64) -> String {
    respond(search_view(text, d, seed))
}

/// Full analysis report of a matrix given in the text format (`rows cols`, then the rows).
#[wasm_bindgen]
pub fn analyze_matrix(text: &str) -> String {
    respond(
        io::parse_matrix(text)
            .map_err(|e| e.to_string())
            .and_then(|a| report::analyze(&a, "input", &AnalysisParams::default()).map_err(|e| e.to_string())),
    )
}

/// Text of a bundled example file (`pentagon.matrix`, `prism.support`, ...), or an empty string.
#[wasm_bindgen]
pub fn example_text(name: &str) -> String {
    let support = |m: &Matrix| io::write_support(&geometry::support(m, 0.0));
    match name {
        "pentagon.matrix" => io::write_matrix(&data::pentagon_slack()),
        "prism.matrix" => io::write_matrix(&data::prism_slack()),
        "hl96.matrix" => io::write_matrix(&data::hl96()),
        "ten_vertex.matrix" => io::write_matrix(&data::ten_vertex_matrix()),
        "pentagon.support" => support(&data::pentagon_slack()),
        "prism.support" => support(&data::prism_slack()),
        "ten_vertex.support" => support(&data::ten_vertex_matrix()),
        "four_cycle.support" => io::write_support(&data::cycle_support(4)),
        _ => String::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn json(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn odd_polygons_at_their_height_are_self_dual() {
        let h = data::polygon_self_dual_height(5);
        let v = json(&polygon_cone(5, h));
        assert_eq!(v["self_dual"], true);
        assert_eq!(v["rays"].as_array().unwrap().len(), 5);
        assert_eq!(v["dual_rays"].as_array().unwrap().len(), 5);
        assert_eq!(v["euclidean_self_dual"], true);
        // Rescaling the height is a linear map, so self-duality survives but not for the dot product.
        let tall = json(&polygon_cone(5, 2.0 * h));
        assert_eq!(tall["self_dual"], true);
        assert_eq!(tall["euclidean_self_dual"], false);
        assert_eq!(json(&polygon_cone(6, 0.7))["self_dual"], false);
        assert!(json(&polygon_cone(2, 1.0))["error"].is_string());
    }

    #[test]
    fn pentagon_search_runs() {
        let v = json(&search_support(&example_text("pentagon.support"), 3, 0));
        assert_eq!(v["status"], "realized");
        assert_eq!(v["generators"].as_array().unwrap().len(), 5);
        let v = json(&search_support(&example_text("four_cycle.support"), 3, 0));
        assert_eq!(v["status"], "no_realization_found");
        assert!(json(&search_support("2\n1x\n", 3, 0))["error"].as_str().unwrap().contains("line 2"));
    }

    #[test]
    fn analysis_of_bundled_matrices() {
        let v = json(&analyze_matrix(&example_text("pentagon.matrix")));
        assert_eq!(v["dnn5"]["class"], "pentagon_slack");
        let v = json(&analyze_matrix(&example_text("hl96.matrix")));
        assert_eq!(v["extreme"]["value"], true);
        assert!(json(&analyze_matrix("2 3\n1 2 3\n4 5 6\n"))["error"].is_string());
        assert_eq!(example_text("nope"), "");
    }
}
