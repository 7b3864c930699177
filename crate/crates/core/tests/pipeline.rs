use selfdual_core::data;
use selfdual_core::geometry;
use selfdual_core::search::{run_search, SearchParams, SearchStatus, SupportPattern};

fn params(d: usize) -> SearchParams {
    SearchParams { target_rank: d, ..SearchParams::default() }
}

fn assert_thresholds(t: &selfdual_core::search::SearchTranscript, d: usize) {
    assert_eq!(t.status, SearchStatus::Realized, "{:#?}", t.attempts.last());
    let s = t.result.as_ref().unwrap();
    let n = s.x.rows();
    let p = SupportPattern::new(
        t.pattern.as_ref().unwrap().iter().map(|r| r.chars().map(|c| c == '1').collect()).collect(),
    )
    .unwrap();
    for i in 0..n {
        assert!((s.x[(i, i)] - 1.0).abs() <= 1e-10);
        for j in 0..n {
            if i != j && p.get(i, j) {
                assert!(s.x[(i, j)] >= 1e-4);
            }
        }
    }
    let eig = selfdual_core::linalg::sym_eigen(&s.x).unwrap();
    assert!(eig.values[d..].iter().all(|v| v.abs() < 1e-8));
    assert!(s.verification.passed);
}

#[test]
fn prism_support_is_realized_in_rank_four() {
    let support = geometry::support(&data::prism_slack(), 0.0);
    let t = run_search(&support, &params(4)).unwrap();
    assert_thresholds(&t, 4);
    let s = t.result.unwrap();
    assert_eq!(s.realization.cone.len(), 7);
    let eig = selfdual_core::linalg::sym_eigen(&s.x).unwrap();
    assert!(eig.values[..4].iter().all(|&v| (0.5..=9.0).contains(&v)), "{:?}", eig.values);
}

#[test]
fn ten_vertex_support_is_realized_in_rank_four() {
    let support = geometry::support(&data::ten_vertex_matrix(), 0.0);
    let t = run_search(&support, &params(4)).unwrap();
    assert_thresholds(&t, 4);
    // Uniform weights land within a few units of the last printed digit of the table.
    let s = t.result.unwrap();
    assert_eq!(s.attempt, 0);
    let gap = s.x.sub(&data::ten_vertex_matrix()).unwrap().max_abs();
    assert!(gap < 5e-5, "max deviation {gap}");
}
