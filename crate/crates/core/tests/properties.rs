use itertools::Itertools;
use proptest::prelude::*;
use selfdual_core::data;
use selfdual_core::dnn;
use selfdual_core::geometry::{self, PolyhedralCone};
use selfdual_core::search::{self, SearchParams, SupportPattern};
use selfdual_core::selfdual;
use selfdual_core::{Matrix, SlackMatrix};

fn cone_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (2usize..=4).prop_flat_map(|d| {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, d - 1), d..=8).prop_map(|tails| {
            tails.into_iter().map(|t| std::iter::once(1.0).chain(t).collect()).collect()
        })
    })
}

fn brute_force_sisd(s: &[Vec<bool>]) -> bool {
    let n = s.len();
    (0..n).permutations(n).any(|sigma| {
        (0..n).all(|i| s[i][sigma[i]] && (0..n).all(|j| s[i][sigma[j]] == s[j][sigma[i]]))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn double_dual_is_identity(gens in cone_strategy()) {
        let d = gens[0].len();
        let k = geometry::extreme_rays(&gens, d, 1e-9).unwrap();
        let back = geometry::dual_cone(&geometry::dual_cone(&k).unwrap()).unwrap();
        prop_assert!(geometry::same_generators(&k, &back, 1e-8));
    }

    #[test]
    fn slack_is_invariant_under_linear_maps(gens in cone_strategy(), entries in prop::collection::vec(-1.0f64..1.0, 16)) {
        let d = gens[0].len();
        let k = geometry::extreme_rays(&gens, d, 1e-9).unwrap();
        // Diagonally dominant, hence invertible.
        let t = Matrix::from_fn(d, d, |i, j| entries[i * 4 + j] + if i == j { 4.0 } else { 0.0 });
        let a = geometry::slack_matrix(&k).unwrap();
        let b = geometry::slack_matrix(&k.transform(&t).unwrap()).unwrap();
        prop_assert!(geometry::match_up_to_scaling(&a.matrix, &b.matrix, 1e-7).is_some());
    }

    #[test]
    fn extremality_is_permutation_and_scale_invariant(
        n in 3usize..=7,
        k in 1usize..=4,
        entries in prop::collection::vec(0.0f64..1.0, 28),
        zeros in prop::collection::vec(any::<bool>(), 28),
        shift in 0usize..7,
        scale in 0.01f64..100.0,
    ) {
        let k = k.min(n);
        let b = Matrix::from_fn(n, k, |i, j| if zeros[i * 4 + j] { 0.0 } else { entries[i * 4 + j] });
        let a = b.gram();
        prop_assume!(a.max_abs() > 0.0);
        let base = dnn::dnn_extremality(&a, 1e-9).unwrap();
        let perm: Vec<usize> = (0..n).map(|i| (i * 3 + shift) % n).collect();
        prop_assume!(perm.iter().all_unique());
        let p = dnn::dnn_extremality(&a.permute_symmetric(&perm), 1e-9).unwrap();
        let s = dnn::dnn_extremality(&a.scaled(scale), 1e-9).unwrap();
        prop_assert_eq!(base.extreme, p.extreme);
        prop_assert_eq!(base.extreme, s.extreme);
        prop_assert_eq!(base.intersection_dim, s.intersection_dim);
    }

    #[test]
    fn sisd_agrees_with_brute_force(n in 1usize..=6, bits in prop::collection::vec(any::<bool>(), 36), planted in any::<bool>(), rot in 0usize..6) {
        let s: Vec<Vec<bool>> = if planted {
            // Symmetric with diagonal, then columns rotated: always strongly involutive.
            (0..n).map(|i| (0..n).map(|j| {
                let c = (j + rot) % n;
                i == c || bits[i.min(c) * 6 + i.max(c)]
            }).collect()).collect()
        } else {
            (0..n).map(|i| (0..n).map(|j| bits[i * 6 + j]).collect()).collect()
        };
        let found = search::sisd_check(&s);
        prop_assert_eq!(found.is_some(), brute_force_sisd(&s));
        if let Some(sigma) = found {
            prop_assert!(SupportPattern::new(search::permute_columns(&s, &sigma)).is_ok());
        }
    }

    #[test]
    fn psd_scaling_is_recovered(k in 0usize..3, scales in prop::collection::vec(0.1f64..10.0, 9), shift in 0usize..9) {
        let k = [5, 7, 9][k];
        let cone = PolyhedralCone::new(3, data::polygon_rays(k, data::polygon_self_dual_height(k))).unwrap();
        let base = geometry::slack_matrix(&cone).unwrap();
        let perm: Vec<usize> = (0..k).map(|i| (i + shift) % k).collect();
        let scrambled = Matrix::from_fn(k, k, |i, j| base.matrix[(perm[i], j)] * scales[j]);
        let slack = SlackMatrix { matrix: scrambled.clone(), cone_dim: 3, row_labels: (0..k).collect(), col_labels: (0..k).collect() };
        let cert = selfdual::find_psd_scaling(&slack).unwrap().unwrap();
        prop_assert!(cert.verify(&scrambled));
    }
}

#[test]
fn even_polygons_are_never_self_dual() {
    for k in (4..=10).step_by(2) {
        for h in [0.3, 0.7, 1.0, 1.5] {
            let cone = PolyhedralCone::new(3, data::polygon_rays(k, h)).unwrap();
            assert!(!selfdual::is_self_dual(&cone).unwrap().self_dual, "k = {k}, h = {h}");
        }
    }
}

#[test]
fn odd_polygons_at_the_right_height_are_self_dual() {
    for k in [3, 5, 7, 9] {
        let cone = PolyhedralCone::new(3, data::polygon_rays(k, data::polygon_self_dual_height(k))).unwrap();
        assert!(selfdual::is_self_dual(&cone).unwrap().self_dual, "k = {k}");
        assert!(geometry::same_generators(&cone, &geometry::dual_cone(&cone).unwrap(), 1e-9));
    }
}

#[test]
fn relabelled_support_gives_an_equivalent_realization() {
    let params = SearchParams { target_rank: 4, ..SearchParams::default() };
    let p = SupportPattern::from_matrix(&data::prism_slack()).unwrap();
    let sigma = [3, 6, 0, 5, 1, 4, 2];
    let q = p.relabeled(&sigma);
    let a = search::randomized_retry(&p, &params).unwrap().success.unwrap();
    let b = search::randomized_retry(&q, &params).unwrap().success.unwrap();
    assert_eq!((a.attempt, b.attempt), (0, 0));
    let aligned = a.realization.gram.permute_symmetric(&sigma);
    assert!(geometry::match_up_to_scaling(&aligned, &b.realization.gram, 1e-6).is_some());
}

#[test]
fn refinement_residuals_decrease_monotonically() {
    let params = SearchParams { target_rank: 4, ..SearchParams::default() };
    let p = SupportPattern::from_matrix(&data::ten_vertex_matrix()).unwrap();
    let sdp = search::sdp_feasibility(&p, &search::uniform_weights(&p), &params).unwrap();
    let r = search::rank_refine(&sdp.x, &p, 4, &params).unwrap();
    assert!(r.accepted && r.residuals_monotone);
    for w in r.trace.windows(2) {
        assert!(w[1].rank_residual <= w[0].rank_residual * (1.0 + 1e-9) + 1e-15);
    }
}

#[test]
fn printed_ten_vertex_polytope_has_the_search_support() {
    // The printed vertices carry five digits, so facets are detected with incidence 1e-4.
    let wt = data::ten_vertex_polytope_transposed();
    let vertices: Vec<Vec<f64>> = (0..10).map(|j| wt.column(j)).collect();
    let cone = geometry::cone_over_polytope(&vertices).unwrap();
    let slack = geometry::slack_matrix_with(&cone, 1e-4).unwrap();
    let sigma = search::sisd_check(&slack.support()).unwrap();
    let ours = SupportPattern::new(search::permute_columns(&slack.support(), &sigma)).unwrap();
    let target = SupportPattern::from_matrix(&data::ten_vertex_matrix()).unwrap();
    let degrees = |p: &SupportPattern| {
        let mut d: Vec<usize> = p.bits().iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
        d.sort_unstable();
        d
    };
    assert_eq!(degrees(&ours), degrees(&target));
}
