use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use selfdual_core::{data, geometry, io, Matrix};
use serde_json::Value;

fn selfdual(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_selfdual"))
        .args(args)
        .current_dir(cwd)
        .env_remove(selfdual_cli::OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn examples_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = selfdual(&["examples", "all", "-o", "ex"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    dir
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema").join(format!("{name}.schema.json"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&s).unwrap()
}

fn assert_valid(v: &jsonschema::Validator, doc: &Value) {
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn examples_are_bit_identical_to_the_constants() {
    let dir = examples_dir();
    let ex = dir.path().join("ex");
    let matrix = |f: &str| io::parse_matrix(&std::fs::read_to_string(ex.join(f)).unwrap()).unwrap();
    let bits = |m: &Matrix| m.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<u64>>();
    assert_eq!(bits(&matrix("pentagon.matrix")), bits(&data::pentagon_slack()));
    assert_eq!(bits(&matrix("prism.matrix")), bits(&data::prism_slack()));
    assert_eq!(bits(&matrix("hl96.matrix")), bits(&data::hl96()));
    assert_eq!(bits(&matrix("ten_vertex.matrix")), bits(&data::ten_vertex_matrix()));
    let (a, b, m) = data::congruence_triple();
    assert_eq!(bits(&matrix("congruence_a.matrix")), bits(&a));
    assert_eq!(bits(&matrix("congruence_b.matrix")), bits(&b));
    assert_eq!(bits(&matrix("congruence_m.matrix")), bits(&m));
    let (d, rays) = io::parse_cone(&std::fs::read_to_string(ex.join("pentagon.cone")).unwrap()).unwrap();
    assert_eq!(d, 3);
    assert_eq!(rays, data::pentagon_rays());
    let (_, rays) = io::parse_cone(&std::fs::read_to_string(ex.join("prism.cone")).unwrap()).unwrap();
    assert_eq!(rays, data::prism_rays());
    let s = io::parse_support(&std::fs::read_to_string(ex.join("four_cycle.support")).unwrap()).unwrap();
    assert_eq!(s, data::cycle_support(4));
}

#[test]
fn listing_and_unknown_examples() {
    let dir = tempfile::tempdir().unwrap();
    let o = selfdual(&["examples"], dir.path());
    assert!(stdout(&o).contains("hl96"));
    let o = selfdual(&["examples", "nope"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown example"));
}

#[test]
fn slack_of_the_pentagon_matches_the_circulant_up_to_scaling() {
    let dir = examples_dir();
    let o = selfdual(&["slack", "ex/pentagon.cone"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("# rows (generators of K): 0 1 2 3 4"));
    let s = io::parse_matrix(&text).unwrap();
    let m = data::pentagon_slack();
    // Columns of the computed slack are dual generators; align them to M's columns.
    let perm: Vec<usize> = (0..5)
        .map(|j| (0..5).find(|&c| (0..5).all(|i| (s[(i, c)] == 0.0) == (m[(i, j)] == 0.0))).unwrap())
        .collect();
    let aligned = Matrix::from_fn(5, 5, |i, j| s[(i, perm[j])]);
    assert!(geometry::match_up_to_scaling(&aligned, &m, 1e-9).is_some());
}

#[test]
fn slack_of_the_orthant_is_diagonal_and_json_is_available() {
    let dir = examples_dir();
    let o = selfdual(&["slack", "--json", "ex/orthant.cone"], dir.path());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["cone_dim"], 3);
    let data: Vec<f64> = v["matrix"]["data"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(data.iter().filter(|&&x| x != 0.0).count(), 3);
}

#[test]
fn degenerate_cones_fail_with_a_named_precondition() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("line.cone"), "3 4\n1 0 0\n-1 0 0\n0 1 0\n0 0 1\n").unwrap();
    std::fs::write(dir.path().join("flat.cone"), "3 3\n1 0 0\n0 1 0\n1 1 0\n").unwrap();
    let o = selfdual(&["slack", "line.cone"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not pointed"));
    let o = selfdual(&["dual", "flat.cone"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not full-dimensional"));
}

#[test]
fn parse_errors_exit_with_code_4() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.matrix"), "2 2\n1 0\n0 x\n").unwrap();
    let o = selfdual(&["analyze", "bad.matrix"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let o = selfdual(&["verify", "missing.cone"], dir.path());
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn dual_of_the_pentagon_is_the_pentagon() {
    let dir = examples_dir();
    let o = selfdual(&["dual", "ex/pentagon.cone"], dir.path());
    let (d, gens) = io::parse_cone(&stdout(&o)).unwrap();
    let dual = geometry::PolyhedralCone::new(d, gens).unwrap();
    let k = geometry::PolyhedralCone::new(3, data::pentagon_rays()).unwrap();
    assert!(geometry::same_generators(&k, &dual, 1e-9));
}

#[test]
fn verify_decisions() {
    let dir = examples_dir();
    let v = schema("verify-report");
    for (file, expected) in [("ex/orthant.cone", true), ("ex/prism.cone", true), ("ex/pentagon.cone", true), ("ex/square.cone", false)] {
        let o = selfdual(&["verify", file], dir.path());
        assert_eq!(o.status.code(), Some(0));
        let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_valid(&v, &doc);
        assert_eq!(doc["self_dual"], expected, "{file}");
        assert_eq!(doc["certificate"].is_null(), !expected);
    }
}

#[test]
fn analyze_reports_validate_and_carry_the_expected_verdicts() {
    let dir = examples_dir();
    let v = schema("analysis-report");
    let run = |args: &[&str]| -> Value {
        let o = selfdual(args, dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_valid(&v, &doc);
        doc
    };
    let p = run(&["analyze", "ex/pentagon.matrix"]);
    assert_eq!(p["rank"], 3);
    assert_eq!(p["extreme"]["value"], true);
    assert_eq!(p["psd_slack"]["verdicts"]["cp_member"]["value"], false);
    assert_eq!(p["psd_slack"]["verdicts"]["cpsd_member"]["value"], false);
    assert_eq!(p["dnn5"]["class"], "pentagon_slack");

    let h = run(&["analyze", "--rank", "4", "ex/hl96.matrix"]);
    assert_eq!(h["extreme"]["value"], true);
    assert_eq!(h["psd_slack"]["slack_check"]["passed"], false);
    assert!(h["psd_slack"]["withheld"].as_str().unwrap().contains("fewer than 3 zeroes"));

    std::fs::write(dir.path().join("i5.matrix"), io::write_matrix(&Matrix::identity(5))).unwrap();
    let i = run(&["analyze", "i5.matrix"]);
    assert_eq!(i["extreme"]["value"], false);
    assert_eq!(i["simplicial"], true);

    for doc in [&p, &h, &i] {
        let provenances = doc.to_string().matches("\"provenance\"").count();
        assert!(provenances >= 3);
        let r: selfdual_core::report::AnalysisReport = serde_json::from_value((*doc).clone()).unwrap();
        assert_eq!(serde_json::to_value(&r).unwrap(), *doc);
    }
}

#[test]
fn text_output_is_available_for_analyze() {
    let dir = examples_dir();
    let o = selfdual(&["analyze", "--text", "ex/pentagon.matrix"], dir.path());
    let t = stdout(&o);
    assert!(t.contains("rank: 3"));
    assert!(t.contains("dnn5 class: pentagon_slack"));
}

#[test]
fn search_writes_a_transcript_and_a_realization() {
    let dir = examples_dir();
    let v = schema("search-transcript");
    let o = selfdual(&["search", "ex/pentagon.support", "--rank", "3", "-o", "out"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out.join("pentagon.transcript.json")).unwrap()).unwrap();
    assert_valid(&v, &doc);
    assert_eq!(doc["status"], "realized");
    let (d, gens) = io::parse_cone(&std::fs::read_to_string(out.join("pentagon.realization.cone")).unwrap()).unwrap();
    let k = geometry::PolyhedralCone::new(d, gens).unwrap();
    assert_eq!(k.len(), 5);
    assert!(geometry::same_generators(&k, &geometry::dual_cone(&k).unwrap(), 1e-7));
    let t: selfdual_core::search::SearchTranscript = serde_json::from_value(doc.clone()).unwrap();
    assert_eq!(serde_json::to_value(&t).unwrap(), doc);
}

#[test]
fn four_cycle_search_fails_after_its_retries() {
    let dir = examples_dir();
    let o = selfdual(&["search", "ex/four_cycle.support", "--rank", "3", "--retries", "5"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&schema("search-transcript"), &doc);
    assert_eq!(doc["status"], "no_realization_found");
    assert_eq!(doc["attempts"].as_array().unwrap().len(), 5);
    assert!(!dir.path().join("four_cycle.realization.cone").exists());
}

#[test]
fn non_involutive_support_is_a_structured_failure() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.support"), "2\n10\n10\n").unwrap();
    let o = selfdual(&["search", "s.support"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let doc: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_valid(&schema("search-transcript"), &doc);
    assert_eq!(doc["status"], "not_strongly_involutive");
    assert_eq!(doc["attempts"].as_array().unwrap().len(), 0);
}

#[test]
fn search_is_deterministic() {
    let dir = examples_dir();
    let args = ["search", "ex/prism.support", "--rank", "4", "--seed", "7"];
    assert_eq!(stdout(&selfdual(&args, dir.path())), stdout(&selfdual(&args, dir.path())));
}

#[test]
fn parallel_batches_keep_input_order() {
    let dir = examples_dir();
    let inputs = ["ex/square.cone", "ex/pentagon.cone", "ex/orthant.cone", "ex/prism.cone"];
    let mut serial = vec!["verify", "--text"];
    serial.extend(inputs);
    let mut parallel = serial.clone();
    parallel.extend(["--jobs", "4"]);
    let a = stdout(&selfdual(&serial, dir.path()));
    let b = stdout(&selfdual(&parallel, dir.path()));
    assert_eq!(a, b);
    let decisions: Vec<&str> = a.lines().filter(|l| l.starts_with("self-dual")).collect();
    assert_eq!(decisions, ["self-dual: false", "self-dual: true", "self-dual: true", "self-dual: true"]);
}

#[test]
fn output_directory_from_the_environment() {
    let dir = examples_dir();
    let o = Command::new(env!("CARGO_BIN_EXE_selfdual"))
        .args(["verify", "ex/square.cone"])
        .current_dir(dir.path())
        .env(selfdual_cli::OUT_DIR_ENV, "envout")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(dir.path().join("envout/square.verify.json").exists());
}

#[test]
fn a_failing_input_does_not_hide_the_others() {
    let dir = examples_dir();
    std::fs::write(dir.path().join("bad.cone"), "3 1\n1 2\n").unwrap();
    let o = selfdual(&["verify", "--text", "bad.cone", "ex/orthant.cone"], dir.path());
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("self-dual: true"));
}
