//! End-to-end tests of the command-line interface: exit codes, JSON report
//! shapes, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf =
        [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.to_str().expect("fixture path is valid UTF-8").to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convexterm"))
        .args(args)
        .env_remove("CONVEXTERM_PGRID")
        .output()
        .expect("binary runs")
}

fn run_with_grid(grid: &str, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convexterm"))
        .args(args)
        .env("CONVEXTERM_PGRID", grid)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not one JSON document: {e}\n{}", String::from_utf8_lossy(&out.stdout))
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process exits normally")
}

#[test]
fn probe_classifies_the_three_extension_kinds() {
    let out = run(&["probe-extension", "--ext", &fixture("blackhole.json"), "--samples", "20"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["case"], 1);
    assert_eq!(v["adherence"], "everything");

    let out = run(&["probe-extension", "--ext", &fixture("imitate_s.json"), "--samples", "20"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["case"], 2);
    assert_eq!(v["adherence"], "empty");
    assert_eq!(v["w"]["s"], "1");

    let out = run(&["probe-extension", "--ext", &fixture("mixed_t.json"), "--samples", "20"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["case"], 3);
    assert_eq!(v["adherence"], "exactly_w");
    assert_eq!(v["w"]["t"], "1");
}

#[test]
fn probe_accepts_shorthand_specs() {
    let out = run(&["probe-extension", "--ext", "mixed:q", "--labels", "p,q", "--samples", "10"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["case"], 3);
    assert_eq!(v["w"]["q"], "1");
}

#[test]
fn fixed_seed_reports_are_byte_identical() {
    let args =
        ["probe-extension", "--ext", &fixture("blackhole.json"), "--samples", "50", "--seed", "7"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);

    let args = ["check-axioms", "--alg", "css", "--simplex", "2", "--samples", "4", "--seed", "3"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn grid_override_is_honored_and_echoed() {
    let out = run_with_grid(
        "1/2,1/3",
        &["check-axioms", "--alg", "free", "--labels", "a,b", "--samples", "3"],
    );
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["echo"]["p_grid"], serde_json::json!(["1/2", "1/3"]));
    assert_eq!(v["pass"], true);

    let out = run_with_grid("0/1", &["check-axioms", "--alg", "free"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn check_axioms_covers_the_other_carriers() {
    let out = run(&[
        "check-axioms", "--alg", "semilattice", "--input", &fixture("semilattice_v.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["pass"], true);

    let out = run(&[
        "check-axioms", "--alg", "semilattice", "--input", &fixture("not_semilattice.json"),
    ]);
    assert_eq!(code(&out), 2);

    let out = run(&[
        "check-axioms", "--alg", "extension", "--ext", "imitate:s", "--labels", "s,t",
        "--samples", "3",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["pass"], true);
}

#[test]
fn build_extension_rejects_then_convicts_a_bad_parameter() {
    // Validation refuses a mixed table around a non-extremal point.
    let out = run(&["build-extension", "--ext", &fixture("mixed_uniform.json")]);
    assert_eq!(code(&out), 2);
    let v = stdout_json(&out);
    assert!(v["error"].as_str().unwrap().contains("extremal"));

    // Forcing past validation must surface an associativity counterexample.
    let out = run(&["build-extension", "--ext", &fixture("mixed_uniform.json"), "--force"]);
    assert_eq!(code(&out), 1);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], false);
    assert_eq!(v["counterexample"]["law"], "associativity");
}

#[test]
fn build_extension_certifies_css_carriers() {
    let out = run(&[
        "build-extension", "--ext", "mixed:s2", "--simplex", "2", "--samples", "3",
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["pass"], true);
    assert!(v["algebra"].as_str().unwrap().contains("belief simplex"));
}

#[test]
fn extremal_kd_matches_the_known_family() {
    let out = run(&["extremal-kd", "--simplex", "2", "--body", &fixture("edge.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["extremal"], true);

    let out = run(&["extremal-kd", "--simplex", "2", "--body", &fixture("corner.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["extremal"], true);

    // A strict sub-segment misses the corners, so it is not extremal.
    let sub = fixture("quarter_seg.json");
    let out = run(&["extremal-kd", "--simplex", "2", "--body", &sub]);
    assert_eq!(code(&out), 2); // dim 1 body in a dim 2 question

    let out = run(&["extremal-kd", "--simplex", "4", "--body", &fixture("edge.json")]);
    assert_eq!(code(&out), 2); // unsupported simplex size
}

#[test]
fn eligible_case4_reports_both_answers() {
    let out = run(&["eligible-case4", "--simplex", "2", "--body", &fixture("edge.json")]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["eligible"], true);
    assert!(v["canonical_prime"].as_str().is_some());

    let out = run(&["eligible-case4", "--simplex", "2", "--body", &fixture("corner.json")]);
    assert_eq!(code(&out), 2); // singletons take the mixed route instead
}

#[test]
fn vih_fixes_closed_polygons() {
    let input = std::fs::read_to_string(fixture("closed_triangle_flagged.json")).unwrap();
    let out = run(&["vih", "--input", &fixture("closed_triangle_flagged.json")]);
    assert_eq!(code(&out), 0);
    let got = stdout_json(&out);
    let want: serde_json::Value = serde_json::from_str(&input).unwrap();
    assert_eq!(got, want);
}

#[test]
fn minkowski_combination_matches_the_vertex_oracle() {
    let out = run(&[
        "minkowski", "--p", "1/2", "--a", &fixture("seg_x.json"), "--b", &fixture("seg_y.json"),
    ]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(
        v,
        serde_json::json!({
            "dim": 2,
            "vertices": [["0", "0"], ["0", "1/2"], ["1/2", "0"], ["1/2", "1/2"]]
        })
    );

    let out = run(&[
        "minkowski", "--p", "3/2", "--a", &fixture("seg_x.json"), "--b", &fixture("seg_y.json"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn decompose_splits_squares_but_not_triangles() {
    let out = run(&["decompose", "--input", &fixture("square.json")]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["decomposable"], true);
    assert_eq!(v["summands"].as_array().unwrap().len(), 2);

    let out = run(&["decompose", "--input", &fixture("triangle.json")]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["decomposable"], false);
    assert!(v.get("summands").is_none());
}

#[test]
fn normalize_applies_the_homothety_formula() {
    let out = run(&["normalize", "--input", &fixture("quarter_seg.json")]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        stdout_json(&out),
        serde_json::json!({"dim": 1, "vertices": [["0"], ["1"]]})
    );

    let out = run(&["normalize", "--input", &fixture("corner.json")]);
    assert_eq!(code(&out), 2); // singletons have no normal form
}

#[test]
fn simulate_reaches_the_adjoined_point_and_absorbs() {
    let out = run(&[
        "simulate", "--pa", &fixture("pa.json"), "--ext", "blackhole",
        "--init", "dirac:s", "--word", "a,a",
    ]);
    assert_eq!(code(&out), 0);
    let lines: Vec<&str> =
        std::str::from_utf8(&out.stdout).unwrap().lines().collect();
    assert_eq!(lines.len(), 2);
    let first: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(first["vertices"], serde_json::json!([["0", "1/2", "1/2"]]));
    let second: serde_json::Value = serde_json::from_str(lines[1]).unwrap();
    assert_eq!(second, serde_json::json!({"star": true}));
}

#[test]
fn simulate_handles_files_empty_words_and_enabled_automata() {
    let out = run(&[
        "simulate", "--pa", &fixture("pa_enabled.json"), "--ext", "blackhole",
        "--init", &fixture("init_half.json"), "--word", "",
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());

    let out = run(&[
        "simulate", "--pa", &fixture("pa_enabled.json"), "--ext", "blackhole",
        "--init", "dirac:s", "--word", "a,b,a,b",
    ]);
    assert_eq!(code(&out), 0);
    let text = std::str::from_utf8(&out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(!text.contains("star"));

    let out = run(&[
        "simulate", "--pa", &fixture("pa.json"), "--ext", "blackhole",
        "--init", "dirac:zz", "--word", "a",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn usage_errors_exit_two() {
    let out = run(&["no-such-command"]);
    assert_eq!(code(&out), 2);

    let out = run(&["probe-extension"]);
    assert_eq!(code(&out), 2); // missing required --ext
}
