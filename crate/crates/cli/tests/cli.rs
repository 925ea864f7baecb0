use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn lindyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lindyn"))
        .args(args)
        .env_remove("LINDYN_TOL_UNIMODULAR")
        .env_remove("LINDYN_TOL_RETURN")
        .env_remove("LINDYN_TOL_RANK")
        .env_remove("LINDYN_MAX_DENOMINATOR")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = lindyn(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn level(args: &[&str]) -> String {
    report(args)["result"]["verdict"]["level"].as_str().unwrap().to_string()
}

fn witness(v: &Value) -> Vec<u64> {
    v["result"]["verdict"]["evidence"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["kind"] == "witness_sequence")
        .map(|e| e["value"].as_array().unwrap().iter().map(|n| n.as_u64().unwrap()).collect())
        .unwrap_or_default()
}

#[test]
fn matrices() {
    assert_eq!(level(&["classify-matrix", "--input", &data("jordan2.json")]), "NotRecurrent");
    assert_eq!(level(&["classify-matrix", "--input", &data("rot3.json")]), "UniformlyRigid");
    assert_eq!(level(&["classify-matrix", "--input", &data("rot3.json"), "--real"]), "UniformlyRigid");
    assert_eq!(level(&["classify-matrix", "--input", &data("half2.json")]), "NotRecurrent");
    assert_eq!(level(&["classify-matrix", "--input", &data("identity3.json")]), "UniformlyRigid");
    assert_eq!(level(&["classify-matrix", "--input", &data("unitary_diag.json")]), "UniformlyRigid");
    let r = report(&["classify-matrix", "--input", &data("jordan2.json")]);
    let why = r["result"]["verdict"]["evidence"][0]["value"].as_str().unwrap();
    assert!(why.contains("defective"), "{why}");
}

#[test]
fn linear_fractional_maps() {
    let r = report(&["classify-lfm", "--input", &data("lfm_rotation.json"), "--space", "h2"]);
    assert_eq!(r["result"]["verdict"]["level"], "UniformlyRigid");
    assert_eq!(r["result"]["taxon"]["taxon"]["taxon"], "elliptic_automorphism");
    assert_eq!(witness(&r)[0], 6);
    assert_eq!(level(&["classify-lfm", "--input", &data("lfm_parabolic.json"), "--space", "h2"]), "Recurrent");
    assert_eq!(level(&["classify-lfm", "--input", &data("lfm_hyperbolic.json"), "--space", "h2"]), "Recurrent");
    assert_eq!(level(&["classify-lfm", "--input", &data("lfm_interior.json"), "--space", "h2"]), "NotRecurrent");
    assert_eq!(level(&["classify-lfm", "--input", &data("lfm_parabolic_inner.json"), "--space", "h2"]), "NotRecurrent");
    assert_eq!(level(&["classify-lfm", "--input", &data("lfm_parabolic_inner.json"), "--space", "hd"]), "Recurrent");
}

#[test]
fn other_symbols() {
    let entire = report(&["classify-symbol", "--input", &data("symbol_entire_rotation.json"), "--space", "entire"]);
    assert_eq!(entire["result"]["verdict"]["level"], "Rigid");
    assert_eq!(witness(&entire), vec![2, 4, 6, 8, 10]);
    assert_eq!(level(&["classify-symbol", "--input", &data("symbol_punctured_inv.json"), "--space", "punctured"]), "Rigid");
    assert_eq!(
        level(&["classify-symbol", "--input", &data("symbol_interval_reflection.json"), "--space", "interval"]),
        "UniformlyRigid"
    );
}

#[test]
fn diagonals_and_rigidity_sequences() {
    let r = report(&["classify-diagonal", "--input", &data("sqrt2_sqrt3.json"), "--space", "c0"]);
    assert_eq!(r["result"]["verdict"]["level"], "UniformlyRigid");
    assert_eq!(witness(&r), vec![7, 41, 82, 239, 280]);
    let r = report(&["classify-diagonal", "--input", &data("rational_angles.json"), "--space", "l2"]);
    assert_eq!(witness(&r), vec![12, 24, 36, 48, 60]);
    assert_eq!(level(&["classify-diagonal", "--input", &data("inverse_factorial.json"), "--space", "linf"]), "UniformlyRigid");

    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let r = report(&["rigidity-seq", "--angles", &data("sqrt2_sqrt3.json"), "--count", "5", "--out", &out_dir]);
    let terms: Vec<u64> = r["result"]["sequence"]["terms"].as_array().unwrap().iter().map(|n| n.as_u64().unwrap()).collect();
    assert_eq!(terms, vec![7, 41, 82, 239, 280]);
    let csv = std::fs::read_to_string(dir.path().join("rigidity.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,term,defect"));
    assert_eq!(lines.count(), 5);
}

#[test]
fn shifts() {
    assert_eq!(level(&["classify-shift", "--input", &data("shift_unweighted.json"), "--space", "l2"]), "NotRecurrent");
    assert_eq!(level(&["classify-shift", "--input", &data("shift_two.json"), "--space", "l2"]), "Recurrent");
    assert_eq!(
        level(&["classify-shift", "--input", &data("shift_unweighted.json"), "--space", "l2", "--variant", "i_plus_b_w"]),
        "Recurrent"
    );
}

#[test]
fn multiplications() {
    assert_eq!(level(&["classify-mult", "--input", &data("mult_atoms.json"), "--space", "l2"]), "UniformlyRigid");
    assert_eq!(level(&["classify-mult", "--input", &data("mult_ck_circle.json"), "--space", "ck"]), "NotRecurrent");
    assert_eq!(level(&["classify-mult", "--input", &data("mult_analytic_z.json"), "--space", "hardy:2"]), "NotRecurrent");
    assert_eq!(level(&["classify-mult", "--input", &data("mult_analytic_z.json"), "--space", "adjoint-h2"]), "NotRecurrent");
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| lindyn(args).status.code();
    assert_eq!(code(&["classify-matrix", "--input", &data("malformed.json")]), Some(2));
    assert_eq!(code(&["classify-matrix", "--input", &data("does_not_exist.json")]), Some(2));
    assert_eq!(code(&["classify-lfm", "--input", &data("lfm_not_self_map.json")]), Some(2));
    assert_eq!(code(&["classify-matrix", "--input", &data("unitary_diag.json"), "--real"]), Some(2));
    assert_eq!(code(&["laws", "run", "--id", "no_such_law"]), Some(2));
    assert_eq!(code(&["classify-matrix"]), Some(2));
    assert_eq!(code(&["classify-matrix", "--input", &data("rot3.json"), "--tol-return", "-1"]), Some(2));

    let undecided = ["classify-diagonal", "--input", &data("arith_uncertified.json"), "--space", "c0"];
    let out = lindyn(&undecided);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["result"]["undecidable"].as_str().unwrap().contains("not certified irrational"));
    let mut strict = undecided.to_vec();
    strict.push("--strict");
    let out = lindyn(&strict);
    assert_eq!(out.status.code(), Some(4));
    assert!(out.stdout.is_empty());
}

#[test]
fn tolerance_flags_and_env() {
    let r = report(&["classify-matrix", "--input", &data("rot3.json"), "--tol-return", "1e-3", "--max-denominator", "50"]);
    assert_eq!(r["provenance"]["tolerances"]["return_eps"], 1e-3);
    assert_eq!(r["provenance"]["tolerances"]["max_denominator"], 50);
    let out = Command::new(env!("CARGO_BIN_EXE_lindyn"))
        .args(["classify-matrix", "--input", &data("rot3.json")])
        .env("LINDYN_TOL_UNIMODULAR", "1e-7")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["provenance"]["tolerances"]["unimodular_eps"], 1e-7);
}

#[test]
fn provenance_hashes_input_bytes() {
    let a = report(&["classify-matrix", "--input", &data("rot3.json")]);
    let b = report(&["classify-matrix", "--input", &data("jordan2.json")]);
    let ha = a["provenance"]["input_sha256"].as_str().unwrap();
    assert_eq!(ha.len(), 64);
    assert_ne!(ha, b["provenance"]["input_sha256"].as_str().unwrap());
    assert_eq!(a["provenance"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(a["command"], "classify-matrix");
}

#[test]
fn laws_from_the_command_line() {
    let list = report(&["laws", "list"]);
    assert_eq!(list["result"].as_array().unwrap().len(), 11);
    let r = report(&["laws", "run", "--id", "power_law", "--budget", "20", "--seed", "7"]);
    let law = &r["result"][0];
    assert_eq!(law["instances_run"], 20);
    assert!(law["failures"].as_array().unwrap().is_empty());
}

fn orbit(operator: &str, vector: &str, horizon: &str, emit: &str) -> String {
    let out = lindyn(&["orbit", "--operator", &data(operator), "--vector", &data(vector), "--horizon", horizon, "--emit", emit]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn polyline(svg: &str) -> Vec<(f64, f64)> {
    let start = svg.find("points=\"").unwrap() + 8;
    let end = start + svg[start..].find('"').unwrap();
    svg[start..end]
        .split(' ')
        .map(|p| {
            let (x, y) = p.split_once(',').unwrap();
            (x.parse().unwrap(), y.parse().unwrap())
        })
        .collect()
}

fn markers(svg: &str) -> Vec<f64> {
    svg.match_indices("<circle cx=\"")
        .map(|(i, _)| {
            let s = &svg[i + 12..];
            s[..s.find('"').unwrap()].parse().unwrap()
        })
        .collect()
}

#[test]
fn orbit_records() {
    let r: Value = serde_json::from_str(&orbit("rot3.json", "e1.json", "12", "json")).unwrap();
    let times: Vec<u64> =
        r["result"]["record"]["eps_return_times"].as_array().unwrap().iter().map(|n| n.as_u64().unwrap()).collect();
    assert_eq!(times, vec![3, 6, 9, 12]);

    let csv = orbit("rot3.json", "e1.json", "6", "csv");
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,distance,is_return");
    assert_eq!(lines.len(), 7);
    assert!(lines[3].starts_with("3,0,true"), "{}", lines[3]);

    let trunc: Value = serde_json::from_str(&orbit("diag_operator.json", "ones4.json", "12", "json")).unwrap();
    let times: Vec<u64> =
        trunc["result"]["record"]["eps_return_times"].as_array().unwrap().iter().map(|n| n.as_u64().unwrap()).collect();
    assert_eq!(times, vec![12]);

    let dir = tempfile::tempdir().unwrap();
    let out = lindyn(&[
        "orbit", "--operator", &data("rot3.json"), "--vector", &data("e1.json"), "--horizon", "12",
        "--emit", "svg", "--out", &dir.path().display().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["artifact"], "orbit.svg");
    assert!(std::fs::read_to_string(dir.path().join("orbit.svg")).unwrap().starts_with("<svg"));

    let bad = lindyn(&["orbit", "--operator", &data("diag_operator.json"), "--vector", &data("e1.json")]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn svg_identity_is_a_flat_zero_line() {
    let svg = orbit("identity3.json", "e1.json", "20", "svg");
    let pts = polyline(&svg);
    assert_eq!(pts.len(), 20);
    let y0 = pts[0].1;
    assert!(pts.iter().all(|p| p.1 == y0));
    assert_eq!(y0, 360.0 - 40.0);
    assert_eq!(markers(&svg).len(), 20);
}

#[test]
fn svg_jordan_is_monotone() {
    let svg = orbit("jordan2.json", "e2.json", "30", "svg");
    let pts = polyline(&svg);
    assert!(pts.windows(2).all(|w| w[1].1 < w[0].1 && w[1].0 > w[0].0));
    assert!(markers(&svg).is_empty());
}

#[test]
fn svg_contraction_has_no_returns() {
    let svg = orbit("half2.json", "ones2.json", "40", "svg");
    assert!(markers(&svg).is_empty());
    assert!(!svg.contains("growth guard hit"));
}

#[test]
fn svg_rot3_marks_multiples_of_three() {
    let svg = orbit("rot3.json", "e1.json", "12", "svg");
    let xs = markers(&svg);
    let plot_w = 640.0 - 64.0 - 16.0;
    let expect: Vec<f64> = [3.0, 6.0, 9.0, 12.0].iter().map(|n| 64.0 + (n - 1.0) / 11.0 * plot_w).collect();
    assert_eq!(xs.len(), 4);
    for (x, e) in xs.iter().zip(&expect) {
        assert!((x - e).abs() < 0.006, "{x} vs {e}");
    }
    assert_eq!(svg, orbit("rot3.json", "e1.json", "12", "svg"));
}
