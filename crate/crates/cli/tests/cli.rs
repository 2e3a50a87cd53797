//! End-to-end runs of every subcommand against the shipped fixture files.

use qflow::{run_captured, EXIT_OK, EXIT_PRECONDITION, EXIT_USAGE};

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn check_jordan_is_complete() {
    let (code, out) = run_captured(&["check", "--quiver", &fixture("jordan.json")]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["complete"], true);
    assert_eq!(v["quadratic"], true);
    assert_eq!(v["homogeneous"], true);
    assert_eq!(v["loop_condition"], true);
}

#[test]
fn dims_worked_values() {
    let (code, out) = run_captured(&[
        "dims",
        "--quiver",
        &fixture("jordan.json"),
        "--v",
        "1,1",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["hom0"], 2);
    assert_eq!(v["hom1"], 4);
    assert_eq!(v["rel"], 2);
    assert_eq!(v["ringel"], -2);
    assert_eq!(v["ringel_R"], 0);

    let (code2, out2) = run_captured(&[
        "dims",
        "--quiver",
        &fixture("jordan.json"),
        "--v",
        "1,1",
        "--v2",
        "1,0",
    ]);
    assert_eq!(code2, EXIT_OK);
    let v2: serde_json::Value = serde_json::from_str(&out2).unwrap();
    assert_eq!(v2["ringel_R"], -1);
}

#[test]
fn flow_reaches_the_minimizer() {
    let tmp = std::env::temp_dir().join("qflow_traj.csv");
    let (code, out) = run_captured(&[
        "flow",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("start_11.json"),
        "--alpha",
        "canonical",
        "--v",
        "1,1",
        "--csv-out",
        tmp.to_str().unwrap(),
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "Converged");
    assert!(v["f_limit"].as_f64().unwrap() <= 1e-10);
    assert_eq!(v["classification"]["label"], serde_json::json!([1, 1]));
    let csv = std::fs::read_to_string(&tmp).unwrap();
    assert!(csv.starts_with("t,f,grad_norm\n"));
    assert!(csv.lines().count() > 2);
}

#[test]
fn flow_accepts_a_central_element_file() {
    let (code, out) = run_captured(&[
        "flow",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("start_11.json"),
        "--alpha",
        &fixture("alpha_11.json"),
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "Converged");
    assert!(v["f_limit"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn hn_labels() {
    let (code, out) = run_captured(&[
        "hn",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("xmin_11.json"),
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["stable"], true);
    assert_eq!(v["label"], serde_json::json!([1, 1]));
}

#[test]
fn slice_report() {
    let (code, out) = run_captured(&[
        "slice",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("xmin_11.json"),
        "--v2",
        "0,0",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["index_matches"], true);
}

#[test]
fn hecke_and_ledger_worked_pair() {
    let (code, out) = run_captured(&[
        "hecke",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("xu_01.json"),
        "--vertex",
        "1",
        "--v",
        "1,1",
        "--seed",
        "7",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["d"], 0);
    assert_eq!(v["d_matches"], true);
    assert_eq!(v["membership"]["B"], true);

    let (code2, out2) = run_captured(&[
        "ledger",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("xu_01.json"),
        "--vertex",
        "1",
        "--v",
        "1,1",
        "--seed",
        "7",
        "--trials",
        "3",
    ]);
    assert_eq!(code2, EXIT_OK, "{out2}");
    let l: serde_json::Value = serde_json::from_str(&out2).unwrap();
    assert_eq!(l["lambda_u"], 2);
    assert_eq!(l["nu"], 0);
    assert_eq!(l["euler_degree"], 0);
    assert_eq!(l["thom_degree_d"], 0);
    assert_eq!(l["shift"], -2);
    assert_eq!(l["grassmannian_dim"], 0);

    // byte-reproducible under the same seed
    let (_, out3) = run_captured(&[
        "ledger",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("xu_01.json"),
        "--vertex",
        "1",
        "--v",
        "1,1",
        "--seed",
        "7",
        "--trials",
        "3",
    ]);
    assert_eq!(out2, out3);
}

#[test]
fn verify_single_suite_and_overrides() {
    let (code, out) = run_captured(&[
        "verify",
        "--suite",
        "adjointness",
        "--seed",
        "7",
        "--trials",
        "25",
        "--tol",
        "pair_res=1e-8",
    ]);
    assert_eq!(code, EXIT_OK, "{out}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v[0]["failed"], 0);
}

#[test]
fn verify_all_smoke() {
    let (code, out) = run_captured(&["verify", "--suite", "all", "--trials", "1", "--seed", "3"]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn usage_errors_exit_64() {
    let (code, _) = run_captured(&["frobnicate"]);
    assert_eq!(code, EXIT_USAGE);
    let (code2, _) = run_captured(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(code2, EXIT_USAGE);
}

#[test]
fn precondition_errors_exit_2() {
    // flow with inadmissible dimensions (framing 0 breaks the canonical element)
    let (code, out) = run_captured(&[
        "hn",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("xu_01.json"),
    ]);
    // xu_01 is a valid representation; hn works on it
    assert_eq!(code, EXIT_OK, "{out}");
    // slice with an impossible split is a precondition failure
    let (code2, _) = run_captured(&[
        "slice",
        "--quiver",
        &fixture("jordan.json"),
        "--rep",
        &fixture("start_11.json"),
        "--v2",
        "1,0",
    ]);
    assert_eq!(code2, EXIT_PRECONDITION);
}
