//! End-to-end tests of the `qsf` binary: output shapes, the exit-code
//! contract (0 pass, 1 residual failure, 2 domain/usage error), and report
//! determinism.

use std::process::{Command, Output};

fn qsf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsf"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn eval_qgamma_at_one() {
    let out = qsf(&["eval", "qgamma", "x=1", "--q", "0.5"]);
    assert_eq!(exit_code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let v: f64 = json["value"].as_str().unwrap().parse().unwrap();
    assert!((v - 1.0).abs() < 1e-10);
}

#[test]
fn eval_asc_linear_case() {
    // S_1 = 2 cos(theta) - a - b = 0.5 at theta = pi/3, a = 0.3, b = 0.2
    let out = qsf(&["eval", "asc", "n=1", "theta=1.0471975512", "a=0.3", "b=0.2", "--q", "0.5"]);
    assert_eq!(exit_code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let v: f64 = json["value"].as_str().unwrap().parse().unwrap();
    assert!((v - 0.5).abs() < 1e-9);
}

#[test]
fn eval_phi_pole_is_exit_two() {
    // lower parameter q^{-2} without a regularization route
    let out = qsf(&["eval", "phi", "upper=0.3,0.2", "lower=4.0", "z=0.5", "--q", "0.5"]);
    assert_eq!(exit_code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("q^-2"));
}

#[test]
fn verify_addition_pass() {
    let out = qsf(&[
        "verify", "addition", "q=0.5", "a=0.3", "b=0.2", "z=0.4", "nu=1.5", "m=2",
        "theta=1.0471975512",
    ]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("pass"));
}

#[test]
fn verify_precondition_violation_is_exit_two() {
    let out = qsf(&["verify", "addition", "z=1.5"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_unknown_identity_is_exit_two() {
    let out = qsf(&["verify", "not_an_identity"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn verify_failure_is_exit_one() {
    // The inversion identity is exact (both sides terminating sums, zero
    // tails); an absurd tolerance below rounding level must fail with 1.
    let out = qsf(&["verify", "inversion", "--tol", "1e-18"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stdout(&out).contains("fail"));
}

#[test]
fn verify_json_report() {
    let out = qsf(&["verify", "heine0", "--json"]);
    assert_eq!(exit_code(&out), 0);
    let json: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(json[0]["identity"], "heine0");
    assert_eq!(json[0]["status"], "pass");
}

#[test]
fn list_identities_covers_registry() {
    let out = qsf(&["list-identities"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    for name in [
        "addition", "product", "lemma1", "lemma2", "inversion", "heine0", "ks",
        "hansen_lommel_q", "charlier_ortho", "charlier_ext", "charlier_ext_special",
        "asc_ortho", "graf", "graf_product", "qlag_relation", "one_phi_one_shift",
    ] {
        assert!(text.contains(name), "missing identity {name}");
    }
}

#[test]
fn sweep_is_deterministic_and_honors_flags() {
    let dir = std::env::temp_dir().join(format!("qsf-sweep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("spec.json");
    std::fs::write(
        &spec_path,
        r#"{
            "identity": "one_phi_one_shift",
            "axes": {"n": [-2, 0, 3], "z": [0.4, 0.7], "a": [0.3]},
            "tol": 1e-10
        }"#,
    )
    .unwrap();
    let spec = spec_path.to_str().unwrap();

    let run = |extra: &[&str]| {
        let out1 = dir.join("a.csv");
        let mut args = vec!["sweep", spec, "--no-header", "--out", out1.to_str().unwrap()];
        args.extend_from_slice(extra);
        let out = qsf(&args);
        assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(&out1).unwrap()
    };
    let serial = run(&[]);
    let parallel = run(&["--parallel"]);
    assert_eq!(serial, parallel, "parallel sweep changed the report body");
    let again = run(&[]);
    assert_eq!(serial, again, "repeated sweep not byte-identical");
    assert_eq!(serial.split(|&b| b == b'\n').count() - 1, 7, "header + 6 rows");

    // JSON format also works
    let out = qsf(&["sweep", spec, "--format", "json"]);
    assert_eq!(exit_code(&out), 0);
    let rows: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 6);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn sweep_cap_exceeded_is_exit_two() {
    let dir = std::env::temp_dir().join(format!("qsf-cap-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let spec_path = dir.join("cap.json");
    std::fs::write(
        &spec_path,
        r#"{"identity": "inversion", "axes": {"p": [0, 1, 2, 3]}, "max_cases": 3}"#,
    )
    .unwrap();
    let out = qsf(&["sweep", spec_path.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bad_q_is_exit_two() {
    let out = qsf(&["eval", "qgamma", "x=1", "--q", "1.5"]);
    assert_eq!(exit_code(&out), 2);
}
