//! End-to-end tests of the installed binary: worked examples, the
//! stable JSON schema, exit codes, and output determinism.

use std::process::{Command, Output};

use serde_json::Value;

fn ppb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ppb"))
        .args(args)
        .env_remove("PPB_PRECISION")
        .output()
        .expect("spawn ppb")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = ppb(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 stdout")
}

fn ok_json(args: &[&str]) -> Value {
    serde_json::from_str(&ok_stdout(args)).expect("valid json")
}

fn expect_exit(args: &[&str], code: i32) -> String {
    let out = ppb(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "args {args:?}; stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stderr).expect("utf8 stderr")
}

#[test]
fn enumerate_worked_example() {
    let text = ok_stdout(&["enumerate", "z^2 - 29/16"]);
    assert!(text.contains("8 finite, 9 total"), "{text}");
    for pt in ["-7/4", "-5/4", "-3/4", "-1/4", "1/4", "3/4", "5/4", "7/4"] {
        assert!(text.contains(&format!("  {pt}  ")), "missing {pt}: {text}");
    }
    assert!(text.contains("-7/4  tail 0  period 3"), "{text}");
    assert!(text.contains("3/4  tail 2  period 3"), "{text}");

    let doc = ok_json(&["enumerate", "z^2 - 29/16", "--json"]);
    assert_eq!(doc["schema"], "ppb.enumerate/1");
    assert_eq!(doc["finite_count"], 8);
    assert_eq!(doc["total"], 9);
    assert_eq!(doc["includes_infinity"], true);
    let points: Vec<&str> = doc["finite_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["point"].as_str().unwrap())
        .collect();
    assert_eq!(
        points,
        ["-7/4", "-5/4", "-3/4", "-1/4", "1/4", "3/4", "5/4", "7/4"]
    );
    // The 3-cycle has tail 0 everywhere; the rest lead into it.
    let cycle: Vec<&str> = doc["finite_points"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|p| p["tail"] == 0)
        .map(|p| p["point"].as_str().unwrap())
        .collect();
    assert_eq!(cycle, ["-7/4", "-1/4", "5/4"]);
}

#[test]
fn analyze_json_fields_and_determinism() {
    let args = ["analyze", "z^2 - 29/16", "--json", "--case"];
    let first = ok_stdout(&args);
    let second = ok_stdout(&args);
    assert_eq!(first, second, "json output must be byte-identical");

    let doc: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(doc["schema"], "ppb.analyze/1");
    assert_eq!(doc["precision_bits"], 128);
    assert_eq!(doc["polynomial"], "z^2 - 29/16");
    assert_eq!(doc["census"]["s"], 2);
    assert_eq!(doc["census"]["s_inf"], 1);
    let places = doc["census"]["places"].as_array().unwrap();
    assert_eq!(places[0]["place"], "infinity");
    assert_eq!(places[0]["bad"], true);
    assert_eq!(places[1]["place"], "2");
    assert_eq!(places[1]["rho"], "2^(1)");
    assert_eq!(doc["bound"]["row"], "small_t");
    assert_eq!(doc["bound"]["m"]["lo"], "54");
    assert_eq!(doc["bound"]["count_bound"], "55");
    assert_eq!(doc["enumeration"]["finite_count"], 8);
    assert_eq!(doc["verification"]["forward_invariance"], true);
    // Radii 2 and ~1.94 both sit below the case-1 threshold of 4.
    assert_eq!(doc["case"], 2);
}

#[test]
fn bound_raw_parameter_rows() {
    let doc = ok_json(&[
        "bound", "--d", "2", "--D", "1", "--s", "1", "--s-inf", "1", "--json",
    ]);
    assert_eq!(doc["schema"], "ppb.bound/1");
    assert_eq!(doc["row"], "arch_only");
    assert_eq!(doc["m"]["lo"], "9");
    assert_eq!(doc["m"]["hi"], "9");
    assert_eq!(doc["count_bound"], "10");

    let doc = ok_json(&[
        "bound", "--d", "2", "--D", "1", "--s", "2", "--s-inf", "1", "--json",
    ]);
    assert_eq!(doc["row"], "small_t");
    assert_eq!(doc["m"]["hi"], "54");
    assert_eq!(doc["count_bound"], "55");

    let doc = ok_json(&["bound", "--d", "2", "--s", "0", "--q", "2", "--json"]);
    assert_eq!(doc["row"], "function_field_s0");
    assert_eq!(doc["input"]["kind"], "function_field");
    assert_eq!(doc["m"]["lo"], "2");
    assert_eq!(doc["count_bound"], "3");

    let doc = ok_json(&["bound", "z^2 - 29/16", "--json"]);
    assert_eq!(doc["count_bound"], "55");
}

#[test]
fn scan_small_window() {
    let doc = ok_json(&["scan", "--den", "1", "--min", "-2", "--max", "0", "--json"]);
    assert_eq!(doc["schema"], "ppb.scan/1");
    assert_eq!(doc["den"], 1);
    let rows = doc["rows"].as_array().unwrap();
    let counts: Vec<(i64, u64)> = rows
        .iter()
        .map(|r| (r["j"].as_i64().unwrap(), r["finite"].as_u64().unwrap()))
        .collect();
    assert_eq!(counts, [(-2, 5), (-1, 3), (0, 3)]);
    assert_eq!(doc["max_finite"], 5);
    assert_eq!(
        doc["argmax"].as_array().unwrap().as_slice(),
        [Value::from("-2")]
    );
}

#[test]
fn scan_quadratic_family_window() {
    let args = [
        "scan", "--den", "12", "--min", "-12", "--max", "1/4", "--jobs", "8", "--json",
    ];
    let doc = ok_json(&args);
    // Inclusive bounds: j runs over -1728..=36.
    assert_eq!(doc["rows"].as_array().unwrap().len(), 1765);
    assert_eq!(doc["max_finite"], 8);
    let argmax: Vec<&str> = doc["argmax"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        argmax,
        ["-1333/144", "-91/36", "-29/16", "-21/16", "-133/144"]
    );
    // The worker count is echoed in the doc but must not affect the
    // results.
    let serial = ok_json(&[
        "scan", "--den", "12", "--min", "-12", "--max", "1/4", "--jobs", "3", "--json",
    ]);
    assert_eq!(doc["rows"], serial["rows"]);
    assert_eq!(doc["argmax"], serial["argmax"]);
    assert_eq!(doc["max_finite"], serial["max_finite"]);
}

#[test]
fn verify_reports_all_checks() {
    let doc = ok_json(&["verify", "z^2 - 29/16", "--json"]);
    assert_eq!(doc["schema"], "ppb.verify/1");
    assert_eq!(doc["all_hold"], true);
    let checks = &doc["checks"];
    assert_eq!(checks["count_within_bound"]["holds"], true);
    assert_eq!(checks["product_formula"]["applicable"], true);
    assert_eq!(checks["product_formula"]["holds"], true);
    assert_eq!(checks["minimal_radius"][0]["place"], "2");
    assert_eq!(checks["minimal_radius"][0]["holds"], true);
    let pairwise = checks["pairwise_bound"].as_array().unwrap();
    let places: Vec<&str> = pairwise
        .iter()
        .map(|p| p["place"].as_str().unwrap())
        .collect();
    assert_eq!(places, ["infinity", "2", "3"]);
    assert!(pairwise.iter().all(|p| p["holds"] == true));

    // Degree-3 sharp example: two finite points, radius exponent 1/2
    // at 7, everything holds.
    let doc = ok_json(&["verify", "343z^3 - 7z^2", "--json"]);
    assert_eq!(doc["all_hold"], true);
    assert_eq!(doc["checks"]["minimal_radius"][0]["place"], "7");
}

#[test]
fn analyze_case_examples() {
    // Only the archimedean place is bad: case 0.
    let doc = ok_json(&["analyze", "z^2 + 1", "--json", "--case"]);
    assert_eq!(doc["census"]["s"], 1);
    assert_eq!(doc["case"], 0);
    // Radius 2^3 = 8 >= 4 at p = 2 for c = -1/256: case 1.
    let doc = ok_json(&["analyze", "z^2 - 1/256", "--json", "--case"]);
    assert_eq!(doc["case"], 1);
    // Cubic with a single modest bad prime: case 3.
    let doc = ok_json(&["analyze", "343z^3 - 7z^2", "--json", "--case"]);
    assert_eq!(doc["case"], 3);
}

#[test]
fn exit_codes() {
    // Usage problems: 1.
    expect_exit(&[], 1);
    expect_exit(&["nosuch"], 1);
    expect_exit(&["bound"], 1);
    expect_exit(&["bound", "z^2 - 1", "--d", "2"], 1);
    expect_exit(&["enumerate", "z + 1"], 1);
    expect_exit(&["scan", "--den", "0", "--min", "0", "--max", "1"], 1);
    expect_exit(&["scan", "--den", "1", "--min", "1", "--max", "0"], 1);
    // Parse errors: 2, with a byte position on stderr.
    let err = expect_exit(&["enumerate", "z^2 + @"], 2);
    assert!(err.contains("byte 6"), "{err}");
    let err = expect_exit(&["analyze", "z^2 + (3"], 2);
    assert!(err.contains("byte 8"), "{err}");
    // Size guards: 3.
    expect_exit(&["enumerate", "z^600"], 3);
    expect_exit(
        &["scan", "--den", "1", "--min", "-99999999", "--max", "0"],
        3,
    );
    // Success paths: 0.
    assert!(ppb(&["--help"]).status.success());
    assert!(ppb(&["--version"]).status.success());
    assert!(ppb(&["scan", "--help"]).status.success());
}

#[test]
fn precision_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_ppb"))
        .args(["enumerate", "z^2 - 29/16", "--json"])
        .env("PPB_PRECISION", "256")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["precision_bits"], 256);
    assert_eq!(doc["finite_count"], 8);

    for bad in ["abc", "0", "-5", "1000000"] {
        let out = Command::new(env!("CARGO_BIN_EXE_ppb"))
            .args(["bound", "--d", "2", "--D", "1", "--s", "1", "--s-inf", "1"])
            .env("PPB_PRECISION", bad)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(1), "PPB_PRECISION={bad}");
    }
}
