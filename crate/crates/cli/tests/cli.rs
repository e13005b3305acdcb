//! End-to-end tests of the `mabs` binary: exit codes, report formats, and
//! the shipped JSON schema.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mabs"))
}

fn program(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../programs")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).env("DF_COLOR", "0").output().expect("binary runs")
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is JSON: {e}\n{}", String::from_utf8_lossy(&out.stdout))
    })
}

#[test]
fn analyze_fact_ag_driver_is_deadlock_free() {
    let out = run(&["analyze", &program("math.mabs"), "--backend", "fixpoint"]);
    assert_eq!(exit_code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("deadlock-free"), "got {text}");
    assert!(!text.contains('\x1b'), "DF_COLOR=0 disables ANSI: {text}");
}

#[test]
fn analyze_fact_nc_modelcheck_free_fixpoint_flagged() {
    let out = run(&["analyze", &program("math_nc.mabs"), "--backend", "modelcheck"]);
    assert_eq!(exit_code(&out), 0);

    let out = run(&[
        "analyze",
        &program("math_nc.mabs"),
        "--backend",
        "fixpoint",
        "--saturation",
        "2",
        "--format",
        "json",
    ]);
    assert_eq!(exit_code(&out), 1);
    let json = stdout_json(&out);
    let backend = &json["backends"][0];
    assert_eq!(backend["verdict"], "potential-deadlock");
    assert_eq!(backend["saturated"], true);
}

#[test]
fn analyze_cpxsched_both_backends_agree() {
    let out = run(&["analyze", &program("cpxsched.mabs"), "--backend", "both", "--format", "json"]);
    assert_eq!(exit_code(&out), 1);
    let json = stdout_json(&out);
    let backends = json["backends"].as_array().unwrap();
    assert_eq!(backends.len(), 2);
    for b in backends {
        assert_eq!(b["verdict"], "potential-deadlock", "backend {}", b["backend"]);
        assert!(!b["witness"].as_array().unwrap().is_empty());
    }
}

#[test]
fn text_and_json_verdicts_agree() {
    for file in ["math.mabs", "math_g.mabs", "cpxsched.mabs"] {
        let text = run(&["analyze", &program(file), "--backend", "both"]);
        let json = run(&["analyze", &program(file), "--backend", "both", "--format", "json"]);
        assert_eq!(exit_code(&text), exit_code(&json), "{file}");
        let parsed = stdout_json(&json);
        let rendered = String::from_utf8_lossy(&text.stdout).to_string();
        for b in parsed["backends"].as_array().unwrap() {
            let v = b["verdict"].as_str().unwrap();
            assert!(rendered.contains(v), "{file}: text misses {v}\n{rendered}");
        }
    }
}

#[test]
fn nonlinear_table_fails_modelcheck_but_not_fixpoint() {
    let out = run(&["analyze", &program("nonlinear.mabs"), "--backend", "modelcheck"]);
    assert_eq!(exit_code(&out), 2);
    let all = format!(
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(all.contains("not linear recursive"), "got {all}");
    assert!(all.contains("fixpoint"), "points at the other back-end: {all}");

    let out = run(&["analyze", &program("nonlinear.mabs"), "--backend", "fixpoint"]);
    assert_eq!(exit_code(&out), 0, "awaits only, deadlock-free");
}

#[test]
fn run_exit_codes() {
    // The empty program terminates.
    let out = run(&["run", &program("empty.mabs")]);
    assert_eq!(exit_code(&out), 0);

    // The blocking factorial deadlocks under every seed.
    for seed in ["0", "1", "7"] {
        let out = run(&["run", &program("math_g.mabs"), "--seed", seed]);
        assert_eq!(exit_code(&out), 1, "seed {seed}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("verdict: deadlocked"));
    }

    // CpxSched deadlocks under some seed in a small range.
    let mut deadlocked = false;
    for seed in 0..10 {
        let out = run(&["run", &program("cpxsched.mabs"), "--seed", &seed.to_string()]);
        if exit_code(&out) == 1 {
            deadlocked = true;
            break;
        }
    }
    assert!(deadlocked, "some schedule of cpxsched deadlocks");

    // A tiny step budget reports the step limit.
    let out = run(&["run", &program("math.mabs"), "--steps", "3"]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn run_trace_format() {
    let out = run(&["run", &program("empty.mabs"), "--format", "json"]);
    let json = stdout_json(&out);
    assert_eq!(json["verdict"], "terminated");
    let out = run(&["run", &program("empty.mabs")]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.starts_with("step 0: "), "line-oriented trace: {text}");
    assert!(text.contains("obj="), "labels carry the focus object: {text}");
}

#[test]
fn explore_exit_codes_and_summary() {
    let out = run(&["explore", &program("cpxsched.mabs"), "--depth", "40", "--format", "json"]);
    assert_eq!(exit_code(&out), 1);
    let json = stdout_json(&out);
    assert_eq!(json["reachable"], true);
    assert_eq!(json["termination_reachable"], true);
    assert!(json["states"].as_u64().unwrap() > 0);
    assert_eq!(json["depth"], 40);
    assert!(!json["witness"].as_array().unwrap().is_empty());

    let out = run(&["explore", &program("math.mabs"), "--depth", "60"]);
    assert_eq!(exit_code(&out), 0);

    // depth 0 is a usage error.
    let out = run(&["explore", &program("math.mabs"), "--depth", "0"]);
    assert_eq!(exit_code(&out), 2);

    // A tiny state cap is a resource limit.
    let out = run(&["explore", &program("cpxsched.mabs"), "--state-cap", "3"]);
    assert_eq!(exit_code(&out), 4);
}

#[test]
fn frontend_errors_exit_2_with_locations() {
    let dir = std::env::temp_dir().join("mabs-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.mabs");
    std::fs::write(&bad, "class C { Int m() { return 1 } }\n{ skip; }\n").unwrap();
    let out = run(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("bad.mabs:1:"), "file:line:col prefix: {err}");
    assert!(err.contains("parse-error"), "{err}");

    let out = run(&["analyze", "/nonexistent/x.mabs"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn dumps_are_included_on_request() {
    let out = run(&[
        "analyze",
        &program("math_nc.mabs"),
        "--backend",
        "both",
        "--saturation",
        "2",
        "--format",
        "json",
        "--dump-contracts",
        "--dump-lams",
        "--dump-cp",
    ]);
    let json = stdout_json(&out);
    assert!(json["contracts"]["pretty"].as_array().unwrap().len() == 3);
    assert!(json["lams"]["approximants"].as_array().unwrap().len() >= 3);
    let cp = json["cp"].as_str().unwrap();
    assert!(cp.contains("Math!fact_nc"), "residual invocation shown: {cp}");
}

/// The JSON report satisfies the shipped schema: every `required` property
/// is present with the declared type.
#[test]
fn report_validates_against_shipped_schema() {
    let schema_path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas/report.schema.json");
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path).unwrap()).unwrap();
    let out = run(&["analyze", &program("cpxsched.mabs"), "--backend", "both", "--format", "json"]);
    let report = stdout_json(&out);

    check_object(&report, &schema, "report");
    let item_schema = &schema["properties"]["backends"]["items"];
    for (i, b) in report["backends"].as_array().unwrap().iter().enumerate() {
        check_object(b, item_schema, &format!("backends[{i}]"));
    }
}

fn check_object(value: &Value, schema: &Value, at: &str) {
    assert!(value.is_object(), "{at}: object expected");
    for req in schema["required"].as_array().unwrap() {
        let key = req.as_str().unwrap();
        assert!(
            value.get(key).is_some(),
            "{at}: missing required property `{key}`"
        );
    }
    for (key, prop) in schema["properties"].as_object().unwrap() {
        let Some(v) = value.get(key) else { continue };
        let tys: Vec<String> = match &prop["type"] {
            Value::String(s) => vec![s.clone()],
            Value::Array(a) => a.iter().map(|s| s.as_str().unwrap().to_string()).collect(),
            _ => continue,
        };
        let ok = tys.iter().any(|t| match t.as_str() {
            "string" => v.is_string(),
            "number" => v.is_number(),
            "boolean" => v.is_boolean(),
            "array" => v.is_array(),
            "object" => v.is_object(),
            "null" => v.is_null(),
            _ => false,
        });
        assert!(ok, "{at}.{key}: type mismatch, expected {tys:?}, got {v}");
    }
}
