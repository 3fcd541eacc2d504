use std::path::PathBuf;
use std::process::{Command, Output};

use extlab::cases::{CaseParams, CaseSpec};
use extlab::report::{Witness, REPORT_FORMAT};
use extlab::serial::{AlgebraSpec, ModuleSpec};
use extlab::stock::stock_ring;
use extlab::suites::{run_suite, SuiteConfig};
use extlab_core::FiniteModule;
use serde_json::Value;

fn extlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extlab")).args(args).output().expect("run extlab")
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn verify_passes_and_writes_report() {
    let path = tmp("splitting.json");
    let out = extlab(&["verify", "tor-splitting", "--ring", "F2_y2", "--trials", "3", "--bound", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("pass 3"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["verdict"], "PASS");
    assert_eq!(report["cases"].as_array().unwrap().len(), 3);
}

#[test]
fn input_errors_exit_2() {
    assert_eq!(extlab(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(extlab(&["ext", "k@Nope", "k@F2_y2"]).status.code(), Some(2));
    assert_eq!(extlab(&["verify", "ext-rigidity", "--bound", "3"]).status.code(), Some(2));
    let bad = tmp("bad_workspace.json");
    std::fs::write(&bad, "{\"field\": {\"p\": 2,}}").unwrap();
    let out = extlab(&["ext", "M", "M", "--workspace", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn tiny_budget_is_inconclusive() {
    let out = extlab(&["verify", "trivial-ext-tor", "--ring", "F2_yz2", "--trials", "2", "--budget", "10"]);
    assert_eq!(out.status.code(), Some(3));
    let report = json(&out);
    assert_eq!(report["verdict"], "INCONCLUSIVE");
    assert_eq!(report["summary"]["inconclusive"], 2);
    assert_eq!(extlab(&["resolve", "k@F2_yz2_k", "--bound", "8", "--budget", "10"]).status.code(), Some(3));
}

#[test]
fn computations_on_stock_rings() {
    let out = extlab(&["ext", "k@F2_y2_k", "k@F2_y2_k", "--bound", "5"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["dims"], serde_json::json!([1, 2, 4, 8, 16, 32]));
    let out = extlab(&["tor", "k@F3_y3", "k@F3_y3", "--bound", "4"]);
    assert_eq!(json(&out)["dims"], serde_json::json!([1, 1, 1, 1, 1]));
    let out = extlab(&["resolve", "A@F5_y2", "--bound", "3"]);
    let v = json(&out);
    assert_eq!(v["betti"], serde_json::json!([1]));
    assert_eq!(v["terminated"], true);
    let out = extlab(&["dual", "E@F2_yz2"]);
    let v = json(&out);
    assert_eq!((v["dim"].as_u64(), v["injective"].as_bool(), v["free"].as_bool()), (Some(3), Some(true), Some(false)));
    let out = extlab(&["decompose", "F2_y2"]);
    assert_eq!(json(&out)["factors"].as_array().unwrap().len(), 1);
}

#[test]
fn workspace_suites_and_modules() {
    let ws = tmp("workspace.json");
    std::fs::write(
        &ws,
        r#"{
            "field": {"p": 3},
            "rings": {"R": {"monomial_quotient": {"vars": ["y"], "ideal": ["y^3"]}},
                      "Rk": {"trivial_extension": {"ring": "R"}}},
            "modules": {"M": {"ring": "Rk", "generators": 1, "relations": [["y^2"]]}},
            "suites": {"quick": {"suite": "ext-rigidity", "rings": ["R"], "trials": 2, "bound": 5}}
        }"#,
    )
    .unwrap();
    let w = ws.to_str().unwrap();
    let out = extlab(&["verify", "quick", "--workspace", w]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["config"]["rings"], serde_json::json!(["R"]));
    assert_eq!(report["summary"]["pass"], 2);
    let out = extlab(&["poincare", "M", "--workspace", w, "--bound", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["coefficients"].as_array().unwrap().len(), 5);
}

#[test]
fn replay_of_a_doctored_witness_fails() {
    // A free module violates the non-free hypothesis, so the Tor statement fails on it.
    let a = stock_ring("F2_y2_k").unwrap().unwrap();
    let witness = Witness {
        format: REPORT_FORMAT,
        suite: "trivial-ext-tor".into(),
        params: CaseParams { bound: 5, window: 3, budget: 20_000 },
        case: CaseSpec::TrivialExtTor {
            algebra: AlgebraSpec::of(&a),
            m: ModuleSpec::of(&FiniteModule::regular(&a)),
            n: ModuleSpec::of(&extlab_core::module::residue_module(&a).unwrap()),
        },
    };
    let path = tmp("witness.json");
    std::fs::write(&path, serde_json::to_string(&witness).unwrap()).unwrap();
    let out = extlab(&["replay", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Fail"));
}

#[test]
fn reports_are_reproducible() {
    let mut config = SuiteConfig::new("gulliksen");
    config.trials = 4;
    config.bound = 5;
    config.seed = 7;
    let resolve = |name: &str| stock_ring(name).unwrap();
    let a = run_suite(&config, &resolve).unwrap();
    let b = run_suite(&config, &resolve).unwrap();
    assert_eq!(a.reproducible_json(), b.reproducible_json());
    config.seed = 8;
    assert_ne!(a.reproducible_json(), run_suite(&config, &resolve).unwrap().reproducible_json());
}
