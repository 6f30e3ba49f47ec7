mod common;

use common::*;
use serde_json::json;

#[test]
fn plane_translator_verifies_with_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_json("verify", &plane([1.0, 0.0], [0.5, 0.0], 1.0, 11), dir.path(), "a", &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert!(num(&run.result("translator_residual")["worst_value"]) < 1e-14);
    let lam = num(&run.result("spacelike")["worst_value"]);
    assert!((lam - 0.75).abs() < 1e-14);
    assert_eq!(run.result("translating_vector")["pass"], serde_json::Value::Null);
}

#[test]
fn non_translator_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_json("verify", &plane([1.0, 0.0], [0.0, 0.0], 1.0, 11), dir.path(), "a", &[]);
    assert_eq!(run.code, 1);
    let r = run.result("translator_residual");
    assert_eq!(r["pass"], false);
    assert!((num(&r["worst_value"]) - 0.5).abs() < 1e-14);
}

#[test]
fn configuration_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut bad = plane([1.0, 0.0], [0.5, 0.0], 1.0, 11);
    bad["colour"] = json!("blue");
    let run = run_json("verify", &bad, dir.path(), "unknown_field", &[]);
    assert_eq!(run.code, 2);
    assert!(run.report.is_none());

    let mut short = plane([1.0, 0.0], [0.5, 0.0], 1.0, 11);
    short["functions"] = json!(["0.5*x1"]);
    assert_eq!(run_json("verify", &short, dir.path(), "short", &[]).code, 2);

    let mut syntax = plane([1.0, 0.0], [0.5, 0.0], 1.0, 11);
    syntax["functions"] = json!(["0.5*x1 +", "x2"]);
    assert_eq!(run_json("verify", &syntax, dir.path(), "syntax", &[]).code, 2);

    let missing = run_file("verify", &dir.path().join("absent.json"), &dir.path().join("o"), &[]);
    assert_eq!(missing.code, 2);
}

#[test]
fn timelike_graph_exits_three_with_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = plane([1.0, 0.0], [0.5, 0.0], 1.0, 11);
    c["functions"] = json!(["2*x1", "0"]);
    let run = run_json("verify", &c, dir.path(), "a", &[]);
    assert_eq!(run.code, 3, "{}", run.stderr);
    let r = run.result("spacelike");
    assert_eq!(r["pass"], false);
    assert!((num(&r["worst_value"]) + 3.0).abs() < 1e-12);

    let diag = run_json("diagnose", &c, dir.path(), "b", &[]);
    assert_eq!(diag.code, 3);
}

#[test]
fn report_schema_is_complete() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_json("verify", &eq16(0.5, 1.0, 11), dir.path(), "a", &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let report = run.report();
    assert_eq!(report["command"], "verify");
    assert_eq!(report["config"]["signature"]["m"], 2);
    assert_eq!(report["series_files"], json!(["fields.csv"]));
    for r in report["results"].as_array().unwrap() {
        for key in ["check", "h", "tolerance", "worst_margin", "worst_value", "worst_location", "pass"] {
            assert!(r.get(key).is_some(), "{key} missing from {r}");
        }
        assert!((num(&r["h"]) - 0.2).abs() < 1e-15);
    }
}

#[test]
fn fields_csv_has_one_row_per_node() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_json("verify", &eq16(0.5, 1.0, 11), dir.path(), "a", &[]);
    let text = run.read("fields.csv");
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x1,x2,g11,g12,g22,det_g,lambda_min,h_norm2,b_norm2,schwarz_margin,z,lap_z,residual1,residual2"
    );
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 121);
    let origin = rows.iter().find(|r| r[0] == 0.0 && r[1] == 0.0).unwrap();
    assert!((origin[2] - 1.0).abs() < 1e-14);
    assert!((origin[4] - 0.75).abs() < 1e-14);
    assert!((origin[7] - 1.0).abs() < 1e-12);
    assert!((origin[11] - (4.0 - 2.0 * 2f64.ln())).abs() < 1e-10);
}

#[test]
fn h_refine_reports_second_order_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = eq16(0.5, 1.0, 21);
    c["jets"] = json!("fd");
    c["tolerances"]["residual"] = json!(1.0);
    let run = run_json("verify", &c, dir.path(), "a", &["--h-refine", "2"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.results("translator_residual").len(), 3);
    let orders = run.results("translator_residual_order");
    assert_eq!(orders.len(), 2);
    for o in orders {
        let p = num(&o["worst_value"]);
        assert!((1.8..2.3).contains(&p), "order {p}");
    }
    assert!(run.out.join("fields_l2.csv").exists());
}

#[test]
fn seed_selects_the_random_guess() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = eq16(0.5, 1.0, 11);
    c["solve"] = json!({"initial_guess": {"kind": "random", "seed": 1, "amplitude": 0.05}});
    let a = run_json("solve", &c, dir.path(), "a", &["--seed", "7"]);
    let b = run_json("solve", &c, dir.path(), "b", &["--seed", "7"]);
    let d = run_json("solve", &c, dir.path(), "d", &["--seed", "8"]);
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.report()["config"]["solve"]["initial_guess"]["seed"], 7);
    assert_eq!(a.read("residual_history.csv"), b.read("residual_history.csv"));
    assert_ne!(a.read("residual_history.csv"), d.read("residual_history.csv"));
    assert!(num(&d.result("error_vs_functions")["worst_value"]) < 1e-2);
}

#[test]
fn output_directory_resolution() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = plane([1.0, 0.0], [0.5, 0.0], 1.0, 5);
    c["output_dir"] = json!("from_config");
    let path = dir.path().join("c.json");
    std::fs::write(&path, c.to_string()).unwrap();
    let status = std::process::Command::new(env!("CARGO_BIN_EXE_translator"))
        .args(["verify", "--config"])
        .arg(&path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("from_config/report.json").exists());

    let run = run_file("verify", &path, &dir.path().join("flag"), &[]);
    assert_eq!(run.code, 0);
    assert!(dir.path().join("flag/report.json").exists());
}

#[test]
fn grid_file_input_round_trips_a_solution() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = eq16(0.5, 1.0, 21);
    let solved = run_json("solve", &c, dir.path(), "solve", &[]);
    assert_eq!(solved.code, 0, "{}", solved.stderr);
    c.as_object_mut().unwrap().remove("functions");
    c["grid_file"] = json!("solve/solution.csv");
    c["jets"] = json!("fd");
    c["tolerances"]["residual"] = json!(1e-6);
    let run = run_json("verify", &c, dir.path(), "verify", &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.result("translator_residual")["pass"], true);
    let refined = run_json("verify", &c, dir.path(), "refined", &["--h-refine", "1"]);
    assert_eq!(refined.code, 2);
}

#[test]
fn plane_diagnostics_pass() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_json("diagnose", &plane([1.0, 0.0], [0.5, 0.0], 4.0, 41), dir.path(), "a", &[]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    for check in ["prop31", "prop32"] {
        assert!(num(&run.result(check)["worst_value"]).abs() < 1e-12);
    }
    assert!((num(&run.result("decay")["worst_value"]) - 1.5).abs() < 1e-12);
    let rho = run.series("gradient_estimate.csv");
    let at = rho.iter().find(|r| r.x == [1.0, 0.0] && r.quantity == "rho").unwrap();
    assert!((at.value - 1.5 / 0.75f64.sqrt() / 1.75).abs() < 1e-12);
}

#[test]
fn non_translator_diagnosis_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_json("diagnose", &plane([1.0, 0.0], [0.0, 0.0], 2.0, 21), dir.path(), "a", &[]);
    assert_eq!(run.code, 1);
    let r = run.result("prop31");
    assert_eq!(r["pass"], false);
    assert!(r["notes"][0].as_str().unwrap().contains("input rejected"));
}

#[test]
fn sweeps_reject_refinement() {
    let dir = tempfile::tempdir().unwrap();
    let run = run_file("solve", &configs_dir().join("eq16_sweep.json"), dir.path(), &["--h-refine", "1"]);
    assert_eq!(run.code, 2);
}
