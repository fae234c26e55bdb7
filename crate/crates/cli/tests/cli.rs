use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fpgm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpgm")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let headers = reader.headers().unwrap().clone();
    assert_eq!(headers.iter().collect::<Vec<_>>(), ["iter", "F_gap", "map_norm_y", "map_norm_xN", "omega_min"]);
    reader.records().map(|r| r.unwrap().iter().map(|v| v.parse::<f64>().unwrap_or(f64::NAN)).collect()).collect()
}

#[test]
fn pgm_on_one_dimensional_lasso() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = write_config(
        dir.path(),
        r#"{"problem": {"source": "generated", "kind": "lasso", "dim": 1},
            "algorithms": [{"name": "pgm"}], "horizons": [10], "seed": 3}"#,
    );
    let o = fpgm(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("pgm_N10.csv"));
    assert_eq!(rows.len(), 11);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row[0], i as f64);
    }
    for w in rows.windows(2) {
        assert!(w[1][1] <= w[0][1] + 1e-15, "F_gap increased: {} -> {}", w[0][1], w[1][1]);
        assert!(w[1][4] <= w[0][4], "omega minimum must be non-increasing");
    }
    assert!(out.join("problem.json").exists());
}

#[test]
fn empty_algorithm_list_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"problem": {"source": "generated", "kind": "lasso", "dim": 4}, "algorithms": [], "horizons": [5]}"#,
    );
    let o = fpgm(&["run", "--config", &config, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("empty"));
}

#[test]
fn invalid_config_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let config =
        write_config(dir.path(), r#"{"problem": {"source": "generated", "kind": "lasso", "dim": 4}, "horizons": [0]}"#);
    let o = fpgm(&["run", "--config", &config, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn fixed_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"problem": {"source": "generated", "kind": "box_ls", "dim": 6}, "horizons": [4, 9], "seed": 77}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = fpgm(&["run", "--config", &config, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 1 + 6 * 2);
    for name in names {
        assert_eq!(fs::read(a.join(&name)).unwrap(), fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
}

#[test]
fn seed_override_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"problem": {"source": "generated", "kind": "lasso", "dim": 3}, "algorithms": [{"name": "fpgm"}], "horizons": [5]}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(fpgm(&["run", "--config", &config, "--out", a.to_str().unwrap(), "--seed", "1"]).status.success());
    assert!(fpgm(&["run", "--config", &config, "--out", b.to_str().unwrap(), "--seed", "2"]).status.success());
    assert_ne!(fs::read(a.join("fpgm_N5.csv")).unwrap(), fs::read(b.join("fpgm_N5.csv")).unwrap());
}

#[test]
fn problem_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let config = write_config(
        dir.path(),
        r#"{"problem": {"source": "generated", "kind": "lasso", "dim": 5}, "algorithms": [{"name": "fpgm"}], "horizons": [6], "seed": 5}"#,
    );
    assert!(fpgm(&["run", "--config", &config, "--out", first.to_str().unwrap()]).status.success());
    let problem = first.join("problem.json");
    let config = write_config(
        dir.path(),
        &format!(
            r#"{{"problem": {{"source": "file", "path": {:?}}}, "algorithms": [{{"name": "fpgm"}}], "horizons": [6], "seed": 5, "solve_reference": false}}"#,
            problem.to_str().unwrap()
        ),
    );
    let second = dir.path().join("second");
    let o = fpgm(&["run", "--config", &config, "--out", second.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read(first.join("problem.json")).unwrap(), fs::read(second.join("problem.json")).unwrap());
}

#[test]
fn certify_fista_is_feasible() {
    let o = fpgm(&["certify", "fista", "-n", "50"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["valid"], true);
    for kind in ["cost", "mapping"] {
        let f = &report[kind]["feasibility"];
        assert_eq!(f["feasible"], true, "{kind}");
        assert!(f["min_eigenvalue"].as_f64().unwrap() >= -1e-10);
        assert!(report[kind]["closed_form_deviation"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn certify_invalid_custom_lists_violation() {
    let o = fpgm(&["certify", "custom", "--values", "1,1.5,3"]);
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["valid"], false);
    let indices: Vec<u64> =
        report["validation"]["violations"].as_array().unwrap().iter().map(|v| v["index"].as_u64().unwrap()).collect();
    assert_eq!(indices, [2]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("[2]"));
}

#[test]
fn certify_opg_formula_dominates_certificate() {
    let o = fpgm(&["certify", "opg", "-n", "30"]);
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let formula = report["formula_bounds"]["opg_mapping"].as_f64().unwrap();
    let expected = 2.0 * 6f64.sqrt() / (30.0 * 28f64.sqrt());
    assert!((formula - expected).abs() < 1e-12);
    let cert = report["mapping"]["dual_bound"].as_f64().unwrap();
    assert!(formula >= cert, "{formula} < {cert}");
}

#[test]
fn quadopt_reports_and_rejects() {
    let o = fpgm(&["quadopt", "-n", "2"]);
    assert!(o.status.success());
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((r["objective"].as_f64().unwrap() - 3.0).abs() < 1e-9);
    assert!((r["opg_objective"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert!(r["gap"].as_f64().unwrap().abs() < 1e-9);

    let r: serde_json::Value = serde_json::from_slice(&fpgm(&["quadopt", "-n", "6"]).stdout).unwrap();
    assert!(r["relative_gap"].as_f64().unwrap() <= 1e-4);

    assert_eq!(fpgm(&["quadopt", "-n", "1"]).status.code(), Some(2));
}

#[test]
fn compare_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = fpgm(&["compare", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.starts_with("| algorithm | N | cost bound | F gap | ratio | mapping bound | Ω-min | ratio |"));
    assert_eq!(table.lines().count(), 2 + 6);
    assert_eq!(fs::read_to_string(dir.path().join("compare.md")).unwrap(), table);
}

#[test]
fn compare_without_reference_advises_solving() {
    let dir = tempfile::tempdir().unwrap();
    let problem = dir.path().join("p.json");
    fs::write(&problem, r#"{"kind": "quadratic_l1", "Q": [[2.0]], "b": [1.0], "lam": 0.1, "L": 2.0}"#).unwrap();
    let config = write_config(
        dir.path(),
        &format!(
            r#"{{"problem": {{"source": "file", "path": {:?}}}, "horizons": [5], "solve_reference": false}}"#,
            problem.to_str().unwrap()
        ),
    );
    let o = fpgm(&["compare", "--config", &config]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("solve_reference"));
}
