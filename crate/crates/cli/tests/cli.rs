use std::path::Path;
use std::process::{Command, Output};

use beta_os_cli::{run_single, run_sweep, ParamRange, SweepConfig, CSV_HEADER};
use beta_os_core::{builtin_profile, FlowParameters, SolverConfig};

fn beta_os(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_beta-os"))
        .args(args)
        .env("BETA_OS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

#[test]
fn couette_solve_is_stable() {
    let out = beta_os(&["solve", "--profile", "couette", "--alpha", "1", "--reynolds", "1000", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    let rows: Vec<&str> = stdout
        .lines()
        .filter(|l| l.split_whitespace().next().is_some_and(|t| t.parse::<usize>().is_ok()) && l.ends_with("ok"))
        .collect();
    assert!(!rows.is_empty());
    for row in rows {
        let ci: f64 = row.split_whitespace().nth(2).unwrap().parse().unwrap();
        assert!(ci < 0.0, "{row}");
    }
}

#[test]
fn marginal_poiseuille_solve() {
    let out = beta_os(&["solve", "--profile", "poiseuille", "--alpha", "1.02056", "--reynolds", "5772.22", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    let first = stdout.lines().find(|l| l.trim_start().starts_with("1 ")).unwrap();
    let ci: f64 = first.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!(ci.abs() < 5e-4, "{first}");
}

#[test]
fn negative_alpha_is_rejected() {
    let out = beta_os(&["solve", "--profile", "couette", "--alpha", "-1", "--reynolds", "1000", "--beta", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("alpha must be positive"));
}

#[test]
fn operational_errors_exit_with_one() {
    let out = beta_os(&["solve", "--profile", "blasius", "--alpha", "1", "--reynolds", "100"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("unknown profile"));

    let out = beta_os(&["solve", "--profile", "couette", "--alpha", "1", "--reynolds", "100", "--n", "16"]);
    assert_eq!(out.status.code(), Some(1));

    let out = beta_os(&["solve", "--unknown-flag"]);
    assert_eq!(out.status.code(), Some(1));

    let out = beta_os(&["sweep", "--profile", "couette", "--alpha", "2:1:3", "--reynolds", "100", "--output-dir", "x"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("bad range"));
}

#[test]
fn unwritable_output_dir_fails() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let target = blocker.join("out");
    let out = beta_os(&[
        "sweep",
        "--profile",
        "couette",
        "--alpha",
        "1",
        "--reynolds",
        "100",
        "--n",
        "32",
        "--output-dir",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn profiles_list_names_all_builtins() {
    let out = beta_os(&["profiles", "list"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = text(&out.stdout);
    for name in ["couette", "poiseuille", "tanh_layer", "bickley_jet"] {
        assert!(stdout.contains(name));
    }
}

fn read_manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn sweep_writes_schema_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = beta_os(&[
        "sweep",
        "--profile",
        "tanh_layer",
        "--alpha",
        "0.5:2:3",
        "--reynolds",
        "100:10000:3",
        "--beta",
        "-1:1:3",
        "--n",
        "48",
        "--modes-kept",
        "5",
        "--output-dir",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER);
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty() && rows.len() <= 135);
    for row in &rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 12);
        assert_eq!(fields[6], "true");
        assert!(["case_i", "case_ii", "case_iii"].contains(&fields[10]));
        let mantissa = fields[4].trim_start_matches('-').split('e').next().unwrap();
        assert_eq!(mantissa.len(), 18, "{}", fields[4]);
    }
    let manifest = read_manifest(&out_dir);
    let keys: Vec<&String> = manifest.as_object().unwrap().keys().collect();
    for key in ["config", "version", "cases_total", "cases_failed", "bound_violations", "max_identity_residual"] {
        assert!(keys.iter().any(|k| *k == key), "missing {key}");
    }
    assert_eq!(manifest["cases_total"], 27);
    assert_eq!(manifest["cases_failed"], 0);
    assert_eq!(manifest["bound_violations"], 0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.toml");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &cfg,
        format!(
            "profile = \"bickley_jet\"\nalpha_range = \"1:1:1\"\nreynolds_range = {{ start = 500.0, stop = 500.0, count = 1 }}\nn = 64\nmodes_kept = 3\noutput_dir = {:?}\n",
            out_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let out = beta_os(&["sweep", "--config", cfg.to_str().unwrap(), "--n", "40", "--modes-kept", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let manifest = read_manifest(&out_dir);
    assert_eq!(manifest["config"]["n"], 40);
    assert_eq!(manifest["config"]["profile"], "bickley_jet");
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let json_cfg = dir.path().join("sweep.json");
    std::fs::write(
        &json_cfg,
        format!(
            "{{\"profile\": \"couette\", \"alpha_range\": \"1:1:1\", \"reynolds_range\": \"300:300:1\", \"n\": 32, \"output_dir\": {:?}}}",
            dir.path().join("json-out").to_str().unwrap()
        ),
    )
    .unwrap();
    let out = beta_os(&["sweep", "--config", json_cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
}

#[test]
fn single_case_sweep_matches_run_single() {
    let dir = tempfile::tempdir().unwrap();
    let config = SweepConfig {
        profile: "poiseuille".into(),
        kappa: None,
        alpha_range: ParamRange::single(1.0),
        reynolds_range: ParamRange::single(1e4),
        beta_range: ParamRange::single(0.25),
        n: 64,
        check_n: None,
        filter_tol: 1e-6,
        modes_kept: 4,
        output_dir: dir.path().to_path_buf(),
    };
    run_sweep(&config, 1).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let direct = run_single(
        &builtin_profile("poiseuille").unwrap(),
        &FlowParameters::new(1.0, 1e4, 0.25).unwrap(),
        &SolverConfig::with_degree(64),
        4,
    )
    .unwrap();
    let rows: Vec<Vec<f64>> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').skip(4).take(2).map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), direct.eigenvalues.len());
    for (row, mode) in rows.iter().zip(&direct.eigenvalues) {
        assert!((row[0] - mode.c.re).abs() <= 1e-14 && (row[1] - mode.c.im).abs() <= 1e-14);
    }
}

#[test]
fn certify_round_trip_and_violation_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("spectrum.json");
    let out = beta_os(&[
        "solve",
        "--profile",
        "poiseuille",
        "--alpha",
        "1",
        "--reynolds",
        "2000",
        "--n",
        "48",
        "--save",
        saved.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let solve_table = text(&out.stdout);
    let out = beta_os(&["certify", saved.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(text(&out.stdout), solve_table);

    // A phase velocity far above the growth-rate ceiling must be reported.
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&saved).unwrap()).unwrap();
    doc["spectrum"]["pairs"][0]["c"][1] = serde_json::json!(10.0);
    let tampered = dir.path().join("tampered.json");
    std::fs::write(&tampered, doc.to_string()).unwrap();
    let out = beta_os(&["certify", tampered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", text(&out.stderr));
    assert!(text(&out.stderr).contains("exceeds ceiling"));
}

#[test]
fn table_profile_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("parabola.csv");
    let mut body = String::from("z,U\n");
    for k in 0..=40 {
        let z = -1.0 + k as f64 / 20.0;
        body.push_str(&format!("{z},{}\n", 1.0 - z * z));
    }
    std::fs::write(&table, body).unwrap();
    let out = beta_os(&["solve", "--profile", table.to_str().unwrap(), "--alpha", "1", "--reynolds", "1000", "--n", "48"]);
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    assert!(text(&out.stdout).contains("parabola"));
}
