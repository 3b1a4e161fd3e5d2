use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mfourier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfourier"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_scenario(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn cauchy_schwarz_of_equal_functions_is_an_equality() {
    let o = mfourier(&["cauchy-schwarz", "--g", "x1", "--h", "x1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("equality within tolerance"), "{}", stdout(&o));
}

#[test]
fn parseval_of_a_constant_has_zero_residual() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "p.toml",
        r#"
task = "parseval"
dim = 1

[fields]
f = "2"

[families]
phi = ["1"]

[output]
report = "p.json"
"#,
    );
    let o = mfourier(&["run", &path]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    let residual = &report["result"]["parseval"]["residual"];
    let (v, e) = (residual["value"].as_f64().unwrap(), residual["err"].as_f64().unwrap());
    assert!(v.abs() <= e + 1e-12, "residual {v} ± {e}");
    assert!(dir.path().join("p.txt").exists());
}

#[test]
fn malformed_field_is_an_input_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "bad.toml",
        "task = \"integrate\"\ndim = 1\n\n[fields]\nf = \"x1 +\"\n",
    );
    let o = mfourier(&["run", &path]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("line 5"), "{err}");
    assert!(err.contains("column"), "{err}");

    let o = mfourier(&["integrate", "--field", "x1 +"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("column"), "{}", stderr(&o));
}

#[test]
fn scenario_syntax_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "bad.toml", "task = \"integrate\"\ndim = = 1\n");
    let o = mfourier(&["run", &path]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn missing_fields_and_unknown_names_are_input_errors() {
    let o = mfourier(&["expand", "--phi", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = mfourier(&["parseval", "--field", "1 + x1", "--field-floor", "1", "--phi", "q"]);
    assert_eq!(o.status.code(), Some(1));
    let o = mfourier(&["run", "/nonexistent/scenario.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn opposite_monotone_pair_fails_its_criteria_cleanly() {
    let o = mfourier(&[
        "product-criterion",
        "--field",
        "1 + x1",
        "--field-floor",
        "1",
        "--g",
        "2 - x1",
        "--g-floor",
        "1",
        "--phi",
        "1",
        "--phi",
        "x1",
        "-N",
        "2",
    ]);
    // the conclusion fails, but that is reported, not a violation; the
    // contrapositive check still passes, so the run is clean
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
    assert!(stdout(&o).contains("all criteria hold: false"), "{}", stdout(&o));
}

#[test]
fn every_task_is_reachable_from_flags() {
    let runs: [&[&str]; 8] = [
        &["integrate", "--field", "x1^2"],
        &["orthogonalize", "--field", "1 + x1", "--field-floor", "1", "--phi", "1", "--phi", "x1"],
        &["expand", "--field", "1 + x1", "--field-floor", "1", "--phi", "1", "--phi", "x1"],
        &["parseval", "--field", "1 + x1", "--field-floor", "1", "--phi", "1", "--phi", "x1"],
        &["partition-parseval", "--field", "x1 - 0.5", "--partition-depth", "10"],
        &["cauchy-schwarz", "--g", "x1", "--h", "1 - x1"],
        &["product-criterion", "--field", "1 + x1", "--field-bounds", "1", "2", "--g", "1 + x1", "--g-bounds", "1", "2", "--phi", "1"],
        &["corollary", "--field", "1 + x1", "--field-bounds", "1", "2", "--g", "1 + x1", "--g-bounds", "1", "2", "--phi", "1"],
    ];
    for args in runs {
        let o = mfourier(args);
        assert_ne!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
        assert!(stdout(&o).starts_with(&format!("task: {}", args[0])), "{}", stdout(&o));
    }
}

#[test]
fn reports_and_csv_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "e.toml",
        r#"
task = "expand"
dim = 2
region = "ball([0, 0], 1)"

[fields]
f = { expr = "2 + x1*x2", floor = 1 }

[families]
phi = ["1", "x1", "x2", "x1*x2"]

[settings]
method = "stochastic"
samples = 20000
seed = 5
"#,
    );
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("r{k}.json"));
        let csv = dir.path().join(format!("r{k}.csv"));
        let o = mfourier(&[
            "run",
            &path,
            "--out",
            out.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
        reports.push((fs::read(&out).unwrap(), fs::read(&csv).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn flags_override_scenario_settings() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "i.toml",
        r#"
task = "integrate"
dim = 1

[fields]
f = "x1"

[settings]
method = "refine"
"#,
    );
    let out = dir.path().join("i.json");
    let o = mfourier(&["run", &path, "--method", "stochastic", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(out).unwrap();
    assert!(report.contains("\"stochastic\""), "{report}");
}
