use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn extlab(args: &[&str], seed_env: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_extlab"));
    cmd.args(args).env_remove("EXTLAB_SEED");
    if let Some(s) = seed_env {
        cmd.env("EXTLAB_SEED", s);
    }
    cmd.output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn run_json(dir: &Path, config: &str, seed_env: Option<&str>) -> (i32, String) {
    let cfg = write(dir, "scenario.toml", config);
    let out = dir.join("report.json");
    let o = extlab(&["run", "--config", &cfg, "--out", out.to_str().unwrap()], seed_env);
    (o.status.code().unwrap(), std::fs::read_to_string(out).unwrap_or_default())
}

fn record<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["records"].as_array().unwrap().iter().find(|r| r["name"] == name).unwrap()
}

#[test]
fn e2_qfun_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_json(dir.path(), "instance = \"E2\"\nchecks = [\"qfun\"]\n", None);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let inv = record(&doc, "qfun.inv11");
    assert!(inv["max_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(inv["paper_anchor"], "inv11");
    let profile: Vec<bool> = serde_json::from_value(record(&doc, "qfun.calq0")["witness"]["profile"].clone()).unwrap();
    assert_eq!(profile, [true, true, true, false]);
    assert_eq!(record(&doc, "qfun.klass0.4")["verdict"], "expected-fail");
}

#[test]
fn e3_boundary_scenario_records_weyl_value() {
    let dir = tempfile::tempdir().unwrap();
    let (code, text) = run_json(dir.path(), "instance = \"E3\"\nchecks = [\"boundary\"]\n", None);
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&text).unwrap();
    let m = &record(&doc, "boundary.weyl")["witness"]["m_minus_one"][0][0];
    assert!((m[0].as_f64().unwrap() + 4.0 / 3.0).abs() < 1e-12);
    assert!(m[1].as_f64().unwrap().abs() < 1e-12);
    for r in doc["records"].as_array().unwrap() {
        assert!(r["paper_anchor"].as_str().is_some_and(|a| !a.is_empty()));
        assert_ne!(r["verdict"], "failed", "{r}");
    }
}

#[test]
fn random_pairs_run_is_byte_identical() {
    let cfg = "seed = 7\ninstance = { random = { n = 4, domdim = 2 } }\nchecks = [\"pairs\"]\n";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (ca, ra) = run_json(a.path(), cfg, None);
    let (cb, rb) = run_json(b.path(), cfg, None);
    assert_eq!((ca, cb), (0, 0));
    assert!(!ra.is_empty());
    assert_eq!(ra, rb);
}

#[test]
fn seed_override_and_mandatory_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "seed = 7\ninstance = { random = { n = 4, domdim = 2 } }\nchecks = [\"shorted\"]\n";
    let (code, text) = run_json(dir.path(), cfg, Some("19"));
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["environment"]["seed"], 19);
    assert_eq!(doc["environment"]["instance"], "random(19,4,2)");

    let (code, _) = run_json(dir.path(), "instance = { random = { n = 4, domdim = 2 } }\nchecks = []\n", None);
    assert_eq!(code, 2);
    let (code, _) = run_json(dir.path(), cfg, Some("seven"));
    assert_eq!(code, 2);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "instance = \"E2\"\nchecks = [\"qfun\"]\nextra = true\n");
    let o = extlab(&["run", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("extra"));
    let (code, _) = run_json(dir.path(), "instance = \"E2\"\nchecks = [\"colour\"]\n", None);
    assert_eq!(code, 2);
    let o = extlab(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failed_record_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "instance = \"E2\"\nchecks = [\"qfun\"]\n[tolerances]\neq_abs_tol = 1e-300\n";
    let (code, text) = run_json(dir.path(), cfg, None);
    assert_eq!(code, 1);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert!(doc["records"].as_array().unwrap().iter().any(|r| r["verdict"] == "failed"));
}

#[test]
fn text_report_and_file_instance() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "e2.toml", "dim = 2\ndomain = [[1.0, 0.0]]\naction = [[0.0, 0.5]]\n");
    let cfg = write(dir.path(), "s.toml", "instance = { file = \"e2.toml\" }\nchecks = [\"shorted\", \"uniqueness_scan\"]\nscan_trials = 20\n");
    let o = extlab(&["run", "--config", &cfg, "--format", "text"], None);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    for name in ["shorted.extreme_pair", "shorted.sh2", "shorted.novrav", "uniqueness_scan"] {
        assert!(s.contains(name), "{s}");
    }
    assert!(s.contains("4 passed, 0 expected-fail, 0 failed"));
}

#[test]
fn curve_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let o = extlab(
        &["curve", "--instance", "E2", "--function", "calq0", "--grid", "-10:-0.01:40:log", "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["lambda_re", "lambda_im", "entry_00_re", "entry_00_im"]);
    let mut rows = 0;
    for row in rdr.records() {
        let row = row.unwrap();
        let l: f64 = row[0].parse().unwrap();
        let v: f64 = row[2].parse().unwrap();
        assert!((v - l * (5.0 - 3.0 * l) / (3.0 - 5.0 * l)).abs() <= 1e-9);
        rows += 1;
    }
    assert_eq!(rows, 40);

    let o = extlab(&["curve", "--instance", "E1", "--function", "q0", "--grid", "-3:-3:1"], None);
    let s = String::from_utf8(o.stdout).unwrap();
    let v: f64 = s.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((v - 2.0).abs() < 1e-12);

    let o = extlab(&["curve", "--instance", "E3", "--function", "weyl", "--grid", "z:-1,0"], None);
    let s = String::from_utf8(o.stdout).unwrap();
    let v: f64 = s.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((v + 4.0 / 3.0).abs() < 1e-12);

    let o = extlab(&["curve", "--instance", "E2", "--function", "q1", "--grid", ""], None);
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "lambda_re,lambda_im,entry_00_re,entry_00_im\n");

    let o = extlab(&["curve", "--instance", "E2", "--function", "q0", "--grid", "0:0.5:3"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn list_instances() {
    let o = extlab(&["list-instances"], None);
    assert_eq!(o.status.code(), Some(0));
    let s = String::from_utf8(o.stdout).unwrap();
    assert!(["E1", "E2", "E3", "random("].iter().all(|n| s.contains(n)));
}

#[test]
fn shipped_scenarios_pass() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    for name in ["e2_qfun", "e3_full", "random_pairs", "from_file"] {
        let cfg = root.join(format!("{name}.toml"));
        let o = extlab(&["run", "--config", cfg.to_str().unwrap(), "--format", "text"], None);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&o.stdout));
    }
}
