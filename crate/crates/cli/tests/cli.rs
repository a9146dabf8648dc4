//! End-to-end drives of the binary: every subcommand against a temp config,
//! the exit-code contract, the run-record manifest, and byte-level
//! determinism of reruns.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_fejer")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawning the binary")
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("experiment.toml");
    fs::write(&path, text).expect("writing config");
    path
}

/// The single run directory produced under `out`, with its prefix checked.
fn only_run_dir(out: &Path, command: &str) -> PathBuf {
    let mut dirs: Vec<PathBuf> = fs::read_dir(out)
        .expect("reading out dir")
        .map(|e| e.expect("entry").path())
        .collect();
    assert_eq!(dirs.len(), 1, "expected one run dir, got {dirs:?}");
    let dir = dirs.pop().unwrap();
    let name = dir.file_name().unwrap().to_string_lossy().to_string();
    assert!(name.starts_with(command), "run dir {name} not named after {command}");
    dir
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).expect("reading json")).expect("parsing json")
}

#[test]
fn szego_constant_symbol_is_exact_and_ar1_converges() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1

[szego]
domain = "torus"
t_ladder = [64, 128, 256]
grid = 512

[szego.graph]
kind = "cycle"
n = 2

[[szego.symbols]]
kind = "constant"
value = 1.5
"#,
    );
    let out = run_in(tmp.path(), &["szego", "--config", cfg.to_str().unwrap(), "--out", "o1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = only_run_dir(&tmp.path().join("o1"), "szego");
    let csv = fs::read_to_string(dir.join("szego.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,ratio,target,rel_error");
    for line in lines {
        let rel: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(rel < 1e-12, "constant symbol should be exact, got {line}");
    }

    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1

[szego]
domain = "torus"
t_ladder = [256, 512, 1024, 2048, 4096]
grid = 2048
max_tail_rel_error = 0.05

[szego.graph]
kind = "cycle"
n = 2

[[szego.symbols]]
kind = "ar1"
phi = 0.5
"#,
    );
    let out = run_in(tmp.path(), &["szego", "--config", cfg.to_str().unwrap(), "--out", "o2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let dir = only_run_dir(&tmp.path().join("o2"), "szego");
    let summary = read_json(&dir.join("szego.json"));
    assert!(summary["tail_decreasing"].as_bool().unwrap());
    assert!(summary["final_rel_error"].as_f64().unwrap() < 0.05);
    // AR(1) two-cycle limit: (1 + phi^2)/(1 - phi^2)^3
    let target = summary["target"].as_f64().unwrap();
    assert!((target - 1.25 / 0.75f64.powi(3)).abs() < 1e-9);
}

#[test]
fn malformed_config_reports_line_and_field() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "schema = 1\n\n[diagrams]\nrows = [2, 2]\ngaussain = true\n",
    );
    let out = run_in(tmp.path(), &["diagrams", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 5"), "missing line info: {err}");
    assert!(err.contains("gaussain"), "missing field name: {err}");
}

#[test]
fn polytope_membership_vertices_and_family_alpha() {
    let tmp = TempDir::new().unwrap();
    // 2x4 general matrix with the total-equality case: member
    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1

[polytope]
case = "lebesgue"
z = ["0", "1", "1/2", "1/2"]

[polytope.graph]
kind = "rows"
rows = [[1, 0, 1, 1], [0, 1, 1, -1]]
"#,
    );
    let out = run_in(tmp.path(), &["polytope", "--config", cfg.to_str().unwrap(), "--out", "a"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_json(&only_run_dir(&tmp.path().join("a"), "polytope").join("polytope.json"));
    assert_eq!(rep["membership"]["member"], Value::Bool(true));
    assert_eq!(rep["rank"].as_u64(), Some(2));

    // 3-cycle vertex dump: indicators of the three 2-edge bases
    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1

[polytope]
case = "lebesgue"
vertices = true

[polytope.graph]
kind = "cycle"
n = 3
"#,
    );
    let out = run_in(tmp.path(), &["polytope", "--config", cfg.to_str().unwrap(), "--out", "b"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_json(&only_run_dir(&tmp.path().join("b"), "polytope").join("polytope.json"));
    let verts: Vec<Vec<String>> = rep["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().into()).collect())
        .collect();
    assert_eq!(
        verts,
        vec![
            vec!["1".to_string(), "1".into(), "0".into()],
            vec!["1".to_string(), "0".into(), "1".into()],
            vec!["0".to_string(), "1".into(), "1".into()],
        ]
    );

    // degree-2 family on 4 vertices at the boundary exponent: alpha = 2 at k = 4
    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1

[polytope.family]
kind = "sum"
m = 2
k_max = 4
z = ["1/2"]
"#,
    );
    let out = run_in(tmp.path(), &["polytope", "--config", cfg.to_str().unwrap(), "--out", "c"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_json(&only_run_dir(&tmp.path().join("c"), "polytope").join("polytope.json"));
    let rows = rep["family"]["rows"].as_array().unwrap();
    let k4 = rows.iter().find(|r| r["k"].as_u64() == Some(4)).unwrap();
    assert_eq!(k4["alpha"].as_str(), Some("2"));
    assert_eq!(k4["holds"], Value::Bool(true));
    assert_eq!(rep["family"]["all_hold"], Value::Bool(true));
}

#[test]
fn clt_gaussian_band_zero_kernel_and_gamma_shift() {
    let tmp = TempDir::new().unwrap();
    let gaussian = r#"
schema = 1
seed = 42

[clt]
n = 2048
replicas = 2000
variance_ratio_band = [0.9, 1.1]

[clt.functional]
kind = "quadratic"
kernel = [1.0, 0.5]

[clt.model]
kind = "geometric"
phi = 0.5

[clt.model.innovation]
family = "gaussian"
variance = 1.0
"#;
    let cfg = write_config(tmp.path(), gaussian);
    let out = run_in(tmp.path(), &["clt", "--config", cfg.to_str().unwrap(), "--out", "g"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_json(&only_run_dir(&tmp.path().join("g"), "clt").join("clt_report.json"));
    let ratio = rep["variance_ratio"].as_f64().unwrap();
    assert!((0.9..=1.1).contains(&ratio), "ratio {ratio}");
    let gaussian_target = rep["target_variance"].as_f64().unwrap();

    // all-zero kernel: the functional is identically zero
    let cfg = write_config(tmp.path(), &gaussian.replace("kernel = [1.0, 0.5]", "kernel = [0.0]"));
    let out = run_in(tmp.path(), &["clt", "--config", cfg.to_str().unwrap(), "--out", "z"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_json(&only_run_dir(&tmp.path().join("z"), "clt").join("clt_report.json"));
    assert_eq!(rep["variance"].as_f64(), Some(0.0));
    assert_eq!(rep["target_variance"].as_f64(), Some(0.0));

    // centered-Gamma innovations with the same second cumulant shift the
    // target by exactly (d4/d2^2) (sum_m b(m) r(m))^2
    let gamma = gaussian
        .replace("family = \"gaussian\"\nvariance = 1.0", "family = \"centered-gamma\"\nshape = 2.0\nrate = 1.4142135623730951")
        .replace("variance_ratio_band = [0.9, 1.1]", "variance_ratio_band = [0.85, 1.15]");
    let cfg = write_config(tmp.path(), &gamma);
    let out = run_in(tmp.path(), &["clt", "--config", cfg.to_str().unwrap(), "--out", "c"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_json(&only_run_dir(&tmp.path().join("c"), "clt").join("clt_report.json"));
    let gamma_target = rep["target_variance"].as_f64().unwrap();
    // d2 = shape/rate^2 = 1, d4 = 6 shape/rate^4 = 3; r(m) of the phi = 0.5
    // moving average with unit innovation variance
    let phi: f64 = 0.5;
    let r = |m: i32| phi.powi(m.abs()) / (1.0 - phi * phi);
    let br = r(0) + 2.0 * 0.5 * r(1);
    let predicted_shift = 3.0 * br * br;
    assert!(
        (gamma_target - gaussian_target - predicted_shift).abs() < 1e-9 * gamma_target,
        "shift {} vs predicted {predicted_shift}",
        gamma_target - gaussian_target
    );
    let ratio = rep["variance_ratio"].as_f64().unwrap();
    assert!((0.85..=1.15).contains(&ratio), "gamma ratio {ratio}");
}

#[test]
fn fit_recovers_synthetic_truth_and_embeds_conditions() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1
seed = 7

[fit]
method = "whittle"
step = 1.0

[fit.synthetic]
theta0 = [1.0, 0.2, 0.5]
n = 4096
oversample = 4
replicas = 4

[fit.family]
kind = "frbm"
lower = [0.5, 0.01, 0.1]
upper = [2.0, 0.45, 2.0]

[fit.weight]
kind = "rational"
b = 1.5
a = 4.0

[fit.optimizer]
starts = 2
tol = 1e-5

[fit.conditions]
theta_sample = [[1.0, 0.2, 0.6], [1.2, 0.25, 0.8]]
declared_pq = [4.0, 4.0]
lmax = 1e5
"#,
    );
    let out = run_in(tmp.path(), &["fit", "--config", cfg.to_str().unwrap(), "--out", "f"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_json(&only_run_dir(&tmp.path().join("f"), "fit").join("fit_report.json"));
    assert!(rep["mean_rel_error"].as_f64().unwrap() < 0.15);
    for f in rep["fits"].as_array().unwrap() {
        assert_eq!(f["converged"], Value::Bool(true));
    }
    // the report embeds the regularity checks, echoing the declared weight
    // exponent constraints
    let conds = rep["conditions"].as_array().unwrap();
    let names: Vec<&str> = conds.iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"weight-exponents"), "conditions: {names:?}");
    assert!(names.contains(&"identifiability"));
    let we = conds.iter().find(|c| c["name"] == "weight-exponents").unwrap();
    assert_eq!(we["status"].as_str(), Some("pass"));
    assert!(we["detail"].as_str().unwrap().contains("b"), "echoes the exponents");
}

#[test]
fn fit_missing_series_file_is_an_io_error() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1

[fit]
method = "whittle"
series = "definitely_not_here.csv"

[fit.family]
kind = "frbm"
lower = [0.5, 0.01, 0.1]
upper = [2.0, 0.45, 2.0]

[fit.weight]
kind = "consistency"
"#,
    );
    let out = run_in(tmp.path(), &["fit", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("definitely_not_here.csv"), "{err}");
}

#[test]
fn diagram_counts_match_the_small_tables() {
    let tmp = TempDir::new().unwrap();
    for (rows, expect, out_dir) in
        [("[2, 2]", 2u64, "a"), ("[2, 2, 2]", 8, "b"), ("[4]", 0, "c")]
    {
        let cfg = write_config(
            tmp.path(),
            &format!(
                "schema = 1\n\n[diagrams]\nrows = {rows}\ngaussian = true\nconnected = true\nno_flat = true\n"
            ),
        );
        let out =
            run_in(tmp.path(), &["diagrams", "--config", cfg.to_str().unwrap(), "--out", out_dir]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let rep =
            read_json(&only_run_dir(&tmp.path().join(out_dir), "diagrams").join("diagrams.json"));
        assert_eq!(rep["count"].as_u64(), Some(expect), "rows {rows}");
    }
}

#[test]
fn every_run_writes_a_complete_record() {
    let tmp = TempDir::new().unwrap();
    let cfg_text = "schema = 1\n\n[diagrams]\nrows = [2, 2]\ngaussian = true\n";
    let cfg = write_config(tmp.path(), cfg_text);
    let out = run_in(tmp.path(), &["diagrams", "--config", cfg.to_str().unwrap(), "--out", "r"]);
    assert!(out.status.success());
    let dir = only_run_dir(&tmp.path().join("r"), "diagrams");
    let record = read_json(&dir.join("run_record.json"));
    assert_eq!(record["schema"].as_u64(), Some(1));
    assert_eq!(record["command"].as_str(), Some("diagrams"));
    assert_eq!(record["status"].as_str(), Some("ok"));
    assert!(record["versions"]["fejer-core"].is_string());
    // the manifest names every sibling file except the record itself
    let outputs = record["outputs"].as_object().unwrap();
    let mut on_disk: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .filter(|n| n != "run_record.json")
        .collect();
    on_disk.sort();
    let mut listed: Vec<String> = outputs.keys().cloned().collect();
    listed.sort();
    assert_eq!(on_disk, listed);
    // digests are real: spot-check config.toml
    let digest = outputs["config.toml"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    let echoed = fs::read(dir.join("config.toml")).unwrap();
    assert_eq!(echoed, cfg_text.as_bytes());
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1
seed = 9

[fit]
method = "whittle"
step = 1.0

[fit.synthetic]
theta0 = [1.0, 0.15, 0.8]
n = 1024
replicas = 3

[fit.family]
kind = "frbm"
lower = [0.5, 0.01, 0.1]
upper = [2.0, 0.45, 2.0]

[fit.weight]
kind = "consistency"

[fit.optimizer]
starts = 1
tol = 1e-4
"#,
    );
    let a = run_in(
        tmp.path(),
        &["fit", "--config", cfg.to_str().unwrap(), "--out", "t1", "--threads", "1"],
    );
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run_in(
        tmp.path(),
        &["fit", "--config", cfg.to_str().unwrap(), "--out", "t2", "--threads", "2"],
    );
    assert!(b.status.success(), "{}", String::from_utf8_lossy(&b.stderr));
    let d1 = only_run_dir(&tmp.path().join("t1"), "fit");
    let d2 = only_run_dir(&tmp.path().join("t2"), "fit");
    assert_eq!(d1.file_name(), d2.file_name(), "same inputs, same run identity");
    for entry in fs::read_dir(&d1).unwrap() {
        let name = entry.unwrap().file_name();
        if name == "run_record.json" {
            continue;
        }
        let x = fs::read(d1.join(&name)).unwrap();
        let y = fs::read(d2.join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs between reruns");
    }
}

#[test]
fn seed_is_required_for_stochastic_commands() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"
schema = 1

[clt]
n = 512
replicas = 10

[clt.functional]
kind = "quadratic"
kernel = [1.0]

[clt.model]
kind = "white-noise"

[clt.model.innovation]
family = "gaussian"
variance = 1.0
"#,
    );
    let out = run_in(tmp.path(), &["clt", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}
