use std::fs;
use std::path::Path;
use std::process::Command;

use bvchain_cli::config::{ObservableKind, PathKind};
use bvchain_cli::{emit_plotdata, run_scenario, scenarios, validate_scenario, CliError, ScenarioConfig, Series};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bvchain"))
}

const SMALL: &str = r#"
schema = 1
name = "small"

[model]
n_sites = 4
boundary = "periodic"
g = 1.0
gamma = 0.3
h = 0.2
t_end = 1.0

[[model.impurity]]
kind = "field"
at = 2
profile = { type = "switch", t = 0.5, before = 0.0, after = 0.4 }

[initial]
state = "thermal"
beta = 1.0

[solver]
paths = ["flow", "oracle"]

[solver.flow]
dt = 0.01
method = "rk4"
car_tolerance = 1e-10

[observables]
kinds = ["global_mz", "local_mz"]
sites = [1, 2]
record_every = 0.25

[[compare]]
observable = "local_mz"
site = 2
a = "flow"
b = "oracle"
kind = "sup"
tolerance = 1e-6
"#;

#[test]
fn bundled_scenarios_round_trip() {
    for name in scenarios::names() {
        let cfg = scenarios::load(name).unwrap();
        assert_eq!(cfg.name, name);
        let text = cfg.to_toml();
        let again = ScenarioConfig::parse(&text).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml(), text);
        validate_scenario(&cfg).unwrap();
    }
}

#[test]
fn schema_is_checked() {
    let text = SMALL.replace("schema = 1", "schema = 2");
    assert!(matches!(ScenarioConfig::parse(&text), Err(CliError::Parse(_))));
    let text = SMALL.replace("n_sites = 4", "n_sites = 4\ncolour = 3");
    assert!(matches!(ScenarioConfig::parse(&text), Err(CliError::Parse(_))));
}

#[test]
fn validation_rejects_bad_scenarios() {
    let cases = [
        SMALL.replace("n_sites = 4", "n_sites = 12"),
        SMALL.replace("record_every = 0.25", "record_every = 0.3"),
        SMALL.replace("paths = [\"flow\", \"oracle\"]", "paths = [\"flow\", \"oracle\", \"volterra\"]"),
        SMALL.replace("site = 2\n", "site = 3\n"),
        SMALL.replace("t = 0.5,", "t = 0.505,"),
    ];
    for text in cases {
        let cfg = ScenarioConfig::parse(&text).unwrap();
        assert!(matches!(validate_scenario(&cfg), Err(CliError::Validation(_))), "{text}");
    }
}

#[test]
fn small_scenario_agrees_with_oracle() {
    let cfg = ScenarioConfig::parse(SMALL).unwrap();
    let run = run_scenario(&cfg).unwrap();
    assert!(run.report.passed);
    assert_eq!(run.series.len(), 6);
    let car = run.report.car.unwrap();
    assert!(car.max_first < 1e-10 && car.max_second < 1e-10);
}

#[test]
fn simulate_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("small.toml");
    fs::write(&cfg_path, SMALL).unwrap();
    let out = dir.path().join("out");
    let status =
        bin().args(["simulate", "--config"]).arg(&cfg_path).arg("--out-dir").arg(&out).output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    let csv = fs::read_to_string(out.join("local_mz_flow.csv")).unwrap();
    assert!(csv.starts_with("t,value,site\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 5);
    let global = fs::read_to_string(out.join("global_mz_oracle.csv")).unwrap();
    assert!(global.starts_with("t,value\n"));
    let report = fs::read_to_string(out.join("report.toml")).unwrap();
    assert!(report.contains("passed = true"));
    assert!(out.join("plotdata/manifest.toml").exists());
    assert!(out.join("plotdata/local_mz_site2_overlay.dat").exists());
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.push((p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("small.toml");
    fs::write(&cfg_path, SMALL).unwrap();
    for run in ["a", "b"] {
        let status = bin()
            .args(["simulate", "--config"])
            .arg(&cfg_path)
            .arg("--out-dir")
            .arg(dir.path().join(run))
            .output()
            .unwrap()
            .status;
        assert_eq!(status.code(), Some(0));
    }
    assert_eq!(read_tree(&dir.path().join("a")), read_tree(&dir.path().join("b")));
}

#[test]
fn malformed_config_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    fs::write(&cfg_path, "schema = 1\n[model\n").unwrap();
    let out = dir.path().join("out");
    let status =
        bin().args(["simulate", "--config"]).arg(&cfg_path).arg("--out-dir").arg(&out).output().unwrap().status;
    assert_eq!(status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn invalid_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("big.toml");
    fs::write(&cfg_path, SMALL.replace("n_sites = 4", "n_sites = 12")).unwrap();
    let out = dir.path().join("out");
    let status =
        bin().args(["simulate", "--config"]).arg(&cfg_path).arg("--out-dir").arg(&out).output().unwrap().status;
    assert_eq!(status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn tolerance_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let status = bin()
        .args(["simulate", "--scenario", "random_impurity_oracle", "--tolerance-override", "0"])
        .arg("--out-dir")
        .arg(dir.path())
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(1));
    let report = fs::read_to_string(dir.path().join("report.toml")).unwrap();
    assert!(report.contains("passed = false"));
}

#[test]
fn paths_flag_restricts_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("small.toml");
    fs::write(&cfg_path, SMALL).unwrap();
    let out = dir.path().join("out");
    let status = bin()
        .args(["simulate", "--paths", "oracle", "--config"])
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert_eq!(status.code(), Some(0));
    assert!(out.join("local_mz_oracle.csv").exists());
    assert!(!out.join("local_mz_flow.csv").exists());
    let status = bin().args(["simulate", "--paths", "magic", "--config"]).arg(&cfg_path).output().unwrap().status;
    assert_eq!(status.code(), Some(2));
}

#[test]
fn scenarios_are_listed() {
    let out = bin().arg("scenarios").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    for name in scenarios::names() {
        assert!(text.contains(name));
    }
}

fn series(path: PathKind, values: Vec<f64>) -> Series {
    let times = (0..values.len()).map(|i| i as f64 * 0.5).collect();
    Series { observable: ObservableKind::LocalMz, path, site: Some(3), times, values }
}

#[test]
fn plotdata_layout() {
    let dir = tempfile::tempdir().unwrap();
    let m = emit_plotdata(&[], dir.path()).unwrap();
    assert!(m.files.is_empty());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let m = emit_plotdata(&[series(PathKind::Flow, vec![0.1, 0.2])], dir.path()).unwrap();
    assert_eq!(m.files.len(), 1);
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);

    let dir = tempfile::tempdir().unwrap();
    let m = emit_plotdata(
        &[series(PathKind::Flow, vec![0.1, 0.2]), series(PathKind::Volterra, vec![0.3, 0.4])],
        dir.path(),
    )
    .unwrap();
    assert_eq!(m.files.len(), 3);
    let overlay = fs::read_to_string(dir.path().join("local_mz_site3_overlay.dat")).unwrap();
    assert_eq!(overlay.lines().next(), Some("# t flow volterra"));
    assert_eq!(overlay.lines().nth(2), Some("5e-1 2e-1 4e-1"));
}
