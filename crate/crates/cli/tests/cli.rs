use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use blowup_cli::output::{validate_csv, PROFILE_HEADER, SERIES_HEADER, SNAPSHOT_HEADER};
use serde_json::Value;

fn blowup(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blowup"))
        .args(args)
        .output()
        .expect("binary runs")
}

/// Writes `config` into `dir` and runs it.
fn run_config(dir: &Path, config: &str) -> Output {
    let path = dir.join("experiment.cfg");
    fs::write(&path, config).unwrap();
    blowup(&["run", path.to_str().unwrap()])
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn classify_reports_regime_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "scenario = classify\nsigma = 2\nbeta = 3.6\ndim = 1\noutput = .\n");
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert_eq!(s["regime"], "LS");
    assert_eq!(s["results"]["solution_count"]["K"], 4);
    assert_eq!(s["status"], "ok");
}

#[test]
fn selfsim_writes_four_profiles_deterministically() {
    let cfg = "scenario = selfsim\nsigma = 2\nbeta = 3.6\nk = 1..4\nlength = 20\nelements = 400\noutput = run\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = run_config(d.path(), cfg);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for k in 1..=4 {
        let name = format!("run/profile_k{k}.csv");
        let pa = a.path().join(&name);
        assert_eq!(validate_csv(&pa, PROFILE_HEADER).unwrap(), 401);
        assert_eq!(fs::read(&pa).unwrap(), fs::read(b.path().join(&name)).unwrap());
    }
    let s = summary(&a.path().join("run"));
    let profiles = s["results"]["profiles"].as_array().unwrap();
    let crossings: Vec<u64> = profiles.iter().map(|p| p["crossings"].as_u64().unwrap()).collect();
    assert_eq!(crossings, vec![1, 2, 3, 4]);
    assert_eq!(s["outputs"].as_array().unwrap().len(), 4);
}

#[test]
fn config_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(dir.path(), "scenario = selfsim\nsigma = 2\nbeta = 0.5\n");
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("beta must be > 1"));
    assert!(!dir.path().join("out").exists());
    let out = blowup(&["reproduce", "fig9"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scenario"));
    let out = blowup(&["run", "/nonexistent/config"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn solver_failure_exits_two_and_is_summarised() {
    let dir = tempfile::tempdir().unwrap();
    // only four LS profiles exist for these parameters
    let out = run_config(
        dir.path(),
        "scenario = selfsim\nsigma = 2\nbeta = 3.6\nk = 1, 6\nlength = 20\nelements = 200\noutput = .\n",
    );
    assert_eq!(out.status.code(), Some(2));
    let s = summary(dir.path());
    assert_eq!(s["status"], "solver_failure");
    assert!(s["errors"][0].as_str().unwrap().contains("k = 6"));
    assert!(dir.path().join("profile_k1.csv").exists());
}

#[test]
fn evolution_series_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "scenario = evolve\nsigma = 2\nbeta = 3\ninitial = exact\nelements = 100\n\
         amplitude_cap = 1000\nsnapshots = 1, 10, 100\noutput = .\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(validate_csv(&dir.path().join("series.csv"), SERIES_HEADER).unwrap() > 100);
    for i in 0..3 {
        validate_csv(&dir.path().join(format!("snapshot_{i}.csv")), SNAPSHOT_HEADER).unwrap();
        validate_csv(&dir.path().join(format!("representation_{i}.csv")), PROFILE_HEADER).unwrap();
    }
    let s = summary(dir.path());
    let r = &s["results"];
    assert_eq!(r["stop"], "amplitude_cap");
    assert!((r["fit_t0"].as_f64().unwrap() / 0.5 - 1.0).abs() < 0.01);
    assert_eq!(r["min_value"].as_f64().unwrap(), 0.0);
}

#[test]
fn stability_runs_each_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "scenario = stability\nsigma = 2\nbeta = 3.6\nlength = 20\nelements = 200\n\
         factors = 0.8, 1.2\nwiden = 0.1\namplitude_cap = 1e5\noutput = .\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    let runs = s["results"]["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    for r in runs {
        assert_eq!(r["verdict"]["kind"], "structurally_stable", "{r}");
        let label = r["label"].as_str().unwrap();
        validate_csv(&dir.path().join(label).join("series.csv"), SERIES_HEADER).unwrap();
    }
    assert_eq!(runs[0]["perturbation"]["factor"], 0.8);
}

#[test]
fn convergence_study_orders() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_config(
        dir.path(),
        "scenario = convergence\nsigma = 2\nbeta = 3\nelements = 150\nlevels = 4\noutput = .\n",
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    for o in s["results"]["orders"].as_array().unwrap() {
        let o = o.as_f64().unwrap();
        assert!((1.7..=2.3).contains(&o), "{o}");
    }
    assert_eq!(s["results"]["reference"], "exact");
}

#[test]
fn reproduce_fig3() {
    let dir = tempfile::tempdir().unwrap();
    let out = blowup(&["reproduce", "fig3", "--output", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for k in 1..=4 {
        validate_csv(&dir.path().join(format!("profile_k{k}.csv")), PROFILE_HEADER).unwrap();
    }
    assert!(dir.path().join("config.txt").exists());
}
