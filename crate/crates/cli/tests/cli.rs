//! End-to-end runs of the `lzcat` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lzcat_cli::output::read_csv;
use serde_json::Value;

fn lzcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lzcat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn dir_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

const SHORT: [&str; 4] = ["--t0=-15", "--t1=15", "--integrator.samples=61", "--params.delta=0.5"];

#[test]
fn run_writes_csv_and_meta() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "--out", dir_arg(tmp.path()), "--name", "vac", "--initial.alpha2=0"];
    args.extend(SHORT);
    let out = lzcat(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let (header, cols) = read_csv(&tmp.path().join("vac.csv")).unwrap();
    assert_eq!(header, ["t", "p_lz", "e_l", "q", "nbar", "norm"]);
    assert_eq!(cols[0].len(), 61);
    assert_eq!(cols[0][0], -15.0);

    let meta: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("vac.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["tool"], "lzcat");
    assert_eq!(meta["config"]["params"]["delta"], 0.5);
    let analytic = meta["analytic_p_lz"].as_f64().unwrap();
    assert!((analytic - (1.0 - (-std::f64::consts::PI * 0.125).exp())).abs() < 1e-12);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for name in ["a", "b"] {
        let mut args = vec!["run", "--model", "full", "--out", dir_arg(tmp.path()), "--name", name];
        args.extend(SHORT);
        assert!(lzcat(&args).status.success());
        csvs.push(fs::read(tmp.path().join(format!("{name}.csv"))).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
}

#[test]
fn sweep_from_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["sweep", "--axis", "delta", "--values", "0,0.5", "--out", dir_arg(tmp.path())];
    args.extend(&SHORT[..3]);
    let out = lzcat(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, cols) = read_csv(&tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(header[0], "axis_value");
    assert_eq!(cols[0], [0.0, 0.5]);
    assert_eq!(cols[1][0], 0.0);
    assert!(tmp.path().join("sweep.meta.json").exists());
}

#[test]
fn scenario_file_and_fock_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("s.toml");
    fs::write(
        &cfg,
        "[params]\nmodel = \"rwa\"\ndelta = 0.5\n\n[integrator]\nt0 = -20.0\nt1 = 20.0\nsamples = 41\n",
    )
    .unwrap();
    let out = lzcat(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir_arg(tmp.path()),
        "--initial.kind=fock",
        "--initial.n=2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("run.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["initial"]["kind"], "fock");
    assert_eq!(meta["n_max"], 7);
}

#[test]
fn analytic_table() {
    let out = lzcat(&["analytic", "yurke-stoler", "--alpha2", "0,1", "--delta", "0.5", "--oracle"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("formula\talpha2\ttheta"));
    let row: Vec<&str> = lines[2].split('\t').collect();
    let value: f64 = row[7].parse().unwrap();
    assert!((value - 0.512_013_323_152_136).abs() < 1e-12);
    assert!(row[9].parse::<f64>().unwrap() < 1e-12);
}

#[test]
fn bad_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lzcat(&["run", "--out", dir_arg(tmp.path()), "--params.delta=-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lzcat(&["run", "--out", dir_arg(tmp.path()), "--params.nonsense=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lzcat(&["analytic", "cat-rwa", "--initial.alpha2=1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = lzcat(&["analytic", "no-such-formula"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(fs::read_dir(tmp.path()).unwrap().next().is_none());
}

#[test]
fn unknown_figure_exits_4() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lzcat(&["figure", "9z", "--out", dir_arg(tmp.path())]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn spectrum_figure_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lzcat(&["figure", "1a", "--out", dir_arg(tmp.path())]);
    assert!(out.status.success());
    let dir = tmp.path().join("fig1a");
    let m: Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["figure"], "1a");
    for c in m["curves"].as_array().unwrap() {
        assert!(dir.join(c["file"].as_str().unwrap()).exists());
    }
}
