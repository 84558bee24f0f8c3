use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qmem(config: &str, dir: &Path, extra: &[&str]) -> Output {
    let path = dir.join("config.toml");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_qmem"))
        .args(["run", "--config"])
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

#[test]
fn list_prints_every_experiment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qmem"))
        .arg("list")
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for name in qmem_cli::config::EXPERIMENTS {
        assert!(text.lines().any(|l| l == name), "{name} missing");
    }
    assert!(text.contains("band_width"));
}

#[test]
fn scaling_run_writes_documented_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = qmem(
        "experiment = \"toric-scaling\"\nn_range = [16, 32, 64]\n",
        dir.path(),
        &["--svg"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    let csv = fs::read_to_string(out.join("toric-scaling.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("N,min_gap,transfer_time"));
    assert_eq!(lines.count(), 3);
    assert!(out.join("toric-scaling.svg").exists());
    let json: Value =
        serde_json::from_str(&fs::read_to_string(out.join("toric-scaling.json")).unwrap()).unwrap();
    assert_eq!(json["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(json["config"]["n_range"], serde_json::json!([16, 32, 64]));
    assert!(json["summary"]["gap_exponent"].is_number());
    assert!(json["metadata"]["wall_clock_seconds"].is_number());
    assert_eq!(json["passed"], true);
}

#[test]
fn transfer_traces_have_t_and_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let o = qmem(
        "experiment = \"toric-transfer\"\nn_range = [4]\n",
        dir.path(),
        &[],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for chain in ["christandl", "retuned"] {
        let csv = fs::read_to_string(
            dir.path()
                .join(format!("out/toric-transfer-trace-{chain}-N4.csv")),
        )
        .unwrap();
        assert!(csv.starts_with("t,fidelity\n"));
        let (t, f) = csv.lines().nth(1).unwrap().split_once(',').unwrap();
        assert_eq!(t, "0.0000000000000000e0");
        assert!(f.parse::<f64>().unwrap().abs() < 1e-12);
    }
}

#[test]
fn identical_runs_are_byte_identical() {
    let cfg = "experiment = \"banded-splitting\"\nn_range = [3, 4]\nband_width = 2\n";
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(code(&qmem(cfg, d.path(), &["--seed", "5"])), 0);
    }
    let read = |d: &Path, f: &str| fs::read(d.join("out").join(f)).unwrap();
    for f in ["banded-splitting.csv", "banded-splitting-fits.csv"] {
        assert_eq!(read(a.path(), f), read(b.path(), f));
    }
    // JSON agrees once the metadata block is removed
    let strip = |d: &Path| {
        let mut v: Value = serde_json::from_slice(&read(d, "banded-splitting.json")).unwrap();
        v.as_object_mut().unwrap().remove("metadata");
        v.as_object_mut().unwrap().remove("config");
        v
    };
    assert_eq!(strip(a.path()), strip(b.path()));
    // a different seed draws different bands
    let c = tempfile::tempdir().unwrap();
    assert_eq!(code(&qmem(cfg, c.path(), &["--seed", "6"])), 0);
    assert_ne!(
        read(a.path(), "banded-splitting.csv"),
        read(c.path(), "banded-splitting.csv")
    );
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = qmem(
        "experiment = \"toric-scaling\"\ndelta = -0.5\n",
        dir.path(),
        &[],
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`delta`"));
    let o = qmem(
        "n_range = [3]\n",
        dir.path(),
        &["--experiment", "no-such-thing"],
    );
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("`experiment`"));
    assert!(
        !dir.path().join("out").exists(),
        "nothing runs before validation"
    );
}

#[test]
fn failed_checks_exit_two_and_still_write() {
    // two tiny sizes cannot reproduce the asymptotic gap exponent
    let dir = tempfile::tempdir().unwrap();
    let o = qmem(
        "experiment = \"toric-scaling\"\nn_range = [4, 5]\n",
        dir.path(),
        &[],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("min_gap exponent"));
    let json: Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("out/toric-scaling.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(json["passed"], false);
}

#[test]
fn precision_floor_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = qmem(
        "experiment = \"ising-splitting\"\nn_range = [4]\nprecision = \"double\"\n",
        dir.path(),
        &[],
    );
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precision floor"));
}

#[test]
fn unwritable_output_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("out"), "a file, not a directory").unwrap();
    let o = qmem(
        "experiment = \"duality-verify\"\nn_range = [3]\n",
        dir.path(),
        &[],
    );
    assert_eq!(code(&o), 3);
}
