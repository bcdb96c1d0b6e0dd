use std::process::{Command, Output};

fn rabi2p(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi2p"))
        .args(args)
        .env_remove("RABI2P_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn chen_scan_has_stable_header_and_pole_sign_flips() {
    let o = rabi2p(&["scan", "--e-min", "-1", "--e-max", "6", "--points", "701"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("energy,value,flags"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 3);
            (f[0].parse().unwrap(), f[1].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 701);
    for pole in [-0.5, 2.5, 5.5] {
        let below = rows.iter().rev().find(|r| r.0 < pole - 1e-9).unwrap();
        let above = rows.iter().find(|r| r.0 > pole + 1e-9).unwrap();
        assert!(below.1.signum() != above.1.signum(), "no flip at {pole}");
    }
}

#[test]
fn floats_use_seventeen_significant_digits() {
    let o = rabi2p(&[
        "scan",
        "--backend",
        "zhang",
        "--points",
        "2",
        "--e-min",
        "0.1",
        "--e-max",
        "0.2",
    ]);
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    let energy = row.split(',').next().unwrap();
    assert_eq!(energy, "1.0000000000000001e-1");
}

#[test]
fn travenec_scan_adds_imaginary_column() {
    let o = rabi2p(&["scan", "--backend", "travenec", "--points", "3"]);
    assert!(o.status.success());
    assert_eq!(
        stdout(&o).lines().next(),
        Some("energy,value,value_im,flags")
    );
}

#[test]
fn json_carries_schema_version_and_named_flags() {
    let o = rabi2p(&["scan", "--points", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let flags = &v["data"]["samples"][0]["flags"];
    for name in ["near_pole", "overflow", "not_converged", "huge"] {
        assert!(flags[name].is_boolean(), "{name}");
    }
}

#[test]
fn invalid_configurations_exit_with_status_two() {
    for args in [
        &["scan", "--omega", "1.5"][..],
        &["scan", "--delta", "0"][..],
        &["scan", "--sector", "mp"][..],
        &["spectrum", "--backend", "travenec"][..],
        &["collapse", "--omegas", "2.5,1.9"][..],
    ] {
        let o = rabi2p(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&o.stderr).starts_with("error:"),
            "{args:?}"
        );
    }
}

#[test]
fn thread_variable_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_rabi2p"))
        .args(["oracle", "--levels", "2"])
        .env("RABI2P_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_rabi2p"))
        .args(["oracle", "--levels", "2"])
        .env("RABI2P_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn output_file_matches_stdout_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("oracle.csv");
    let p = path.to_str().unwrap();
    let args = ["oracle", "--levels", "4", "--delta", "1.1", "-o", p];
    assert!(rabi2p(&args).status.success());
    let first = std::fs::read(&path).unwrap();
    assert!(rabi2p(&args).status.success());
    assert_eq!(first, std::fs::read(&path).unwrap());
    let direct = rabi2p(&["oracle", "--levels", "4", "--delta", "1.1"]);
    assert_eq!(first, direct.stdout);
    assert_eq!(String::from_utf8(first).unwrap().lines().count(), 1 + 4 * 4);
}

#[test]
fn spectrum_marks_lifted_pole() {
    let o = rabi2p(&["spectrum", "--delta", "1", "--e-max", "6"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text
        .lines()
        .any(|l| l.starts_with("2.5000000000000000e0,") && l.contains("exceptional")));
}
