//! Binary-level behavior: exit codes, CSV shape, determinism, file output.

use std::process::{Command, Output};

fn noma_mec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noma-mec"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn identity_check_passes() {
    let out = noma_mec(&["identity-check"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"), "{text}");
}

#[test]
fn invalid_parameters_exit_with_config_error() {
    let out = noma_mec(&[
        "sweep",
        "--mode",
        "uplink-energy",
        "--m",
        "1",
        "--n",
        "2",
        "--rho-m-db",
        "10",
        "--beta",
        "0.7",
        "--sweep",
        "rho-n-db:10:20:5",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("beta"));

    let out = noma_mec(&[
        "sweep",
        "--mode",
        "uplink-latency",
        "--m",
        "3",
        "--n",
        "2",
        "--eta",
        "2",
        "--sweep",
        "rho-m-db:0:10:5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = noma_mec(&["sweep", "--mode", "uplink-latency", "--sweep", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));

    let out = noma_mec(&[
        "sweep",
        "--mode",
        "uplink-latency",
        "--eta",
        "2",
        "--sweep",
        "rho-m-db:0:10:5",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweeps_are_byte_deterministic() {
    let args = [
        "sweep",
        "--mode",
        "uplink-latency",
        "--m",
        "2",
        "--n",
        "4",
        "--rho-m-db",
        "10",
        "--sweep",
        "rho-n-db:10:30:10",
        "--mc-trials",
        "100000",
        "--seed",
        "42",
    ];
    let first = noma_mec(&args);
    let second = noma_mec(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn csv_has_the_documented_schema() {
    let out = noma_mec(&[
        "sweep",
        "--mode",
        "downlink-energy",
        "--m",
        "1",
        "--n",
        "2",
        "--beta-tilde",
        "0.2",
        "--sweep",
        "rho-db:10:20:5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(
        header,
        "param_population,param_m,param_n,param_rho_db,param_beta_tilde,param_bits,param_slot,analytic,asymptotic,mc_value,mc_stderr,mc_trials"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    for row in rows {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 12);
        // Analytic column filled, Monte Carlo columns empty without trials.
        assert!(!cells[7].is_empty());
        assert!(cells[9].is_empty() && cells[10].is_empty() && cells[11].is_empty());
    }
}

#[test]
fn sweep_writes_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = noma_mec(&[
        "sweep",
        "--mode",
        "uplink-latency",
        "--m",
        "1",
        "--n",
        "2",
        "--eta",
        "2",
        "--sweep",
        "rho-m-db:0:10:5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn validate_single_criterion_passes() {
    let out = noma_mec(&["validate", "--only", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("criterion 01"), "{text}");
    assert!(text.contains("PASS"), "{text}");

    let out = noma_mec(&["validate", "--only", "99"]);
    assert_eq!(out.status.code(), Some(2));
}
