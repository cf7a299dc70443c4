//! The `noisyodds` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

use noisyodds::cli::{exit_code, EXIT_FINDINGS, EXIT_INVALID, EXIT_NO_ROOT};
use noisyodds::manifest::RunManifest;
use noisyodds::Error;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_noisyodds"))
        .args(args)
        .env_remove("NOISYODDS_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn every_subcommand_has_help() {
    for cmd in [
        "fair-odds",
        "w1star",
        "margin",
        "posterior",
        "simulate",
        "figures",
        "verify",
    ] {
        let o = run(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}");
        assert!(stdout(&o).contains("Usage"), "{cmd}");
    }
    let o = run(&["--help"]);
    assert!(stdout(&o).contains("--abs-tol") && stdout(&o).contains("--se-mult"));
}

#[test]
fn fair_odds_are_antisymmetric() {
    let a = json(&run(&["--json", "fair-odds", "--pc", "0.3", "--eps", "0.5"]));
    let b = json(&run(&["--json", "fair-odds", "--pc", "0.7", "--eps", "0.5"]));
    let (ma, mb) = (a["m"].as_f64().unwrap(), b["m"].as_f64().unwrap());
    assert!(ma > 0.0);
    assert!((ma + mb).abs() < 1e-12);
    let d = json(&run(&[
        "--json",
        "fair-odds",
        "--pc",
        "0.3",
        "--eps",
        "1",
        "--variant",
        "definetti",
    ]));
    assert!(d["m"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_input_exits_2() {
    for args in [
        &["fair-odds", "--pc", "1.5", "--eps", "0.5"][..],
        &["fair-odds", "--pc", "0.3", "--eps", "-0.1"],
        &["w1star", "--pt", "0", "--eps", "0.5"],
        &["simulate", "--eps", "0.5", "--trials", "0"],
        &["figures", "--id", "5"],
        &["margin", "--pt", "0.3", "--eps", "0.5", "--bogus"],
        &["nonsense"],
    ] {
        let o = run(args);
        assert_eq!(
            o.status.code(),
            Some(EXIT_INVALID),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
}

#[test]
fn solver_failures_map_to_exit_3() {
    let e = Error::NoRoot {
        lo: 0.0,
        hi: 1.0,
        f_lo: -1.0,
        f_hi: -0.5,
    };
    assert_eq!(exit_code(&e), EXIT_NO_ROOT);
}

#[test]
fn simulation_is_reproducible_from_the_seed() {
    let args = ["--json", "simulate", "--eps", "0.5", "--trials", "20000", "--seed", "7"];
    let a = stdout(&run(&args));
    assert_eq!(a, stdout(&run(&args)));
    let via_env = Command::new(env!("CARGO_BIN_EXE_noisyodds"))
        .args(["--json", "simulate", "--eps", "0.5", "--trials", "20000"])
        .env("NOISYODDS_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(a, stdout(&via_env));
    assert_ne!(
        a,
        stdout(&run(&[
            "--json", "simulate", "--eps", "0.5", "--trials", "20000", "--seed", "8"
        ]))
    );
}

#[test]
fn ledger_csv_comes_with_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ledger.csv");
    let o = run(&[
        "simulate",
        "--eps",
        "0.5",
        "--trials",
        "500",
        "--seed",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    assert_eq!(rdr.records().count(), 500);
    let m = RunManifest::read(&RunManifest::sidecar_path(&out)).unwrap();
    assert_eq!(m.command, "simulate");
    assert_eq!(m.seed, Some(3));
}

#[test]
fn figures_write_csv_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "figures",
        "--id",
        "all",
        "--points",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csvs: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    assert!(csvs.len() >= 8);
    for p in &csvs {
        assert!(Path::new(&RunManifest::sidecar_path(p)).exists(), "{p:?}");
    }
}

#[test]
fn verify_passes_clean_and_catches_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("findings.csv");
    let out = out.to_str().unwrap();
    let base = [
        "verify",
        "--pc",
        "0.2,0.5,0.8",
        "--eps",
        "0.5,1",
        "--mc-trials",
        "0",
        "--out",
        out,
    ];
    assert_eq!(run(&base).status.code(), Some(0));
    let mut tampered = base.to_vec();
    tampered.extend(["--tamper", "basic:iii"]);
    assert_eq!(run(&tampered).status.code(), Some(EXIT_FINDINGS));
}

#[test]
fn tolerance_flags_are_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = run(&[
        "--abs-tol",
        "1e-30",
        "verify",
        "--pc",
        "0.3",
        "--eps",
        "0.5",
        "--mc-trials",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(EXIT_FINDINGS));
}
