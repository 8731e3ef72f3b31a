//! End-to-end binary tests: exit-code contract, report echoing,
//! determinism, and the file exports.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use secrecy_regions::prob::sample::copy_satellite_joint;
use secrecy_regions::prob::{Alphabet, Factor, Joint, Var};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_secrecy-regions"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_joint(dir: &Path, name: &str, j: &Joint) -> PathBuf {
    let path = dir.join(name);
    secrecy_regions::prob::io::write_joint(&path, j).unwrap();
    path
}

/// Satellites forced identical given the cloud: their conditional mutual
/// information exceeds what the eavesdropper side can absorb, so the
/// pairing gate fails and the simplified region is empty.
fn gate_violating_joint() -> Joint {
    let bsc = |e: f64, a: usize, b: usize| if a == b { 1.0 - e } else { e };
    let mut pair = Vec::with_capacity(8);
    for v in 0..2 {
        for v1 in 0..2 {
            for v2 in 0..2 {
                pair.push(if v1 == v2 { bsc(0.3, v, v1) } else { 0.0 });
            }
        }
    }
    let factors = vec![
        Factor::new(vec![Var::U], vec![], vec![2], vec![], vec![0.5, 0.5]),
        Factor::new(vec![Var::V], vec![Var::U], vec![2], vec![2], vec![0.9, 0.1, 0.1, 0.9]),
        Factor::new(vec![Var::V1, Var::V2], vec![Var::V], vec![2, 2], vec![2], pair),
        Factor::new(vec![Var::X], vec![Var::V1, Var::V2], vec![2], vec![2, 2], {
            let mut t = vec![0.0; 8];
            for v1 in 0..2 {
                for v2 in 0..2 {
                    t[(v1 * 2 + v2) * 2 + v1] = 1.0;
                }
            }
            t
        }),
        Factor::new(vec![Var::Y1, Var::Y2, Var::Z], vec![Var::X], vec![2, 2, 2], vec![2], {
            let mut t = Vec::with_capacity(16);
            for x in 0..2 {
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        for z in 0..2 {
                            t.push(bsc(0.05, x, y1) * bsc(0.05, x, y2) * bsc(0.45, x, z));
                        }
                    }
                }
            }
            t
        }),
    ];
    Joint::build(vec![Alphabet::atomic(2); 8], factors).unwrap()
}

#[test]
fn derive_then_equiv_round_trips_a_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let derived = dir.path().join("derived.json");

    let out = run(&["derive", "--system", "scheme-simplified2", "--out", derived.to_str().unwrap()]);
    assert!(out.status.success(), "derive failed: {}", String::from_utf8_lossy(&out.stderr));
    let payload = stdout_json(&out);
    assert_eq!(payload["command"], "derive");
    assert_eq!(payload["config"]["system"], "preset:scheme-simplified2");
    assert_eq!(payload["certificates_verified"], true);
    assert!(!payload["certificates"].as_array().unwrap().is_empty());
    // The file mirrors stdout byte-for-byte.
    let file: Value = serde_json::from_str(&std::fs::read_to_string(&derived).unwrap()).unwrap();
    assert_eq!(file, payload);

    let out = run(&[
        "equiv",
        "--first",
        derived.to_str().unwrap(),
        "--second",
        "region-simplified2",
        "--samples",
        "4",
        "--ternary",
        "1",
    ]);
    assert!(out.status.success(), "equiv failed: {}", String::from_utf8_lossy(&out.stderr));
    let payload = stdout_json(&out);
    assert_eq!(payload["report"]["verdict"], "Pass");
    assert_eq!(payload["report"]["disagreements"], 0);
}

#[test]
fn equiv_distinguishes_nested_regions() {
    let out = run(&[
        "equiv",
        "--first",
        "region-simplified2",
        "--second",
        "region-original",
        "--samples",
        "3",
        "--ternary",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let payload = stdout_json(&out);
    assert_eq!(payload["report"]["verdict"], "Fail");
    assert!(payload["report"]["example"].is_object());
}

#[test]
fn equiv_with_no_sampling_budget_is_inconclusive() {
    let out = run(&[
        "equiv",
        "--first",
        "region-original",
        "--second",
        "region-original",
        "--samples",
        "2",
        "--ternary",
        "0",
        "--retries",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stdout_json(&out)["report"]["verdict"], "Inconclusive");
}

#[test]
fn fm_cap_override_aborts_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("SECRECY_REGIONS_FM_CAP", "2")
        .args([
            "derive",
            "--system",
            "scheme-original",
            "--out",
            dir.path().join("x.json").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("cap"), "missing diagnostic: {err}");
}

#[test]
fn region_csv_and_svg_exports() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write_joint(dir.path(), "j.json", &copy_satellite_joint(0.2, 0.0, 0.0, 0.45));

    let csv_path = dir.path().join("region.csv");
    let out = run(&[
        "region",
        "--system",
        "region-simplified2",
        "--dist",
        dist.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let payload = stdout_json(&out);
    assert_eq!(payload["region"]["empty"], false);
    assert_eq!(payload["region"]["gates"].as_array().unwrap().len(), 5);
    for key in ["a", "b", "c", "d", "e"] {
        assert!(payload["region"]["special"][key].is_number());
    }
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.contains("# region,region-simplified2"));
    assert!(csv.contains("# rmax,"));
    assert!(csv.lines().any(|l| !l.starts_with('#') && l.contains(',')));

    let svg_path = dir.path().join("region.svg");
    let out = run(&[
        "region",
        "--system",
        "region-simplified2",
        "--dist",
        dist.to_str().unwrap(),
        "--out",
        svg_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(&svg_path).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<polygon"));
    assert!(svg.contains("rmax="));
}

#[test]
fn empty_region_is_exported_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write_joint(dir.path(), "gated.json", &gate_violating_joint());
    let csv_path = dir.path().join("empty.csv");
    let out = run(&[
        "region",
        "--system",
        "region-simplified2",
        "--dist",
        dist.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    // Exporting an empty region is still a successful export.
    assert!(out.status.success());
    let payload = stdout_json(&out);
    assert_eq!(payload["region"]["empty"], true);
    assert_eq!(payload["region"]["gated_out"], true);
    assert!(payload["warning"].as_str().unwrap().contains("empty"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.contains("# warning,empty region"));
    assert!(csv.ends_with("r1,r2\n"), "no vertex rows expected: {csv}");
}

#[test]
fn cases_reports_classification_and_floor_order() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write_joint(dir.path(), "j.json", &copy_satellite_joint(0.2, 0.0, 0.0, 0.45));
    let out = run(&[
        "cases",
        "--dist",
        dist.to_str().unwrap(),
        "--count",
        "3",
        "--seed",
        "11",
    ]);
    assert!(out.status.success());
    let payload = stdout_json(&out);
    let cases = payload["cases"].as_array().unwrap();
    assert_eq!(cases.len(), 4);
    assert_eq!(payload["all_floor_ok"], true);
    let total: u64 = payload["histogram"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(total, 4, "classification must be total");
}

#[test]
fn recover_and_mix_succeed_on_an_admissible_joint() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write_joint(dir.path(), "j.json", &copy_satellite_joint(0.2, 0.0, 0.0, 0.45));

    let out = run(&["recover", "--dist", dist.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let payload = stdout_json(&out);
    assert_eq!(payload["ok"], true);
    assert_eq!(payload["reports"].as_array().unwrap().len(), 2);

    let out = run(&["mix", "--dist", dist.to_str().unwrap(), "--gammas", "0.5,0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let payload = stdout_json(&out);
    assert_eq!(payload["achieved_all"], true);
    assert!(payload["max_linearity_dev"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn pad_only_simulation_reports_zero_leakage() {
    let dir = tempfile::tempdir().unwrap();
    let dist = write_joint(dir.path(), "j.json", &copy_satellite_joint(0.25, 0.0, 0.0, 0.1));
    let out = run(&[
        "simulate",
        "--channel",
        dist.to_str().unwrap(),
        "--variant",
        "original",
        "--n",
        "4",
        "--sizes",
        "na=2",
        "--codebooks",
        "3",
        "--trials",
        "20",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let payload = stdout_json(&out);
    for side in 0..2 {
        let leak = &payload["report"]["leakage"][side];
        assert_eq!(leak["max"].as_f64().unwrap(), 0.0, "pad-only leakage must vanish");
    }
    // The echoed scheme config resolves every layer size.
    assert_eq!(payload["config"]["scheme"]["sizes"]["na"], 2);
    assert_eq!(payload["config"]["scheme"]["n"], 4);
}

#[test]
fn reports_are_reproducible_from_their_echoed_config() {
    let args = [
        "equiv",
        "--first",
        "region-original",
        "--second",
        "region-original",
        "--samples",
        "3",
        "--ternary",
        "1",
        "--seed",
        "99",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "same config must reproduce bit-exactly");
}

#[test]
fn suite_subset_runs_and_rejects_unknown_checks() {
    let out = run(&["suite", "--shrink", "50", "--check", "geometry-oracle"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let payload = stdout_json(&out);
    assert_eq!(payload["verdict"], "Pass");
    assert_eq!(payload["checks"][0]["name"], "geometry-oracle");
    assert_eq!(payload["config"]["shrink"], 50);

    let out = run(&["suite", "--check", "no-such-check"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("valid names"));
}

#[test]
fn usage_and_input_errors_exit_three() {
    let out = run(&["equiv", "--first", "region-original"]);
    assert_eq!(out.status.code(), Some(3), "missing required flag");

    let out = run(&["derive", "--system", "no-such-preset", "--out", "/tmp/nope.json"]);
    assert_eq!(out.status.code(), Some(3), "unknown system spec");

    let out = run(&["recover", "--dist", "/definitely/not/here.json"]);
    assert_eq!(out.status.code(), Some(3), "missing file");

    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0), "help is not an error");
}
