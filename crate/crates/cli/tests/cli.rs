use std::path::{Path, PathBuf};
use std::process::Command;

use clap::Parser;
use fracdim::dims::{box_counts, BoxCount};
use fracdim::{CantorSpec, IndexedSystem, IntervalSet, Scalar};
use fracdim_cli::input::{OpenSets, SetSpec};
use fracdim_cli::{emit_loglog_table, execute, exit_code, InvariantViolation, LogLogTable, RunConfig};
use serde_json::Value;

fn specs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs")
}

fn spec(name: &str) -> String {
    specs().join(name).display().to_string()
}

fn bin(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_fracdim")).args(args).output().unwrap()
}

fn read(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn cantor_report_has_the_box_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let o = out.display().to_string();
    let status = bin(&["cantor", "--spec", &spec("prop37.json"), "--depth", "12", "--report", &o]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let r = read(&out);
    assert_eq!(r["s_n"].as_array().unwrap().len(), 1024);
    let tail = r["tail_max"].as_f64().unwrap();
    assert!((tail - 0.6 * 2f64.ln() / 3f64.ln()).abs() < 0.002, "{tail}");
    assert_eq!(r["pieces"], 4096);
}

#[test]
fn middle_third_open_set_passes() {
    let o = bin(&["verify", "--system", &spec("cantor-third.json"), "--open-set", &spec("unit.json")]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["certificate"]["passed"], true);
    let s = r["moran"]["exponent"].as_f64().unwrap();
    assert!((s - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
}

#[test]
fn failed_certificate_is_a_validation_error() {
    let o = bin(&["verify", "--system", &spec("cantor-third.json"), "--epsilon0", "3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dyadic_sequence_grows() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("e.json");
    let csv = dir.path().join("e.csv");
    let o = bin(&[
        "equihom",
        "--set",
        &spec("prop38.json"),
        "--delta",
        "1/4",
        "--rho-grid",
        "2^-4..2^-12",
        "--report",
        &report.display().to_string(),
        "--csv",
        &csv.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r = read(&report);
    assert_eq!(r["verdict"], "growing");
    for row in r["rows"].as_array().unwrap() {
        let rho: Scalar = row["rho"].as_str().unwrap().parse().unwrap();
        assert!(row["ratio"].as_f64().unwrap() >= -rho.ln() / 2f64.ln() - 2.0);
    }
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("delta,rho,sup_count,inf_count,ratio\n"));
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn bad_inputs_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind":"intervals","intervals":[["1","0"]]}"#).unwrap();
    let b = bad.display().to_string();
    assert_eq!(bin(&["dims", "--set", &b, "--grid", "2^-1..2^-5"]).status.code(), Some(1));
    assert_eq!(bin(&["dims", "--set", &spec("prop38.json"), "--grid", "2^-1..x"]).status.code(), Some(1));
    let deep = bin(&["cantor", "--spec", &spec("prop37.json"), "--depth", "25"]);
    assert_eq!(deep.status.code(), Some(1));
    let o = bin(&["assouad", "--set", &spec("prop38.json"), "--delta", "1/4", "--ratios", "1/2,1/4", "--at", "1/3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn invariant_violations_map_to_two() {
    let e: anyhow::Error = InvariantViolation("sandwich".into()).into();
    assert_eq!(exit_code(&e), 2);
    assert_eq!(exit_code(&anyhow::anyhow!("parse")), 1);
}

#[test]
fn sandwich_checks_pass_on_shipped_sets() {
    let o = bin(&["verify", "--set", &spec("f1.json"), "--grid", "2^-3..2^-8", "--samples", "20", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    let checks = r["sandwich"].as_array().unwrap();
    assert_eq!(checks.len(), 26);
    assert!(checks.iter().all(|c| c["holds"] == true));
}

#[test]
fn middle_third_dimensions() {
    let args = [
        "fracdim",
        "dims",
        "--set",
        &spec("middle-third-set.json"),
        "--grid",
        "3^-2..3^-9",
        "--deltas",
        "1/9",
        "--ratios",
        "3^-2..3^-6",
        "--dim",
        "0.6309297535714574",
    ];
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("d.json");
    let mut args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    args.extend(["--report".into(), report.display().to_string()]);
    execute(&RunConfig::try_parse_from(&args).unwrap()).unwrap();
    let r = read(&report);
    let d = &r["dimensions"];
    for key in ["lower_box", "upper_box", "assouad", "lower_assouad"] {
        assert!((d[key].as_f64().unwrap() - 0.6309).abs() < 0.03, "{key}: {d}");
    }
    assert_eq!(r["chain_holds"], true);
}

#[test]
fn single_point_slope_at_zero() {
    let o = bin(&["assouad", "--set", &spec("prop38.json"), "--delta", "1/4", "--ratios", "2^-2..2^-10", "--at", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r["single_point"]["dimension"].as_f64().unwrap() < 0.6);
    assert!(r["assouad"].is_null());
}

#[test]
fn ifs_run_writes_a_reusable_set() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("k.json");
    let s = set.display().to_string();
    let o = bin(&["ifs-run", "--system", &spec("alternating.json"), "--depth", "6", "--set-out", &s]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["pullback"]["decay"].as_array().unwrap().len(), 6);
    let back: SetSpec = serde_json::from_str(&std::fs::read_to_string(&set).unwrap()).unwrap();
    assert_eq!(back.build().unwrap(), IntervalSet::unit().into());
}

#[test]
fn shipped_specs_round_trip() {
    fn again<T: serde::Serialize + serde::de::DeserializeOwned + PartialEq + std::fmt::Debug>(path: &Path) {
        let text = std::fs::read_to_string(path).unwrap();
        let first: T = serde_json::from_str(&text).unwrap();
        let second: T = serde_json::from_str(&serde_json::to_string(&first).unwrap()).unwrap();
        assert_eq!(first, second, "{}", path.display());
    }
    let mut seen = 0;
    for entry in std::fs::read_dir(specs()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        match name.as_str() {
            "prop37.json" => again::<CantorSpec>(&path),
            "unit.json" => again::<OpenSets>(&path),
            "cantor-third.json" | "two-map.json" | "hippo.json" | "alternating.json" => {
                again::<IndexedSystem>(&path)
            }
            _ => {
                again::<SetSpec>(&path);
                let spec: SetSpec = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
                spec.build().unwrap();
            }
        }
        seen += 1;
    }
    assert_eq!(seen, 9);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_fracdim"))
            .env("FRACDIM_THREADS", threads)
            .args(["equihom", "--set", &spec("middle-third-set.json"), "--delta", "1/9", "--ratios", "3^-1..3^-3"])
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("0").status.code(), Some(1));
}

#[test]
fn tables() {
    let dir = tempfile::tempdir().unwrap();
    let scales: Vec<Scalar> = (1..=4).map(|j| Scalar::new(1, 2).pow(j)).collect();
    let counts = box_counts(&IntervalSet::unit(), &scales).unwrap();
    let path = dir.path().join("box.csv");
    emit_loglog_table(LogLogTable::Counts(&counts), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "delta,count,log10_inv_delta,log10_count");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1/2,1,"));
    assert!(text.ends_with('\n'));

    let empty: Vec<BoxCount> = Vec::new();
    let missing = dir.path().join("none.csv");
    assert!(emit_loglog_table(LogLogTable::Counts(&empty), &missing).is_err());
    assert!(!missing.exists());

    let pairs = vec![(Scalar::new(1, 2), Scalar::new(1, 8))];
    let profile = fracdim::dims::local_cover_profile(&IntervalSet::unit(), &pairs, None).unwrap();
    let path = dir.path().join("profile.csv");
    emit_loglog_table(LogLogTable::Profile(&profile.rows), &path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next(), Some("delta,rho,sup_count,inf_count,ratio"));
}
