//! End-to-end runs of the `safefault` binary against the shipped demo data.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_safefault"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("safefault-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

#[test]
fn classify_produces_report_and_verdicts() {
    let report = tmp("classify_report.csv");
    let verdicts = tmp("classify.vd");
    let out = run(&[
        "classify",
        "--netlist", data("mcu.bench").to_str().unwrap(),
        "--constraints", data("mcu.cons").to_str().unwrap(),
        "--units", data("units.txt").to_str().unwrap(),
        "--out", report.to_str().unwrap(),
        "--verdicts", verdicts.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(&report).unwrap();
    assert!(csv.starts_with("unit,faults,"));
    assert!(csv.lines().count() > 5);
    let records = safefault::report::parse_verdict_file(&fs::read_to_string(&verdicts).unwrap()).unwrap();
    assert_eq!(records.len(), 200);
}

#[test]
fn grade_then_report_round_trips() {
    let detected = tmp("grade_detected.txt");
    let out = run(&[
        "grade",
        "--netlist", data("mcu.bench").to_str().unwrap(),
        "--patterns", data("mcu.pat").to_str().unwrap(),
        "--constraints", data("mcu.cons").to_str().unwrap(),
        "--out", detected.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("violates the constraints"));

    let verdicts = tmp("grade_chain.vd");
    let out = run(&[
        "classify",
        "--netlist", data("mcu.bench").to_str().unwrap(),
        "--constraints", data("mcu.cons").to_str().unwrap(),
        "--out", tmp("grade_chain_report.csv").to_str().unwrap(),
        "--verdicts", verdicts.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let table = tmp("grade_chain_table.csv");
    let out = run(&[
        "report",
        "--verdicts", verdicts.to_str().unwrap(),
        "--detected", detected.to_str().unwrap(),
        "--units", data("units.txt").to_str().unwrap(),
        "--out", table.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(&table).unwrap();
    let total = csv.lines().last().unwrap();
    assert!(total.starts_with("total,200,"));
}

#[test]
fn report_reproduces_published_counts() {
    let table = tmp("counts_table.csv");
    let out = run(&[
        "report",
        "--faults", data("cpu_counts.csv").to_str().unwrap(),
        "--out", table.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let csv = fs::read_to_string(&table).unwrap();
    let cpu = csv.lines().find(|l| l.starts_with("CPU,")).unwrap();
    assert!(cpu.ends_with(",5434,4.72,96696,83.98,88.14"), "{cpu}");
}

#[test]
fn oracle_runs_on_the_demo() {
    let verdicts = tmp("oracle.vd");
    let out = run(&[
        "oracle",
        "--netlist", data("mcu.bench").to_str().unwrap(),
        "--constraints", data("mcu.cons").to_str().unwrap(),
        "--out", verdicts.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let records = safefault::report::parse_verdict_file(&fs::read_to_string(&verdicts).unwrap()).unwrap();
    assert_eq!(records.len(), 200);
}

#[test]
fn missing_input_exits_one() {
    let out = run(&[
        "classify",
        "--netlist", "/nonexistent.bench",
        "--constraints", data("mcu.cons").to_str().unwrap(),
        "--out", tmp("never.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_netlist_exits_one() {
    let bad = tmp("bad.bench");
    fs::write(&bad, "OUTPUT(c)\nc = AND(a,b)\n").unwrap();
    let out = run(&[
        "classify",
        "--netlist", bad.to_str().unwrap(),
        "--constraints", data("mcu.cons").to_str().unwrap(),
        "--out", tmp("never2.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_of(&out).contains("undriven net"));
}

#[test]
fn detected_safe_fault_exits_two() {
    let vd = tmp("inconsistent.vd");
    fs::write(&vd, "gate:c:out/0 S reset_logic\ngate:c:out/1 T 11\n").unwrap();
    let detected = tmp("inconsistent_detected.txt");
    fs::write(&detected, "gate:c:out/0\n").unwrap();
    let out = run(&[
        "report",
        "--verdicts", vd.to_str().unwrap(),
        "--detected", detected.to_str().unwrap(),
        "--out", tmp("never3.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("inconsistency"));
}

#[test]
fn unknown_format_exits_one() {
    let out = run(&[
        "report",
        "--faults", data("cpu_counts.csv").to_str().unwrap(),
        "--out", tmp("never4.csv").to_str().unwrap(),
        "--format", "yaml",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
