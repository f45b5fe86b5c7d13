use std::process::{Command, Output};

use gbs_locc::census::CensusSummary;
use gbs_locc::cli::CheckOutput;
use gbs_locc::clifford::{verify_clifford, CliffordUnitary, UnitaryJson};
use gbs_locc::criterion::Status;
use gbs_locc::oracle::{verify_ghosh, OracleReportJson, OracleStatus};
use gbs_locc::protocol::ProtocolReport;
use gbs_locc::weyl::GbsSet;

const LATTICE: &str = r#"{"d":4,"states":[[0,0],[0,2],[2,0],[2,2]]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbs-locc")).args(args).output().unwrap()
}

fn ok_json<T: serde::de::DeserializeOwned>(args: &[&str]) -> T {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn check_lattice_set() {
    let plain: CheckOutput = ok_json(&["check", LATTICE]);
    assert_eq!(plain.verdict.status, Status::Unknown);
    assert!(plain.verdict.detail.contains("sufficiency only"));
    assert!(plain.oracle.is_none());

    let with_oracle: CheckOutput = ok_json(&["check", LATTICE, "--oracle", "--seed", "1"]);
    assert_eq!(with_oracle.verdict.status, Status::Unknown);
    let report = with_oracle.oracle.unwrap();
    assert_eq!(report.status, OracleStatus::CertifiedOneWay);
    assert!(verify_ghosh(&with_oracle.set, &report.phi().unwrap()).unwrap().ok);
}

#[test]
fn check_prime_sets() {
    let out: CheckOutput = ok_json(&["check", r#"{"d":5,"states":[[0,0],[0,1],[0,2],[0,3],[0,4]]}"#]);
    assert_eq!(out.verdict.status, Status::Distinguishable);
    assert_eq!(out.verdict.witness.map(|w| [w.alpha, w.beta]), Some([0, 1]));

    let out: CheckOutput = ok_json(&["check", r#"{"d":5,"states":[[0,0],[0,1],[0,2],[1,0],[1,2]]}"#]);
    assert_eq!(out.verdict.status, Status::Indistinguishable);
}

#[test]
fn check_reads_files_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("set.json");
    std::fs::write(&path, LATTICE).unwrap();
    let out: CheckOutput = ok_json(&["check", path.to_str().unwrap()]);
    // the emitted set is itself valid input
    let again: CheckOutput = ok_json(&["check", &serde_json::to_string(&out.set).unwrap()]);
    assert_eq!(again, out);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), LATTICE);
}

#[test]
fn unitary_round_trip() {
    let out = run(&["unitary", "--d", "3", "--sp", "0,2,1,0"]);
    assert_eq!(out.status.code(), Some(0));
    let json: UnitaryJson = serde_json::from_slice(&out.stdout).unwrap();
    let u = CliffordUnitary::try_from(json).unwrap();
    assert!(verify_clifford(&u).ok);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.json");
    std::fs::write(&path, &out.stdout).unwrap();
    let check: serde_json::Value = ok_json(&["verify", path.to_str().unwrap()]);
    assert_eq!(check["ok"], true);
}

#[test]
fn protocol_and_phi_search() {
    let report: ProtocolReport =
        ok_json(&["protocol", r#"{"d":4,"states":[[0,0],[1,1],[2,3],[3,2]]}"#, "--trials", "100000", "--seed", "3"]);
    assert_eq!(report.success_rate, 1.0);

    let search: OracleReportJson = ok_json(&["phi-search", LATTICE, "--seed", "5"]);
    assert_eq!(search.status, OracleStatus::CertifiedOneWay);
    let set = GbsSet::from_json(LATTICE).unwrap();
    assert!(verify_ghosh(&set, &search.phi().unwrap()).unwrap().ok);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.json");
    std::fs::write(&path, serde_json::to_string(&search).unwrap()).unwrap();
    let check: serde_json::Value = ok_json(&["verify", path.to_str().unwrap(), "--set", LATTICE]);
    assert_eq!(check["ok"], true);
}

#[test]
fn census_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d3.jsonl");
    let summary: CensusSummary =
        ok_json(&["census", "--d", "3", "--l", "3", "--mode", "exhaustive", "--out", out.to_str().unwrap()]);
    assert_eq!((summary.total, summary.f_equivalent), (84, 84));

    let out = dir.path().join("d2.jsonl");
    let summary: CensusSummary =
        ok_json(&["census", "--d", "2", "--l", "2", "--mode", "exhaustive", "--out", out.to_str().unwrap()]);
    assert_eq!(summary.total, 6);
    assert_eq!(summary.verdicts.get("Distinguishable"), Some(&6));

    let out = dir.path().join("d6.jsonl");
    let args = ["census", "--d", "6", "--l", "6", "--mode", "sample", "--count", "40", "--seed", "1"];
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out", out.to_str().unwrap(), "--checkpoint-every", "10", "--stop-after", "10"]);
    let first = run(&full);
    assert_eq!(first.status.code(), Some(0));
    assert!(first.stdout.is_empty());
    full.truncate(full.len() - 2);
    let summary: CensusSummary = ok_json(&full);
    assert_eq!(summary.total, 40);
    assert_eq!(summary.oracle_only_certified, 0);
    assert!(summary.oracle.is_some());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["check", "{not json"]).status.code(), Some(2));
    assert_eq!(run(&["check", r#"{"d":1,"states":[[0,0]]}"#]).status.code(), Some(2));
    assert_eq!(run(&["check", "/nonexistent/set.json"]).status.code(), Some(2));
    assert_eq!(run(&["check", LATTICE, "--oracle"]).status.code(), Some(2));
    assert_eq!(run(&["unitary", "--d", "3", "--sp", "1,1,1,1"]).status.code(), Some(2));
    assert_eq!(run(&["unitary", "--d", "3", "--sp", "1,1"]).status.code(), Some(2));
    assert_eq!(run(&["protocol", r#"{"d":2,"states":[[0,0],[0,1]]}"#, "--seed", "1"]).status.code(), Some(2));
    assert_eq!(run(&["protocol", LATTICE]).status.code(), Some(2));
    assert_eq!(run(&["census", "--d", "3", "--l", "3", "--mode", "sample"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
