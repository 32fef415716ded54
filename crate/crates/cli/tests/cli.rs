use std::path::Path;
use std::process::{Command, Output};

fn qcondent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcondent")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn condent_on_bell_in_bits() {
    let out = qcondent(&["compute", "condent", "--state", "bell", "--bits"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["value"].as_f64().unwrap() + 1.0).abs() < 1e-12);
    assert_eq!(v["unit"], "bits");
}

#[test]
fn relent_of_orthogonal_pure_states_is_inf() {
    let out = qcondent(&["compute", "relent", "--state", "basis:dims=2,index=0", "--sigma", "basis:dims=2,index=1"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["value"], "inf");
}

#[test]
fn thermal_entropy() {
    let out = qcondent(&["compute", "entropy", "--state", "thermal:nbar=1,cutoff=40"]);
    assert!((json(&out)["value"].as_f64().unwrap() - 1.386294).abs() < 1e-6);
}

#[test]
fn cohinfo_and_mutinfo() {
    let out = qcondent(&["compute", "cohinfo", "--state", "thermal:nbar=0.5,cutoff=6", "--channel", "identity:d=6"]);
    let h = json(&qcondent(&["compute", "entropy", "--state", "thermal:nbar=0.5,cutoff=6"]))["value"].as_f64().unwrap();
    assert!((json(&out)["value"].as_f64().unwrap() - h).abs() < 1e-9);
    let out = qcondent(&["compute", "mutinfo", "--state", "bell", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("quantity,value,unit\nmutinfo,1.386294"), "{text}");
}

#[test]
fn errors_exit_with_two() {
    assert_eq!(qcondent(&["compute", "entropy", "--state", "nonsense:x=1"]).status.code(), Some(2));
    assert_eq!(qcondent(&["check", "--property", "duality", "--dims", "2,2"]).status.code(), Some(2));
    assert_eq!(qcondent(&["frobnicate"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"labels": ["A"], "dims": [2], "data": [[1.2, 0], [0, 0], [0, 0], [-0.2, 0]]}"#).unwrap();
    let out = qcondent(&["compute", "entropy", "--state", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("PositiveSemidefinite"));
    std::fs::write(&bad, "{\"labels\": [\"A\"],\n  \"dims\": [2] \"data\": []}").unwrap();
    let out = qcondent(&["compute", "entropy", "--state", bad.to_str().unwrap()]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json:2:"), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_is_reproducible_and_replayable() {
    let args = ["check", "--property", "bound,duality", "--trials", "40", "--seed", "9", "--no-timestamp"];
    let a = qcondent(&args);
    let b = qcondent(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    std::fs::write(&report, &a.stdout).unwrap();
    let replayed = qcondent(&["check", "--replay", report.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(replayed.status.code(), Some(0));
    assert_eq!(replayed.stdout, a.stdout);

    let with_time = json(&qcondent(&["check", "--property", "bound", "--trials", "5"]));
    assert!(with_time["timestamp"].is_u64());
}

#[test]
fn failing_property_exits_with_one_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("fail.json");
    let out = qcondent(&[
        "check", "--property", "continuity", "--trials", "12", "--no-timestamp", "--out", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let replayed = qcondent(&["check", "--replay", report.to_str().unwrap(), "--no-timestamp"]);
    assert_eq!(replayed.status.code(), Some(1));
    assert_eq!(replayed.stdout, std::fs::read(&report).unwrap());
}

#[test]
fn converge_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("tmsv");
    let out = qcondent(&[
        "converge", "--state", "tmsv:nbar=1,cutoff=30", "--ranks", "5..30", "--out", prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(Path::new(&format!("{}.csv", prefix.display()))).unwrap();
    assert_eq!(csv.lines().count(), 27);
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(format!("{}.json", prefix.display())).unwrap()).unwrap();
    let last = doc["rows"].as_array().unwrap().last().unwrap()["conditional_entropy"].as_f64().unwrap();
    assert!((last + 2.0 * std::f64::consts::LN_2).abs() < 1e-6);
    assert!((doc["reference"].as_f64().unwrap() + 2.0 * std::f64::consts::LN_2).abs() < 1e-12);
}

#[test]
fn converge_on_full_rank_state_reaches_direct_value() {
    let out = qcondent(&["converge", "--state", "random:dims=3x3,seed=4", "--format", "csv", "--schedule", "1:1,2:3,3:3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let last: f64 = text.lines().last().unwrap().split(',').nth(4).unwrap().parse().unwrap();
    let direct = json(&qcondent(&["compute", "condent", "--state", "random:dims=3x3,seed=4", "--target", "A", "--given", "B"]));
    assert!((last - direct["value"].as_f64().unwrap()).abs() < 1e-12);
}
