use std::process::{Command, Output};

fn paucity(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paucity")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn count_reports_the_anchor_partition() {
    let out = paucity(&["count", "--curve", "moment:2", "--set", "range:4", "--s", "2", "--a", "0,-4", "--method", "partition"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], 4);
    assert_eq!(v["partition"], serde_json::json!([0, 0, 4]));
    let out = paucity(&["count", "--curve", "moment:2", "--set", "range:4", "--s", "2", "--a", "1,3"]);
    assert_eq!(json(&out)["count"], 12);
    assert_eq!(json(&out)["route"], "base2");
}

#[test]
fn curve_info_and_elim() {
    let v = json(&paucity(&["curve-info", "--curve", "moment:3"]));
    assert_eq!(v["total_degree"], 6);
    assert_eq!(v["p"], "7/4");
    assert_eq!(v["q"], "7/3");
    let v = json(&paucity(&["elim", "--curve", "monomials:2,3"]));
    assert_eq!(v["eliminant"], "1*T_1^3 + -1*T_2^2");
    let out = paucity(&["elim", "--curve", "moment:2", "--strategy", "nope"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn maxreps_csv() {
    let out = paucity(&["maxreps", "--curve", "moment:2", "--set", "range:10", "--s", "2", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.contains("maxnumreps,52\n"));
}

#[test]
fn refine_emits_a_certificate() {
    let out = paucity(&[
        "refine", "--curve", "moment:2", "--set", "range:5", "--e", "witness:curve", "--f", "witness:curve", "--s", "1",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["branch"], "small_alpha");
    assert_eq!(v["alpha"], "5/1");
}

#[test]
fn scans_write_files_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let status = paucity(&[
        "paucity-scan", "--curve", "moment:2", "--set", "range:12", "range:24", "--a-sampling", "realized", "--samples",
        "5", "--seed", "3", "--threads", "2", "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(status.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 11);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("scan.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["metadata"]["seed"], 3);
    let out = paucity(&["improving", "--curve", "moment:3", "--set", "range:8", "--format", "json"]);
    let v = json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
}

#[test]
fn exit_codes() {
    assert_eq!(paucity(&["suite", "identities"]).status.code(), Some(0));
    assert_eq!(paucity(&["suite", "nope"]).status.code(), Some(2));
    assert_eq!(paucity(&["count", "--curve", "moment:2", "--set", "range:4", "--s", "2", "--a", "1"]).status.code(), Some(2));
    assert_eq!(paucity(&["count", "--curve", "bogus", "--set", "range:4", "--s", "1", "--a", "1"]).status.code(), Some(2));
    let budget = paucity(&[
        "count", "--curve", "moment:2", "--set", "range:200", "--s", "3", "--a", "1,1", "--budget", "1000",
    ]);
    assert_eq!(budget.status.code(), Some(3));
    let budget = paucity(&["maxreps", "--curve", "moment:2", "--set", "range:50", "--s", "2", "--budget", "10"]);
    assert_eq!(budget.status.code(), Some(3));
    let scan = paucity(&["improving", "--curve", "moment:2", "--set", "range:8", "--p", "5/2"]);
    assert_eq!(scan.status.code(), Some(2));
}
