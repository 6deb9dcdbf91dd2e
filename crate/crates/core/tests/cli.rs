//! End-to-end runs of the `subdesign` binary.

use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn subdesign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_subdesign"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn construct_secant_design() {
    let out = subdesign(&[
        "construct",
        "--family=secant",
        "--r=2",
        "--s=2",
        "--field=5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["omega"], 2);
    let keys: Vec<&String> = v["members"].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["0", "1", "2", "3", "4"]);
    assert_eq!(
        v["members"]["1"]["rows"],
        serde_json::json!([[1, 0, 3, 4], [0, 1, 3, 2]])
    );
    assert_eq!(v["members"]["1"]["pluecker"]["coords"]["0,2"], 3);
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("tangent.json");
    let out = subdesign(&[
        "construct",
        "--family=tangent",
        "--r=2",
        "--s=2",
        "--field=7",
    ]);
    fs::write(&design, &out.stdout).unwrap();
    let path = design.to_str().unwrap();
    let args = [
        "verify",
        "--design",
        path,
        "--weak",
        "--strong",
        "--mode=sampled:200:9",
        "--threads=3",
    ];
    let a = subdesign(&args);
    let b = subdesign(&[
        "verify",
        "--design",
        path,
        "--weak",
        "--strong",
        "--mode=sampled:200:9",
        "--threads=1",
    ]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["mode"], "sampled:200:9");
    assert_eq!(v["A_is_lower_bound"], true);
}

#[test]
fn verify_and_recheck_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("secant.json");
    let report = dir.path().join("report.json");
    let out = subdesign(&[
        "construct",
        "--family=secant",
        "--r=2",
        "--s=2",
        "--field=5",
    ]);
    fs::write(&design, &out.stdout).unwrap();
    let out = subdesign(&[
        "verify",
        "--design",
        design.to_str().unwrap(),
        "--weak",
        "--strong",
        "--hp",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["n_members"], 5);
    assert_eq!(v["A_weak"], 4);
    assert!(v["A_strong"].as_u64().unwrap() <= 5);
    assert_eq!(v["hp"]["is_generator"], true);
    assert_eq!(v["hp"]["blocker"], Value::Null);
    assert_eq!(v["mode"], "exhaustive");
    fs::write(&report, &out.stdout).unwrap();
    let re = subdesign(&["verify", "--recheck", report.to_str().unwrap()]);
    assert_eq!(re.status.code(), Some(0));
    assert_eq!(json(&re)["ok"], true);

    let mut forged = v.clone();
    forged["A_strong"] = serde_json::json!(3);
    fs::write(&report, forged.to_string()).unwrap();
    let re = subdesign(&["verify", "--recheck", report.to_str().unwrap()]);
    assert_eq!(re.status.code(), Some(1));
}

#[test]
fn two_lines_are_not_hp() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("lines.json");
    fs::write(
        &design,
        r#"{"field":"2","members":[{"rows":[[1,0,0,0],[0,1,0,0]]},{"rows":[[0,0,1,0],[0,0,0,1]]}]}"#,
    )
    .unwrap();
    let out = subdesign(&["verify", "--design", design.to_str().unwrap(), "--hp"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["hp"]["is_generator"], false);
    assert!(v["hp"]["blocker"].is_object());
}

#[test]
fn dual_design_measures_the_same() {
    let dir = tempfile::tempdir().unwrap();
    let design = dir.path().join("secant.json");
    let dual = dir.path().join("dual.json");
    fs::write(
        &design,
        subdesign(&[
            "construct",
            "--family=secant",
            "--r=2",
            "--s=2",
            "--field=5",
        ])
        .stdout,
    )
    .unwrap();
    fs::write(
        &dual,
        subdesign(&["dual", "--design", design.to_str().unwrap()]).stdout,
    )
    .unwrap();
    let a = json(&subdesign(&[
        "verify",
        "--design",
        design.to_str().unwrap(),
    ]));
    let b = json(&subdesign(&["verify", "--design", dual.to_str().unwrap()]));
    assert_eq!(a["A_weak"], b["A_weak"]);
    assert_eq!(a["A_strong"], b["A_strong"]);
}

#[test]
fn bounds_and_errors() {
    let out = subdesign(&["bounds", "--d=4", "--k=1", "--q=9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "{\"finite_bound\":6,\"closed_field_bound\":7}\n"
    );
    let bad = subdesign(&[
        "construct",
        "--family=tangent",
        "--r=2",
        "--s=2",
        "--field=3",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8(bad.stderr)
        .unwrap()
        .contains("characteristic"));
    assert_eq!(
        subdesign(&["verify", "--design", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        subdesign(&["enumerate", "--m=4", "--r=2", "--field=2", "--unknown"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn conditions_report() {
    let out = subdesign(&["conditions", "--r=2", "--s=3", "--field=2^2"]);
    let v = json(&out);
    assert_eq!(v["count_bound"], "20");
    assert_eq!(v["power_bound"], "4");
    assert_eq!(v["any"], false);
}
