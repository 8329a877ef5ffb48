use std::process::{Command, Output};

use serde_json::Value;

fn tropell(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropell")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn trop_line() {
    let out = tropell(&["trop", "t^-3*x + t^-2*y - 1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["curve"]["vertices"], serde_json::json!([["3", "2"]]));
    assert_eq!(v["curve"]["rays"].as_array().unwrap().len(), 3);
    assert!(v["cycle"].is_null());
}

#[test]
fn trop_triangle() {
    let out = tropell(&["trop", "x^2*y + x*y + x*y^2 + t^3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["cycle"]["length"], "9");
    assert_eq!(v["unimodular"], true);
}

#[test]
fn trop_rejects_bad_input() {
    let out = tropell(&["trop", "t"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(stderr(&out).contains("bivariate"));
    let out = tropell(&["trop", "x +* y"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("position 3"));
}

#[test]
fn trop_writes_svg() {
    let path = std::env::temp_dir().join(format!("tropell-cli-{}.svg", std::process::id()));
    let out = tropell(&["trop", "x^2*y + x*y + x*y^2 + t^2", "--svg", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert!(svg.starts_with("<?xml"));
    assert_eq!(svg.matches("crimson").count(), 3);
}

#[test]
fn analyze_examples() {
    let out = tropell(&["analyze", "[0,0,0,t^4,t^6]"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["minimal"], false);
    assert_eq!(v["vDelta"], "0");
    assert_eq!(v["vDelta_input"], "12");
    assert_eq!(v["reduction"], "good");
    assert!(v["singular_point"].is_null());

    let v = json(&tropell(&["analyze", "[0,1,0,0,t^2]"]));
    assert_eq!(v["reduction"], "mult");
    assert_eq!(v["singular_point"], serde_json::json!(["0", "0"]));
    assert_eq!(v["vj"], "-2");
}

#[test]
fn analyze_exit_codes() {
    assert_eq!(tropell(&["analyze", "[0,0,0,0,0]"]).status.code(), Some(3));
    assert_eq!(tropell(&["analyze", "[0,0,0,1]"]).status.code(), Some(2));
    assert_eq!(tropell(&["analyze", "[0,0,0,1,t^(]"]).status.code(), Some(2));
}

#[test]
fn faithful_family() {
    let out = tropell(&["faithful", "--family", "a=1", "b=t^2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["cycle_length"], "6");
    assert_eq!(v["minus_v_j"], "6");
    assert_eq!(v["mode"], "family");
    assert_eq!(v["sampling"]["samples"], 20);
    assert_eq!(v["sampling"]["failures"], 0);
}

#[test]
fn faithful_general_model() {
    let out = tropell(&["faithful", "[0,1,0,-2*t,t^2]"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["verdict"], true);
    assert_eq!(v["cycle_length"], "3");
    assert_eq!(v["mode"], "general");
}

#[test]
fn faithful_exit_codes() {
    let out = tropell(&["faithful", "[0,0,0,1,1]"]);
    assert_eq!(out.status.code(), Some(5));
    assert!(json(&out)["verdict"].is_null());
    assert_eq!(tropell(&["faithful", "[0,0,0,0,0]"]).status.code(), Some(3));
    assert_eq!(tropell(&["faithful", "[0,1,0"]).status.code(), Some(2));
    assert_eq!(tropell(&["faithful", "--family", "a=1", "c=t"]).status.code(), Some(2));
    assert_eq!(tropell(&["faithful", "--family", "a=1", "b=1"]).status.code(), Some(2));
    assert_eq!(tropell(&["faithful", "--precision", "0"]).status.code(), Some(2));
}

#[test]
fn faithful_sweep() {
    let out = tropell(&["faithful", "--sweep", "k=1..3", "--samples", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        let want = (3 * (i + 1)).to_string();
        assert_eq!(row["general"]["cycle_length"], want.as_str());
        assert_eq!(row["family"]["cycle_length"], want.as_str());
    }
    let out = tropell(&["faithful", "--family", "a=4", "b=t^k", "--sweep", "k=2..2", "--samples", "0"]);
    assert_eq!(json(&out)[0]["family"]["cycle_length"], "6");
}

#[test]
fn faithful_is_deterministic() {
    let a = tropell(&["faithful", "--family", "a=1", "b=t^3", "--seed", "7"]);
    let b = tropell(&["faithful", "--family", "a=1", "b=t^3", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = tropell(&["faithful", "--family", "a=1", "b=t^3", "--seed", "8"]);
    assert_ne!(a.stdout, c.stdout);
}
