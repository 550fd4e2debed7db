mod common;

use common::fixture_path;
use std::path::Path;
use std::process::{Command, Output};

fn spw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spw")).args(args).output().expect("spw runs")
}

fn fx(name: &str) -> String {
    fixture_path(name).to_string_lossy().into_owned()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn solve_free_space() {
    let out = spw(&["solve", "--in", &fx("free_space")]);
    assert!(out.status.success());
    assert_eq!(json(&out)["distance"], 4.0);
}

#[test]
fn solve_square_hole_to_file_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    let (o, t) = (dir.path().join("out.json"), dir.path().join("trace.jsonl"));
    let out = spw(&["solve", "--in", &fx("square_hole"), "--out", o.to_str().unwrap(), "--trace", t.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&read(&o)).unwrap();
    let d = v["distance"].as_f64().unwrap();
    assert!((d - (1.0 + 2.0 * 2.5f64.sqrt())).abs() <= 1e-6);
    let trace = read(&t);
    assert!(!trace.is_empty());
    for line in trace.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"outer\": [[0,0],").unwrap();
    let out = spw(&["solve", "--in", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let out = spw(&["solve", "--in", "/nonexistent/instance.json"]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::write(&bad, r#"{"outer": [[0,0],[4,0],[4,4],[0,4]], "s": [9,9], "t": [1,1]}"#).unwrap();
    let out = spw(&["oracle", "--in", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_command() {
    let out = spw(&["oracle", "--in", &fx("square_hole")]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["distance"].as_f64().unwrap() - (1.0 + 2.0 * 2.5f64.sqrt())).abs() <= 1e-12);
}

#[test]
fn compare_reports_and_fails_on_fault() {
    let out = spw(&["compare", "--in", &fx("free_space")]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["instances"], 1);
    assert_eq!(v["max_rel_error"], 0.0);

    let out = spw(&["compare", "--random", "5,4,8", "--count", "6"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["instances"], 6);
    assert!(v["max_rel_error"].as_f64().unwrap() <= 1e-6);
    assert_eq!(v["path_failures"], 0);
    assert!(v["mean_counters"]["type1"].as_f64().is_some());

    let out = spw(&["compare", "--random", "5,4,8", "--count", "2", "--inject-fault"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(json(&out)["max_rel_error"].as_f64().unwrap() > 1e-6);
}

#[test]
fn decompose_and_off_dump() {
    let out = spw(&["decompose", "--in", &fx("two_bars")]);
    assert!(out.status.success());
    let v = json(&out);
    assert!(v["corridors"].as_array().is_some_and(|c| !c.is_empty()));
    let out = spw(&["decompose", "--in", &fx("two_bars"), "--dump-tri"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("OFF\n"));
}

#[test]
fn bench_rows_and_ratios() {
    let out = spw(&["bench", "--m-list", "5,10", "--k", "6", "--seeds", "2"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["ratios"].as_array().is_some_and(|r| r.len() == 1));

    let out = spw(&["bench", "--m-list", "0", "--seeds", "2"]);
    assert!(out.status.success());
    let row = &json(&out)["rows"][0];
    for k in ["type1", "type4", "merges", "gateways", "splits"] {
        assert!(row["mean"][k].as_f64().unwrap_or(0.0) <= 2.0, "{k}: {row}");
    }
}

fn render(name: &str, what: &str) -> (Output, String) {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("r.svg");
    let out = spw(&["render", "--in", &fx(name), "--what", what, "--out", p.to_str().unwrap()]);
    let svg = if out.status.success() { read(&p) } else { String::new() };
    (out, svg)
}

#[test]
fn renders() {
    let (_, svg) = render("two_bars", "domain");
    assert_eq!(svg.matches("<polygon").count(), 2 + 1);

    let (_, svg) = render("square_hole", "path");
    assert_eq!(svg.matches("<polyline class=\"path\"").count(), 1);
    let pts = svg.split("class=\"path\" points=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(pts.split_whitespace().count(), 4);

    let (_, svg) = render("comb", "decomposition");
    assert!(svg.contains("class=\"triangle\""));

    let (_, svg) = render("l_room", "wavefront:2.0");
    assert_eq!(svg.matches("class=\"arc\"").count(), 2);

    let (out, _) = render("l_room", "everything");
    assert_eq!(out.status.code(), Some(1));
    let (out, _) = render("l_room", "wavefront:soon");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn trace_command_dumps_trees() {
    let out = spw(&["trace", "--in", &fx("split"), "--dump-trees"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert!(last["trees"]["bhts"].is_array());
}

#[test]
fn commands_are_deterministic() {
    let runs: [&[&str]; 4] = [
        &["solve", "--in", &fx("split_restart"), "--rewind-mode", "replay"],
        &["compare", "--random", "9,6,8", "--count", "4"],
        &["bench", "--m-list", "3,6", "--k", "5", "--seeds", "3"],
        &["trace", "--in", &fx("split")],
    ];
    for args in runs {
        let (a, b) = (spw(args), spw(args));
        assert!(a.status.success(), "{args:?}");
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    assert_eq!(render("pocket", "decomposition").1, render("pocket", "decomposition").1);
}
