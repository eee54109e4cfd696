mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use meds_graph::meds::{write_dataset, CodeRecord, LabelRecord, LabelValue};

use common::{small_fixture, ts};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_meds-graph"));
    c.env_remove("MEDS_GRAPH_BASE_IRI");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn synth_root(dir: &Path) -> String {
    let root = dir.join("root");
    let o = run(&["synth", "--output", root.to_str().unwrap(), "--seed", "42", "--subjects", "60", "--shards", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    root.to_str().unwrap().to_string()
}

#[test]
fn convert_happy_path_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let root = synth_root(dir.path());
    let out = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    for (nt, stats, threads) in [("a.nt", "a.json", "1"), ("b.nt", "b.json", "8"), ("c.nt", "c.json", "8")] {
        let o = run(&["convert", "--input", &root, "--output", &out(nt), "--stats-out", &out(stats), "--threads", threads]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
    }
    let a = fs::read(out("a.nt")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, fs::read(out("b.nt")).unwrap());
    assert_eq!(a, fs::read(out("c.nt")).unwrap());
    assert_eq!(fs::read(out("a.json")).unwrap(), fs::read(out("b.json")).unwrap());
    let stats: serde_json::Value = serde_json::from_slice(&fs::read(out("a.json")).unwrap()).unwrap();
    assert_eq!(stats["blank_node_count"], 0);
    assert_eq!(stats["triple_count"].as_u64().unwrap() as usize, a.iter().filter(|b| **b == b'\n').count());
}

#[test]
fn turtle_output_parses() {
    let dir = tempfile::tempdir().unwrap();
    let root = synth_root(dir.path());
    let ttl = dir.path().join("g.ttl");
    let o = run(&["convert", "--input", &root, "--output", ttl.to_str().unwrap(), "--format", "turtle"]);
    assert_eq!(code(&o), 0);
    let text = fs::read(&ttl).unwrap();
    assert!(oxttl::TurtleParser::new().for_slice(&text).all(|t| t.is_ok()));
}

#[test]
fn two_valued_label_is_rejected_with_group_violation() {
    let dir = tempfile::tempdir().unwrap();
    let mut ds = small_fixture();
    let mut l = LabelRecord::new("1", ts("2020-01-03"), LabelValue::Boolean(true));
    l.categorical_value = Some("home".into());
    ds.labels.push(l);
    write_dataset(&ds, dir.path()).unwrap();
    let out = dir.path().join("g.nt");
    for mode in ["--strict", "--collect"] {
        let o = run(&["convert", "--input", dir.path().to_str().unwrap(), "--output", out.to_str().unwrap(), mode]);
        assert_eq!(code(&o), 3, "{mode}");
        let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(report["conforms"], false);
        assert!(report["violations"].as_array().unwrap().iter().any(|v| v["kind"] == "exclusive-group"));
        assert!(!out.exists(), "nothing is serialized on failure");
    }
    // Profiling escape hatch.
    let o = run(&["convert", "--input", dir.path().to_str().unwrap(), "--output", out.to_str().unwrap(), "--collect", "--no-validate"]);
    assert_eq!(code(&o), 0);
    assert!(out.exists());
}

#[test]
fn strict_and_collect_differ_on_record_errors() {
    let dir = tempfile::tempdir().unwrap();
    let mut ds = small_fixture();
    ds.codes.push(CodeRecord::new("B").with_parents(["B"]));
    write_dataset(&ds, dir.path()).unwrap();
    let out = dir.path().join("g.nt");
    let args = |mode| vec!["convert", "--input", dir.path().to_str().unwrap(), "--output", out.to_str().unwrap(), mode];
    let o = run(&args("--strict"));
    assert_eq!(code(&o), 3);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["record_errors"].as_array().unwrap().len(), 1);
    assert_eq!(code(&run(&args("--collect"))), 0);
    assert_eq!(code(&run(&["convert", "--input", "x", "--output", "y", "--strict", "--collect"])), 1);
}

#[test]
fn validate_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let root = synth_root(dir.path());
    let nt = dir.path().join("g.nt");
    assert_eq!(code(&run(&["convert", "--input", &root, "--output", nt.to_str().unwrap()])), 0);
    let o = run(&["validate", "--input", nt.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["conforms"], true);

    // Drop one hasSubject triple.
    let text = fs::read_to_string(&nt).unwrap();
    let mut dropped = false;
    let mutated: String = text
        .lines()
        .filter(|l| {
            let hit = !dropped && l.contains("/event/") && l.contains("#hasSubject>");
            dropped |= hit;
            !hit
        })
        .map(|l| format!("{l}\n"))
        .collect();
    let bad = dir.path().join("bad.nt");
    fs::write(&bad, mutated).unwrap();
    let o = run(&["validate", "--input", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let v = report["violations"].as_array().unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!(v[0]["kind"], "min-count");

    // A shape file that requires time on every event.
    let shapes = dir.path().join("tight.shapes");
    let vocab = meds_graph::rdf::Vocabulary::default();
    let text = meds_graph::shapes::write_suite(&meds_graph::shapes::builtin_meds_suite(&vocab), &vocab.prefixes());
    fs::write(&shapes, text.replace("prop meds:time min=0", "prop meds:time min=1")).unwrap();
    let o = run(&["validate", "--input", nt.to_str().unwrap(), "--shapes", shapes.to_str().unwrap()]);
    assert_eq!(code(&o), 3);

    fs::write(&bad, "<http://x.example/s> <http://x.example/p> \"open .\n").unwrap();
    assert_eq!(code(&run(&["validate", "--input", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["validate", "--input", dir.path().join("absent.nt").to_str().unwrap()])), 4);
    fs::write(&shapes, "shape <rel>\n").unwrap();
    assert_eq!(code(&run(&["validate", "--input", nt.to_str().unwrap(), "--shapes", shapes.to_str().unwrap()])), 1);
}

#[test]
fn stats_and_roundtrip_subcommands() {
    let dir = tempfile::tempdir().unwrap();
    let root = synth_root(dir.path());
    let o = run(&["stats", "--input", &root]);
    assert_eq!(code(&o), 0);
    let from_root: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let nt = dir.path().join("g.nt");
    assert_eq!(code(&run(&["convert", "--input", &root, "--output", nt.to_str().unwrap()])), 0);
    let o = run(&["stats", "--input", nt.to_str().unwrap()]);
    let from_file: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(from_root, from_file);
    let o = run(&["stats", "--input", nt.to_str().unwrap(), "--table"]);
    assert!(String::from_utf8(o.stdout).unwrap().contains("triples/event"));

    let report = dir.path().join("fidelity.json");
    let o = run(&["roundtrip", "--input", &root, "--output", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let r: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(r["diffs"], serde_json::json!([]));
}

#[test]
fn exit_codes_for_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let root = synth_root(dir.path());
    let out = dir.path().join("g.nt");
    let out = out.to_str().unwrap();
    assert_eq!(code(&run(&["convert", "--input", dir.path().join("none").to_str().unwrap(), "--output", out])), 2);
    assert_eq!(code(&run(&["convert", "--input", &root, "--output", out, "--base-iri", "relative/"])), 1);
    assert_eq!(code(&run(&["convert", "--input", &root, "--output", out, "--format", "rdfxml"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    // Output below a regular file cannot be created.
    let blocked = dir.path().join("file");
    fs::write(&blocked, "").unwrap();
    assert_eq!(code(&run(&["convert", "--input", &root, "--output", blocked.join("g.nt").to_str().unwrap()])), 4);
    assert_eq!(code(&run(&["synth", "--output", out, "--p-time", "2"])), 1);
}

#[test]
fn base_iri_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let root = synth_root(dir.path());
    let out = dir.path().join("g.nt");
    let o = bin()
        .args(["convert", "--input", &root, "--output", out.to_str().unwrap()])
        .env("MEDS_GRAPH_BASE_IRI", "https://kg.example.net/")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().all(|l| l.starts_with("<https://kg.example.net/")));
}
