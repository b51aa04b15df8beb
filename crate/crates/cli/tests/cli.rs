use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use wakimoto::parse_rat;

fn wakimoto(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wakimoto")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn relations_pass() {
    let out = wakimoto(&["relations", "--k", "1/1", "--degree", "4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["status"], "pass");
}

#[test]
fn detc_degree_one() {
    let out = wakimoto(&["detc", "--k", "1/1", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["payload"]["N"], 1);
    assert_eq!(v["payload"]["monic_roots"][0]["root"], "-1/2");
    assert_eq!(v["payload"]["monic_roots"][0]["multiplicity"], 1);
    assert_eq!(v["payload"]["total_degree"], 1);
    assert_eq!(v["payload"]["lemma_match"], true);
    assert_eq!(v["engine_version"], wakimoto::VERSION);
}

#[test]
fn label_out_of_range_is_usage_error() {
    let out = wakimoto(&["screening", "--p", "3", "--pprime", "1", "--m", "4", "--mprime", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn undefined_screening_exits_3() {
    let out = wakimoto(&["screening", "--p", "3", "--pprime", "1", "--source-m", "2", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "error");
}

#[test]
fn config_file_rules() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");

    std::fs::write(&cfg, "# excluded level\nk = 0/1\n").unwrap();
    assert_eq!(wakimoto(&["detc", "--config", cfg.to_str().unwrap(), "--degree", "1"]).status.code(), Some(2));

    std::fs::write(&cfg, "k = 1\ncolour = red\n").unwrap();
    assert_eq!(wakimoto(&["detc", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    std::fs::write(&cfg, "p = 3\npprime = 1\nk = 1\n").unwrap();
    assert_eq!(wakimoto(&["detc", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));

    std::fs::write(&cfg, "p = 3\npprime = 1\nm = 2\norder = 20\n").unwrap();
    let out = wakimoto(&["characters", "--config", cfg.to_str().unwrap(), "--order", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["payload"]["fock"]["order"], 3);
    assert_eq!(v["payload"]["irreducible"]["coefficients"], serde_json::json!(["1/1", "1/1", "1/1", "2/1"]));

    let missing = dir.path().join("absent.cfg");
    let out = wakimoto(&["detc", "--config", missing.to_str().unwrap(), "--k", "1", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn conflicting_level_flags() {
    let out = wakimoto(&["detc", "--p", "3", "--pprime", "1", "--k", "1", "--degree", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inconclusive_structure_is_not_success() {
    let out = wakimoto(&["structure", "--p", "5", "--pprime", "2", "--m", "2", "--mprime", "1", "--degree", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["status"], "inconclusive");
}

#[test]
fn generic_sector_scan() {
    let out = wakimoto(&["structure", "--k", "1", "--j", "1/3", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["payload"]["pattern"], "generic/irreducible");
}

fn every_leaf_is_exact(v: &Value) -> bool {
    match v {
        Value::String(s) if s.contains('/') && !s.contains(' ') => parse_rat(s).is_some(),
        Value::Number(n) => n.is_i64() || n.is_u64(),
        Value::Array(a) => a.iter().all(every_leaf_is_exact),
        Value::Object(o) => o.values().all(every_leaf_is_exact),
        _ => true,
    }
}

#[test]
fn outputs_are_exact() {
    let out = wakimoto(&["euler", "--p", "5", "--pprime", "2", "--m", "2", "--mprime", "1", "--order", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(every_leaf_is_exact(&v));
    assert_eq!(v["payload"]["equal"], true);

    let out = wakimoto(&["euler", "--p", "5", "--pprime", "2", "--m", "2", "--mprime", "1", "--order", "8", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    for line in text.lines().skip(1) {
        let (_, value) = line.split_once(',').unwrap();
        if value.contains('/') && !value.contains(' ') {
            assert!(parse_rat(value).is_some(), "{line}");
        }
    }
}

fn read(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap()
}

#[test]
fn cache_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let first = dir.path().join("first.json");
    let second = dir.path().join("second.json");
    let args = ["detc", "--k", "1/3", "--degree", "2", "--cache", cache.to_str().unwrap()];

    let out = wakimoto(&[&args[..], &["--out", first.to_str().unwrap()]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);

    let out = wakimoto(&[&args[..], &["--out", second.to_str().unwrap(), "--jobs", "3"]].concat());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(read(&first), read(&second));

    let text = wakimoto(&[&args[..], &["--format", "text"]].concat());
    assert!(String::from_utf8(text.stdout).unwrap().contains("lemma_match: true"));
}

#[test]
fn unknown_subcommand_is_usage_error() {
    assert_eq!(wakimoto(&["factor", "--k", "1"]).status.code(), Some(2));
    assert_eq!(wakimoto(&["detc"]).status.code(), Some(2));
}
