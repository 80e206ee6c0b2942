use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use tsing_cli::input::{parse_document, InputKind};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn tsing(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsing"))
        .args(args)
        .output()
        .expect("run tsing")
}

fn path(rel: &str) -> String {
    corpus().join(rel).to_string_lossy().into_owned()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

#[test]
fn every_corpus_file_round_trips() {
    let mut count = 0;
    for (sub, kind) in [
        ("divisors", InputKind::Divisor),
        ("rejected", InputKind::Divisor),
        ("pairs", InputKind::P1Pair),
        ("presentations", InputKind::Presentation),
    ] {
        for entry in fs::read_dir(corpus().join(sub)).unwrap() {
            let p = entry.unwrap().path();
            let doc = parse_document(&fs::read_to_string(&p).unwrap())
                .unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            assert_eq!(doc.kind(), kind, "{}", p.display());
            let text = doc.serialize();
            let again = parse_document(&text).unwrap();
            assert_eq!(again, doc, "{}", p.display());
            assert_eq!(again.serialize(), text);
            count += 1;
        }
    }
    assert!(count >= 40);
}

#[test]
fn check_proper_klt() {
    let o = tsing(&["check", "--json", &path("divisors/e8_rank1.toml")]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["proper"], Value::Bool(true));
    assert_eq!(v["klt"], Value::Bool(true));
    assert_eq!(v["triple"], serde_json::json!([5, 3, 2]));
}

#[test]
fn check_non_proper_exits_one() {
    let o = tsing(&["check", "--json", &path("rejected/non_proper_origin.toml")]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&o);
    assert_eq!(v["proper"], Value::Bool(false));
    assert!(v["reason"].as_str().unwrap().contains("origin"));
    let o = tsing(&["check", "--json", &path("rejected/non_klt_237.toml")]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json_of(&o)["klt"], Value::Bool(false));
}

#[test]
fn group_order_of_triangle_group() {
    let o = tsing(&["group", "order", &path("presentations/triangle_2_3_5.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap(), "order: 60\n");
}

#[test]
fn input_errors_exit_two() {
    let dir = std::env::temp_dir().join(format!("tsing-cli-test-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    fs::write(&bad, "[lattice]\nrank = 1\n[tail_cone]\nrays = [[1]]\n[[mark]]\npoint = \"0\"\nvertices = [[\"1/0\"]]\n").unwrap();
    let o = tsing(&["check", "--json", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let v = json_of(&o);
    assert_eq!(v["error"], Value::String("SchemaError".into()));
    assert!(v["message"].as_str().unwrap().contains("mark[0].vertices[0]"));
    // wrong document kind, missing file, no input at all
    assert_eq!(tsing(&["p1", &path("divisors/d4_rank1.toml")]).status.code(), Some(2));
    assert_eq!(tsing(&["check", dir.join("missing.toml").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(tsing(&["check"]).status.code(), Some(2));
    fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn coset_guard_exits_three() {
    let o = tsing(&["group", "order", "--max-cosets", "50", &path("presentations/free_abelian_rank_2.txt")]);
    assert_eq!(o.status.code(), Some(3));
    let o = tsing(&["pi1", "--max-cosets", "5", &path("divisors/e8_rank1.toml")]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn all_has_stable_keys() {
    let v = json_of(&tsing(&["all", "--json", &path("divisors/d4_rank1.toml")]));
    for key in ["klt", "triple", "class_group", "pi1", "iteration", "scfc"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["pi1"]["order"], Value::String("8".into()));
    assert_eq!(v["iteration"]["depth"], serde_json::json!(2));
}

#[test]
fn batch_is_sorted_and_takes_worst_code() {
    let o = tsing(&["check", "--json", "--batch", &path("rejected")]);
    assert_eq!(o.status.code(), Some(1));
    let v = json_of(&o);
    let names: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["file"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn generate_is_seeded() {
    let a = tsing(&["generate", "--seed", "5", "--count", "3"]);
    let b = tsing(&["generate", "--seed", "5", "--count", "3"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, tsing(&["generate", "--seed", "6", "--count", "3"]).stdout);
}

#[test]
fn random_divisors_round_trip() {
    for d in tsing_cli::random::random_klt_divisors(3, 30) {
        let text = tsing_cli::serialize_divisor(&d);
        assert_eq!(tsing_cli::parse_divisor(&text).unwrap(), d, "{text}");
    }
}
