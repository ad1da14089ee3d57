//! CLI behavior: dispatch, diagnostics, exit statuses, and output files.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn prefuzz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prefuzz"))
        .args(args)
        .output()
        .expect("run prefuzz")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn corpus_contents(dir: &Path) -> Vec<Vec<u8>> {
    let mut out: Vec<Vec<u8>> = fs::read_dir(dir)
        .unwrap()
        .map(|e| fs::read(e.unwrap().path()).unwrap())
        .collect();
    out.sort();
    out
}

#[test]
fn fuzz_hello_writes_the_corpus_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefuzz(&[
        "fuzz",
        "--subject",
        "hello",
        "--seed",
        "1",
        "--budget-validations",
        "100000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let corpus = corpus_contents(&dir.path().join("corpus"));
    assert_eq!(corpus, vec![b"HELLO".to_vec()]);
    assert!(dir.path().join("report.txt").is_file());
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(json["unique_valid"], 1);
    assert_eq!(json["total_validations"], 100_000);
    assert!(json.get("elapsed_seconds").is_none());
}

#[test]
fn fuzz_requires_a_budget() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefuzz(&[
        "fuzz",
        "--subject",
        "hello",
        "--seed",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("budget"), "{stderr}");
}

#[test]
fn fuzz_reports_unknown_subjects_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefuzz(&[
        "fuzz",
        "--subject",
        "nosuch",
        "--budget-validations",
        "10",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("nosuch"), "{stderr}");
}

#[test]
fn fuzz_without_seed_prints_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefuzz(&[
        "fuzz",
        "--subject",
        "csv",
        "--budget-validations",
        "500",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let seed_line = text.lines().find(|l| l.starts_with("seed: ")).unwrap();
    assert!(seed_line["seed: ".len()..].parse::<u64>().is_ok());
}

#[test]
fn identical_seeds_give_identical_corpora_and_reports() {
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = prefuzz(&[
            "fuzz",
            "--subject",
            "tinyc_subset",
            "--seed",
            "77",
            "--budget-validations",
            "20000",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{out:?}");
        (
            fs::read(dir.path().join("report.txt")).unwrap(),
            fs::read(dir.path().join("report.json")).unwrap(),
            corpus_contents(&dir.path().join("corpus")),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn list_subjects_prints_the_registry() {
    let out = prefuzz(&["list-subjects"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for name in [
        "hello",
        "jpeg_marker",
        "jpeg_marker_indexed",
        "length_field",
        "ini",
        "csv",
        "json_subset",
        "tinyc_subset",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn conformance_passes_for_builtin_subjects() {
    let out = prefuzz(&["conformance", "--subject", "json_subset", "--seed", "4"]);
    assert!(out.status.success(), "{out:?}");
    assert!(stdout(&out).contains("violations: 0"));
}

#[test]
fn replay_fails_on_a_corrupted_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefuzz(&[
        "fuzz",
        "--subject",
        "hello",
        "--seed",
        "1",
        "--budget-validations",
        "50000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let corpus = dir.path().join("corpus");

    let ok = prefuzz(&["replay", "--subject", "hello", "--dir", corpus.to_str().unwrap()]);
    assert!(ok.status.success(), "{ok:?}");

    fs::write(corpus.join("bogus"), b"NOTVALID").unwrap();
    let bad = prefuzz(&["replay", "--subject", "hello", "--dir", corpus.to_str().unwrap()]);
    assert!(!bad.status.success());
    assert!(stdout(&bad).contains("failures: 1"), "{bad:?}");
}

#[test]
fn fuzz_drives_external_commands_over_the_exit_code_protocol() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefuzz(&[
        "fuzz",
        "--command",
        env!("CARGO_BIN_EXE_prefuzz-subject"),
        "--seed",
        "6",
        "--alphabet",
        "printable",
        "--budget-validations",
        "600",
        "--out",
        dir.path().to_str().unwrap(),
        "--",
        "csv",
    ]);
    assert!(out.status.success(), "{out:?}");
    let corpus = corpus_contents(&dir.path().join("corpus"));
    assert!(!corpus.is_empty());
    assert!(corpus.iter().all(|input| input.ends_with(b"\n")));
}

#[test]
fn compare_writes_both_reports_and_the_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let out = prefuzz(&[
        "compare",
        "--subject",
        "csv",
        "--seed",
        "2",
        "--budget-validations",
        "2000",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("== failure-feedback =="));
    assert!(text.contains("== random-baseline =="));
    assert!(text.contains("unique_valid_ratio:"));
    assert!(dir.path().join("compare.json").is_file());
    assert!(dir.path().join("ff").is_dir());
    assert!(dir.path().join("random").is_dir());
}
