use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SENTENCES: &str = include_str!("../../core/fixtures/clinical_sentences.txt");

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_biomedner"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
}

/// Passages of six distinct sentences each, plus a duplicate and two
/// passages the quality filters reject.
fn raw_corpus() -> String {
    let pool: Vec<&str> = SENTENCES.lines().collect();
    let mut lines = Vec::new();
    for i in 0..20usize {
        let picked: Vec<&str> = (0..6).map(|j| pool[(i * 5 + j * 3 + j * j) % pool.len()]).collect();
        let text = format!("{}\n{}", picked[..3].join(" "), picked[3..].join(" "));
        let source = if i % 2 == 0 { "pubmed" } else { "patent" };
        lines.push(serde_json::json!({"id": format!("doc{i:02}"), "source": source, "text": text}));
    }
    let dup = lines[4]["text"].clone();
    lines.push(serde_json::json!({"id": "doc20", "source": "pubmed", "text": dup}));
    lines.push(serde_json::json!({"id": "junk1", "source": "pubmed", "text": "Too short."}));
    lines.push(serde_json::json!({"id": "junk2", "source": "patent", "text": "A B C D E F G. H I J K. L M N."}));
    lines.iter().map(|l| format!("{l}\n")).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn filter_writes_outputs_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "raw.jsonl", &raw_corpus());
    let out = run(dir.path(), &["filter", "--in", "raw.jsonl", "--out", "kept.jsonl"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let kept = fs::read_to_string(dir.path().join("kept.jsonl")).unwrap();
    let report = fs::read_to_string(dir.path().join("kept.jsonl.report.jsonl")).unwrap();
    assert_eq!(report.lines().count(), 23);
    assert_eq!(kept.lines().count(), 21, "{report}");
    assert!(!kept.contains("junk"));
    assert!(dir.path().join("kept.jsonl.config.toml").exists());
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    let out = run(Path::new("."), &["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn help_exits_zero() {
    for args in [&["--help"][..], &["compare", "--help"]] {
        let out = run(Path::new("."), args);
        assert_eq!(out.status.code(), Some(0));
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"));
    }
}

#[test]
fn compare_with_mismatched_ids_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.jsonl", "{\"id\":\"p1\",\"f1\":0.5}\n{\"id\":\"p2\",\"f1\":1.0}\n");
    write(dir.path(), "b.jsonl", "{\"id\":\"p1\",\"f1\":0.25}\n");
    let out = run(dir.path(), &["compare", "--a", "a.jsonl", "--b", "b.jsonl"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no predictions for passages: p2"), "{err}");
}

#[test]
fn compare_reports_the_signed_rank_test() {
    let dir = tempfile::tempdir().unwrap();
    let a: String = (0..5).map(|i| format!("{{\"id\":\"p{i}\",\"f1\":{}}}\n", 0.5 + 0.1 * i as f64)).collect();
    let b: String = (0..5).rev().map(|i| format!("{{\"id\":\"p{i}\",\"f1\":{}}}\n", 0.4 - 0.05 * i as f64)).collect();
    write(dir.path(), "a.jsonl", &a);
    write(dir.path(), "b.jsonl", &b);
    ok(dir.path(), &["compare", "--a", "a.jsonl", "--b", "b.jsonl", "--out", "cmp.json"]);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("cmp.json")).unwrap()).unwrap();
    assert_eq!(v["p_value"], 0.03125);
    assert_eq!(v["method"], "exact");
    assert_eq!(v["n_effective"], 5);
}

#[test]
fn config_errors_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "raw.jsonl", &raw_corpus());
    write(dir.path(), "bad.toml", "[dedup]\nthreshhold = 0.5\n");
    let out = run(dir.path(), &["--config", "bad.toml", "dedup", "--in", "raw.jsonl", "--out", "d.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(dir.path(), &["dedup", "--in", "raw.jsonl", "--out", "d.jsonl", "--threshold", "1.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn flags_override_the_config_file_and_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "raw.jsonl", &raw_corpus());
    write(dir.path(), "cfg.toml", "seed = 3\n[dedup]\nthreshold = 0.8\n");
    ok(dir.path(), &["--config", "cfg.toml", "dedup", "--in", "raw.jsonl", "--out", "d.jsonl", "--threshold", "0.95"]);
    let echoed: toml::Value = toml::from_str(&fs::read_to_string(dir.path().join("d.jsonl.config.toml")).unwrap()).unwrap();
    assert_eq!(echoed["seed"].as_integer(), Some(3));
    assert_eq!(echoed["dedup"]["threshold"].as_float(), Some(0.95));
    assert_eq!(echoed["dedup"]["per_source"].as_bool(), Some(true));
}

#[test]
fn unreachable_llm_endpoint_is_an_external_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "raw.jsonl", &raw_corpus());
    let out = run(
        dir.path(),
        &[
            "annotate", "--in", "raw.jsonl", "--out-dir", "ann", "--teacher-n", "2",
            "--teacher-url", "http://127.0.0.1:9", "--teacher-model", "m",
            "--student-url", "http://127.0.0.1:9", "--student-model", "m",
        ],
    );
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn missing_input_is_a_data_error() {
    let out = run(Path::new("."), &["sample", "--in", "/nonexistent/raw.jsonl", "--out", "x.jsonl", "--total", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

fn pipeline(dir: &Path) -> Vec<(String, Vec<u8>)> {
    write(dir, "raw.jsonl", &raw_corpus());
    ok(dir, &["--seed", "5", "filter", "--in", "raw.jsonl", "--out", "kept.jsonl"]);
    ok(dir, &["--seed", "5", "dedup", "--in", "kept.jsonl", "--out", "dedup.jsonl"]);
    ok(dir, &["--seed", "5", "sample", "--in", "dedup.jsonl", "--out", "sample.jsonl", "--total", "12"]);
    ok(dir, &["--seed", "5", "annotate", "--in", "sample.jsonl", "--out-dir", "ann", "--client", "mock", "--teacher-n", "8"]);
    ok(
        dir,
        &[
            "--seed", "5", "train-head", "--train", "ann/annotated.annotated.jsonl", "--out", "head.bin", "--dim", "16",
            "--hidden", "16", "--steps", "30", "--batch-size", "4", "--lr", "0.001",
        ],
    );
    ok(
        dir,
        &[
            "--seed", "5", "predict", "--in", "ann/annotated.annotated.jsonl", "--head", "head.bin", "--out", "pred.jsonl",
            "--labels", "chemical,disease,gene", "--dim", "16",
        ],
    );
    ok(
        dir,
        &[
            "evaluate", "--gold", "ann/annotated.annotated.jsonl", "--pred", "pred.jsonl", "--out", "report.json",
            "--per-passage", "f1.jsonl",
        ],
    );
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in walk(dir) {
        files.push(entry);
    }
    files.sort();
    files
        .into_iter()
        .map(|p| (p.strip_prefix(dir).unwrap().display().to_string(), fs::read(&p).unwrap()))
        .collect()
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

#[test]
fn pipeline_is_reproducible_end_to_end() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = pipeline(a.path());
    let second = pipeline(b.path());
    let names: Vec<&str> = first.iter().map(|(n, _)| n.as_str()).collect();
    for expected in ["kept.jsonl", "dedup.jsonl", "sample.jsonl", "ann/annotated.annotated.jsonl", "head.bin", "pred.jsonl", "report.json"] {
        assert!(names.contains(&expected), "missing {expected} in {names:?}");
    }
    assert_eq!(first.len(), second.len());
    for ((na, da), (nb, db)) in first.iter().zip(&second) {
        assert_eq!(na, nb);
        assert!(da == db, "{na} differs between runs");
    }
    let dedup = String::from_utf8(first.iter().find(|(n, _)| n == "dedup.jsonl").unwrap().1.clone()).unwrap();
    assert!(!dedup.contains("doc20"), "exact duplicate should be removed");
}

#[test]
fn worker_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "raw.jsonl", &raw_corpus());
    ok(dir.path(), &["--workers", "1", "dedup", "--in", "raw.jsonl", "--out", "one.jsonl"]);
    ok(dir.path(), &["--workers", "3", "dedup", "--in", "raw.jsonl", "--out", "three.jsonl"]);
    assert_eq!(fs::read(dir.path().join("one.jsonl")).unwrap(), fs::read(dir.path().join("three.jsonl")).unwrap());
    assert_eq!(
        fs::read(dir.path().join("one.jsonl.clusters.jsonl")).unwrap(),
        fs::read(dir.path().join("three.jsonl.clusters.jsonl")).unwrap()
    );
}

#[test]
fn bench_writes_a_csv_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "raw.jsonl", &raw_corpus());
    ok(
        dir.path(),
        &["bench", "--in", "raw.jsonl", "--out", "bench.csv", "--labels", "both", "--batch-sizes", "1,4", "--dim", "8", "--hidden", "8"],
    );
    let csv = fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "mode,label_set,batch_size,words_per_second,status");
    assert_eq!(rows.len(), 1 + 2 * 2 * 2);
    assert!(rows[1..].iter().all(|r| r.ends_with(",ok")), "{csv}");
}

#[test]
fn fewshot_subsets_are_written() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "raw.jsonl", &raw_corpus());
    ok(dir.path(), &["annotate", "--in", "raw.jsonl", "--out-dir", "ann", "--client", "mock", "--teacher-n", "4"]);
    ok(dir.path(), &["--seed", "2", "fewshot", "--in", "ann/annotated.annotated.jsonl", "--out-dir", "shots", "--n", "3,5"]);
    for n in [3, 5] {
        for split in ["train", "val"] {
            let text = fs::read_to_string(dir.path().join(format!("shots/{split}_{n}.jsonl"))).unwrap();
            assert_eq!(text.lines().count(), n);
        }
    }
    let out = run(dir.path(), &["fewshot", "--in", "ann/annotated.annotated.jsonl", "--out-dir", "shots", "--n", "20"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn process_encoder_matches_the_in_process_toy_encoder() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "raw.jsonl", &raw_corpus());
    ok(dir.path(), &["annotate", "--in", "raw.jsonl", "--out-dir", "ann", "--client", "mock", "--teacher-n", "4"]);
    let train = ["train-head", "--train", "ann/annotated.annotated.jsonl", "--out", "head.bin", "--dim", "8", "--hidden", "8", "--steps", "5"];
    ok(dir.path(), &train);
    let exe = env!("CARGO_BIN_EXE_biomedner");
    let common = ["predict", "--in", "raw.jsonl", "--head", "head.bin", "--labels", "chemical,gene", "--dim", "8"];
    ok(dir.path(), &[&common[..], &["--out", "local.jsonl"]].concat());
    ok(
        dir.path(),
        &[&common[..], &["--out", "remote.jsonl", "--encoder", "process", "--encoder-cmd", exe, "serve-toy-encoder", "--dim", "8"]]
            .concat(),
    );
    assert_eq!(fs::read(dir.path().join("local.jsonl")).unwrap(), fs::read(dir.path().join("remote.jsonl")).unwrap());
}
