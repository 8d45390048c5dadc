mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use idfawe_core::corpus::parse_qrels;
use idfawe_core::eval::{evaluate_run, read_run};
use tempfile::TempDir;

fn idfawe(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_idfawe"))
        .current_dir(dir)
        .env_remove("IDFAWE_CONFIG")
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn bundle() -> (TempDir, common::Bundle) {
    let dir = TempDir::new().unwrap();
    let b = common::write_bundle(dir.path());
    (dir, b)
}

const THREE_DOCS: &str = "<DOC><DOCNO>A</DOCNO><TEXT>reef fish</TEXT></DOC>\n\
<DOC><DOCNO>B</DOCNO><TEXT>coral reef</TEXT></DOC>\n\
<DOC><DOCNO>C</DOCNO><TEXT>desert sand</TEXT></DOC>\n";

#[test]
fn build_index_prints_summary() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("docs.trec"), THREE_DOCS).unwrap();
    let o = idfawe(dir.path(), &["build-index", "--corpus", "docs.trec", "--index", "x.idx"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("N=3 "), "{}", stdout(&o));
    assert!(dir.path().join("x.idx").exists());
}

#[test]
fn build_index_errors() {
    let dir = TempDir::new().unwrap();
    let o = idfawe(dir.path(), &["build-index", "--corpus", "missing.trec", "--index", "x.idx"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let dup = "<DOC><DOCNO>A</DOCNO><TEXT>x</TEXT></DOC><DOC><DOCNO>A</DOCNO><TEXT>y</TEXT></DOC>";
    fs::write(dir.path().join("dup.trec"), dup).unwrap();
    let o = idfawe(dir.path(), &["build-index", "--corpus", "dup.trec", "--index", "x.idx"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("`A`"), "{}", stderr(&o));
}

#[test]
fn search_bm25_is_deterministic() {
    let (dir, b) = bundle();
    let cfg = b.config.to_str().unwrap();
    let args = ["search", "-c", cfg, "--variant", "bm25", "volcano lava glacier frost"];
    let first = idfawe(dir.path(), &args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let lines: Vec<&str> = std::str::from_utf8(&first.stdout).unwrap().lines().collect();
    assert_eq!(lines.len(), 10);
    assert!(lines[0].starts_with("q Q0 CRAFT-") && lines[0].ends_with(" idfawe"));
    assert_eq!(idfawe(dir.path(), &args).stdout, first.stdout);
}

#[test]
fn search_plus_prints_expansion_then_results() {
    let (dir, b) = bundle();
    let o = idfawe(dir.path(), &["search", "-c", b.config.to_str().unwrap(), "volcano lava"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert!(lines[..5].iter().all(|l| l.starts_with("# expansion ")), "{out}");
    assert!(lines[5..].iter().all(|l| l.contains(" Q0 ")), "{out}");
    assert!(lines[0].starts_with("# expansion magma "), "{out}");
}

#[test]
fn search_with_oov_query_falls_back() {
    let (dir, b) = bundle();
    let o = idfawe(dir.path(), &["search", "-c", b.config.to_str().unwrap(), "--variant", "idf-awe-vs", "zzzz"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("falling back to BM25"), "{}", stderr(&o));
}

#[test]
fn unknown_variant_lists_valid_names() {
    let (dir, b) = bundle();
    let o = idfawe(dir.path(), &["search", "-c", b.config.to_str().unwrap(), "--variant", "rocchio", "x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("idf-awe-vs+aqe-idf-cent-plus"));
}

#[test]
fn config_from_environment() {
    let (dir, b) = bundle();
    let o = Command::new(env!("CARGO_BIN_EXE_idfawe"))
        .current_dir(dir.path())
        .env("IDFAWE_CONFIG", &b.config)
        .args(["search", "--variant", "bm25", "volcano"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!o.stdout.is_empty());
}

#[test]
fn experiment_writes_runs_reports_and_manifest() {
    let (dir, b) = bundle();
    let o = idfawe(dir.path(), &["run-experiment", "-c", b.config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let runs = dir.path().join("runs");
    let run_files: Vec<_> = fs::read_dir(&runs)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "run"))
        .collect();
    assert_eq!(run_files.len(), 1);
    let report = fs::read_to_string(runs.join("idfawe-idf-awe-vs+aqe-idf-cent-plus-a0.3.eval.txt")).unwrap();
    let rows = report.lines().filter(|l| l.starts_with("30")).count();
    assert_eq!(rows, 3, "{report}");

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(runs.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["settings"]["terms"], "5");
    assert_eq!(manifest["runs"][0]["evaluated"], 3);
    assert_eq!(manifest["index"]["documents"], 100);
}

#[test]
fn alpha_sweep_tags_each_run() {
    let (dir, b) = bundle();
    let o = idfawe(
        dir.path(),
        &["run-experiment", "-c", b.config.to_str().unwrap(), "--alpha", "0.0,0.3,1.0", "--variant", "aqe-cent,bm25"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let runs = dir.path().join("runs");
    for tag in ["idfawe-aqe-cent-a0", "idfawe-aqe-cent-a0.3", "idfawe-aqe-cent-a1", "idfawe-bm25"] {
        let text = fs::read_to_string(runs.join(format!("{tag}.run"))).unwrap();
        assert!(text.lines().all(|l| l.ends_with(&format!(" {tag}"))), "{tag}");
    }
}

#[test]
fn missing_embeddings_stop_before_any_query() {
    let (dir, b) = bundle();
    let o = idfawe(
        dir.path(),
        &["run-experiment", "-c", b.config.to_str().unwrap(), "--set", "embeddings=", "--variant", "awe-vs"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(!dir.path().join("runs").exists());
}

#[test]
fn written_runs_reevaluate_to_the_same_report() {
    let (dir, b) = bundle();
    let o = idfawe(
        dir.path(),
        &["run-experiment", "-c", b.config.to_str().unwrap(), "--variant", "bm25,idf-awe-vs+aqe-cent"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let qrels = parse_qrels(fs::File::open(&b.qrels).unwrap()).unwrap().items;
    for tag in ["idfawe-bm25", "idfawe-idf-awe-vs+aqe-cent-a0.3"] {
        let runs = dir.path().join("runs");
        let text = fs::read_to_string(runs.join(format!("{tag}.run"))).unwrap();
        let run = read_run(text.as_bytes()).unwrap();
        let report = evaluate_run(&run, &qrels, 10);
        assert_eq!(report.to_csv(), fs::read_to_string(runs.join(format!("{tag}.eval.csv"))).unwrap());
        let mut again = Vec::new();
        idfawe_core::eval::write_run(&run, &mut again).unwrap();
        assert_eq!(String::from_utf8(again).unwrap(), text);
    }
}

#[test]
fn evaluate_command() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    fs::write(p.join("ap.run"), "101 Q0 d1 1 3.0 t\n101 Q0 d2 2 2.0 t\n101 Q0 d3 3 1.0 t\n").unwrap();
    fs::write(p.join("qrels"), "101 0 d1 1\n101 0 d3 1\n101 0 d2 0\n").unwrap();
    let o = idfawe(p, &["evaluate", "ap.run", "qrels"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let row = out.lines().find(|l| l.starts_with("101")).unwrap();
    assert_eq!(row.split_whitespace().nth(1), Some("0.8333"), "{out}");

    fs::write(p.join("empty.run"), "").unwrap();
    let o = idfawe(p, &["evaluate", "empty.run", "qrels"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("evaluated 0"));

    fs::write(p.join("bad.qrels"), "101 0 d1 1\n101 0 d2\n").unwrap();
    let o = idfawe(p, &["evaluate", "ap.run", "bad.qrels"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));

    let o = idfawe(p, &["evaluate", "ap.run", "qrels", "--csv"]);
    assert!(stdout(&o).starts_with("qid,map@10,r@10,ndcg@10\n"));
}
