use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use idfawe_core::corpus::{parse_qrels, parse_topics, parse_trec_documents};
use idfawe_core::embeddings::{load_vectors_ordered, ContextualFile, ContextualProvider};
use idfawe_core::eval::{evaluate_run, read_run, write_run, EvalReport, RunFile};
use idfawe_core::expansion::{run_variant, Fallback, Resources, Variant};
use idfawe_core::index::{load_index, save_index};
use idfawe_core::{Alpha, Analyzer, EmbeddingStore, InvertedIndex, QrelSet, Query, RawDocument};
use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{EngineConfig, UsageError};

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(file))
}

/// Reads a TREC document file, or every file of a directory in name order.
pub fn read_corpus(path: &Path) -> anyhow::Result<Vec<RawDocument>> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut entries = fs::read_dir(path)?
            .map(|e| e.map(|e| e.path()))
            .collect::<Result<Vec<_>, _>>()?;
        entries.retain(|p| p.is_file());
        entries.sort();
        entries
    } else {
        vec![path.to_path_buf()]
    };
    let mut docs = Vec::new();
    for file in files {
        let report = parse_trec_documents(open(&file)?)?;
        for e in &report.errors {
            warn!("{}: skipped record at {e}", file.display());
        }
        if !report.errors.is_empty() {
            eprintln!("warning: {}: skipped {} malformed record(s)", file.display(), report.errors.len());
        }
        docs.extend(report.items);
    }
    Ok(docs)
}

pub fn build_index(config: &EngineConfig, analyzer: &Analyzer) -> anyhow::Result<InvertedIndex> {
    let corpus = config.require("corpus", &config.corpus)?;
    let docs = read_corpus(corpus)?;
    let tokenized: Vec<_> = docs.iter().map(|d| analyzer.analyze_document(d)).collect();
    Ok(InvertedIndex::build(&tokenized)?)
}

/// Loads the configured index file, or builds one in memory from the corpus.
pub fn obtain_index(config: &EngineConfig, analyzer: &Analyzer) -> anyhow::Result<InvertedIndex> {
    match &config.index {
        Some(path) if path.exists() => {
            load_index(path).with_context(|| format!("cannot load index {}", path.display()))
        }
        _ if config.corpus.is_some() => build_index(config, analyzer),
        Some(path) => Err(UsageError(format!("index path {} does not exist", path.display())).into()),
        None => Err(UsageError("neither `index` nor `corpus` is configured".into()).into()),
    }
}

/// Static vectors keyed by analyzed term; the first surface form wins.
pub fn load_embeddings(config: &EngineConfig, analyzer: &Analyzer) -> anyhow::Result<Option<EmbeddingStore>> {
    let Some(path) = config.optional("embeddings", &config.embeddings)? else {
        return Ok(None);
    };
    let (store, order) = load_vectors_ordered(open(path)?)
        .with_context(|| format!("cannot load embeddings {}", path.display()))?;
    Ok(Some(store.normalized_with(&order, |word| {
        let mut terms = analyzer.analyze(word);
        (terms.len() == 1).then(|| terms.remove(0))
    })))
}

pub fn load_contextual(config: &EngineConfig) -> anyhow::Result<Option<ContextualFile>> {
    let Some(path) = config.optional("contextual", &config.contextual)? else {
        return Ok(None);
    };
    let file = ContextualFile::load(open(path)?)
        .with_context(|| format!("cannot load contextual vectors {}", path.display()))?;
    Ok(Some(file))
}

/// Parses qrels, treating any malformed line as a data error.
pub fn read_qrels(path: &Path) -> anyhow::Result<QrelSet> {
    let report = parse_qrels(open(path)?)?;
    if let Some(e) = report.errors.first() {
        bail!("{}: {e}", path.display());
    }
    Ok(report.items)
}

pub fn read_topics(path: &Path, analyzer: &Analyzer) -> anyhow::Result<Vec<Query>> {
    let report = parse_topics(open(path)?, analyzer)?;
    for e in &report.errors {
        eprintln!("warning: {}: skipped topic at {e}", path.display());
    }
    Ok(report.items)
}

struct Loaded {
    index: InvertedIndex,
    store: Option<EmbeddingStore>,
    provider: Option<ContextualFile>,
    analyzer: Analyzer,
}

impl Loaded {
    fn load(config: &EngineConfig) -> anyhow::Result<Self> {
        let analyzer = config.analyzer()?;
        let needs_vectors = config.variants.iter().any(|v| v.needs_embeddings());
        if needs_vectors && config.embeddings.is_none() && config.contextual.is_none() {
            let names: Vec<&str> = config
                .variants
                .iter()
                .filter(|v| v.needs_embeddings())
                .map(|v| v.name())
                .collect();
            return Err(UsageError(format!("`embeddings` is required by {}", names.join(", "))).into());
        }
        let store = if needs_vectors { load_embeddings(config, &analyzer)? } else { None };
        let provider = if needs_vectors { load_contextual(config)? } else { None };
        let index = obtain_index(config, &analyzer)?;
        Ok(Self {
            index,
            store,
            provider,
            analyzer,
        })
    }

    fn resources(&self) -> Resources<'_> {
        Resources {
            index: &self.index,
            store: self.store.as_ref(),
            provider: self.provider.as_ref().map(|p| p as &dyn ContextualProvider),
            stoplist: self.analyzer.stoplist(),
        }
    }
}

pub fn cmd_build_index(config: &EngineConfig, out: &mut dyn Write) -> anyhow::Result<()> {
    config.validate()?;
    let analyzer = config.analyzer()?;
    let path = config
        .index
        .as_deref()
        .ok_or_else(|| UsageError("`index` output path is not configured".into()))?;
    let index = build_index(config, &analyzer)?;
    save_index(&index, path).with_context(|| format!("cannot write index {}", path.display()))?;
    writeln!(
        out,
        "N={} avgdl={:.4} vocabulary={}",
        index.num_docs(),
        index.avgdl(),
        index.vocabulary_size()
    )?;
    Ok(())
}

pub fn cmd_search(config: &EngineConfig, text: &str, qid: &str, limit: usize, out: &mut dyn Write) -> anyhow::Result<()> {
    config.validate()?;
    let variant = config.variants[0];
    let mut config = config.clone();
    config.variants = vec![variant];
    let alpha = config.alpha_values()?[0];
    let loaded = Loaded::load(&config)?;
    let query = Query::new(qid, loaded.analyzer.analyze(text));
    if query.is_degenerate() {
        eprintln!("warning: query is empty after preprocessing");
        return Ok(());
    }
    let outcome = run_variant(&config.variant_config(variant, alpha)?, &query, loaded.resources())?;
    match &outcome.fallback {
        Some(Fallback::Bm25(reason)) => eprintln!("warning: {reason}; falling back to BM25"),
        Some(Fallback::NoExpansion) => eprintln!("warning: no expansion terms found"),
        None => {}
    }
    if let Some(expansion) = &outcome.expansion {
        for (term, score) in &expansion.terms {
            writeln!(out, "# expansion {term} {score:.6}")?;
        }
    }
    let mut ranking = outcome.ranking;
    ranking.truncate(limit);
    let mut run = RunFile::new(&config.tag);
    run.push(qid, ranking);
    write_run(&run, out)?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct QueryNote {
    qid: String,
    message: String,
}

#[derive(Debug, Serialize)]
struct RunSummary {
    tag: String,
    variant: String,
    alpha: Option<f64>,
    run_file: String,
    report_file: String,
    evaluated: usize,
    excluded: Vec<String>,
    map: f64,
    recall: f64,
    ndcg: f64,
    failures: Vec<QueryNote>,
    fallbacks: Vec<QueryNote>,
}

#[derive(Debug, Serialize)]
struct IndexSummary {
    documents: usize,
    avgdl: f64,
    vocabulary: usize,
}

#[derive(Debug, Serialize)]
struct Manifest {
    settings: std::collections::BTreeMap<&'static str, String>,
    index: IndexSummary,
    queries: usize,
    degenerate_queries: Vec<String>,
    runs: Vec<RunSummary>,
}

/// Tag of one run: the configured prefix, the variant and, for expanding
/// variants, the α value.
pub fn run_tag(prefix: &str, variant: Variant, alpha: Option<Alpha>) -> String {
    match alpha {
        Some(a) => format!("{prefix}-{}-a{}", variant.name(), a.get()),
        None => format!("{prefix}-{}", variant.name()),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

pub fn cmd_run_experiment(config: &EngineConfig, out: &mut dyn Write) -> anyhow::Result<()> {
    config.validate()?;
    let topics_path = config.require("topics", &config.topics)?;
    let qrels_path = config.require("qrels", &config.qrels)?;
    let output = config
        .output
        .as_deref()
        .ok_or_else(|| UsageError("`output` directory is not configured".into()))?;
    let loaded = Loaded::load(config)?;
    let queries = read_topics(topics_path, &loaded.analyzer)?;
    let qrels = read_qrels(qrels_path)?;
    fs::create_dir_all(output).with_context(|| format!("cannot create {}", output.display()))?;

    let (queries, degenerate): (Vec<Query>, Vec<Query>) = queries.into_iter().partition(|q| !q.is_degenerate());
    for q in &degenerate {
        eprintln!("warning: topic {} is empty after preprocessing and is not evaluated", q.qid);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .context("cannot start worker pool")?;
    let resources = loaded.resources();

    let mut runs = Vec::new();
    for &variant in &config.variants {
        let alphas: Vec<Option<Alpha>> = if variant.expands() {
            config.alpha_values()?.into_iter().map(Some).collect()
        } else {
            vec![None]
        };
        for alpha in alphas {
            let vc = config.variant_config(variant, alpha.unwrap_or_default())?;
            let tag = run_tag(&config.tag, variant, alpha);
            info!("running {tag} over {} queries", queries.len());
            let results: Vec<_> =
                pool.install(|| queries.par_iter().map(|q| run_variant(&vc, q, resources)).collect());

            let mut run = RunFile::new(&tag);
            let mut failures = Vec::new();
            let mut fallbacks = Vec::new();
            for (q, result) in queries.iter().zip(results) {
                match result {
                    Ok(outcome) => {
                        if let Some(f) = outcome.fallback {
                            let message = match f {
                                Fallback::Bm25(reason) => format!("bm25 fallback: {reason}"),
                                Fallback::NoExpansion => "no expansion terms".into(),
                            };
                            fallbacks.push(QueryNote { qid: q.qid.clone(), message });
                        }
                        run.push(q.qid.clone(), outcome.ranking);
                    }
                    Err(e) => {
                        eprintln!("warning: {tag}: query {} failed: {e}", q.qid);
                        failures.push(QueryNote { qid: q.qid.clone(), message: e.to_string() });
                    }
                }
            }

            let run_path = output.join(format!("{tag}.run"));
            let mut buf = Vec::new();
            write_run(&run, &mut buf)?;
            write_file(&run_path, &buf)?;
            let written = read_run(buf.as_slice())?;
            let report = evaluate_run(&written, &qrels, config.cutoff);
            let report_path = output.join(format!("{tag}.eval.txt"));
            write_file(&report_path, report.to_text().as_bytes())?;
            write_file(&output.join(format!("{tag}.eval.csv")), report.to_csv().as_bytes())?;
            print_summary(out, &tag, &report)?;
            runs.push(RunSummary {
                tag,
                variant: variant.name().into(),
                alpha: alpha.map(Alpha::get),
                run_file: file_name(&run_path),
                report_file: file_name(&report_path),
                evaluated: report.evaluated(),
                excluded: report.excluded.clone(),
                map: report.mean_map(),
                recall: report.mean_recall(),
                ndcg: report.mean_ndcg(),
                failures,
                fallbacks,
            });
        }
    }

    let manifest = Manifest {
        settings: config.settings(),
        index: IndexSummary {
            documents: loaded.index.num_docs(),
            avgdl: loaded.index.avgdl(),
            vocabulary: loaded.index.vocabulary_size(),
        },
        queries: queries.len(),
        degenerate_queries: degenerate.into_iter().map(|q| q.qid).collect(),
        runs,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write_file(&output.join("manifest.json"), json.as_bytes())?;
    Ok(())
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

fn print_summary(out: &mut dyn Write, tag: &str, report: &EvalReport) -> anyhow::Result<()> {
    let k = report.cutoff;
    writeln!(
        out,
        "{tag}: map@{k} {:.4} r@{k} {:.4} ndcg@{k} {:.4} evaluated {}",
        report.mean_map(),
        report.mean_recall(),
        report.mean_ndcg(),
        report.evaluated()
    )?;
    Ok(())
}

pub fn cmd_evaluate(run_path: &Path, qrels_path: &Path, cutoff: usize, csv: bool, out: &mut dyn Write) -> anyhow::Result<()> {
    if cutoff == 0 {
        bail!(UsageError("cutoff must be at least 1".into()));
    }
    for (key, path) in [("run", run_path), ("qrels", qrels_path)] {
        if !path.exists() {
            bail!(UsageError(format!("{key} path {} does not exist", path.display())));
        }
    }
    let run = read_run(open(run_path)?).with_context(|| format!("{}", run_path.display()))?;
    let qrels = read_qrels(qrels_path)?;
    let report = evaluate_run(&run, &qrels, cutoff);
    let text = if csv { report.to_csv() } else { report.to_text() };
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// Writes to stdout through a buffer that is flushed before returning.
pub fn with_stdout<T>(f: impl FnOnce(&mut dyn Write) -> anyhow::Result<T>) -> anyhow::Result<T> {
    let stdout = std::io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let value = f(&mut out)?;
    out.flush()?;
    Ok(value)
}
