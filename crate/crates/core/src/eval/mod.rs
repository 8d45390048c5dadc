//! Rank-cut effectiveness metrics and per-run evaluation reports.
//!
//! The metrics follow trec_eval: average precision at k divides by the
//! total number of relevant documents, and queries with no relevant
//! judgments are excluded rather than scored zero.

mod run;

pub use run::{read_run, write_run, RunFile, RunQuery};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::corpus::QrelSet;

pub const DEFAULT_CUTOFF: usize = 10;

/// Average precision over the top `k`, or `None` when `relevant` is empty.
pub fn average_precision_at_k<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<&str>, k: usize) -> Option<f64> {
    if relevant.is_empty() {
        return None;
    }
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (i, doc) in ranked.iter().take(k).enumerate() {
        if relevant.contains(doc.as_ref()) {
            hits += 1;
            sum += hits as f64 / (i + 1) as f64;
        }
    }
    Some(sum / relevant.len() as f64)
}

/// Fraction of `relevant` found in the top `k`, or `None` when `relevant` is empty.
pub fn recall_at_k<S: AsRef<str>>(ranked: &[S], relevant: &BTreeSet<&str>, k: usize) -> Option<f64> {
    if relevant.is_empty() {
        return None;
    }
    let found = ranked
        .iter()
        .take(k)
        .filter(|d| relevant.contains(d.as_ref()))
        .count();
    Some(found as f64 / relevant.len() as f64)
}

fn discount(rank: usize) -> f64 {
    1.0 / ((rank + 1) as f64).log2()
}

/// NDCG with gain equal to the grade and a `1/log2(rank+1)` discount, or
/// `None` when no document has a positive grade.
pub fn ndcg_at_k<S: AsRef<str>>(ranked: &[S], grades: &BTreeMap<String, u32>, k: usize) -> Option<f64> {
    let mut ideal: Vec<u32> = grades.values().copied().filter(|&g| g > 0).collect();
    if ideal.is_empty() {
        return None;
    }
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &g)| g as f64 * discount(i + 1))
        .sum();
    let dcg: f64 = ranked
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, d)| grades.get(d.as_ref()).copied().unwrap_or(0) as f64 * discount(i + 1))
        .sum();
    Some(dcg / idcg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryMetrics {
    pub qid: String,
    pub map: f64,
    pub recall: f64,
    pub ndcg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub cutoff: usize,
    pub queries: Vec<QueryMetrics>,
    /// Run queries without any positive judgment.
    pub excluded: Vec<String>,
}

impl EvalReport {
    pub fn evaluated(&self) -> usize {
        self.queries.len()
    }

    fn mean(&self, f: impl Fn(&QueryMetrics) -> f64) -> f64 {
        if self.queries.is_empty() {
            return 0.0;
        }
        self.queries.iter().map(f).sum::<f64>() / self.queries.len() as f64
    }

    pub fn mean_map(&self) -> f64 {
        self.mean(|q| q.map)
    }

    pub fn mean_recall(&self) -> f64 {
        self.mean(|q| q.recall)
    }

    pub fn mean_ndcg(&self) -> f64 {
        self.mean(|q| q.ndcg)
    }

    fn headers(&self) -> [String; 4] {
        let k = self.cutoff;
        ["qid".into(), format!("map@{k}"), format!("r@{k}"), format!("ndcg@{k}")]
    }

    /// Aligned table with one row per query, a mean row and query counts.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<[String; 4]> = vec![self.headers()];
        let fmt = |qid: &str, m: f64, r: f64, n: f64| {
            [qid.to_string(), format!("{m:.4}"), format!("{r:.4}"), format!("{n:.4}")]
        };
        for q in &self.queries {
            rows.push(fmt(&q.qid, q.map, q.recall, q.ndcg));
        }
        rows.push(fmt("all", self.mean_map(), self.mean_recall(), self.mean_ndcg()));
        let width = rows.iter().map(|r| r[0].len()).max().unwrap_or(3);
        let mut out = String::new();
        for r in &rows {
            let _ = writeln!(out, "{:<width$}  {:>8}  {:>8}  {:>8}", r[0], r[1], r[2], r[3]);
        }
        let _ = writeln!(out, "evaluated {}  excluded {}", self.evaluated(), self.excluded.len());
        for qid in &self.excluded {
            let _ = writeln!(out, "excluded {qid}: no relevant judgments");
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.headers().join(",");
        out.push('\n');
        for q in &self.queries {
            let _ = writeln!(out, "{},{:.6},{:.6},{:.6}", q.qid, q.map, q.recall, q.ndcg);
        }
        let _ = writeln!(
            out,
            "all,{:.6},{:.6},{:.6}",
            self.mean_map(),
            self.mean_recall(),
            self.mean_ndcg()
        );
        out
    }
}

/// Scores every run query that has at least one relevant judgment.
/// Unjudged documents count as non-relevant.
pub fn evaluate_run(run: &RunFile, qrels: &QrelSet, k: usize) -> EvalReport {
    let mut queries = Vec::new();
    let mut excluded = Vec::new();
    for q in &run.queries {
        let ranked: Vec<&str> = q.entries.iter().map(|e| e.doc_id.as_str()).collect();
        let relevant = qrels.relevant(&q.qid);
        let empty = BTreeMap::new();
        let grades = qrels.for_query(&q.qid).unwrap_or(&empty);
        match (
            average_precision_at_k(&ranked, &relevant, k),
            recall_at_k(&ranked, &relevant, k),
            ndcg_at_k(&ranked, grades, k),
        ) {
            (Some(map), Some(recall), Some(ndcg)) => queries.push(QueryMetrics {
                qid: q.qid.clone(),
                map,
                recall,
                ndcg,
            }),
            _ => excluded.push(q.qid.clone()),
        }
    }
    EvalReport {
        cutoff: k,
        queries,
        excluded,
    }
}
