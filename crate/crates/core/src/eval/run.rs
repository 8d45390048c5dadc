use std::io::{BufRead, BufReader, Read, Write};

use crate::rank::{RankedList, ScoredDoc};
use crate::{Error, Result};

/// One query's ranking as it appears in a run file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunQuery {
    pub qid: String,
    pub entries: Vec<ScoredDoc>,
}

/// Rankings for a set of queries under a single run tag, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunFile {
    pub tag: String,
    pub queries: Vec<RunQuery>,
}

impl RunFile {
    pub fn new(tag: impl Into<String>) -> Self {
        Self {
            tag: tag.into(),
            queries: Vec::new(),
        }
    }

    pub fn push(&mut self, qid: impl Into<String>, ranking: RankedList) {
        self.queries.push(RunQuery {
            qid: qid.into(),
            entries: ranking.into_entries(),
        });
    }

    pub fn get(&self, qid: &str) -> Option<&RunQuery> {
        self.queries.iter().find(|q| q.qid == qid)
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// The same run with every score rounded as [`write_run`] prints it.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        for q in &mut out.queries {
            for e in &mut q.entries {
                e.score = format!("{:.6}", e.score).parse().expect("formatted float parses");
            }
        }
        out
    }
}

/// Writes `qid Q0 doc_id rank score tag` lines, scores with six decimals.
pub fn write_run<W: Write>(run: &RunFile, mut out: W) -> Result<()> {
    for q in &run.queries {
        for (i, e) in q.entries.iter().enumerate() {
            writeln!(out, "{} Q0 {} {} {:.6} {}", q.qid, e.doc_id, i + 1, e.score, run.tag)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a run file. Each query's lines must be contiguous, ranked
/// 1..n without gaps, with non-increasing scores and one shared tag.
pub fn read_run<R: Read>(input: R) -> Result<RunFile> {
    let mut run: Option<RunFile> = None;
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fail = |message: String| Error::RunLine { line: i + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [qid, _q0, doc_id, rank, score, tag] = fields.as_slice() else {
            return Err(fail(format!("expected 6 fields, found {}", fields.len())));
        };
        let rank: usize = rank.parse().map_err(|_| fail(format!("rank `{rank}` is not a positive integer")))?;
        let score: f64 = match score.parse::<f64>() {
            Ok(s) if s.is_finite() => s,
            _ => return Err(fail(format!("score `{score}` is not a finite number"))),
        };
        let run = run.get_or_insert_with(|| RunFile::new(*tag));
        if run.tag != *tag {
            return Err(fail(format!("tag `{tag}` differs from `{}`", run.tag)));
        }
        let continues = run.queries.last().is_some_and(|q| q.qid == *qid);
        if !continues {
            if run.get(qid).is_some() {
                return Err(fail(format!("lines for query {qid} are not contiguous")));
            }
            run.queries.push(RunQuery {
                qid: qid.to_string(),
                entries: Vec::new(),
            });
        }
        let q = run.queries.last_mut().expect("pushed above");
        if rank != q.entries.len() + 1 {
            return Err(fail(format!("expected rank {}, found {rank}", q.entries.len() + 1)));
        }
        if q.entries.last().is_some_and(|prev| score > prev.score) {
            return Err(fail(format!("score {score} increases within query {qid}")));
        }
        q.entries.push(ScoredDoc::new(*doc_id, score));
    }
    Ok(run.unwrap_or_else(|| RunFile::new("")))
}
