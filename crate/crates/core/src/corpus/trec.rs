//! Readers for TREC collection, topic and qrels files.
//!
//! Malformed records never abort a parse: they are skipped and reported in
//! [`ParseReport::errors`] so the caller can decide whether to fail.

use std::fmt;
use std::io::Read;

use super::{Analyzer, QrelSet, Query, RawDocument};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Byte(usize),
    Line(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    pub location: Location,
    pub message: String,
}

impl fmt::Display for RecordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Location::Byte(offset) => write!(f, "byte {offset}: {}", self.message),
            Location::Line(line) => write!(f, "line {line}: {}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseReport<T> {
    pub items: T,
    pub errors: Vec<RecordError>,
}

fn read_all(mut stream: impl Read) -> Result<String> {
    let mut bytes = Vec::new();
    stream.read_to_end(&mut bytes)?;
    Ok(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => String::from_utf8_lossy(e.as_bytes()).into_owned(),
    })
}

/// Byte ranges of `<tag>...</tag>` records. ASCII lowercasing keeps byte
/// offsets aligned with the original text.
struct Records<'a> {
    lower: &'a str,
    open: String,
    close: String,
    pos: usize,
}

enum Record {
    Body { start: usize, body: (usize, usize) },
    Unterminated { start: usize },
}

impl<'a> Records<'a> {
    fn new(lower: &'a str, tag: &str) -> Self {
        Self {
            lower,
            open: format!("<{tag}>"),
            close: format!("</{tag}>"),
            pos: 0,
        }
    }
}

impl Iterator for Records<'_> {
    type Item = Record;

    fn next(&mut self) -> Option<Record> {
        let start = self.pos + self.lower[self.pos..].find(&self.open)?;
        let body_start = start + self.open.len();
        let rest = &self.lower[body_start..];
        let next_open = rest.find(&self.open).map(|i| body_start + i);
        let close = rest.find(&self.close).map(|i| body_start + i);
        match close {
            Some(c) if next_open.is_none_or(|o| c < o) => {
                self.pos = c + self.close.len();
                Some(Record::Body {
                    start,
                    body: (body_start, c),
                })
            }
            _ => {
                self.pos = next_open.unwrap_or(self.lower.len());
                Some(Record::Unterminated { start })
            }
        }
    }
}

/// Content of every balanced `<tag>...</tag>` section inside `range`.
fn sections<'t>(
    text: &'t str,
    lower: &str,
    range: (usize, usize),
    tag: &str,
) -> Result<Vec<&'t str>, String> {
    let open = format!("<{tag}>");
    let close = format!("</{tag}>");
    let mut out = Vec::new();
    let mut pos = range.0;
    while let Some(i) = lower[pos..range.1].find(&open) {
        let content_start = pos + i + open.len();
        let Some(j) = lower[content_start..range.1].find(&close) else {
            return Err(format!("unbalanced <{}>", tag.to_uppercase()));
        };
        out.push(&text[content_start..content_start + j]);
        pos = content_start + j + close.len();
    }
    Ok(out)
}

/// Parses concatenated `<DOC>` records. Each record needs a `<DOCNO>`; its
/// `<TEXT>` sections are joined with newlines.
pub fn parse_trec_documents(stream: impl Read) -> Result<ParseReport<Vec<RawDocument>>> {
    let text = read_all(stream)?;
    let lower = text.to_ascii_lowercase();
    let mut report = ParseReport {
        items: Vec::new(),
        errors: Vec::new(),
    };

    for record in Records::new(&lower, "doc") {
        let (start, body) = match record {
            Record::Body { start, body } => (start, body),
            Record::Unterminated { start } => {
                report.errors.push(RecordError {
                    location: Location::Byte(start),
                    message: "<DOC> without matching </DOC>".into(),
                });
                continue;
            }
        };
        let fail = |message: String| RecordError {
            location: Location::Byte(start),
            message,
        };
        let doc = sections(&text, &lower, body, "docno")
            .and_then(|docnos| match docnos.as_slice() {
                [id] if !id.trim().is_empty() => Ok(id.trim().to_string()),
                [] | [_] => Err("missing DOCNO".to_string()),
                _ => Err("more than one DOCNO".to_string()),
            })
            .and_then(|doc_id| {
                let texts = sections(&text, &lower, body, "text")?;
                Ok(RawDocument {
                    doc_id,
                    text: texts.join("\n"),
                })
            });
        match doc {
            Ok(doc) => report.items.push(doc),
            Err(message) => report.errors.push(fail(message)),
        }
    }
    Ok(report)
}

/// Field value of an SGML-ish topic field. Topic files often leave fields
/// unclosed, so the value runs to the next tag either way.
fn topic_field<'t>(text: &'t str, lower: &str, range: (usize, usize), tag: &str) -> Option<&'t str> {
    let open = format!("<{tag}>");
    let start = range.0 + lower[range.0..range.1].find(&open)? + open.len();
    let end = lower[start..range.1]
        .find('<')
        .map_or(range.1, |i| start + i);
    Some(&text[start..end])
}

fn strip_label<'t>(value: &'t str, label: &str) -> &'t str {
    let value = value.trim();
    match value.get(..label.len()) {
        Some(head) if head.eq_ignore_ascii_case(label) => value[label.len()..].trim(),
        _ => value,
    }
}

/// Parses `<top>` records into analyzed queries, using only the title field.
/// Leading zeros in numeric query ids are dropped so ids match qrels files.
pub fn parse_topics(stream: impl Read, analyzer: &Analyzer) -> Result<ParseReport<Vec<Query>>> {
    let text = read_all(stream)?;
    let lower = text.to_ascii_lowercase();
    let mut report = ParseReport {
        items: Vec::new(),
        errors: Vec::new(),
    };

    for record in Records::new(&lower, "top") {
        let (start, body) = match record {
            Record::Body { start, body } => (start, body),
            Record::Unterminated { start } => {
                report.errors.push(RecordError {
                    location: Location::Byte(start),
                    message: "<top> without matching </top>".into(),
                });
                continue;
            }
        };
        let num = topic_field(&text, &lower, body, "num").map(|v| strip_label(v, "number:"));
        let title = topic_field(&text, &lower, body, "title").map(|v| strip_label(v, "topic:"));
        match (num, title) {
            (Some(num), Some(title)) if !num.is_empty() => {
                let qid = match num.parse::<u64>() {
                    Ok(n) => n.to_string(),
                    Err(_) => num.to_string(),
                };
                report.items.push(Query::new(qid, analyzer.analyze(title)));
            }
            (num, _) => report.errors.push(RecordError {
                location: Location::Byte(start),
                message: if num.is_none_or(str::is_empty) {
                    "missing <num>".into()
                } else {
                    "missing <title>".into()
                },
            }),
        }
    }
    Ok(report)
}

/// Parses `qid iteration doc_id grade` lines. Later lines overwrite earlier
/// grades for the same pair; bad lines are skipped and reported.
pub fn parse_qrels(stream: impl Read) -> Result<ParseReport<QrelSet>> {
    let text = read_all(stream)?;
    let mut report = ParseReport {
        items: QrelSet::new(),
        errors: Vec::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let fail = |message: String| RecordError {
            location: Location::Line(i + 1),
            message,
        };
        match fields.as_slice() {
            [qid, _iter, doc_id, grade] => match grade.parse::<u32>() {
                Ok(g) => report.items.insert(*qid, *doc_id, g),
                Err(_) => report
                    .errors
                    .push(fail(format!("grade `{grade}` is not a non-negative integer"))),
            },
            _ => report.errors.push(fail(format!(
                "expected 4 fields `qid iter doc_id grade`, found {}",
                fields.len()
            ))),
        }
    }
    Ok(report)
}
