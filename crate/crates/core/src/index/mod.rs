//! Inverted index with the corpus statistics behind IDF and BM25.

mod io;

use std::collections::HashMap;

pub use self::io::{decode, encode, load_index, save_index, FORMAT_VERSION, MAGIC};
use crate::corpus::TokenizedDocument;
use crate::{Error, Result};

/// Internal document number, assigned in input order.
pub type DocOrdinal = u32;
pub type TermId = u32;

/// Floor applied to the `bm25` IDF variant.
pub const IDF_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    pub doc: DocOrdinal,
    pub tf: u32,
}

/// Borrowed view of one term's postings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PostingList<'a> {
    pub term: &'a str,
    pub postings: &'a [Posting],
}

impl PostingList<'_> {
    /// Document frequency.
    pub fn df(&self) -> usize {
        self.postings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.postings.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdfVariant {
    /// `max(ε, ln((N − n + 0.5) / (n + 0.5)))`
    #[default]
    Bm25,
    /// `ln((N − n + 0.5) / (N + 0.5))`, non-positive everywhere.
    PaperLiteral,
}

impl IdfVariant {
    pub fn name(self) -> &'static str {
        match self {
            IdfVariant::Bm25 => "bm25",
            IdfVariant::PaperLiteral => "paper-literal",
        }
    }
}

impl std::str::FromStr for IdfVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bm25" => Ok(IdfVariant::Bm25),
            "paper-literal" => Ok(IdfVariant::PaperLiteral),
            other => Err(Error::Config(format!(
                "unknown idf variant `{other}` (expected bm25 or paper-literal)"
            ))),
        }
    }
}

/// IDF from raw counts: `n_docs` is N, `df` is n(w). Natural logarithm.
pub fn idf_from_counts(n_docs: usize, df: usize, variant: IdfVariant) -> f64 {
    let n = n_docs as f64;
    let df = df as f64;
    match variant {
        IdfVariant::Bm25 => ((n - df + 0.5) / (df + 0.5)).ln().max(IDF_FLOOR),
        IdfVariant::PaperLiteral => ((n - df + 0.5) / (n + 0.5)).ln(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct DocEntry {
    pub(crate) doc_id: String,
    pub(crate) length: u32,
}

type Parts<'a> = (&'a [DocEntry], &'a [String], &'a [Vec<Posting>], &'a [Vec<TermId>]);

/// Immutable inverted index. Besides postings it keeps each document's
/// term sequence so local-corpus mining and context windows do not need
/// the original collection.
#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    docs: Vec<DocEntry>,
    avgdl: f64,
    /// Sorted vocabulary; a term's id is its position.
    terms: Vec<String>,
    postings: Vec<Vec<Posting>>,
    forward: Vec<Vec<TermId>>,
    term_ids: HashMap<String, TermId>,
    doc_ordinals: HashMap<String, DocOrdinal>,
}

impl InvertedIndex {
    /// Builds the index. Ordinals follow input order.
    pub fn build<'a, I>(docs: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a TokenizedDocument>,
    {
        let docs: Vec<&TokenizedDocument> = docs.into_iter().collect();
        let mut doc_ordinals = HashMap::with_capacity(docs.len());
        for (i, doc) in docs.iter().enumerate() {
            if doc_ordinals.insert(doc.doc_id.clone(), i as DocOrdinal).is_some() {
                return Err(Error::DuplicateDocId(doc.doc_id.clone()));
            }
        }

        let mut terms: Vec<String> = docs
            .iter()
            .flat_map(|d| d.tokens.iter().cloned())
            .collect();
        terms.sort_unstable();
        terms.dedup();
        let term_ids: HashMap<String, TermId> = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as TermId))
            .collect();

        let mut postings = vec![Vec::new(); terms.len()];
        let mut forward = Vec::with_capacity(docs.len());
        let mut counts: HashMap<TermId, u32> = HashMap::new();
        for (ord, doc) in docs.iter().enumerate() {
            let ids: Vec<TermId> = doc.tokens.iter().map(|t| term_ids[t]).collect();
            counts.clear();
            for &id in &ids {
                *counts.entry(id).or_insert(0) += 1;
            }
            for (&id, &tf) in &counts {
                postings[id as usize].push(Posting {
                    doc: ord as DocOrdinal,
                    tf,
                });
            }
            forward.push(ids);
        }

        let entries: Vec<DocEntry> = docs
            .iter()
            .map(|d| DocEntry {
                doc_id: d.doc_id.clone(),
                length: d.tokens.len() as u32,
            })
            .collect();
        Ok(Self::from_parts(entries, terms, postings, forward))
    }

    pub(crate) fn from_parts(
        docs: Vec<DocEntry>,
        terms: Vec<String>,
        postings: Vec<Vec<Posting>>,
        forward: Vec<Vec<TermId>>,
    ) -> Self {
        let total: u64 = docs.iter().map(|d| d.length as u64).sum();
        let avgdl = if docs.is_empty() {
            0.0
        } else {
            total as f64 / docs.len() as f64
        };
        let term_ids = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as TermId))
            .collect();
        let doc_ordinals = docs
            .iter()
            .enumerate()
            .map(|(i, d)| (d.doc_id.clone(), i as DocOrdinal))
            .collect();
        Self {
            docs,
            avgdl,
            terms,
            postings,
            forward,
            term_ids,
            doc_ordinals,
        }
    }

    /// N, the number of documents.
    pub fn num_docs(&self) -> usize {
        self.docs.len()
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(String::as_str)
    }

    pub fn doc_id(&self, ord: DocOrdinal) -> &str {
        &self.docs[ord as usize].doc_id
    }

    pub fn doc_len(&self, ord: DocOrdinal) -> u32 {
        self.docs[ord as usize].length
    }

    pub fn ordinal(&self, doc_id: &str) -> Option<DocOrdinal> {
        self.doc_ordinals.get(doc_id).copied()
    }

    pub fn term_id(&self, term: &str) -> Option<TermId> {
        self.term_ids.get(term).copied()
    }

    /// The postings of `term`; empty for unknown terms.
    pub fn postings(&self, term: &str) -> PostingList<'_> {
        match self.term_ids.get(term) {
            Some(&id) => PostingList {
                term: &self.terms[id as usize],
                postings: &self.postings[id as usize],
            },
            None => PostingList { term: "", postings: &[] },
        }
    }

    pub fn df(&self, term: &str) -> usize {
        self.postings(term).df()
    }

    /// Frequency of `term` in one document.
    pub fn tf(&self, term: &str, ord: DocOrdinal) -> u32 {
        let postings = self.postings(term).postings;
        postings
            .binary_search_by_key(&ord, |p| p.doc)
            .map_or(0, |i| postings[i].tf)
    }

    pub fn idf(&self, term: &str, variant: IdfVariant) -> f64 {
        idf_from_counts(self.num_docs(), self.df(term), variant)
    }

    /// The document's analyzed terms in their original order.
    pub fn doc_terms(&self, ord: DocOrdinal) -> Vec<&str> {
        self.forward[ord as usize]
            .iter()
            .map(|&id| self.terms[id as usize].as_str())
            .collect()
    }

    pub fn document(&self, ord: DocOrdinal) -> TokenizedDocument {
        TokenizedDocument::new(
            self.doc_id(ord),
            self.doc_terms(ord).into_iter().map(String::from).collect(),
        )
    }

    pub(crate) fn parts(&self) -> Parts<'_> {
        (&self.docs, &self.terms, &self.postings, &self.forward)
    }
}
