//! BM25 scoring and disjunctive retrieval.

use crate::corpus::Query;
use crate::index::{DocOrdinal, IdfVariant, InvertedIndex};
use crate::rank::RankedList;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bm25Params {
    k1: f64,
    b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Self { k1: 1.2, b: 0.75 }
    }
}

impl Bm25Params {
    pub fn new(k1: f64, b: f64) -> Result<Self> {
        if !(k1.is_finite() && k1 >= 0.0) {
            return Err(Error::Config(format!("k1 must be >= 0, got {k1}")));
        }
        if !(0.0..=1.0).contains(&b) {
            return Err(Error::Config(format!("b must be in [0, 1], got {b}")));
        }
        Ok(Self { k1, b })
    }

    pub fn k1(&self) -> f64 {
        self.k1
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// `idf · tf·(k1+1) / (tf + k1·(1 − b + b·dl/avgdl))`, zero when `tf == 0`.
pub fn bm25_term_score(tf: u32, dl: u32, avgdl: f64, idf: f64, params: Bm25Params) -> Result<f64> {
    if tf == 0 {
        return Ok(0.0);
    }
    if avgdl <= 0.0 {
        return Err(Error::DegenerateCorpus);
    }
    let tf = tf as f64;
    let Bm25Params { k1, b } = params;
    let norm = k1 * (1.0 - b + b * dl as f64 / avgdl);
    Ok(idf * (tf * (k1 + 1.0)) / (tf + norm))
}

/// BM25 scorer bound to an index and IDF variant.
#[derive(Debug, Clone, Copy)]
pub struct Bm25<'a> {
    pub index: &'a InvertedIndex,
    pub params: Bm25Params,
    pub idf: IdfVariant,
}

impl<'a> Bm25<'a> {
    pub fn new(index: &'a InvertedIndex, params: Bm25Params, idf: IdfVariant) -> Self {
        Self { index, params, idf }
    }

    pub fn term_score(&self, term: &str, doc: DocOrdinal) -> f64 {
        let tf = self.index.tf(term, doc);
        if tf == 0 {
            return 0.0;
        }
        let idf = self.index.idf(term, self.idf);
        // a document containing a term has positive length, so avgdl > 0
        bm25_term_score(tf, self.index.doc_len(doc), self.index.avgdl(), idf, self.params)
            .expect("positive tf implies positive avgdl")
    }

    /// Sum of term scores; repeated terms count repeatedly.
    pub fn score_terms<S: AsRef<str>>(&self, terms: &[S], doc: DocOrdinal) -> f64 {
        terms
            .iter()
            .fold(0.0, |acc, t| acc + self.term_score(t.as_ref(), doc))
    }

    pub fn score_query(&self, query: &Query, doc: DocOrdinal) -> f64 {
        self.score_terms(&query.terms, doc)
    }

    /// Scores every document in the union of the terms' postings.
    ///
    /// Accumulation is term-at-a-time in query order, which performs the
    /// same additions as [`score_terms`](Self::score_terms) per document.
    pub fn score_union<S: AsRef<str>>(&self, terms: &[S]) -> Vec<(DocOrdinal, f64)> {
        let n = self.index.num_docs();
        let mut acc = vec![0.0f64; n];
        let mut touched = vec![false; n];
        let mut order = Vec::new();
        let avgdl = self.index.avgdl();
        for term in terms {
            let list = self.index.postings(term.as_ref());
            if list.is_empty() {
                continue;
            }
            let idf = self.index.idf(term.as_ref(), self.idf);
            for p in list.postings {
                let d = p.doc as usize;
                let s = bm25_term_score(p.tf, self.index.doc_len(p.doc), avgdl, idf, self.params)
                    .expect("positive tf implies positive avgdl");
                acc[d] += s;
                if !touched[d] {
                    touched[d] = true;
                    order.push(p.doc);
                }
            }
        }
        order.into_iter().map(|d| (d, acc[d as usize])).collect()
    }

    /// Top-`k` documents matching any of `terms`.
    pub fn retrieve_terms<S: AsRef<str>>(&self, terms: &[S], k: usize) -> RankedList {
        let scored = self.score_union(terms);
        RankedList::top_k(
            scored.into_iter().map(|(d, s)| (self.index.doc_id(d), s)),
            k,
        )
    }

    /// Disjunctive top-`k` retrieval for a query.
    pub fn retrieve_or(&self, query: &Query, k: usize) -> RankedList {
        self.retrieve_terms(&query.terms, k)
    }
}

/// Free-function form of [`Bm25::retrieve_or`].
pub fn retrieve_or(
    index: &InvertedIndex,
    query: &Query,
    k: usize,
    params: Bm25Params,
    idf: IdfVariant,
) -> RankedList {
    Bm25::new(index, params, idf).retrieve_or(query, k)
}

/// Free-function form of [`Bm25::score_query`].
pub fn score_query(
    index: &InvertedIndex,
    query: &Query,
    doc: DocOrdinal,
    params: Bm25Params,
    idf: IdfVariant,
) -> f64 {
    Bm25::new(index, params, idf).score_query(query, doc)
}
