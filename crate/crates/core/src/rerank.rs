//! Interpolation of original-query and expanded-query evidence.
//!
//! Two forms are provided. [`combine_rankings`] mixes the scores of two
//! ranked lists, `(1−α)·s1 + α·s2`, with a missing side counting as zero.
//! [`combined_bm25`] mixes at the term level inside BM25,
//! `(1−α)·Σ_{q} BM25 + α·Σ_{q_exp} BM25`.

use std::collections::{BTreeMap, HashSet};

use crate::corpus::Query;
use crate::index::{DocOrdinal, IdfVariant, InvertedIndex};
use crate::rank::RankedList;
use crate::retrieval::{Bm25, Bm25Params};
use crate::{Error, Result};

/// Interpolation weight, validated to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::Config(format!("alpha must be in [0, 1], got {value}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for Alpha {
    fn default() -> Self {
        Self(0.3)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CombinedScore {
    pub doc_id: String,
    pub stage1: f64,
    pub stage2: f64,
    pub final_score: f64,
}

/// Per-document breakdown of [`combine_rankings`], in doc-id order.
pub fn combine_scores(first: &RankedList, second: &RankedList, alpha: Alpha) -> Vec<CombinedScore> {
    let mut sides: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for e in first {
        sides.entry(&e.doc_id).or_insert((0.0, 0.0)).0 = e.score;
    }
    for e in second {
        sides.entry(&e.doc_id).or_insert((0.0, 0.0)).1 = e.score;
    }
    let a = alpha.get();
    sides
        .into_iter()
        .map(|(doc_id, (s1, s2))| CombinedScore {
            doc_id: doc_id.to_string(),
            stage1: s1,
            stage2: s2,
            final_score: (1.0 - a) * s1 + a * s2,
        })
        .collect()
}

/// Ranks `first ∪ second` by `(1−α)·s1 + α·s2`.
pub fn combine_rankings(first: &RankedList, second: &RankedList, alpha: Alpha) -> RankedList {
    RankedList::from_scores(
        combine_scores(first, second, alpha)
            .into_iter()
            .map(|c| (c.doc_id, c.final_score)),
    )
}

fn check_disjoint<S: AsRef<str>>(query: &Query, expansion: &[S]) -> Result<()> {
    let original: HashSet<&str> = query.terms.iter().map(String::as_str).collect();
    match expansion.iter().find(|t| original.contains(t.as_ref())) {
        Some(t) => Err(Error::TermOverlap(t.as_ref().to_string())),
        None => Ok(()),
    }
}

/// Term-level interpolated BM25 of one document.
pub fn combined_bm25<S: AsRef<str>>(
    index: &InvertedIndex,
    query: &Query,
    expansion: &[S],
    alpha: Alpha,
    doc: DocOrdinal,
    params: Bm25Params,
    idf: IdfVariant,
) -> Result<f64> {
    check_disjoint(query, expansion)?;
    let bm = Bm25::new(index, params, idf);
    Ok(interpolate(&bm, query, expansion, alpha, doc))
}

fn interpolate<S: AsRef<str>>(bm: &Bm25<'_>, query: &Query, expansion: &[S], alpha: Alpha, doc: DocOrdinal) -> f64 {
    let a = alpha.get();
    (1.0 - a) * bm.score_terms(&query.terms, doc) + a * bm.score_terms(expansion, doc)
}

/// Applies [`combined_bm25`] to every candidate document.
pub fn rank_combined_bm25<S: AsRef<str>>(
    index: &InvertedIndex,
    query: &Query,
    expansion: &[S],
    alpha: Alpha,
    candidates: &[DocOrdinal],
    params: Bm25Params,
    idf: IdfVariant,
) -> Result<RankedList> {
    check_disjoint(query, expansion)?;
    let bm = Bm25::new(index, params, idf);
    Ok(RankedList::from_scores(candidates.iter().map(|&d| {
        (index.doc_id(d), interpolate(&bm, query, expansion, alpha, d))
    })))
}
