//! Pseudo-relevance-feedback query expansion over a BM25 inverted index.
//!
//! The crate is organized bottom-up:
//!
//! - [`corpus`]: TREC document/topic/qrels parsing and the tokenize → stop → stem pipeline
//! - [`index`]: inverted index, IDF variants and binary persistence
//! - [`retrieval`]: BM25 scoring and disjunctive top-k retrieval
//! - [`embeddings`]: vector stores, AWE / IDF-AWE representations, contextual averaging
//! - [`expansion`]: local corpus, candidate selection and the experimental variants
//! - [`rerank`]: score-level and term-level interpolation of the two retrieval stages
//! - [`eval`]: MAP@k, R@k, NDCG@k and TREC run files

pub mod corpus;
pub mod embeddings;
mod error;
pub mod eval;
pub mod expansion;
pub mod index;
pub mod rank;
pub mod rerank;
pub mod retrieval;

pub use corpus::{Analyzer, Query, QrelSet, RawDocument, TokenizedDocument};
pub use embeddings::{EmbeddingStore, EmbeddingVector};
pub use error::{Error, Result};
pub use expansion::{ExpansionResult, Variant, VariantConfig};
pub use index::{IdfVariant, InvertedIndex};
pub use rank::{RankedList, ScoredDoc};
pub use rerank::Alpha;
pub use retrieval::Bm25Params;
