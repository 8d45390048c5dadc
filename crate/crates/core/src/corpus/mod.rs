//! Document, topic and judgment ingestion.

mod stem;
mod stoplist;
mod tokenize;
mod trec;

use std::collections::{BTreeMap, BTreeSet};

pub use stem::{IdentityStemmer, Stemmer, SuffixStemmer};
pub use stoplist::Stoplist;
pub use tokenize::tokenize;
pub use trec::{parse_qrels, parse_topics, parse_trec_documents, ParseReport, RecordError};

/// A document as read from a collection file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub doc_id: String,
    pub text: String,
}

/// A document after analysis. The length is the token count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

impl TokenizedDocument {
    pub fn new(doc_id: impl Into<String>, tokens: Vec<String>) -> Self {
        Self {
            doc_id: doc_id.into(),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A bag-of-words query. Terms keep their order and multiplicity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub qid: String,
    pub terms: Vec<String>,
}

impl Query {
    pub fn new(qid: impl Into<String>, terms: Vec<String>) -> Self {
        Self {
            qid: qid.into(),
            terms,
        }
    }

    /// A query with no terms left after analysis. Such queries are skipped
    /// by the experiment runner and left out of evaluation averages.
    pub fn is_degenerate(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Graded relevance judgments keyed by query id and document id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QrelSet {
    judgments: BTreeMap<String, BTreeMap<String, u32>>,
}

impl QrelSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records a judgment, replacing any earlier grade for the same pair.
    pub fn insert(&mut self, qid: impl Into<String>, doc_id: impl Into<String>, grade: u32) {
        self.judgments
            .entry(qid.into())
            .or_default()
            .insert(doc_id.into(), grade);
    }

    pub fn grade(&self, qid: &str, doc_id: &str) -> Option<u32> {
        self.judgments.get(qid)?.get(doc_id).copied()
    }

    /// All judgments for a query, or `None` when the query was never judged.
    pub fn for_query(&self, qid: &str) -> Option<&BTreeMap<String, u32>> {
        self.judgments.get(qid)
    }

    /// Documents judged with a positive grade.
    pub fn relevant(&self, qid: &str) -> BTreeSet<&str> {
        self.judgments
            .get(qid)
            .map(|docs| {
                docs.iter()
                    .filter(|(_, &g)| g > 0)
                    .map(|(d, _)| d.as_str())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.judgments.keys().map(String::as_str)
    }

    /// Total number of (query, document) judgments.
    pub fn len(&self) -> usize {
        self.judgments.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The tokenize → stop → stem pipeline shared by documents, topics and
/// embedding vocabularies.
pub struct Analyzer {
    stoplist: Stoplist,
    stemmer: Box<dyn Stemmer>,
}

impl Analyzer {
    pub fn new(stoplist: Stoplist, stemmer: Box<dyn Stemmer>) -> Self {
        Self { stoplist, stemmer }
    }

    /// SMART stoplist with the bundled suffix stemmer.
    pub fn standard() -> Self {
        Self::new(Stoplist::smart(), Box::new(SuffixStemmer))
    }

    pub fn stoplist(&self) -> &Stoplist {
        &self.stoplist
    }

    pub fn stemmer(&self) -> &dyn Stemmer {
        self.stemmer.as_ref()
    }

    pub fn analyze(&self, text: &str) -> Vec<String> {
        self.stoplist
            .remove(tokenize(text))
            .into_iter()
            .map(|t| self.stemmer.stem(&t))
            .collect()
    }

    pub fn analyze_document(&self, doc: &RawDocument) -> TokenizedDocument {
        TokenizedDocument::new(doc.doc_id.clone(), self.analyze(&doc.text))
    }
}

impl std::fmt::Debug for Analyzer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Analyzer")
            .field("stopwords", &self.stoplist.len())
            .field("stemmer", &self.stemmer.name())
            .finish()
    }
}
