//! Pseudo-relevance-feedback expansion and the experimental pipelines.
//!
//! Every expanding variant follows the same shape: retrieve D′ with BM25,
//! take a top-k local corpus, score the local vocabulary against a query
//! vector with `exp(cos)`, keep the top-T terms as `q_exp`, rank
//! `D^exp` (the union of the `q_exp` posting lists) and merge the two
//! stages. The variants differ in how the local corpus is ordered, which
//! query vector drives selection, how `D^exp` is ranked and which merge
//! is used.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use log::debug;

use crate::corpus::{Query, Stoplist, TokenizedDocument};
use crate::embeddings::{
    candidate_score, contextual_term_vector, cosine, represent, ContextualProvider, EmbeddingStore,
    EmbeddingVector, Representation, VectorSource,
};
use crate::index::{DocOrdinal, IdfVariant, InvertedIndex};
use crate::rank::RankedList;
use crate::rerank::{combine_rankings, rank_combined_bm25, Alpha};
use crate::retrieval::{Bm25, Bm25Params};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Plain BM25 over the original query.
    Bm25,
    /// D′ re-ranked by cosine between AWE query and document vectors.
    AweVs,
    /// D′ re-ranked by cosine between IDF-AWE query and document vectors.
    IdfAweVs,
    /// AWE-driven expansion over the BM25 local corpus, merged by score interpolation.
    AqeCent,
    /// As `AqeCent`, but the local corpus is the IDF-AWE-VS top-k.
    IdfAweVsAqeCent,
    /// IDF-AWE-driven expansion over the IDF-AWE-VS local corpus; `D^exp`
    /// ranked by IDF-AWE cosine; merged by score interpolation.
    IdfAweVsAqeIdfCent,
    /// Same selection as `IdfAweVsAqeIdfCent`, final ranking by
    /// term-level interpolated BM25.
    IdfAweVsAqeIdfCentPlus,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::Bm25,
        Variant::AweVs,
        Variant::IdfAweVs,
        Variant::AqeCent,
        Variant::IdfAweVsAqeCent,
        Variant::IdfAweVsAqeIdfCent,
        Variant::IdfAweVsAqeIdfCentPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Bm25 => "bm25",
            Variant::AweVs => "awe-vs",
            Variant::IdfAweVs => "idf-awe-vs",
            Variant::AqeCent => "aqe-cent",
            Variant::IdfAweVsAqeCent => "idf-awe-vs+aqe-cent",
            Variant::IdfAweVsAqeIdfCent => "idf-awe-vs+aqe-idf-cent",
            Variant::IdfAweVsAqeIdfCentPlus => "idf-awe-vs+aqe-idf-cent-plus",
        }
    }

    pub fn expands(self) -> bool {
        matches!(
            self,
            Variant::AqeCent
                | Variant::IdfAweVsAqeCent
                | Variant::IdfAweVsAqeIdfCent
                | Variant::IdfAweVsAqeIdfCentPlus
        )
    }

    pub fn needs_embeddings(self) -> bool {
        self != Variant::Bm25
    }

    pub fn valid_names() -> String {
        Self::ALL.map(Variant::name).join(", ")
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown variant `{s}` (valid: {})",
                    Self::valid_names()
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantConfig {
    pub variant: Variant,
    /// T, number of expansion terms.
    pub expansion_terms: usize,
    /// k, size of the local corpus.
    pub local_k: usize,
    /// Number of documents retrieved for D′ and returned in final rankings.
    pub depth: usize,
    pub alpha: Alpha,
    pub idf: IdfVariant,
    pub bm25: Bm25Params,
    /// Min-max normalize both lists before interpolating cosine and BM25 scores.
    pub normalize: bool,
    /// Build query and document term vectors from a contextual provider.
    pub contextual: bool,
}

impl VariantConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            expansion_terms: 5,
            local_k: 10,
            depth: 1000,
            alpha: Alpha::default(),
            idf: IdfVariant::default(),
            bm25: Bm25Params::default(),
            normalize: true,
            contextual: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("expansion_terms", self.expansion_terms),
            ("local_k", self.local_k),
            ("depth", self.depth),
        ] {
            if value == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// The selected expansion terms, best first.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionResult {
    pub qid: String,
    pub terms: Vec<(String, f64)>,
    pub query_vector: EmbeddingVector,
}

impl ExpansionResult {
    pub fn term_names(&self) -> Vec<String> {
        self.terms.iter().map(|(t, _)| t.clone()).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// D′ truncated to its top-`k` documents.
pub fn local_corpus(
    index: &InvertedIndex,
    query: &Query,
    k: usize,
    params: Bm25Params,
    idf: IdfVariant,
) -> RankedList {
    Bm25::new(index, params, idf).retrieve_or(query, k)
}

/// Distinct terms of the local corpus that are neither query terms nor stopwords.
pub fn extract_candidates(docs: &[TokenizedDocument], query: &Query, stoplist: &Stoplist) -> BTreeSet<String> {
    let original: HashSet<&str> = query.terms.iter().map(String::as_str).collect();
    docs.iter()
        .flat_map(|d| d.tokens.iter())
        .filter(|t| !original.contains(t.as_str()) && !stoplist.contains(t))
        .cloned()
        .collect()
}

/// Scores embedded candidates by `exp(cos(w, q_vec))` and keeps the best `t`.
/// Ties go to the lexicographically smaller term.
pub fn select_expansion_terms(
    qid: &str,
    candidates: &BTreeSet<String>,
    query_vector: &EmbeddingVector,
    store: &dyn VectorSource,
    t: usize,
) -> ExpansionResult {
    let mut scored: Vec<(String, f64)> = candidates
        .iter()
        .filter_map(|term| {
            let v = store.vector(term)?;
            candidate_score(v, query_vector).ok().map(|s| (term.clone(), s))
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.truncate(t);
    if scored.is_empty() {
        debug!("query {qid}: no embedded expansion candidates");
    }
    ExpansionResult {
        qid: qid.to_string(),
        terms: scored,
        query_vector: query_vector.clone(),
    }
}

/// Ranks documents by cosine between `query_vector` and the vector
/// `encode` builds for each. Documents without a representation score −1.
pub fn vector_space_rank<F>(
    query_vector: &EmbeddingVector,
    docs: &[DocOrdinal],
    index: &InvertedIndex,
    encode: F,
) -> RankedList
where
    F: Fn(DocOrdinal) -> Result<EmbeddingVector>,
{
    RankedList::from_scores(docs.iter().map(|&d| {
        let score = encode(d)
            .and_then(|v| cosine(query_vector, &v))
            .unwrap_or(-1.0);
        (index.doc_id(d), score)
    }))
}

/// [`vector_space_rank`] with document vectors built from the full term multiset.
pub fn vector_space_rank_static(
    query_vector: &EmbeddingVector,
    docs: &[DocOrdinal],
    store: &dyn VectorSource,
    mode: Representation,
    index: &InvertedIndex,
    idf: IdfVariant,
) -> RankedList {
    vector_space_rank(query_vector, docs, index, |d| {
        represent(&index.doc_terms(d), store, mode, index, idf)
    })
}

/// Term vectors assembled for one query: contextual vectors where the
/// provider covers the term, the static store otherwise.
struct TermVectors<'a> {
    dim: usize,
    vectors: HashMap<String, EmbeddingVector>,
    fallback: Option<&'a EmbeddingStore>,
}

impl VectorSource for TermVectors<'_> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn vector(&self, term: &str) -> Option<&EmbeddingVector> {
        self.vectors
            .get(term)
            .or_else(|| self.fallback.and_then(|s| s.vector(term)))
    }
}

/// Shared inputs of a pipeline run.
#[derive(Clone, Copy)]
pub struct Resources<'a> {
    pub index: &'a InvertedIndex,
    pub store: Option<&'a EmbeddingStore>,
    pub provider: Option<&'a dyn ContextualProvider>,
    pub stoplist: &'a Stoplist,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Fallback {
    /// The query had no usable vector; the BM25 ranking was returned.
    Bm25(String),
    /// No expansion terms were found; the first-stage ranking was returned.
    NoExpansion,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantOutcome {
    pub ranking: RankedList,
    /// First-stage scores as they entered the merge (after any normalization).
    pub stage1: RankedList,
    /// Expanded-query scores as they entered the merge, when expansion ran.
    pub stage2: Option<RankedList>,
    pub expansion: Option<ExpansionResult>,
    pub fallback: Option<Fallback>,
}

impl VariantOutcome {
    fn single(ranking: RankedList, fallback: Option<Fallback>) -> Self {
        Self {
            stage1: ranking.clone(),
            ranking,
            stage2: None,
            expansion: None,
            fallback,
        }
    }
}

struct Pipeline<'a> {
    config: &'a VariantConfig,
    res: Resources<'a>,
    query: &'a Query,
    bm: Bm25<'a>,
    provider: Option<&'a dyn ContextualProvider>,
}

impl<'a> Pipeline<'a> {
    fn index(&self) -> &'a InvertedIndex {
        self.res.index
    }

    fn ordinals(&self, list: &RankedList) -> Vec<DocOrdinal> {
        list.iter()
            .map(|e| self.index().ordinal(&e.doc_id).expect("ranked documents come from the index"))
            .collect()
    }

    /// Vectors for `terms`. In contextual mode each term's vector is the
    /// mean, over the `docs` containing it, of its per-document occurrence
    /// average; terms the provider cannot serve fall back to the store.
    fn term_vectors(&self, terms: &[String], docs: &[DocOrdinal]) -> TermVectors<'a> {
        let store = self.res.store;
        let Some(provider) = self.provider else {
            let store = store.expect("checked in run_variant");
            return TermVectors {
                dim: store.dim(),
                vectors: HashMap::new(),
                fallback: Some(store),
            };
        };
        let fallback = store.filter(|s| s.dim() == provider.dim());
        let documents: Vec<TokenizedDocument> = docs.iter().map(|&d| self.index().document(d)).collect();
        let mut vectors = HashMap::new();
        for term in terms.iter().collect::<BTreeSet<_>>() {
            let per_doc: Vec<EmbeddingVector> = documents
                .iter()
                .filter_map(|doc| contextual_term_vector(term, &doc.doc_id, &doc.tokens, provider).ok())
                .collect();
            if let Some(mean) = mean(&per_doc) {
                vectors.insert(term.clone(), mean);
            }
        }
        TermVectors {
            dim: provider.dim(),
            vectors,
            fallback,
        }
    }

    fn query_vector(&self, terms: &[String], mode: Representation, source: &dyn VectorSource) -> Result<EmbeddingVector> {
        let v = represent(terms, source, mode, self.index(), self.config.idf)?;
        if v.norm() == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(v)
    }

    /// Cosine ranking of `docs`; document vectors cover the whole document
    /// with static vectors, or only `terms` in contextual mode.
    fn vs_rank(&self, query_vector: &EmbeddingVector, docs: &[DocOrdinal], terms: &[String], mode: Representation) -> RankedList {
        let index = self.index();
        let idf = self.config.idf;
        match self.provider {
            None => {
                let store = self.res.store.expect("checked in run_variant");
                vector_space_rank_static(query_vector, docs, store, mode, index, idf)
            }
            Some(_) => vector_space_rank(query_vector, docs, index, |d| {
                let doc_terms = index.doc_terms(d);
                let present: Vec<String> = terms
                    .iter()
                    .filter(|t| doc_terms.contains(&t.as_str()))
                    .cloned()
                    .collect();
                let source = self.term_vectors(&present, &[d]);
                represent(&present, &source, mode, index, idf)
            }),
        }
    }

    fn expansion(&self, local: &[DocOrdinal], query_vector: &EmbeddingVector) -> ExpansionResult {
        let docs: Vec<TokenizedDocument> = local.iter().map(|&d| self.index().document(d)).collect();
        let candidates = extract_candidates(&docs, self.query, self.res.stoplist);
        let list: Vec<String> = candidates.iter().cloned().collect();
        let source = self.term_vectors(&list, local);
        select_expansion_terms(
            &self.query.qid,
            &candidates,
            query_vector,
            &source,
            self.config.expansion_terms,
        )
    }

    /// D^exp: every document in the posting list of some expansion term.
    fn expanded_docs(&self, terms: &[String]) -> Vec<DocOrdinal> {
        let docs: BTreeSet<DocOrdinal> = terms
            .iter()
            .flat_map(|t| self.index().postings(t).postings.iter().map(|p| p.doc))
            .collect();
        docs.into_iter().collect()
    }

    fn run(&self) -> Result<VariantOutcome> {
        let cfg = self.config;
        let depth = cfg.depth;
        let bm25_stage1 = self.bm.retrieve_or(self.query, depth);
        if cfg.variant == Variant::Bm25 {
            return Ok(VariantOutcome::single(bm25_stage1, None));
        }

        let d_prime = self.ordinals(&bm25_stage1);
        let bm25_local: Vec<DocOrdinal> = d_prime.iter().copied().take(cfg.local_k).collect();
        let q_terms = &self.query.terms;
        let q_source = self.term_vectors(q_terms, &bm25_local);

        let (mode, uses_vs_local) = match cfg.variant {
            Variant::AweVs | Variant::AqeCent => (Representation::Awe, false),
            Variant::IdfAweVs => (Representation::IdfAwe, false),
            _ => (Representation::IdfAwe, true),
        };
        let q_vec = match self.query_vector(q_terms, mode, &q_source) {
            Ok(v) => v,
            Err(e) => {
                debug!("query {}: {e}; falling back to BM25", self.query.qid);
                return Ok(VariantOutcome::single(bm25_stage1, Some(Fallback::Bm25(e.to_string()))));
            }
        };

        if matches!(cfg.variant, Variant::AweVs | Variant::IdfAweVs) {
            return Ok(VariantOutcome::single(self.vs_rank(&q_vec, &d_prime, q_terms, mode), None));
        }

        // Ordering of D′ that supplies the local corpus and, for the
        // score-interpolated variants, the first-stage scores.
        let (stage1, local) = if uses_vs_local {
            let vs = self.vs_rank(&q_vec, &d_prime, q_terms, Representation::IdfAwe);
            let local = self.ordinals(&vs).into_iter().take(cfg.local_k).collect();
            (vs, local)
        } else {
            (bm25_stage1.clone(), bm25_local)
        };

        let selection_vector = match cfg.variant {
            Variant::IdfAweVsAqeCent => match self.query_vector(q_terms, Representation::Awe, &q_source) {
                Ok(v) => v,
                Err(e) => {
                    return Ok(VariantOutcome::single(bm25_stage1, Some(Fallback::Bm25(e.to_string()))));
                }
            },
            _ => q_vec,
        };
        let expansion = self.expansion(&local, &selection_vector);
        let first_stage = match cfg.variant {
            Variant::IdfAweVsAqeIdfCentPlus => bm25_stage1.clone(),
            _ => stage1.clone(),
        };
        if expansion.is_empty() {
            let mut out = VariantOutcome::single(first_stage, Some(Fallback::NoExpansion));
            out.expansion = Some(expansion);
            return Ok(out);
        }
        let q_exp = expansion.term_names();

        let (ranking, stage1, stage2) = match cfg.variant {
            Variant::AqeCent => {
                let stage2 = self.bm.retrieve_terms(&q_exp, depth);
                (combine_rankings(&stage1, &stage2, cfg.alpha), stage1, stage2)
            }
            Variant::IdfAweVsAqeCent => {
                let stage2 = self.bm.retrieve_terms(&q_exp, depth);
                let (s1, s2) = if cfg.normalize {
                    (stage1.min_max_normalized(), stage2.min_max_normalized())
                } else {
                    (stage1, stage2)
                };
                (combine_rankings(&s1, &s2, cfg.alpha), s1, s2)
            }
            Variant::IdfAweVsAqeIdfCent => {
                let d_exp = self.expanded_docs(&q_exp);
                let exp_source = self.term_vectors(&q_exp, &local);
                let mut stage2 = match self.query_vector(&q_exp, Representation::IdfAwe, &exp_source) {
                    Ok(exp_vec) => self.vs_rank(&exp_vec, &d_exp, &q_exp, Representation::IdfAwe),
                    Err(e) => {
                        debug!("query {}: expanded query has no vector ({e})", self.query.qid);
                        let mut out = VariantOutcome::single(stage1, Some(Fallback::NoExpansion));
                        out.expansion = Some(expansion);
                        return Ok(out);
                    }
                };
                stage2.truncate(depth);
                (combine_rankings(&stage1, &stage2, cfg.alpha), stage1, stage2)
            }
            Variant::IdfAweVsAqeIdfCentPlus => {
                let mut candidates: BTreeSet<DocOrdinal> = d_prime.iter().copied().collect();
                candidates.extend(self.expanded_docs(&q_exp));
                let candidates: Vec<DocOrdinal> = candidates.into_iter().collect();
                let ranking = rank_combined_bm25(
                    self.index(),
                    self.query,
                    &q_exp,
                    cfg.alpha,
                    &candidates,
                    cfg.bm25,
                    cfg.idf,
                )?;
                let stage2 = self.bm.retrieve_terms(&q_exp, depth);
                (ranking, bm25_stage1, stage2)
            }
            Variant::Bm25 | Variant::AweVs | Variant::IdfAweVs => unreachable!("handled above"),
        };
        let mut ranking = ranking;
        ranking.truncate(depth);
        Ok(VariantOutcome {
            ranking,
            stage1,
            stage2: Some(stage2),
            expansion: Some(expansion),
            fallback: None,
        })
    }
}

fn mean(vectors: &[EmbeddingVector]) -> Option<EmbeddingVector> {
    let first = vectors.first()?;
    let mut sum = vec![0.0; first.dim()];
    for v in vectors {
        for (acc, x) in sum.iter_mut().zip(v.as_slice()) {
            *acc += x;
        }
    }
    let n = vectors.len() as f64;
    Some(EmbeddingVector::new(sum.into_iter().map(|x| x / n).collect()))
}

/// Runs one query through the configured pipeline.
pub fn run_variant(config: &VariantConfig, query: &Query, res: Resources<'_>) -> Result<VariantOutcome> {
    config.validate()?;
    let provider = if config.contextual {
        Some(res.provider.ok_or_else(|| {
            Error::Config("contextual mode requires a contextual vector provider".into())
        })?)
    } else {
        None
    };
    if config.variant.needs_embeddings() && provider.is_none() && res.store.is_none() {
        return Err(Error::Config(format!(
            "variant {} requires word embeddings",
            config.variant
        )));
    }
    Pipeline {
        config,
        res,
        query,
        bm: Bm25::new(res.index, config.bm25, config.idf),
        provider,
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::ContextualFile;

    fn doc(id: &str, text: &str) -> TokenizedDocument {
        TokenizedDocument::new(id, text.split_whitespace().map(String::from).collect())
    }

    fn query(terms: &str) -> Query {
        Query::new("q1", terms.split_whitespace().map(String::from).collect())
    }

    fn store(entries: &[(&str, &[f64])]) -> EmbeddingStore {
        crate::embeddings::tests::store(entries)
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        let err = "bogus".parse::<Variant>().unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("idf-awe-vs+aqe-idf-cent-plus"));
    }

    #[test]
    fn config_validation() {
        let mut c = VariantConfig::new(Variant::AqeCent);
        assert!(c.validate().is_ok());
        c.expansion_terms = 0;
        assert!(c.validate().is_err());
        let mut c = VariantConfig::new(Variant::AqeCent);
        c.local_k = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn candidates() {
        let stop = Stoplist::empty();
        let docs = [doc("1", "a b"), doc("2", "b c")];
        let got = extract_candidates(&docs, &query("a"), &stop);
        assert_eq!(got.into_iter().collect::<Vec<_>>(), ["b", "c"]);
        assert!(extract_candidates(&docs, &query("a b c"), &stop).is_empty());
        assert!(extract_candidates(&[], &query("a"), &stop).is_empty());
        let stop: Stoplist = ["c"].into_iter().collect();
        assert_eq!(extract_candidates(&docs, &query("a"), &stop).len(), 1);
    }

    #[test]
    fn selection_example() {
        let s = store(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0]), ("c", &[-1.0, 0.0])]);
        let cands: BTreeSet<String> = ["a", "b", "c", "oov"].map(String::from).into();
        let q = EmbeddingVector::new(vec![1.0, 0.0]);
        let r = select_expansion_terms("q", &cands, &q, &s, 2);
        assert_eq!(r.term_names(), ["a", "b"]);
        assert!((r.terms[0].1 - std::f64::consts::E).abs() < 1e-12);
        assert_eq!(r.terms[1].1, 1.0);

        let all = select_expansion_terms("q", &cands, &q, &s, 10);
        assert_eq!(all.term_names(), ["a", "b", "c"]);
        assert!(select_expansion_terms("q", &BTreeSet::new(), &q, &s, 3).is_empty());
    }

    #[test]
    fn identical_vectors_fall_back_to_term_order() {
        let s = store(&[("zeta", &[0.3, 0.4]), ("alpha", &[0.3, 0.4]), ("mid", &[0.3, 0.4])]);
        let cands: BTreeSet<String> = ["zeta", "alpha", "mid"].map(String::from).into();
        let r = select_expansion_terms("q", &cands, &EmbeddingVector::new(vec![1.0, 0.2]), &s, 2);
        assert_eq!(r.term_names(), ["alpha", "mid"]);
    }

    #[test]
    fn uniform_idf_makes_awe_and_idf_awe_select_alike() {
        // every term appears in exactly one document, so all IDFs are equal
        let docs = [doc("1", "q1 x1"), doc("2", "q2 x2"), doc("3", "x3 x4")];
        let index = InvertedIndex::build(&docs).unwrap();
        let s = store(&[
            ("q1", &[1.0, 0.2, 0.0]),
            ("q2", &[0.1, 1.0, 0.3]),
            ("x1", &[0.9, 0.9, 0.0]),
            ("x2", &[0.0, 0.1, 1.0]),
            ("x3", &[-1.0, 0.4, 0.2]),
            ("x4", &[0.5, 0.5, 0.5]),
        ]);
        let q = query("q1 q2");
        let cands: BTreeSet<String> = ["x1", "x2", "x3", "x4"].map(String::from).into();
        let a = crate::embeddings::awe(&q.terms, &s).unwrap();
        let b = crate::embeddings::idf_awe(&q.terms, &s, &index, IdfVariant::Bm25).unwrap();
        let ra = select_expansion_terms("q", &cands, &a, &s, 2);
        let rb = select_expansion_terms("q", &cands, &b, &s, 2);
        assert_eq!(ra.term_names(), rb.term_names());
    }

    #[test]
    fn vector_space_examples() {
        let docs = [doc("same", "a"), doc("orth", "b"), doc("none", "zz")];
        let index = InvertedIndex::build(&docs).unwrap();
        let s = store(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        let q = EmbeddingVector::new(vec![2.0, 0.0]);
        let r = vector_space_rank_static(&q, &[0, 1, 2], &s, Representation::Awe, &index, IdfVariant::Bm25);
        assert_eq!(r.doc_ids(), ["same", "orth", "none"]);
        assert_eq!(r.score_of("orth"), Some(0.0));
        assert_eq!(r.score_of("none"), Some(-1.0));
        assert!((r.score_of("same").unwrap() - 1.0).abs() < 1e-15);
    }

    fn small_setup() -> (InvertedIndex, EmbeddingStore) {
        let docs = [
            doc("d1", "reef fish coral"),
            doc("d2", "reef coral coral"),
            doc("d3", "ocean wave"),
            doc("d4", "coral lagoon"),
            doc("d5", "desert sand"),
        ];
        let s = store(&[
            ("reef", &[1.0, 0.0, 0.0]),
            ("coral", &[0.9, 0.1, 0.0]),
            ("fish", &[0.2, 0.9, 0.0]),
            ("ocean", &[0.5, 0.5, 0.0]),
            ("wave", &[0.0, 1.0, 0.0]),
            ("lagoon", &[0.6, 0.3, 0.1]),
            ("desert", &[0.0, 0.0, 1.0]),
            ("sand", &[0.0, 0.1, 1.0]),
        ]);
        (InvertedIndex::build(&docs).unwrap(), s)
    }

    #[test]
    fn bm25_variant_is_pass_through() {
        let (index, s) = small_setup();
        let stop = Stoplist::empty();
        let res = Resources { index: &index, store: Some(&s), provider: None, stoplist: &stop };
        let q = query("reef ocean");
        let out = run_variant(&VariantConfig::new(Variant::Bm25), &q, res).unwrap();
        let plain = Bm25::new(&index, Bm25Params::default(), IdfVariant::Bm25).retrieve_or(&q, 1000);
        assert_eq!(out.ranking, plain);
        assert!(out.expansion.is_none());
    }

    #[test]
    fn expanding_variants_reach_unmatched_documents() {
        let (index, s) = small_setup();
        let stop = Stoplist::empty();
        let res = Resources { index: &index, store: Some(&s), provider: None, stoplist: &stop };
        let q = query("reef");
        for v in Variant::ALL.into_iter().filter(|v| v.expands()) {
            let mut cfg = VariantConfig::new(v);
            cfg.expansion_terms = 1;
            let out = run_variant(&cfg, &q, res).unwrap();
            let exp = out.expansion.unwrap();
            assert_eq!(exp.term_names(), ["coral"], "{v}");
            assert!(out.ranking.score_of("d4").is_some(), "{v}");
            assert!(out.ranking.score_of("d5").is_none(), "{v}");
            let ids = out.ranking.doc_ids();
            let unique: HashSet<&str> = ids.iter().copied().collect();
            assert_eq!(unique.len(), ids.len());
        }
    }

    #[test]
    fn oov_query_falls_back_to_bm25() {
        let (index, s) = small_setup();
        let stop = Stoplist::empty();
        let res = Resources { index: &index, store: Some(&s), provider: None, stoplist: &stop };
        let docs_only = Query::new("q", vec!["reef".into()]);
        let empty = EmbeddingStore::with_dim(3);
        let res_empty = Resources { store: Some(&empty), ..res };
        let out = run_variant(&VariantConfig::new(Variant::IdfAweVsAqeIdfCentPlus), &docs_only, res_empty).unwrap();
        assert!(matches!(out.fallback, Some(Fallback::Bm25(_))));
        let plain = Bm25::new(&index, Bm25Params::default(), IdfVariant::Bm25).retrieve_or(&docs_only, 1000);
        assert_eq!(out.ranking, plain);
    }

    #[test]
    fn empty_expansion_returns_first_stage() {
        let docs = [doc("d1", "reef"), doc("d2", "reef reef"), doc("d3", "other")];
        let index = InvertedIndex::build(&docs).unwrap();
        let s = store(&[("reef", &[1.0, 0.0]), ("other", &[0.0, 1.0])]);
        let stop = Stoplist::empty();
        let res = Resources { index: &index, store: Some(&s), provider: None, stoplist: &stop };
        let out = run_variant(&VariantConfig::new(Variant::AqeCent), &query("reef"), res).unwrap();
        assert_eq!(out.fallback, Some(Fallback::NoExpansion));
        assert_eq!(out.ranking, out.stage1);
        assert_eq!(out.ranking.len(), 2);
    }

    #[test]
    fn missing_resources_are_configuration_errors() {
        let (index, _) = small_setup();
        let stop = Stoplist::empty();
        let res = Resources { index: &index, store: None, provider: None, stoplist: &stop };
        let err = run_variant(&VariantConfig::new(Variant::AweVs), &query("reef"), res).unwrap_err();
        assert!(err.is_config());
        let mut cfg = VariantConfig::new(Variant::IdfAweVs);
        cfg.contextual = true;
        assert!(run_variant(&cfg, &query("reef"), res).unwrap_err().is_config());
        assert!(run_variant(&VariantConfig::new(Variant::Bm25), &query("reef"), res).is_ok());
    }

    #[test]
    fn contextual_mode_uses_provider_vectors() {
        let (index, s) = small_setup();
        let stop = Stoplist::empty();
        // Contextual "reef" points at lagoon, pulling it ahead of coral.
        let provider = ContextualFile::load(
            "d1\treef\t0\t0.6 0.3 0.1\nd2\treef\t0\t0.6 0.3 0.1\n".as_bytes(),
        )
        .unwrap();
        let res = Resources { index: &index, store: Some(&s), provider: Some(&provider), stoplist: &stop };
        let mut cfg = VariantConfig::new(Variant::IdfAweVsAqeIdfCentPlus);
        cfg.contextual = true;
        cfg.expansion_terms = 1;
        let out = run_variant(&cfg, &query("reef"), res).unwrap();
        let exp = out.expansion.unwrap();
        assert_eq!(exp.query_vector.as_slice(), [0.6, 0.3, 0.1]);
    }
}
