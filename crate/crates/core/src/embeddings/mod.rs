//! Word vectors and the averaged query/document representations built from them.

mod contextual;

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

pub use contextual::{
    context_windows, contextual_term_vector, ContextWindow, ContextualFile, ContextualProvider,
    DEFAULT_CONTEXT_RADIUS,
};
use crate::index::{IdfVariant, InvertedIndex};
use crate::{Error, Result};

/// Dense vector with finite components.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f64>);

impl EmbeddingVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

impl From<Vec<f64>> for EmbeddingVector {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Anything that maps a term to a vector of a fixed dimension.
pub trait VectorSource {
    fn dim(&self) -> usize;

    fn vector(&self, term: &str) -> Option<&EmbeddingVector>;
}

/// Pre-trained vectors keyed by normalized term.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    table: HashMap<String, EmbeddingVector>,
}

impl EmbeddingStore {
    /// Empty store of the given dimension.
    pub fn with_dim(dim: usize) -> Self {
        Self {
            dim,
            table: HashMap::new(),
        }
    }

    /// Adds or replaces a vector. The dimension must match the store's.
    pub fn insert(&mut self, term: impl Into<String>, vector: EmbeddingVector) -> Result<()> {
        if vector.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.dim(),
            });
        }
        self.table.insert(term.into(), vector);
        Ok(())
    }

    /// Reads the word2vec/GloVe text format: `term v1 ... vd` per line, with
    /// an optional leading `count dim` header.
    pub fn load(stream: impl Read) -> Result<Self> {
        let reader = BufReader::new(stream);
        let mut store: Option<EmbeddingStore> = None;
        let mut header_dim = None;

        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let mut fields = line.split_whitespace();
            let Some(term) = fields.next() else { continue };
            let rest: Vec<&str> = fields.collect();

            if i == 0 && rest.len() == 1 {
                if let (Ok(_), Ok(dim)) = (term.parse::<usize>(), rest[0].parse::<usize>()) {
                    header_dim = Some(dim);
                    continue;
                }
            }
            let values = rest
                .iter()
                .map(|v| match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(Error::VectorLine {
                        line: lineno,
                        message: format!("component `{v}` is not a finite number"),
                    }),
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.is_empty() {
                return Err(Error::VectorLine {
                    line: lineno,
                    message: "term has no components".into(),
                });
            }
            let store = store.get_or_insert_with(|| {
                EmbeddingStore::with_dim(header_dim.unwrap_or(values.len()))
            });
            if values.len() != store.dim {
                return Err(Error::VectorLine {
                    line: lineno,
                    message: format!("expected {} components, found {}", store.dim, values.len()),
                });
            }
            store.table.insert(term.to_string(), EmbeddingVector(values));
        }
        Ok(store.unwrap_or_else(|| EmbeddingStore::with_dim(header_dim.unwrap_or(0))))
    }

    /// Re-keys the store through `normalize`; terms mapping to `None` are
    /// dropped and on collisions the earliest-loaded key wins, which for
    /// frequency-sorted vector files keeps the most frequent surface form.
    pub fn normalized_with(self, order: &[String], normalize: impl Fn(&str) -> Option<String>) -> Self {
        let mut table = HashMap::with_capacity(self.table.len());
        let mut source = self.table;
        for raw in order {
            let Some(vector) = source.remove(raw) else { continue };
            if let Some(key) = normalize(raw) {
                table.entry(key).or_insert(vector);
            }
        }
        Self {
            dim: self.dim,
            table,
        }
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn contains(&self, term: &str) -> bool {
        self.table.contains_key(term)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.table.keys().map(String::as_str)
    }

    /// Multiplies every stored vector by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            table: self
                .table
                .iter()
                .map(|(t, v)| (t.clone(), EmbeddingVector(v.0.iter().map(|x| x * factor).collect())))
                .collect(),
        }
    }
}

impl VectorSource for EmbeddingStore {
    fn dim(&self) -> usize {
        self.dim
    }

    fn vector(&self, term: &str) -> Option<&EmbeddingVector> {
        self.table.get(term)
    }
}

/// Reads a vector file and returns the store together with its terms in file order.
pub fn load_vectors_ordered(stream: impl Read) -> Result<(EmbeddingStore, Vec<String>)> {
    let mut text = String::new();
    BufReader::new(stream).read_to_string(&mut text)?;
    let store = EmbeddingStore::load(text.as_bytes())?;
    let order = text
        .lines()
        .filter_map(|l| l.split_whitespace().next())
        .filter(|t| store.contains(t))
        .map(String::from)
        .collect();
    Ok((store, order))
}

/// `u·v / (‖u‖‖v‖)`, clamped to `[-1, 1]`.
pub fn cosine(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            expected: u.dim(),
            found: v.dim(),
        });
    }
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((u.dot(v) / (nu * nv)).clamp(-1.0, 1.0))
}

/// `exp(cos(w, q))`, the expansion-candidate score. Lies in `[1/e, e]`.
pub fn candidate_score(candidate: &EmbeddingVector, query: &EmbeddingVector) -> Result<f64> {
    Ok(cosine(candidate, query)?.exp())
}

/// `(Σ weight(t)·v(t)) / (Σ weight(t))` over the terms that have vectors.
///
/// Out-of-vocabulary terms are skipped and do not contribute to the
/// normalizer. The normalizer is the signed weight sum.
pub fn weighted_mean<S, F>(terms: &[S], store: &dyn VectorSource, weight: F) -> Result<EmbeddingVector>
where
    S: AsRef<str>,
    F: Fn(&str) -> f64,
{
    let mut sum = vec![0.0; store.dim()];
    let mut total = 0.0;
    let mut embedded = 0usize;
    for term in terms {
        let term = term.as_ref();
        let Some(v) = store.vector(term) else { continue };
        let w = weight(term);
        for (acc, x) in sum.iter_mut().zip(v.as_slice()) {
            *acc += w * x;
        }
        total += w;
        embedded += 1;
    }
    if embedded == 0 {
        return Err(Error::EmptyRepresentation);
    }
    if total == 0.0 || !total.is_finite() {
        return Err(Error::DegenerateWeights);
    }
    Ok(EmbeddingVector(sum.into_iter().map(|x| x / total).collect()))
}

/// Average word embedding: uniform mean over embedded terms (with multiplicity).
pub fn awe<S: AsRef<str>>(terms: &[S], store: &dyn VectorSource) -> Result<EmbeddingVector> {
    weighted_mean(terms, store, |_| 1.0)
}

/// IDF-weighted average word embedding.
pub fn idf_awe<S: AsRef<str>>(
    terms: &[S],
    store: &dyn VectorSource,
    index: &InvertedIndex,
    variant: IdfVariant,
) -> Result<EmbeddingVector> {
    weighted_mean(terms, store, |t| index.idf(t, variant))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Awe,
    IdfAwe,
}

/// Builds a query or document vector with the chosen averaging.
pub fn represent<S: AsRef<str>>(
    terms: &[S],
    store: &dyn VectorSource,
    mode: Representation,
    index: &InvertedIndex,
    variant: IdfVariant,
) -> Result<EmbeddingVector> {
    match mode {
        Representation::Awe => awe(terms, store),
        Representation::IdfAwe => idf_awe(terms, store, index, variant),
    }
}

/// Vector of a document's full term multiset.
pub fn doc_vector<S: AsRef<str>>(
    tokens: &[S],
    store: &dyn VectorSource,
    mode: Representation,
    index: &InvertedIndex,
    variant: IdfVariant,
) -> Result<EmbeddingVector> {
    represent(tokens, store, mode, index, variant)
}
