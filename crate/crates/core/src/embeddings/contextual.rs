//! Occurrence-averaged contextual term vectors.
//!
//! A contextual model assigns each occurrence of a term its own vector,
//! conditioned on the ±radius tokens around it. Vectors come from a
//! [`ContextualProvider`]; [`ContextualFile`] serves precomputed vectors.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Read};

use super::EmbeddingVector;
use crate::{Error, Result};

/// Context radius N; windows span up to 2N+1 tokens.
pub const DEFAULT_CONTEXT_RADIUS: usize = 2;

/// The tokens around one occurrence of a term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextWindow<'a> {
    /// Position of the center token in the document.
    pub position: usize,
    pub left: &'a [String],
    pub center: &'a str,
    pub right: &'a [String],
}

impl ContextWindow<'_> {
    pub fn len(&self) -> usize {
        self.left.len() + 1 + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// One window per occurrence of `term`, truncated at document boundaries.
pub fn context_windows<'a>(tokens: &'a [String], term: &str, radius: usize) -> Vec<ContextWindow<'a>> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, t)| t.as_str() == term)
        .map(|(i, t)| ContextWindow {
            position: i,
            left: &tokens[i.saturating_sub(radius)..i],
            center: t,
            right: &tokens[i + 1..(i + 1 + radius).min(tokens.len())],
        })
        .collect()
}

/// Source of per-occurrence vectors.
pub trait ContextualProvider: Send + Sync {
    fn dim(&self) -> usize;

    fn radius(&self) -> usize {
        DEFAULT_CONTEXT_RADIUS
    }

    /// Vector for occurrence `occurrence` (0-based, document order) of `term` in `doc_id`.
    fn occurrence_vector(
        &self,
        doc_id: &str,
        term: &str,
        occurrence: usize,
        window: &ContextWindow<'_>,
    ) -> Option<EmbeddingVector>;
}

/// Precomputed vectors read from `doc_id<TAB>term<TAB>occurrence<TAB>v1 ... vd` lines.
#[derive(Debug, Clone, Default)]
pub struct ContextualFile {
    dim: usize,
    radius: usize,
    vectors: HashMap<(String, String, usize), EmbeddingVector>,
}

impl ContextualFile {
    pub fn load(stream: impl Read) -> Result<Self> {
        let mut out = Self {
            dim: 0,
            radius: DEFAULT_CONTEXT_RADIUS,
            vectors: HashMap::new(),
        };
        for (i, line) in BufReader::new(stream).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let fail = |message: String| Error::VectorLine { line: i + 1, message };
            let fields: Vec<&str> = line.split('\t').collect();
            let [doc_id, term, occurrence, values] = fields.as_slice() else {
                return Err(fail(format!("expected 4 tab-separated fields, found {}", fields.len())));
            };
            let occurrence: usize = occurrence
                .trim()
                .parse()
                .map_err(|_| fail(format!("occurrence index `{occurrence}` is not an integer")))?;
            let values = values
                .split_whitespace()
                .map(|v| match v.parse::<f64>() {
                    Ok(x) if x.is_finite() => Ok(x),
                    _ => Err(fail(format!("component `{v}` is not a finite number"))),
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.is_empty() {
                return Err(fail("no vector components".into()));
            }
            if out.dim == 0 {
                out.dim = values.len();
            } else if values.len() != out.dim {
                return Err(fail(format!("expected {} components, found {}", out.dim, values.len())));
            }
            out.vectors.insert(
                (doc_id.to_string(), term.to_string(), occurrence),
                EmbeddingVector::new(values),
            );
        }
        Ok(out)
    }

    pub fn with_radius(mut self, radius: usize) -> Self {
        self.radius = radius;
        self
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

impl ContextualProvider for ContextualFile {
    fn dim(&self) -> usize {
        self.dim
    }

    fn radius(&self) -> usize {
        self.radius
    }

    fn occurrence_vector(
        &self,
        doc_id: &str,
        term: &str,
        occurrence: usize,
        _window: &ContextWindow<'_>,
    ) -> Option<EmbeddingVector> {
        self.vectors
            .get(&(doc_id.to_string(), term.to_string(), occurrence))
            .cloned()
    }
}

/// Mean of the provider's vectors over every occurrence of `term` in the document.
pub fn contextual_term_vector(
    term: &str,
    doc_id: &str,
    tokens: &[String],
    provider: &dyn ContextualProvider,
) -> Result<EmbeddingVector> {
    let windows = context_windows(tokens, term, provider.radius());
    if windows.is_empty() {
        return Err(Error::NoOccurrence {
            doc_id: doc_id.to_string(),
            term: term.to_string(),
        });
    }
    let mut sum = vec![0.0; provider.dim()];
    for (j, window) in windows.iter().enumerate() {
        let v = provider
            .occurrence_vector(doc_id, term, j, window)
            .ok_or_else(|| Error::ProviderMiss {
                doc_id: doc_id.to_string(),
                term: term.to_string(),
                occurrence: j,
            })?;
        if v.dim() != sum.len() {
            return Err(Error::DimensionMismatch {
                expected: sum.len(),
                found: v.dim(),
            });
        }
        for (acc, x) in sum.iter_mut().zip(v.as_slice()) {
            *acc += x;
        }
    }
    let m = windows.len() as f64;
    Ok(EmbeddingVector::new(sum.into_iter().map(|x| x / m).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tokens(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn windows_truncate_at_boundaries() {
        let doc = tokens("a b c d e f a");
        let w = context_windows(&doc, "a", 2);
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].left.len(), 0);
        assert_eq!(w[0].right, ["b", "c"]);
        assert_eq!(w[0].len(), 3);
        assert_eq!(w[1].position, 6);
        assert_eq!(w[1].left, ["e", "f"]);
        assert!(w[1].right.is_empty());
        let mid = context_windows(&doc, "d", 2);
        assert_eq!(mid[0].len(), 5);
        assert!(context_windows(&tokens("a"), "a", 2)[0].len() == 1);
    }

    fn provider(lines: &str) -> ContextualFile {
        ContextualFile::load(lines.as_bytes()).unwrap()
    }

    #[test]
    fn averaging() {
        let p = provider("d1\tx\t0\t1 0\nd1\tx\t1\t0 1\nd2\tx\t0\t0.25 0.5\n");
        let one = contextual_term_vector("x", "d2", &tokens("x y"), &p).unwrap();
        assert_eq!(one.as_slice(), [0.25, 0.5]);
        let two = contextual_term_vector("x", "d1", &tokens("x y z x"), &p).unwrap();
        assert_eq!(two.as_slice(), [0.5, 0.5]);
    }

    #[test]
    fn errors() {
        let p = provider("d1\tx\t0\t1 0\n");
        assert!(matches!(
            contextual_term_vector("q", "d1", &tokens("x y"), &p),
            Err(Error::NoOccurrence { .. })
        ));
        match contextual_term_vector("x", "d1", &tokens("x x"), &p) {
            Err(Error::ProviderMiss { doc_id, term, occurrence }) => {
                assert_eq!((doc_id.as_str(), term.as_str(), occurrence), ("d1", "x", 1));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(ContextualFile::load("d1\tx\t0\t1 0\nd1\ty\t0\t1 0 0\n".as_bytes()).is_err());
        assert!(ContextualFile::load("d1 x 0 1 0\n".as_bytes()).is_err());
    }
}
