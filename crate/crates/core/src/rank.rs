use std::cmp::Ordering;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredDoc {
    pub doc_id: String,
    pub score: f64,
}

impl ScoredDoc {
    pub fn new(doc_id: impl Into<String>, score: f64) -> Self {
        // -0.0 and 0.0 must tie.
        Self {
            doc_id: doc_id.into(),
            score: score + 0.0,
        }
    }
}

/// Engine-wide result order: score descending, then doc id ascending.
pub fn rank_order(a: &ScoredDoc, b: &ScoredDoc) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.doc_id.cmp(&b.doc_id))
}

/// Score-descending list of distinct documents with doc-id tie-breaking.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankedList {
    entries: Vec<ScoredDoc>,
}

impl RankedList {
    pub fn new() -> Self {
        Self::default()
    }

    /// Sorts arbitrary `(doc_id, score)` pairs. Doc ids must be distinct.
    pub fn from_scores<I, S>(scores: I) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut entries: Vec<ScoredDoc> = scores
            .into_iter()
            .map(|(d, s)| ScoredDoc::new(d, s))
            .collect();
        entries.sort_unstable_by(rank_order);
        Self { entries }
    }

    /// Like [`from_scores`](Self::from_scores) but keeps only the best `k`.
    pub fn top_k<I, S>(scores: I, k: usize) -> Self
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let mut entries: Vec<ScoredDoc> = scores
            .into_iter()
            .map(|(d, s)| ScoredDoc::new(d, s))
            .collect();
        if k == 0 {
            entries.clear();
        } else if entries.len() > k {
            entries.select_nth_unstable_by(k - 1, rank_order);
            entries.truncate(k);
        }
        entries.sort_unstable_by(rank_order);
        Self { entries }
    }

    pub fn entries(&self) -> &[ScoredDoc] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<ScoredDoc> {
        self.entries
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ScoredDoc> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn doc_ids(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.doc_id.as_str()).collect()
    }

    pub fn score_of(&self, doc_id: &str) -> Option<f64> {
        self.entries
            .iter()
            .find(|e| e.doc_id == doc_id)
            .map(|e| e.score)
    }

    pub fn truncate(&mut self, k: usize) {
        self.entries.truncate(k);
    }

    /// Rescales scores linearly onto `[0, 1]`. A list whose scores are all
    /// equal maps every entry to 1.
    pub fn min_max_normalized(&self) -> RankedList {
        let (lo, hi) = self
            .entries
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
                (lo.min(e.score), hi.max(e.score))
            });
        let span = hi - lo;
        let entries = self
            .entries
            .iter()
            .map(|e| {
                let s = if span > 0.0 { (e.score - lo) / span } else { 1.0 };
                ScoredDoc::new(e.doc_id.clone(), s)
            })
            .collect::<Vec<_>>();
        let mut out = Self { entries };
        out.entries.sort_by(rank_order);
        out
    }
}

impl<'a> IntoIterator for &'a RankedList {
    type Item = &'a ScoredDoc;
    type IntoIter = std::slice::Iter<'a, ScoredDoc>;

    fn into_iter(self) -> Self::IntoIter {
        self.entries.iter()
    }
}
