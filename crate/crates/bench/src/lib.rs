//! Synthetic collections for benchmarking the retrieval and expansion paths.

use idfawe_core::corpus::Stoplist;
use idfawe_core::{EmbeddingStore, EmbeddingVector, InvertedIndex, Query, TokenizedDocument};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A Zipf-skewed corpus with random embeddings for every term.
pub struct Synthetic {
    pub docs: Vec<TokenizedDocument>,
    pub index: InvertedIndex,
    pub store: EmbeddingStore,
    pub stoplist: Stoplist,
    pub queries: Vec<Query>,
}

fn term(id: usize) -> String {
    format!("t{id}")
}

/// Term ids drawn with probability roughly proportional to `1/rank`.
fn zipf(rng: &mut ChaCha8Rng, vocab: usize) -> usize {
    let u: f64 = rng.gen();
    ((vocab as f64).powf(u) - 1.0) as usize % vocab
}

impl Synthetic {
    pub fn new(num_docs: usize, vocab: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let docs: Vec<TokenizedDocument> = (0..num_docs)
            .map(|i| {
                let len = rng.gen_range(50..400);
                let tokens = (0..len).map(|_| term(zipf(&mut rng, vocab))).collect();
                TokenizedDocument::new(format!("SYN-{i:06}"), tokens)
            })
            .collect();
        let index = InvertedIndex::build(&docs).expect("generated ids are unique");
        let mut store = EmbeddingStore::with_dim(dim);
        for t in 0..vocab {
            let v = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            store.insert(term(t), EmbeddingVector::new(v)).expect("fixed dimension");
        }
        let queries = (0..50)
            .map(|q| {
                let n = rng.gen_range(2..6);
                let terms = (0..n).map(|_| term(rng.gen_range(10..vocab.min(2000)))).collect();
                Query::new(format!("{q}"), terms)
            })
            .collect();
        Self {
            docs,
            index,
            store,
            stoplist: Stoplist::empty(),
            queries,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_seeded() {
        let a = Synthetic::new(50, 300, 8, 7);
        let b = Synthetic::new(50, 300, 8, 7);
        assert_eq!(a.docs, b.docs);
        assert_eq!(a.queries, b.queries);
        assert_eq!(a.index.num_docs(), 50);
        assert_eq!(a.store.len(), 300);
    }
}
