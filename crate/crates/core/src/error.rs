use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("duplicate document id `{0}`")]
    DuplicateDocId(String),

    #[error("index file is not an index (bad magic)")]
    BadMagic,
    #[error("index file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("index file checksum mismatch (truncated or corrupt)")]
    Checksum,
    #[error("index file is corrupt: {0}")]
    CorruptIndex(String),

    #[error("average document length is zero but a term frequency is positive")]
    DegenerateCorpus,

    #[error("vector file line {line}: {message}")]
    VectorLine { line: usize, message: String },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cosine similarity is undefined for a zero-norm vector")]
    ZeroNorm,
    #[error("no term has an embedding")]
    EmptyRepresentation,
    #[error("IDF weights sum to zero")]
    DegenerateWeights,
    #[error("term `{term}` does not occur in document `{doc_id}`")]
    NoOccurrence { doc_id: String, term: String },
    #[error("contextual provider has no vector for ({doc_id}, {term}, occurrence {occurrence})")]
    ProviderMiss {
        doc_id: String,
        term: String,
        occurrence: usize,
    },

    #[error("expansion term `{0}` also appears in the original query")]
    TermOverlap(String),

    #[error("run file line {line}: {message}")]
    RunLine { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    /// True for errors caused by the caller's configuration rather than by the data.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_))
    }
}
