//! Text to TF-IDF vectors: tokenize, drop stop words, Porter-stem, count
//! document frequencies on training documents, weight and normalize.

pub mod io;
mod pipeline;
pub mod porter;
mod stopwords;
mod tokenize;
mod vector;
mod vocab;

pub use pipeline::PipelineConfig;
pub use porter::stem;
pub use stopwords::{remove_stopwords, remove_stopwords_named, StopList};
pub use tokenize::tokenize;
pub use vector::{LabeledVector, SparseVector};
pub use vocab::{build_vocabulary, vectorize, Vocabulary};

#[derive(Debug, thiserror::Error)]
pub enum PreprocessError {
    #[error("unknown stop list {0:?} (known: smart, none)")]
    UnknownStopList(String),
    #[error("cannot build a vocabulary from an empty training set")]
    EmptyTrainingSet,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid sparse vector: {0}")]
    InvalidVector(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
    #[error("empty input")]
    EmptyInput,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
