//! Labeled document collections and the loaders that build them.

mod newsgroups;
mod reuters;
mod subset;
mod tsv;

use std::collections::{BTreeSet, HashSet};
use std::path::PathBuf;

pub use newsgroups::load_20newsgroups;
pub use reuters::{load_reuters21578, load_reuters21578_with_stats, parse_reuters_sgml, ReutersStats};
pub use subset::{sample_subset, SubsetSpec};
pub use tsv::{load_tsv, parse_tsv};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} is not a directory")]
    NotADirectory { path: PathBuf },
    #[error("{path}: malformed SGML at byte {offset}: {message}")]
    Sgml {
        path: PathBuf,
        offset: usize,
        message: String,
    },
    #[error("line {line}: {message}")]
    Tsv { line: usize, message: String },
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("duplicate document id {0:?}")]
    DuplicateId(String),
    #[error("subset infeasible: {0}")]
    InfeasibleSubset(String),
}

/// A labeled document in raw text form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub id: String,
    pub text: String,
    pub label: String,
}

impl RawDocument {
    pub fn new(id: impl Into<String>, label: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            label: label.into(),
        }
    }
}

/// Documents sorted by id, plus the sorted set of labels they use.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Corpus {
    documents: Vec<RawDocument>,
    classes: Vec<String>,
}

impl Corpus {
    /// Validates ids and labels, sorts documents by id and derives the class
    /// list, so every class has at least one document.
    pub fn new(mut documents: Vec<RawDocument>) -> Result<Self, CorpusError> {
        let mut seen = HashSet::with_capacity(documents.len());
        for d in &documents {
            if d.id.is_empty() {
                return Err(CorpusError::InvalidDocument("empty id".into()));
            }
            if d.label.is_empty() {
                return Err(CorpusError::InvalidDocument(format!(
                    "document {:?} has an empty label",
                    d.id
                )));
            }
            if !seen.insert(d.id.as_str()) {
                return Err(CorpusError::DuplicateId(d.id.clone()));
            }
        }
        documents.sort_by(|a, b| a.id.cmp(&b.id));
        let classes = documents
            .iter()
            .map(|d| d.label.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(Self { documents, classes })
    }

    pub fn documents(&self) -> &[RawDocument] {
        &self.documents
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.binary_search_by(|c| c.as_str().cmp(label)).ok()
    }

    /// Class index of every document, in document order.
    pub fn labels(&self) -> Vec<usize> {
        self.documents
            .iter()
            .map(|d| self.class_index(&d.label).expect("label in class set"))
            .collect()
    }

    /// Documents per class, aligned with [`Corpus::classes`].
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for c in self.labels() {
            counts[c] += 1;
        }
        counts
    }
}

/// The supported on-disk corpus layouts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusSource {
    Reuters,
    Ng20,
    Tsv,
}

impl CorpusSource {
    pub fn name(self) -> &'static str {
        match self {
            CorpusSource::Reuters => "reuters",
            CorpusSource::Ng20 => "ng20",
            CorpusSource::Tsv => "tsv",
        }
    }

    pub fn load(self, path: impl AsRef<std::path::Path>) -> Result<Corpus, CorpusError> {
        match self {
            CorpusSource::Reuters => load_reuters21578(path),
            CorpusSource::Ng20 => load_20newsgroups(path),
            CorpusSource::Tsv => load_tsv(path),
        }
    }
}

impl std::fmt::Display for CorpusSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CorpusSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reuters" => Ok(CorpusSource::Reuters),
            "ng20" => Ok(CorpusSource::Ng20),
            "tsv" => Ok(CorpusSource::Tsv),
            other => Err(format!("unknown source {other:?} (expected reuters, ng20 or tsv)")),
        }
    }
}

/// Decodes bytes as UTF-8, replacing invalid sequences.
pub(crate) fn decode_lossy(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

pub(crate) fn read_file(path: &std::path::Path) -> Result<Vec<u8>, CorpusError> {
    std::fs::read(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_sorts_and_derives_classes() {
        let c = Corpus::new(vec![
            RawDocument::new("b", "wheat", "x"),
            RawDocument::new("a", "corn", "y"),
            RawDocument::new("c", "corn", "z"),
        ])
        .unwrap();
        let ids: Vec<_> = c.documents().iter().map(|d| d.id.as_str()).collect();
        assert_eq!(ids, ["a", "b", "c"]);
        assert_eq!(c.classes(), ["corn", "wheat"]);
        assert_eq!(c.labels(), [0, 1, 0]);
        assert_eq!(c.class_counts(), [2, 1]);
    }

    #[test]
    fn corpus_rejects_bad_documents() {
        assert!(matches!(
            Corpus::new(vec![RawDocument::new("a", "x", ""), RawDocument::new("a", "y", "")]),
            Err(CorpusError::DuplicateId(_))
        ));
        assert!(Corpus::new(vec![RawDocument::new("", "x", "")]).is_err());
        assert!(Corpus::new(vec![RawDocument::new("a", "", "")]).is_err());
        assert!(Corpus::new(vec![]).unwrap().is_empty());
    }
}
