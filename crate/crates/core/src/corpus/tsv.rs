use std::path::Path;

use super::{decode_lossy, read_file, Corpus, CorpusError, RawDocument};

/// Loads `id<TAB>label<TAB>text` records; blank lines are skipped.
pub fn load_tsv(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let bytes = read_file(path.as_ref())?;
    parse_tsv(&decode_lossy(&bytes))
}

pub fn parse_tsv(content: &str) -> Result<Corpus, CorpusError> {
    let mut docs = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(id), Some(label), Some(text)) => docs.push(RawDocument::new(id, label, text)),
            _ => {
                return Err(CorpusError::Tsv {
                    line: i + 1,
                    message: "expected id<TAB>label<TAB>text".into(),
                })
            }
        }
    }
    Corpus::new(docs).map_err(|e| match e {
        CorpusError::InvalidDocument(m) | CorpusError::DuplicateId(m) => CorpusError::Tsv { line: 0, message: m },
        other => other,
    })
}
