use std::path::Path;

use super::{decode_lossy, read_file, Corpus, CorpusError, RawDocument};

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Drops the header block: everything up to and including the first blank line.
/// A file without a blank line is treated as all header.
fn strip_header(raw: &str) -> &str {
    let mut offset = 0;
    for line in raw.split_inclusive('\n') {
        offset += line.len();
        if line.trim_end_matches(['\r', '\n']).is_empty() {
            return &raw[offset..];
        }
    }
    ""
}

/// Loads a directory-per-class tree. Document id is `<class>/<filename>`.
pub fn load_20newsgroups(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    let root = path.as_ref();
    if !root.is_dir() {
        return Err(CorpusError::NotADirectory {
            path: root.to_path_buf(),
        });
    }
    let mut class_dirs: Vec<_> = std::fs::read_dir(root)
        .map_err(|e| io_err(root, e))?
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| io_err(root, e))?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    class_dirs.sort();

    let mut docs = Vec::new();
    for dir in class_dirs {
        let class = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
        let mut files: Vec<_> = std::fs::read_dir(&dir)
            .map_err(|e| io_err(&dir, e))?
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| io_err(&dir, e))?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.is_file())
            .collect();
        if files.is_empty() {
            log::warn!("class directory {} is empty; class dropped", dir.display());
            continue;
        }
        files.sort();
        for f in files {
            let name = f.file_name().unwrap_or_default().to_string_lossy();
            let raw = decode_lossy(&read_file(&f)?);
            docs.push(RawDocument::new(
                format!("{class}/{name}"),
                class.clone(),
                strip_header(&raw).to_string(),
            ));
        }
    }
    Corpus::new(docs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_stripping() {
        assert_eq!(strip_header("From: a\nSubject: b\n\nbody\nmore\n"), "body\nmore\n");
        assert_eq!(strip_header("From: a\r\n\r\nbody"), "body");
        assert_eq!(strip_header("From: a\n\n"), "");
        assert_eq!(strip_header("no blank line"), "");
    }
}
