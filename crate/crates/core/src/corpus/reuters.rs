//! Reuters-21578 SGML reader.
//!
//! Only the tags the corpus actually uses are recognized; there is no general
//! SGML machinery. Parsing runs on raw bytes so error offsets are byte
//! offsets into the file.

use std::path::{Path, PathBuf};

use super::{decode_lossy, read_file, Corpus, CorpusError, RawDocument};

/// Element counts from a Reuters load.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReutersStats {
    /// `REUTERS` elements seen.
    pub parsed: usize,
    /// Documents with exactly one topic.
    pub retained: usize,
    /// Documents with zero or several topics.
    pub skipped: usize,
}

fn find(hay: &[u8], needle: &[u8], from: usize) -> Option<usize> {
    if from >= hay.len() {
        return None;
    }
    hay[from..]
        .windows(needle.len())
        .position(|w| w == needle)
        .map(|p| p + from)
}

/// Inner bytes of the first `<tag ...>...</tag>` in `hay`.
fn element<'a>(hay: &'a [u8], tag: &str) -> Option<&'a [u8]> {
    let open = format!("<{tag}");
    let close = format!("</{tag}>");
    let mut from = 0;
    loop {
        let start = find(hay, open.as_bytes(), from)?;
        let after = start + open.len();
        // `<D` must not match `<DATE`.
        match hay.get(after) {
            Some(b'>') | Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r') => {}
            _ => {
                from = after;
                continue;
            }
        }
        let content_start = find(hay, b">", after)? + 1;
        let end = find(hay, close.as_bytes(), content_start)?;
        return Some(&hay[content_start..end]);
    }
}

fn all_elements<'a>(mut hay: &'a [u8], tag: &str) -> Vec<&'a [u8]> {
    let close = format!("</{tag}>");
    let mut out = Vec::new();
    while let Some(inner) = element(hay, tag) {
        out.push(inner);
        let consumed = inner.as_ptr() as usize - hay.as_ptr() as usize + inner.len() + close.len();
        hay = &hay[consumed.min(hay.len())..];
    }
    out
}

fn attribute(open_tag: &[u8], name: &str) -> Option<String> {
    let key = format!("{name}=\"");
    let start = find(open_tag, key.as_bytes(), 0)? + key.len();
    let end = find(open_tag, b"\"", start)?;
    Some(decode_lossy(&open_tag[start..end]))
}

fn strip_tags(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut in_tag = false;
    for c in s.chars() {
        match c {
            '<' => in_tag = true,
            '>' if in_tag => {
                in_tag = false;
                out.push(' ');
            }
            _ if !in_tag => out.push(c),
            _ => {}
        }
    }
    out
}

/// Decodes `&lt; &gt; &amp; &#N;` and drops control characters such as the
/// `&#3;` end-of-text marks.
fn decode_entities(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        let semi = tail.find(';').filter(|&i| i <= 8);
        let decoded = semi.and_then(|i| {
            let name = &tail[1..i];
            let ch = match name {
                "lt" => Some('<'),
                "gt" => Some('>'),
                "amp" => Some('&'),
                _ => name
                    .strip_prefix('#')
                    .and_then(|n| n.parse::<u32>().ok())
                    .and_then(char::from_u32),
            };
            ch.map(|c| (c, i + 1))
        });
        match decoded {
            Some((c, used)) => {
                out.push(c);
                rest = &tail[used..];
            }
            None => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out.chars()
        .filter(|c| !c.is_control() || matches!(c, '\n' | '\t'))
        .collect()
}

fn text_of(bytes: &[u8]) -> String {
    decode_entities(&decode_lossy(bytes))
}

/// Parses one SGML file's contents. `source` names the file in errors and
/// in fallback ids.
pub fn parse_reuters_sgml(bytes: &[u8], source: &Path) -> Result<(Vec<RawDocument>, ReutersStats), CorpusError> {
    let mut docs = Vec::new();
    let mut stats = ReutersStats::default();
    let mut pos = 0;
    while let Some(start) = find(bytes, b"<REUTERS", pos) {
        let sgml_err = |message: &str| CorpusError::Sgml {
            path: source.to_path_buf(),
            offset: start,
            message: message.to_string(),
        };
        let open_end = find(bytes, b">", start).ok_or_else(|| sgml_err("unterminated REUTERS tag"))?;
        let end = find(bytes, b"</REUTERS>", open_end).ok_or_else(|| sgml_err("unterminated REUTERS element"))?;
        if let Some(nested) = find(&bytes[..end], b"<REUTERS", open_end) {
            return Err(CorpusError::Sgml {
                path: source.to_path_buf(),
                offset: start,
                message: format!("REUTERS element not closed before next one at byte {nested}"),
            });
        }
        stats.parsed += 1;
        let open_tag = &bytes[start..open_end];
        let body = &bytes[open_end + 1..end];
        pos = end + b"</REUTERS>".len();

        let topics: Vec<String> = element(body, "TOPICS")
            .map(|t| {
                all_elements(t, "D")
                    .into_iter()
                    .map(|d| text_of(d).trim().to_string())
                    .filter(|d| !d.is_empty())
                    .collect()
            })
            .unwrap_or_default();
        if topics.len() != 1 {
            stats.skipped += 1;
            continue;
        }

        let title = element(body, "TITLE").map(text_of);
        let text_body = element(body, "BODY").map(text_of);
        let text = match (title, text_body) {
            (None, None) => element(body, "TEXT")
                .map(|t| decode_entities(&strip_tags(&decode_lossy(t))))
                .unwrap_or_default(),
            (t, b) => {
                let mut s = t.unwrap_or_default();
                if let Some(b) = b {
                    if !s.is_empty() {
                        s.push('\n');
                    }
                    s.push_str(&b);
                }
                s
            }
        };
        let id = attribute(open_tag, "NEWID").unwrap_or_else(|| {
            let stem = source.file_stem().unwrap_or_default().to_string_lossy();
            format!("{stem}:{}", stats.parsed)
        });
        docs.push(RawDocument::new(
            id,
            topics.into_iter().next().unwrap_or_default(),
            text,
        ));
        stats.retained += 1;
    }
    Ok((docs, stats))
}

fn sgml_files(path: &Path) -> Result<Vec<PathBuf>, CorpusError> {
    if path.is_file() {
        return Ok(vec![path.to_path_buf()]);
    }
    let io_err = |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)
        .map_err(io_err)?
        .collect::<Result<Vec<_>, _>>()
        .map_err(io_err)?
        .into_iter()
        .map(|e| e.path())
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("sgm")))
        .collect();
    files.sort();
    Ok(files)
}

/// Loads single-topic documents from one `.sgm` file or a directory of them.
pub fn load_reuters21578(path: impl AsRef<Path>) -> Result<Corpus, CorpusError> {
    load_reuters21578_with_stats(path).map(|(c, _)| c)
}

pub fn load_reuters21578_with_stats(path: impl AsRef<Path>) -> Result<(Corpus, ReutersStats), CorpusError> {
    let mut docs = Vec::new();
    let mut total = ReutersStats::default();
    for f in sgml_files(path.as_ref())? {
        let (d, s) = parse_reuters_sgml(&read_file(&f)?, &f)?;
        docs.extend(d);
        total.parsed += s.parsed;
        total.retained += s.retained;
        total.skipped += s.skipped;
    }
    if total.skipped > 0 {
        log::info!(
            "reuters: kept {} of {} documents ({} without exactly one topic)",
            total.retained,
            total.parsed,
            total.skipped
        );
    }
    Ok((Corpus::new(docs)?, total))
}
