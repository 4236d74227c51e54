//! Text formats for prepared vectors and vocabularies.
//!
//! Vectors:
//! ```text
//! p=<int> k=<int> n=<int>
//! # free-form comment lines
//! <class_index> <index>:<weight> <index>:<weight> ...
//! #classes
//! <class name, one per line>
//! ```
//! Vocabulary:
//! ```text
//! tcb-vocab v1 p=<int> n_train=<int> stem=<bool> stopwords=<name>
//! <term>\t<index>\t<df>
//! ```

use std::io::{BufRead, Write};

use crate::scalar::{fmt_sig17, Real};

use super::{LabeledVector, PipelineConfig, PreprocessError, SparseVector, StopList, Vocabulary};

pub const VOCAB_HEADER: &str = "tcb-vocab v1";
const CLASSES_SENTINEL: &str = "#classes";

/// Labeled vectors plus the class-name table they index into.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet<T> {
    pub p: usize,
    pub class_names: Vec<String>,
    pub rows: Vec<LabeledVector<T>>,
}

impl<T: Real> VectorSet<T> {
    pub fn k(&self) -> usize {
        self.class_names.len()
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> PreprocessError {
    PreprocessError::Parse {
        line,
        message: message.into(),
    }
}

/// Writes the vectors format; `comments` become `# ` lines after the header.
pub fn write_vectors<T: Real, W: Write>(mut w: W, set: &VectorSet<T>, comments: &[String]) -> std::io::Result<()> {
    writeln!(w, "p={} k={} n={}", set.p, set.k(), set.n())?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    for row in &set.rows {
        write!(w, "{}", row.class_index)?;
        write_sparse_entries(&mut w, &row.vector)?;
        writeln!(w)?;
    }
    writeln!(w, "{CLASSES_SENTINEL}")?;
    for name in &set.class_names {
        writeln!(w, "{name}")?;
    }
    Ok(())
}

/// ` <index>:<weight>` for every entry, weights at 17 significant digits.
pub fn write_sparse_entries<T: Real, W: Write>(w: &mut W, v: &SparseVector<T>) -> std::io::Result<()> {
    for &(i, x) in v.entries() {
        write!(w, " {}:{}", i, fmt_sig17(x))?;
    }
    Ok(())
}

/// Parses whitespace-separated `index:weight` tokens.
pub fn parse_sparse_entries<'a, T: Real>(
    tokens: impl Iterator<Item = &'a str>,
    line: usize,
) -> Result<SparseVector<T>, PreprocessError> {
    let mut entries = Vec::new();
    for tok in tokens {
        let (i, x) = tok
            .split_once(':')
            .ok_or_else(|| parse_err(line, format!("expected index:weight, got {tok:?}")))?;
        let i: usize = i
            .parse()
            .map_err(|_| parse_err(line, format!("bad feature index {i:?}")))?;
        let x: T = x.parse().map_err(|_| parse_err(line, format!("bad weight {x:?}")))?;
        entries.push((i, x));
    }
    SparseVector::from_entries(entries).map_err(|e| parse_err(line, e.to_string()))
}

fn parse_header_field(field: Option<&str>, key: &str, line: usize) -> Result<usize, PreprocessError> {
    let field = field.ok_or_else(|| parse_err(line, format!("missing {key}= in header")))?;
    field
        .strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected {key}=<int>, got {field:?}")))
}

pub fn read_vectors<T: Real, R: BufRead>(r: R) -> Result<VectorSet<T>, PreprocessError> {
    let mut lines = r.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = loop {
        match lines.next() {
            None => return Err(PreprocessError::EmptyInput),
            Some((n, l)) => {
                let l = l?;
                if !l.trim().is_empty() {
                    break (n, l);
                }
            }
        }
    };
    let mut fields = header.split_whitespace();
    let p = parse_header_field(fields.next(), "p", hline)?;
    let k = parse_header_field(fields.next(), "k", hline)?;
    let n = parse_header_field(fields.next(), "n", hline)?;

    let mut rows = Vec::with_capacity(n);
    let mut class_names = Vec::with_capacity(k);
    let mut in_classes = false;
    for (ln, l) in lines {
        let l = l?;
        if in_classes {
            if !l.is_empty() {
                class_names.push(l);
            }
            continue;
        }
        let t = l.trim();
        if t == CLASSES_SENTINEL {
            in_classes = true;
            continue;
        }
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let mut toks = t.split_whitespace();
        let c: usize = toks
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| parse_err(ln, "expected class index"))?;
        if c >= k {
            return Err(parse_err(ln, format!("class index {c} >= k={k}")));
        }
        let v = parse_sparse_entries(toks, ln)?;
        if v.dim_lower_bound() > p {
            return Err(parse_err(ln, format!("feature index >= p={p}")));
        }
        rows.push(LabeledVector::new(v, c));
    }
    if !in_classes {
        return Err(parse_err(0, "missing #classes table"));
    }
    if rows.len() != n {
        return Err(parse_err(0, format!("header says n={n} but found {} rows", rows.len())));
    }
    if class_names.len() != k {
        return Err(parse_err(
            0,
            format!("header says k={k} but found {} class names", class_names.len()),
        ));
    }
    Ok(VectorSet { p, class_names, rows })
}

/// Vocabulary together with the analysis settings needed to reproduce it.
#[derive(Debug, Clone, PartialEq)]
pub struct VocabularyFile {
    pub vocabulary: Vocabulary,
    pub stem: bool,
    pub stopwords: StopList,
}

impl VocabularyFile {
    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            min_df: 1,
            stem: self.stem,
            stopwords: self.stopwords,
        }
    }
}

pub fn write_vocabulary<W: Write>(mut w: W, file: &VocabularyFile) -> std::io::Result<()> {
    let v = &file.vocabulary;
    writeln!(
        w,
        "{VOCAB_HEADER} p={} n_train={} stem={} stopwords={}",
        v.len(),
        v.n_train_docs(),
        file.stem,
        file.stopwords
    )?;
    for (i, term) in v.terms().iter().enumerate() {
        writeln!(w, "{term}\t{i}\t{}", v.doc_freq(i))?;
    }
    Ok(())
}

pub fn read_vocabulary<R: BufRead>(r: R) -> Result<VocabularyFile, PreprocessError> {
    let mut lines = r.lines();
    let header = lines.next().ok_or(PreprocessError::EmptyInput)??;
    let rest = header
        .strip_prefix(VOCAB_HEADER)
        .ok_or_else(|| parse_err(1, format!("expected header starting {VOCAB_HEADER:?}")))?;
    let mut p = None;
    let mut n_train = None;
    let mut stem = None;
    let mut stopwords = None;
    for kv in rest.split_whitespace() {
        let (key, val) = kv
            .split_once('=')
            .ok_or_else(|| parse_err(1, format!("bad header field {kv:?}")))?;
        match key {
            "p" => p = val.parse::<usize>().ok(),
            "n_train" => n_train = val.parse::<usize>().ok(),
            "stem" => stem = val.parse::<bool>().ok(),
            "stopwords" => stopwords = Some(StopList::from_name(val)?),
            _ => {}
        }
    }
    let (p, n_train, stem, stopwords) = match (p, n_train, stem, stopwords) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => return Err(parse_err(1, "header needs p, n_train, stem and stopwords")),
    };
    let mut entries = Vec::with_capacity(p);
    for (i, l) in lines.enumerate() {
        let ln = i + 2;
        let l = l?;
        if l.is_empty() {
            continue;
        }
        let mut parts = l.split('\t');
        let (term, idx, df) = match (parts.next(), parts.next(), parts.next()) {
            (Some(t), Some(i), Some(d)) => (t, i, d),
            _ => return Err(parse_err(ln, "expected term<TAB>index<TAB>df")),
        };
        let idx: usize = idx.parse().map_err(|_| parse_err(ln, "bad index"))?;
        if idx != entries.len() {
            return Err(parse_err(ln, format!("index {idx} out of sequence")));
        }
        let df: usize = df.parse().map_err(|_| parse_err(ln, "bad df"))?;
        entries.push((term.to_string(), df));
    }
    if entries.len() != p {
        return Err(parse_err(
            0,
            format!("header says p={p} but found {} terms", entries.len()),
        ));
    }
    Ok(VocabularyFile {
        vocabulary: Vocabulary::from_parts(entries, n_train)?,
        stem,
        stopwords,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> VectorSet<f64> {
        VectorSet {
            p: 5,
            class_names: vec!["grain".into(), "crude oil".into()],
            rows: vec![
                LabeledVector::new(SparseVector::from_entries(vec![(0, 0.6), (4, 0.8)]).unwrap(), 1),
                LabeledVector::new(SparseVector::zeros(), 0),
                LabeledVector::new(SparseVector::from_entries(vec![(2, 1.0 / 3.0)]).unwrap(), 0),
            ],
        }
    }

    #[test]
    fn vectors_round_trip_bitwise() {
        let mut buf = Vec::new();
        write_vectors(&mut buf, &sample(), &["seed=42".into()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("p=5 k=2 n=3\n# seed=42\n1 0:5.9999999999999998e-1 4:8.0000000000000004e-1\n0\n"));
        let back: VectorSet<f64> = read_vectors(&buf[..]).unwrap();
        assert_eq!(back, sample());
    }

    #[test]
    fn vectors_validation() {
        let bad_class = "p=3 k=1 n=1\n1 0:1\n#classes\na\n";
        assert!(read_vectors::<f64, _>(bad_class.as_bytes()).is_err());
        let bad_index = "p=3 k=1 n=1\n0 3:1\n#classes\na\n";
        assert!(read_vectors::<f64, _>(bad_index.as_bytes()).is_err());
        let wrong_n = "p=3 k=1 n=2\n0 1:1\n#classes\na\n";
        assert!(read_vectors::<f64, _>(wrong_n.as_bytes()).is_err());
        assert!(matches!(
            read_vectors::<f64, _>("".as_bytes()),
            Err(PreprocessError::EmptyInput)
        ));
    }

    #[test]
    fn vocabulary_round_trip() {
        let file = VocabularyFile {
            vocabulary: Vocabulary::from_parts(vec![("corn".into(), 3), ("wheat".into(), 1)], 4).unwrap(),
            stem: true,
            stopwords: StopList::Smart,
        };
        let mut buf = Vec::new();
        write_vocabulary(&mut buf, &file).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "tcb-vocab v1 p=2 n_train=4 stem=true stopwords=smart\ncorn\t0\t3\nwheat\t1\t1\n"
        );
        assert_eq!(read_vocabulary(&buf[..]).unwrap(), file);
    }
}
