//! Trained classifiers behind one type, and their text file format.
//!
//! ```text
//! tcb-model v1 svm|rvm
//! # free-form comment lines
//! k=<int> p=<int> [bias_feature=<real>]
//! class <index> <name>
//! ```
//! then, for `svm`, one `w <class> <p weights>` and one `b <class> <weight>`
//! line per class; for `rvm`, one block per class:
//! ```text
//! block <class> m=<active count>
//! active <basis indices>
//! alpha <precisions>
//! mu <posterior means>
//! rv <basis> <index>:<weight> ...     (one line per non-bias basis)
//! ```
//! Reals are written with 17 significant digits.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::preprocess::io::{parse_sparse_entries, write_sparse_entries, VectorSet};
use crate::preprocess::{PreprocessError, SparseVector};
use crate::rvm::{train_rvm, RvmBinaryModel, RvmConfig, RvmError, RvmModel};
use crate::scalar::{fmt_sig17, Real};
use crate::svm::{train_svm, SvmConfig, SvmError, SvmModel};

pub const MODEL_HEADER: &str = "tcb-model v1";

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown model kind {0:?} (expected svm or rvm)")]
    UnknownKind(String),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Rvm(#[from] RvmError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<PreprocessError> for ModelError {
    fn from(e: PreprocessError) -> Self {
        match e {
            PreprocessError::Io(e) => ModelError::Io(e),
            PreprocessError::Parse { line, message } => ModelError::Parse { line, message },
            other => ModelError::Parse {
                line: 0,
                message: other.to_string(),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Svm,
    Rvm,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Svm => "svm",
            ModelKind::Rvm => "rvm",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "svm" => Ok(ModelKind::Svm),
            "rvm" => Ok(ModelKind::Rvm),
            other => Err(ModelError::UnknownKind(other.to_string())),
        }
    }
}

/// Training settings for either classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelConfig<T> {
    Svm(SvmConfig<T>),
    Rvm(RvmConfig<T>),
}

impl<T: Real> ModelConfig<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelConfig::Svm(_) => ModelKind::Svm,
            ModelConfig::Rvm(_) => ModelKind::Rvm,
        }
    }

    pub fn train(&self, set: &VectorSet<T>) -> Result<Model<T>, ModelError> {
        Ok(match self {
            ModelConfig::Svm(c) => Model::Svm(train_svm(set, c)?),
            ModelConfig::Rvm(c) => Model::Rvm(train_rvm(set, c)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model<T> {
    Svm(SvmModel<T>),
    Rvm(RvmModel<T>),
}

impl<T: Real> Model<T> {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Svm(_) => ModelKind::Svm,
            Model::Rvm(_) => ModelKind::Rvm,
        }
    }

    pub fn class_names(&self) -> &[String] {
        match self {
            Model::Svm(m) => m.class_names(),
            Model::Rvm(m) => m.class_names(),
        }
    }

    pub fn p(&self) -> usize {
        match self {
            Model::Svm(m) => m.p(),
            Model::Rvm(m) => m.p(),
        }
    }

    pub fn predict(&self, x: &SparseVector<T>) -> Result<usize, ModelError> {
        match self {
            Model::Svm(m) => Ok(m.predict(x)?),
            Model::Rvm(m) => {
                check_dim(x, m.p())?;
                Ok(m.predict(x))
            }
        }
    }

    /// Class probabilities; `None` for the SVM, which has no probabilistic output.
    pub fn predict_proba(&self, x: &SparseVector<T>) -> Result<Option<Vec<T>>, ModelError> {
        match self {
            Model::Svm(_) => Ok(None),
            Model::Rvm(m) => {
                check_dim(x, m.p())?;
                Ok(Some(m.predict_proba(x)))
            }
        }
    }
}

fn check_dim<T: Real>(x: &SparseVector<T>, p: usize) -> Result<(), RvmError> {
    if x.dim_lower_bound() > p {
        return Err(RvmError::FeatureOutOfRange {
            index: x.dim_lower_bound() - 1,
            p,
        });
    }
    Ok(())
}

fn join_reals<T: Real>(xs: &[T]) -> String {
    xs.iter().map(|&x| fmt_sig17(x)).collect::<Vec<_>>().join(" ")
}

pub fn write_model<T: Real, W: Write>(mut w: W, model: &Model<T>, comments: &[String]) -> std::io::Result<()> {
    writeln!(w, "{MODEL_HEADER} {}", model.kind())?;
    for c in comments {
        writeln!(w, "# {c}")?;
    }
    match model {
        Model::Svm(m) => {
            writeln!(
                w,
                "k={} p={} bias_feature={}",
                m.k(),
                m.p(),
                fmt_sig17(m.bias_feature())
            )?;
            write_classes(&mut w, m.class_names())?;
            for c in 0..m.k() {
                if m.p() == 0 {
                    writeln!(w, "w {c}")?;
                } else {
                    writeln!(w, "w {c} {}", join_reals(m.weights(c)))?;
                }
            }
            for (c, &b) in m.bias_weights().iter().enumerate() {
                writeln!(w, "b {c} {}", fmt_sig17(b))?;
            }
        }
        Model::Rvm(m) => {
            writeln!(w, "k={} p={}", m.k(), m.p())?;
            write_classes(&mut w, m.class_names())?;
            for (c, b) in m.binaries().iter().enumerate() {
                writeln!(w, "block {c} m={}", b.active().len())?;
                let active: Vec<String> = b.active().iter().map(ToString::to_string).collect();
                writeln!(w, "active {}", active.join(" "))?;
                writeln!(w, "alpha {}", join_reals(b.alphas()))?;
                writeln!(w, "mu {}", join_reals(b.weights_mu()))?;
                for (basis, rv) in b.active()[1..].iter().zip(b.relevance_vectors()) {
                    write!(w, "rv {basis}")?;
                    write_sparse_entries(&mut w, rv)?;
                    writeln!(w)?;
                }
            }
        }
    }
    Ok(())
}

fn write_classes<W: Write>(w: &mut W, names: &[String]) -> std::io::Result<()> {
    for (i, n) in names.iter().enumerate() {
        writeln!(w, "class {i} {n}")?;
    }
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    /// Next line that is neither blank nor a comment.
    fn next(&mut self) -> Result<Option<String>, ModelError> {
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l?;
            if l.trim().is_empty() || l.starts_with('#') {
                continue;
            }
            return Ok(Some(l));
        }
        Ok(None)
    }

    fn expect(&mut self, what: &str) -> Result<String, ModelError> {
        self.next()?
            .ok_or_else(|| self.err(format!("unexpected end of file, expected {what}")))
    }

    fn err(&self, message: impl Into<String>) -> ModelError {
        ModelError::Parse {
            line: self.line,
            message: message.into(),
        }
    }

    /// Splits off `tag` and returns the remaining fields.
    fn tagged(&mut self, tag: &str) -> Result<String, ModelError> {
        let l = self.expect(tag)?;
        match l.split_once(' ') {
            Some((t, rest)) if t == tag => Ok(rest.to_string()),
            None if l == tag => Ok(String::new()),
            _ => Err(self.err(format!("expected a {tag:?} line"))),
        }
    }

    fn reals<T: Real>(&self, s: &str) -> Result<Vec<T>, ModelError> {
        s.split_whitespace()
            .map(|f| f.parse::<T>().map_err(|_| self.err(format!("bad number {f:?}"))))
            .collect()
    }
}

fn header_fields(s: &str) -> Vec<(&str, &str)> {
    s.split_whitespace().filter_map(|kv| kv.split_once('=')).collect()
}

fn field<T: FromStr>(fields: &[(&str, &str)], key: &str) -> Option<T> {
    fields.iter().find(|(k, _)| *k == key).and_then(|(_, v)| v.parse().ok())
}

pub fn read_model<T: Real, R: BufRead>(r: R) -> Result<Model<T>, ModelError> {
    let mut lines = Lines {
        inner: r.lines(),
        line: 0,
    };
    let first = lines.expect("model header")?;
    let kind: ModelKind = first
        .strip_prefix(MODEL_HEADER)
        .map(str::trim)
        .ok_or_else(|| lines.err(format!("expected header {MODEL_HEADER:?}")))?
        .parse()?;
    let dims = lines.expect("k= p= line")?;
    let fields = header_fields(&dims);
    let (k, p): (usize, usize) = match (field(&fields, "k"), field(&fields, "p")) {
        (Some(k), Some(p)) => (k, p),
        _ => return Err(lines.err("expected k=<int> p=<int>")),
    };
    let mut names = Vec::with_capacity(k);
    for i in 0..k {
        let rest = lines.tagged("class")?;
        let (idx, name) = rest
            .split_once(' ')
            .ok_or_else(|| lines.err("expected class <index> <name>"))?;
        if idx.parse::<usize>().ok() != Some(i) {
            return Err(lines.err(format!("class index {idx:?} out of sequence")));
        }
        names.push(name.to_string());
    }
    match kind {
        ModelKind::Svm => {
            let bias_feature: T = field(&fields, "bias_feature").ok_or_else(|| lines.err("missing bias_feature"))?;
            let mut weights = Vec::with_capacity(k);
            for c in 0..k {
                let rest = lines.tagged("w")?;
                let (idx, vals) = rest.split_once(' ').unwrap_or((rest.as_str(), ""));
                if idx.parse::<usize>().ok() != Some(c) {
                    return Err(lines.err(format!("weight row {idx:?} out of sequence")));
                }
                let row = lines.reals::<T>(vals)?;
                if row.len() != p {
                    return Err(lines.err(format!("expected {p} weights, found {}", row.len())));
                }
                weights.push(row);
            }
            let mut bias = Vec::with_capacity(k);
            for c in 0..k {
                let rest = lines.tagged("b")?;
                let v = lines.reals::<T>(&rest)?;
                if v.len() != 2 || v[0] != T::from_count(c) {
                    return Err(lines.err(format!("expected b {c} <weight>")));
                }
                bias.push(v[1]);
            }
            Ok(Model::Svm(SvmModel::from_parts(names, p, weights, bias, bias_feature)?))
        }
        ModelKind::Rvm => {
            let mut binaries = Vec::with_capacity(k);
            for c in 0..k {
                let head = lines.tagged("block")?;
                let mut parts = head.split_whitespace();
                if parts.next().and_then(|s| s.parse::<usize>().ok()) != Some(c) {
                    return Err(lines.err(format!("expected block {c}")));
                }
                let m: usize = parts
                    .next()
                    .and_then(|s| s.strip_prefix("m="))
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| lines.err("expected m=<int>"))?;
                let active: Vec<usize> = lines
                    .tagged("active")?
                    .split_whitespace()
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|_| lines.err(format!("bad basis index {s:?}")))
                    })
                    .collect::<Result<_, _>>()?;
                let alpha_line = lines.tagged("alpha")?;
                let alphas = lines.reals::<T>(&alpha_line)?;
                let mu_line = lines.tagged("mu")?;
                let mu = lines.reals::<T>(&mu_line)?;
                if active.len() != m || alphas.len() != m || mu.len() != m {
                    return Err(lines.err(format!("block {c}: expected {m} entries per row")));
                }
                let mut rvs = Vec::with_capacity(m.saturating_sub(1));
                for &basis in active.iter().skip(1) {
                    let rest = lines.tagged("rv")?;
                    let (b, entries) = rest.split_once(' ').unwrap_or((rest.as_str(), ""));
                    if b.parse::<usize>().ok() != Some(basis) {
                        return Err(lines.err(format!("expected rv {basis}")));
                    }
                    let line = lines.line;
                    rvs.push(parse_sparse_entries::<T>(entries.split_whitespace(), line)?);
                }
                binaries.push(RvmBinaryModel::from_parts(active, mu, alphas, rvs)?);
            }
            Ok(Model::Rvm(RvmModel::from_parts(names, p, binaries)?))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::LabeledVector;

    fn fixture() -> VectorSet<f64> {
        let v = |e: Vec<(usize, f64)>| SparseVector::from_entries(e).unwrap();
        VectorSet {
            p: 3,
            class_names: vec!["alpha".into(), "beta gamma".into()],
            rows: vec![
                LabeledVector::new(v(vec![(0, 0.8), (1, 0.6)]), 0),
                LabeledVector::new(v(vec![(0, 1.0)]), 0),
                LabeledVector::new(v(vec![(2, 1.0)]), 1),
                LabeledVector::new(v(vec![(1, 0.6), (2, 0.8)]), 1),
            ],
        }
    }

    fn round_trip(m: &Model<f64>) -> Model<f64> {
        let mut buf = Vec::new();
        write_model(&mut buf, m, &["seed=42".into()]).unwrap();
        read_model(buf.as_slice()).unwrap()
    }

    #[test]
    fn svm_round_trip_is_exact() {
        let m = ModelConfig::Svm(SvmConfig::default()).train(&fixture()).unwrap();
        let mut buf = Vec::new();
        write_model(&mut buf, &m, &[]).unwrap();
        assert!(buf.starts_with(b"tcb-model v1 svm\n"));
        assert_eq!(round_trip(&m), m);
    }

    #[test]
    fn rvm_round_trip_is_exact() {
        let m = ModelConfig::Rvm(RvmConfig::default()).train(&fixture()).unwrap();
        let mut buf = Vec::new();
        write_model(&mut buf, &m, &[]).unwrap();
        assert!(buf.starts_with(b"tcb-model v1 rvm\n"));
        assert_eq!(round_trip(&m), m);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            read_model::<f64, _>(&b"tcb-model v1 xyz\n"[..]),
            Err(ModelError::UnknownKind(_))
        ));
        assert!(matches!(
            read_model::<f64, _>(&b"nonsense\n"[..]),
            Err(ModelError::Parse { line: 1, .. })
        ));
        let truncated = "tcb-model v1 svm\nk=2 p=1 bias_feature=1\nclass 0 a\nclass 1 b\nw 0 1.0\n";
        assert!(matches!(
            read_model::<f64, _>(truncated.as_bytes()),
            Err(ModelError::Parse { .. })
        ));
        assert!("xyz".parse::<ModelKind>().is_err());
    }
}
