use std::collections::{BTreeMap, HashMap, HashSet};

use crate::scalar::Real;

use super::{PreprocessError, SparseVector};

/// Training-fold vocabulary with document frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index_of: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    n_train_docs: usize,
}

impl Vocabulary {
    /// Assembles a vocabulary from `(term, df)` pairs already in index order.
    pub fn from_parts(entries: Vec<(String, usize)>, n_train_docs: usize) -> Result<Self, PreprocessError> {
        let mut index_of = HashMap::with_capacity(entries.len());
        let mut terms = Vec::with_capacity(entries.len());
        let mut doc_freq = Vec::with_capacity(entries.len());
        for (i, (term, df)) in entries.into_iter().enumerate() {
            if df == 0 || df > n_train_docs {
                return Err(PreprocessError::InvalidVocabulary(format!(
                    "term {term:?} has df {df} outside 1..={n_train_docs}"
                )));
            }
            if index_of.insert(term.clone(), i).is_some() {
                return Err(PreprocessError::InvalidVocabulary(format!("duplicate term {term:?}")));
            }
            terms.push(term);
            doc_freq.push(df);
        }
        Ok(Self {
            terms,
            index_of,
            doc_freq,
            n_train_docs,
        })
    }

    /// Number of features `p`.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index_of.get(term).copied()
    }

    pub fn doc_freq(&self, index: usize) -> usize {
        self.doc_freq[index]
    }

    pub fn n_train_docs(&self) -> usize {
        self.n_train_docs
    }

    /// True when every index of `v` is a feature of this vocabulary.
    pub fn covers<T: Real>(&self, v: &SparseVector<T>) -> bool {
        v.dim_lower_bound() <= self.len()
    }
}

/// Counts document frequencies over training documents only and keeps terms
/// with `df >= min_df`, ordered lexicographically.
pub fn build_vocabulary<D: AsRef<[S]>, S: AsRef<str>>(
    train_docs: &[D],
    min_df: usize,
) -> Result<Vocabulary, PreprocessError> {
    if train_docs.is_empty() {
        return Err(PreprocessError::EmptyTrainingSet);
    }
    if min_df == 0 || min_df > train_docs.len() {
        return Err(PreprocessError::InvalidConfig(format!(
            "min_df must be in 1..={} (got {min_df})",
            train_docs.len()
        )));
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in train_docs {
        let distinct: HashSet<&str> = doc.as_ref().iter().map(AsRef::as_ref).collect();
        for t in distinct {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let entries = df
        .into_iter()
        .filter(|&(_, c)| c >= min_df)
        .map(|(t, c)| (t.to_string(), c))
        .collect();
    Vocabulary::from_parts(entries, train_docs.len())
}

/// Log-TF × IDF weights, L2-normalized. Out-of-vocabulary terms are ignored;
/// a document with no weighted term maps to the zero vector.
pub fn vectorize<T: Real, S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary) -> SparseVector<T> {
    let mut tf: BTreeMap<usize, usize> = BTreeMap::new();
    for t in tokens {
        if let Some(i) = vocab.index_of(t.as_ref()) {
            *tf.entry(i).or_insert(0) += 1;
        }
    }
    let n = T::from_count(vocab.n_train_docs());
    let entries: Vec<(usize, T)> = tf
        .into_iter()
        .filter_map(|(i, count)| {
            let idf = (n / T::from_count(vocab.doc_freq(i))).ln();
            let w = (T::one() + T::from_count(count).ln()) * idf;
            (w > T::zero()).then_some((i, w))
        })
        .collect();
    SparseVector::from_entries(entries)
        .expect("sorted, finite by construction")
        .normalized()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn docs(d: &[&[&str]]) -> Vec<Vec<String>> {
        d.iter().map(|x| x.iter().map(|s| s.to_string()).collect()).collect()
    }

    #[test]
    fn document_frequency_and_threshold() {
        let d = docs(&[&["aterm"], &["aterm", "bterm", "bterm"]]);
        let v = build_vocabulary(&d, 1).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.terms(), &["aterm".to_string(), "bterm".to_string()]);
        assert_eq!(v.doc_freq(v.index_of("aterm").unwrap()), 2);
        assert_eq!(v.doc_freq(v.index_of("bterm").unwrap()), 1);
        assert_eq!(v.n_train_docs(), 2);

        let v2 = build_vocabulary(&d, 2).unwrap();
        assert_eq!(v2.len(), 1);
        assert_eq!(v2.index_of("aterm"), Some(0));

        let empty: Vec<Vec<String>> = vec![];
        assert!(matches!(
            build_vocabulary(&empty, 1),
            Err(PreprocessError::EmptyTrainingSet)
        ));
        assert!(build_vocabulary(&d, 0).is_err());
    }

    fn vocab_with(dfs: &[(&str, usize)], n: usize) -> Vocabulary {
        Vocabulary::from_parts(dfs.iter().map(|(t, d)| (t.to_string(), *d)).collect(), n).unwrap()
    }

    #[test]
    fn single_term_normalizes_to_one() {
        let v = vocab_with(&[("alpha", 3), ("beta", 1)], 10);
        let x: SparseVector<f64> = vectorize(&["beta", "beta", "zzz"], &v);
        assert_eq!(x.entries(), &[(1, 1.0)]);
    }

    #[test]
    fn ubiquitous_term_has_zero_idf() {
        let v = vocab_with(&[("alpha", 10), ("beta", 2)], 10);
        let only: SparseVector<f64> = vectorize(&["alpha"], &v);
        assert!(only.is_zero() && only.nnz() == 0);
        let both: SparseVector<f64> = vectorize(&["alpha", "beta"], &v);
        assert_eq!(both.entries(), &[(1, 1.0)]);
    }

    #[test]
    fn hand_computed_two_term_document() {
        // N=10, df(t1)=5, df(t2)=1, tf = (2, 1).
        // Pre-norm ((1+ln2)·ln2, ln10); normalized values from an independent
        // scalar script: 0.4541055332294705, 0.89094790234355348.
        let v = vocab_with(&[("t1", 5), ("t2", 1)], 10);
        let x: SparseVector<f64> = vectorize(&["t1", "t2", "t1"], &v);
        assert_eq!(x.nnz(), 2);
        assert!((x.entries()[0].1 - 0.454_105_533_229_470_5).abs() < 1e-15);
        assert!((x.entries()[1].1 - 0.890_947_902_343_553_5).abs() < 1e-15);
    }
}
