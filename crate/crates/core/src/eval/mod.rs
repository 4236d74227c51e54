//! Cross-validated comparison of the two classifiers: stratified folds,
//! micro/macro precision, recall and F1, paired t-tests and reports.

mod cv;
mod report;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::numerics::student_t_two_tailed_p;

pub use cv::{
    benchmark, parse_manifest, run_cv, BenchmarkReport, BenchmarkRow, CvResult, DatasetSpec, FoldResult, ModelSummary,
    RowOutcome,
};
pub use report::{
    compare_results, parse_results, render_csv, render_table, FoldRecord, TableCells, TableRow, CSV_HEADER,
};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("classes smaller than k={k}: {}", describe_small(.offenders))]
    ClassTooSmall { k: usize, offenders: Vec<(usize, usize)> },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("vocabulary built from held-out documents: {0}")]
    VocabularyLeak(String),
    #[error("cannot pair results: {0}")]
    Pairing(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Preprocess(#[from] crate::preprocess::PreprocessError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}

fn describe_small(offenders: &[(usize, usize)]) -> String {
    offenders
        .iter()
        .map(|(c, n)| format!("class {c} has {n}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Fold index of every document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &f in &self.fold_of {
            s[f] += 1;
        }
        s
    }
}

/// Within each class (in index order) the members are shuffled and dealt
/// round-robin; the dealing position carries over from one class to the
/// next so that fold totals also stay within one of each other.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidArgument(format!("k must be at least 2 (got {k})")));
    }
    let n_classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &c) in labels.iter().enumerate() {
        members[c].push(i);
    }
    let offenders: Vec<(usize, usize)> = members
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty() && m.len() < k)
        .map(|(c, m)| (c, m.len()))
        .collect();
    if !offenders.is_empty() {
        return Err(EvalError::ClassTooSmall { k, offenders });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0;
    for m in &mut members {
        m.shuffle(&mut rng);
        for &i in m.iter() {
            fold_of[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}

/// Per-class true positives, false positives and false negatives.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub tp: Vec<usize>,
    pub fp: Vec<usize>,
    pub fn_: Vec<usize>,
    pub total: usize,
}

impl ConfusionCounts {
    pub fn with_classes(k: usize) -> Self {
        Self {
            tp: vec![0; k],
            fp: vec![0; k],
            fn_: vec![0; k],
            total: 0,
        }
    }

    pub fn k(&self) -> usize {
        self.tp.len()
    }

    pub fn add(&mut self, predicted: usize, truth: usize) {
        let need = predicted.max(truth) + 1;
        if need > self.k() {
            self.tp.resize(need, 0);
            self.fp.resize(need, 0);
            self.fn_.resize(need, 0);
        }
        if predicted == truth {
            self.tp[truth] += 1;
        } else {
            self.fp[predicted] += 1;
            self.fn_[truth] += 1;
        }
        self.total += 1;
    }

    /// Sums counts class by class.
    pub fn merge(&mut self, other: &ConfusionCounts) {
        let k = self.k().max(other.k());
        self.tp.resize(k, 0);
        self.fp.resize(k, 0);
        self.fn_.resize(k, 0);
        for c in 0..other.k() {
            self.tp[c] += other.tp[c];
            self.fp[c] += other.fp[c];
            self.fn_[c] += other.fn_[c];
        }
        self.total += other.total;
    }
}

pub fn confusion(predicted: &[usize], truth: &[usize]) -> Result<ConfusionCounts, EvalError> {
    if predicted.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            left: predicted.len(),
            right: truth.len(),
        });
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &t) in predicted.iter().zip(truth) {
        counts.add(p, t);
    }
    Ok(counts)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Pooled precision, recall and F1 (`2TP / (2TP + FP + FN)`); 0/0 is 0.
pub fn micro_metrics(c: &ConfusionCounts) -> (f64, f64, f64) {
    let tp: usize = c.tp.iter().sum();
    let fp: usize = c.fp.iter().sum();
    let fn_: usize = c.fn_.iter().sum();
    (
        ratio(tp, tp + fp),
        ratio(tp, tp + fn_),
        ratio(2 * tp, 2 * tp + fp + fn_),
    )
}

/// Unweighted means of per-class precision, recall and F1 over the classes
/// that occur in the truth; 0/0 is 0.
pub fn macro_metrics(c: &ConfusionCounts) -> (f64, f64, f64) {
    let present: Vec<usize> = (0..c.k()).filter(|&i| c.tp[i] + c.fn_[i] > 0).collect();
    if present.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let n = present.len() as f64;
    let mut sums = (0.0, 0.0, 0.0);
    for &i in &present {
        sums.0 += ratio(c.tp[i], c.tp[i] + c.fp[i]);
        sums.1 += ratio(c.tp[i], c.tp[i] + c.fn_[i]);
        sums.2 += ratio(2 * c.tp[i], 2 * c.tp[i] + c.fp[i] + c.fn_[i]);
    }
    (sums.0 / n, sums.1 / n, sums.2 / n)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Metrics {
    pub micro_p: f64,
    pub micro_r: f64,
    pub micro_f1: f64,
    pub macro_p: f64,
    pub macro_r: f64,
    pub macro_f1: f64,
    pub accuracy: f64,
}

impl Metrics {
    pub fn from_counts(c: &ConfusionCounts) -> Self {
        let (micro_p, micro_r, micro_f1) = micro_metrics(c);
        let (macro_p, macro_r, macro_f1) = macro_metrics(c);
        let correct: usize = c.tp.iter().sum();
        Self {
            micro_p,
            micro_r,
            micro_f1,
            macro_p,
            macro_r,
            macro_f1,
            accuracy: ratio(correct, c.total),
        }
    }

    /// Field-wise arithmetic mean.
    pub fn mean(all: &[Metrics]) -> Metrics {
        if all.is_empty() {
            return Metrics::default();
        }
        let n = all.len() as f64;
        let avg = |f: fn(&Metrics) -> f64| all.iter().map(f).sum::<f64>() / n;
        Metrics {
            micro_p: avg(|m| m.micro_p),
            micro_r: avg(|m| m.micro_r),
            micro_f1: avg(|m| m.micro_f1),
            macro_p: avg(|m| m.macro_p),
            macro_r: avg(|m| m.macro_r),
            macro_f1: avg(|m| m.macro_f1),
            accuracy: avg(|m| m.accuracy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult {
    pub t: f64,
    pub df: u64,
    pub p: f64,
}

/// Paired two-tailed t-test on `a_i − b_i`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let k = a.len();
    if k < 2 {
        return Err(EvalError::InvalidArgument(format!(
            "paired t-test needs at least 2 pairs (got {k})"
        )));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = k as f64;
    let mean = d.iter().sum::<f64>() / n;
    let var = d.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    let df = (k - 1) as u64;
    if sd == 0.0 {
        return Ok(if mean == 0.0 {
            TTestResult { t: 0.0, df, p: 1.0 }
        } else {
            TTestResult {
                t: f64::INFINITY.copysign(mean),
                df,
                p: 0.0,
            }
        });
    }
    let t = mean / (sd / n.sqrt());
    Ok(TTestResult {
        t,
        df,
        p: student_t_two_tailed_p(t, df)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fold_examples() {
        let f = stratified_kfold(&[0; 10], 5, 1).unwrap();
        assert_eq!(f.fold_sizes(), vec![2; 5]);
        let mut s = stratified_kfold(&[0; 7], 5, 1).unwrap().fold_sizes();
        s.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(s, vec![2, 2, 1, 1, 1]);
        let labels: Vec<usize> = (0..20).map(|i| i % 2).collect();
        let f = stratified_kfold(&labels, 10, 3).unwrap();
        for fold in 0..10 {
            let t = f.test_indices(fold);
            assert_eq!(t.len(), 2);
            assert_ne!(labels[t[0]], labels[t[1]]);
        }
    }

    #[test]
    fn small_class_is_reported() {
        let err = stratified_kfold(&[0, 0, 0, 1, 1, 2, 2, 2], 3, 0).unwrap_err();
        match err {
            EvalError::ClassTooSmall { k, offenders } => {
                assert_eq!(k, 3);
                assert_eq!(offenders, vec![(1, 2)]);
            }
            e => panic!("{e}"),
        }
        assert!(stratified_kfold(&[0, 1], 1, 0).is_err());
    }

    #[test]
    fn three_document_example() {
        let c = confusion(&[0, 0, 1], &[0, 1, 1]).unwrap();
        assert_eq!((c.tp[0], c.fp[0], c.fn_[0]), (1, 1, 0));
        assert_eq!((c.tp[1], c.fp[1], c.fn_[1]), (1, 0, 1));
        let (p, r, f) = micro_metrics(&c);
        for v in [p, r, f] {
            assert!((v - 2.0 / 3.0).abs() < 1e-12);
        }
        let (mp, mr, mf) = macro_metrics(&c);
        assert!((mp - 0.75).abs() < 1e-12);
        assert!((mr - 0.75).abs() < 1e-12);
        assert!((mf - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_counts() {
        let c = confusion(&[], &[]).unwrap();
        assert_eq!(c.total, 0);
        assert_eq!(micro_metrics(&c), (0.0, 0.0, 0.0));
        let wrong = confusion(&[1, 0], &[0, 1]).unwrap();
        assert_eq!(micro_metrics(&wrong), (0.0, 0.0, 0.0));
        let perfect = confusion(&[0, 1, 2], &[0, 1, 2]).unwrap();
        assert_eq!(micro_metrics(&perfect), (1.0, 1.0, 1.0));
        assert_eq!(macro_metrics(&perfect), (1.0, 1.0, 1.0));
        assert!(confusion(&[0], &[]).is_err());
        // class 2 never occurs in truth: excluded from the macro mean
        let c = confusion(&[0, 1], &[0, 1]).unwrap();
        let mut wider = c.clone();
        wider.tp.push(0);
        wider.fp.push(0);
        wider.fn_.push(0);
        assert_eq!(macro_metrics(&wider), macro_metrics(&c));
    }

    #[test]
    fn t_test_examples() {
        let a = [1.0, 2.0, 3.0, 4.0, 5.0];
        let b = [0.0; 5];
        let r = paired_t_test(&a, &b).unwrap();
        // mean 3, sd √2.5: t = 3/(√2.5/√5) = 3√2
        assert!((r.t - 4.242_640_687_119_285).abs() < 1e-12);
        assert_eq!(r.df, 4);
        // scipy.stats.ttest_rel: p = 0.013235599563682695
        assert!((r.p - 0.013_235_599_563_682_695).abs() < 1e-9);
        let s = paired_t_test(&b, &a).unwrap();
        assert_eq!(s.t, -r.t);
        assert_eq!(s.p, r.p);
        assert_eq!(paired_t_test(&a, &a).unwrap(), TTestResult { t: 0.0, df: 4, p: 1.0 });
        let shifted: Vec<f64> = a.iter().map(|x| x + 1.0).collect();
        let inf = paired_t_test(&shifted, &a).unwrap();
        assert_eq!((inf.t, inf.p), (f64::INFINITY, 0.0));
        assert!(paired_t_test(&[1.0], &[2.0]).is_err());
        assert!(paired_t_test(&[1.0, 2.0], &[2.0]).is_err());
    }
}

#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn predictions() -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
        (2usize..11, 1usize..201)
            .prop_flat_map(|(k, n)| (proptest::collection::vec(0..k, n), proptest::collection::vec(0..k, n)))
    }

    proptest! {
        #[test]
        fn micro_scores_equal_accuracy((pred, truth) in predictions()) {
            let m = Metrics::from_counts(&confusion(&pred, &truth).unwrap());
            prop_assert_eq!(m.micro_p, m.accuracy);
            prop_assert_eq!(m.micro_r, m.accuracy);
            prop_assert_eq!(m.micro_f1, m.accuracy);
            for v in [m.macro_p, m.macro_r, m.macro_f1] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
        }

        #[test]
        fn folds_partition_and_balance(
            labels in proptest::collection::vec(0usize..4, 0..120),
            k in 2usize..6,
            seed in any::<u64>(),
        ) {
            let mut counts = [0usize; 4];
            for &l in &labels {
                counts[l] += 1;
            }
            prop_assume!(counts.iter().all(|&c| c == 0 || c >= k));
            prop_assume!(!labels.is_empty());
            let f = stratified_kfold(&labels, k, seed).unwrap();
            let mut seen = vec![0; labels.len()];
            for fold in 0..k {
                for i in f.test_indices(fold) {
                    seen[i] += 1;
                }
                let mut train = f.train_indices(fold);
                train.extend(f.test_indices(fold));
                train.sort_unstable();
                prop_assert_eq!(train, (0..labels.len()).collect::<Vec<_>>());
            }
            prop_assert!(seen.iter().all(|&s| s == 1));
            let sizes = f.fold_sizes();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            for class in 0..4 {
                let per: Vec<usize> = (0..k)
                    .map(|fold| f.test_indices(fold).iter().filter(|&&i| labels[i] == class).count())
                    .collect();
                prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
            }
            prop_assert_eq!(&f, &stratified_kfold(&labels, k, seed).unwrap());
        }

        #[test]
        fn t_statistic_is_antisymmetric(
            pairs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..30),
        ) {
            let (a, b): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let ab = paired_t_test(&a, &b).unwrap();
            let ba = paired_t_test(&b, &a).unwrap();
            prop_assert_eq!(ab.t, -ba.t);
            prop_assert_eq!(ab.p, ba.p);
            prop_assert!((0.0..=1.0).contains(&ab.p));
        }
    }
}
