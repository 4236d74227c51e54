use std::collections::HashSet;
use std::path::PathBuf;
use std::time::Instant;

use crate::corpus::{sample_subset, Corpus, CorpusSource, SubsetSpec};
use crate::model::{ModelConfig, ModelKind};
use crate::preprocess::io::VectorSet;
use crate::preprocess::{build_vocabulary, vectorize, LabeledVector, PipelineConfig, Vocabulary};
use crate::rvm::RvmConfig;
use crate::svm::SvmConfig;

use super::{paired_t_test, stratified_kfold, ConfusionCounts, EvalError, Metrics, TTestResult};

/// Outcome of one held-out fold.
#[derive(Debug, Clone, PartialEq)]
pub struct FoldResult {
    pub fold: usize,
    pub metrics: Metrics,
    pub counts: ConfusionCounts,
    /// Wall-clock seconds spent in the training call only.
    pub train_seconds: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub vocabulary_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub kind: ModelKind,
    pub folds: Vec<FoldResult>,
    /// Confusion counts summed over all folds.
    pub pooled: ConfusionCounts,
}

/// Fold-averaged scores and summed training time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSummary {
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub train_seconds: f64,
}

impl CvResult {
    pub fn mean_metrics(&self) -> Metrics {
        Metrics::mean(&self.folds.iter().map(|f| f.metrics).collect::<Vec<_>>())
    }

    pub fn pooled_metrics(&self) -> Metrics {
        Metrics::from_counts(&self.pooled)
    }

    pub fn total_train_seconds(&self) -> f64 {
        self.folds.iter().map(|f| f.train_seconds).sum()
    }

    pub fn micro_f1s(&self) -> Vec<f64> {
        self.folds.iter().map(|f| f.metrics.micro_f1).collect()
    }

    pub fn summary(&self) -> ModelSummary {
        let m = self.mean_metrics();
        ModelSummary {
            micro_f1: m.micro_f1,
            macro_f1: m.macro_f1,
            train_seconds: self.total_train_seconds(),
        }
    }
}

/// Confirms the vocabulary was counted over exactly the training documents.
fn check_isolation(vocab: &Vocabulary, train_tokens: &[&Vec<String>]) -> Result<(), EvalError> {
    if vocab.n_train_docs() != train_tokens.len() {
        return Err(EvalError::VocabularyLeak(format!(
            "vocabulary counts {} documents, training fold has {}",
            vocab.n_train_docs(),
            train_tokens.len()
        )));
    }
    let seen: HashSet<&str> = train_tokens.iter().flat_map(|d| d.iter().map(String::as_str)).collect();
    if let Some(t) = vocab.terms().iter().find(|t| !seen.contains(t.as_str())) {
        return Err(EvalError::VocabularyLeak(format!(
            "term {t:?} occurs in no training document"
        )));
    }
    Ok(())
}

/// Stratified `k`-fold cross-validation of one model kind. The vocabulary
/// and IDF weights of each fold come from its training documents alone.
pub fn run_cv(
    corpus: &Corpus,
    model: &ModelConfig<f64>,
    pipeline: &PipelineConfig,
    k: usize,
    seed: u64,
) -> Result<CvResult, EvalError> {
    let labels = corpus.labels();
    let folds = stratified_kfold(&labels, k, seed)?;
    let tokens: Vec<Vec<String>> = corpus.documents().iter().map(|d| pipeline.analyze(&d.text)).collect();
    let n_classes = corpus.classes().len();
    let mut results = Vec::with_capacity(k);
    let mut pooled = ConfusionCounts::with_classes(n_classes);
    for fold in 0..k {
        let train = folds.train_indices(fold);
        let test = folds.test_indices(fold);
        let train_tokens: Vec<&Vec<String>> = train.iter().map(|&i| &tokens[i]).collect();
        let vocab = build_vocabulary(&train_tokens, pipeline.min_df)?;
        check_isolation(&vocab, &train_tokens)?;
        let rows = |idx: &[usize]| -> Vec<LabeledVector<f64>> {
            idx.iter()
                .map(|&i| LabeledVector::new(vectorize(&tokens[i], &vocab), labels[i]))
                .collect()
        };
        let set = VectorSet {
            p: vocab.len(),
            class_names: corpus.classes().to_vec(),
            rows: rows(&train),
        };
        let start = Instant::now();
        let trained = model.train(&set)?;
        let train_seconds = start.elapsed().as_secs_f64();
        let mut counts = ConfusionCounts::with_classes(n_classes);
        for row in rows(&test) {
            counts.add(trained.predict(&row.vector)?, row.class_index);
        }
        pooled.merge(&counts);
        log::info!(
            "{} fold {}/{k}: micro-F1 {:.4}, trained in {train_seconds:.3}s",
            model.kind(),
            fold + 1,
            Metrics::from_counts(&counts).micro_f1
        );
        results.push(FoldResult {
            fold,
            metrics: Metrics::from_counts(&counts),
            counts,
            train_seconds,
            n_train: train.len(),
            n_test: test.len(),
            vocabulary_size: vocab.len(),
        });
    }
    Ok(CvResult {
        kind: model.kind(),
        folds: results,
        pooled,
    })
}

/// One manifest row: where the corpus lives and which subset to draw.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSpec {
    pub id: String,
    pub source: CorpusSource,
    pub path: PathBuf,
    pub n_docs: usize,
    pub n_classes: usize,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn subset(&self) -> SubsetSpec {
        SubsetSpec::new(self.n_docs, self.n_classes, self.seed)
    }
}

/// Parses `id source path n_docs n_classes [seed]` lines; `#` starts a
/// comment line. Relative paths are kept as written.
pub fn parse_manifest(text: &str, default_seed: u64) -> Result<Vec<DatasetSpec>, EvalError> {
    let mut out: Vec<DatasetSpec> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| EvalError::Parse { line: ln, message };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 && f.len() != 6 {
            return Err(err(format!(
                "expected `id source path n_docs n_classes [seed]`, found {} fields",
                f.len()
            )));
        }
        if f[0].contains(',') {
            return Err(err(format!("dataset id {:?} must not contain a comma", f[0])));
        }
        if out.iter().any(|d| d.id == f[0]) {
            return Err(err(format!("duplicate dataset id {:?}", f[0])));
        }
        let num = |s: &str, what: &str| s.parse::<usize>().map_err(|_| err(format!("bad {what} {s:?}")));
        let seed = match f.get(5) {
            Some(s) => s.parse::<u64>().map_err(|_| err(format!("bad seed {s:?}")))?,
            None => default_seed,
        };
        out.push(DatasetSpec {
            id: f[0].to_string(),
            source: f[1].parse().map_err(err)?,
            path: PathBuf::from(f[2]),
            n_docs: num(f[3], "n_docs")?,
            n_classes: num(f[4], "n_classes")?,
            seed,
        });
    }
    Ok(out)
}

/// Both models on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub svm: CvResult,
    pub rvm: CvResult,
    /// RVM minus SVM per-fold micro-F1.
    pub t_test: TTestResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub id: String,
    pub outcome: Result<RowOutcome, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub k: usize,
    pub rows: Vec<BenchmarkRow>,
}

fn run_row<L>(
    spec: &DatasetSpec,
    load: &L,
    svm: &SvmConfig<f64>,
    rvm: &RvmConfig<f64>,
    pipeline: &PipelineConfig,
    k: usize,
) -> Result<RowOutcome, String>
where
    L: Fn(&DatasetSpec) -> Result<Corpus, String>,
{
    let corpus = load(spec)?;
    let subset = sample_subset(&corpus, spec.subset()).map_err(|e| e.to_string())?;
    let svm = run_cv(&subset, &ModelConfig::Svm(*svm), pipeline, k, spec.seed).map_err(|e| e.to_string())?;
    let rvm = run_cv(&subset, &ModelConfig::Rvm(*rvm), pipeline, k, spec.seed).map_err(|e| e.to_string())?;
    let t_test = paired_t_test(&rvm.micro_f1s(), &svm.micro_f1s()).map_err(|e| e.to_string())?;
    Ok(RowOutcome { svm, rvm, t_test })
}

/// Cross-validates both models on every dataset. A failing dataset is
/// recorded as a failed row and the others still run.
pub fn benchmark<L>(
    datasets: &[DatasetSpec],
    load: L,
    svm: &SvmConfig<f64>,
    rvm: &RvmConfig<f64>,
    pipeline: &PipelineConfig,
    k: usize,
) -> BenchmarkReport
where
    L: Fn(&DatasetSpec) -> Result<Corpus, String>,
{
    let rows = datasets
        .iter()
        .map(|spec| {
            let outcome = run_row(spec, &load, svm, rvm, pipeline, k);
            if let Err(e) = &outcome {
                log::error!("dataset {}: {e}", spec.id);
            }
            BenchmarkRow {
                id: spec.id.clone(),
                outcome,
            }
        })
        .collect();
    BenchmarkReport { k, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::RawDocument;

    /// Two classes with disjoint vocabularies.
    pub(crate) fn separable(n_per_class: usize) -> Corpus {
        let a = ["apple", "banana", "cherry", "grape", "melon", "peach"];
        let b = ["engine", "piston", "gearbox", "clutch", "brake", "turbo"];
        let mut docs = Vec::new();
        for i in 0..n_per_class {
            let pick = |w: &[&str]| format!("{} {} {}", w[i % 6], w[(i + 1) % 6], w[(i + 3) % 6]);
            docs.push(RawDocument::new(format!("a{i:03}"), "fruit", pick(&a)));
            docs.push(RawDocument::new(format!("b{i:03}"), "motor", pick(&b)));
        }
        Corpus::new(docs).unwrap()
    }

    #[test]
    fn separable_corpus_scores_perfectly() {
        let c = separable(10);
        let pipe = PipelineConfig::default();
        for cfg in [
            ModelConfig::Svm(SvmConfig::default()),
            ModelConfig::Rvm(RvmConfig::default()),
        ] {
            let r = run_cv(&c, &cfg, &pipe, 5, 42).unwrap();
            assert_eq!(r.folds.len(), 5);
            for f in &r.folds {
                assert_eq!(f.metrics.micro_f1, 1.0, "{:?}", cfg.kind());
            }
        }
    }

    #[test]
    fn cv_is_deterministic_and_partitions() {
        let c = separable(2);
        let pipe = PipelineConfig {
            min_df: 1,
            ..PipelineConfig::default()
        };
        let cfg = ModelConfig::Svm(SvmConfig::default());
        let a = run_cv(&c, &cfg, &pipe, 2, 7).unwrap();
        let b = run_cv(&c, &cfg, &pipe, 2, 7).unwrap();
        let strip = |r: &CvResult| {
            r.folds
                .iter()
                .map(|f| (f.metrics, f.counts.clone()))
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
        for f in &a.folds {
            assert_eq!((f.n_train, f.n_test), (2, 2));
        }
    }

    #[test]
    fn manifest_parsing() {
        let m = parse_manifest("# comment\n\nD1 ng20 /data/ng 200 7\nD2 tsv x.tsv 40 2 9\n", 42).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[0].seed, 42);
        assert_eq!(m[1].seed, 9);
        assert_eq!(m[1].source, CorpusSource::Tsv);
        match parse_manifest("D1 ng20 /x 200\n", 1) {
            Err(EvalError::Parse { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_manifest("\nD1 web /x 200 7\n", 1) {
            Err(EvalError::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_manifest("", 1).unwrap().is_empty());
    }

    #[test]
    fn failing_row_is_isolated() {
        let specs = parse_manifest("good tsv a 20 2\nbad tsv b 20 2\n", 1).unwrap();
        let load = |s: &DatasetSpec| {
            if s.id == "good" {
                Ok(separable(10))
            } else {
                Err("no such corpus".to_string())
            }
        };
        let r = benchmark(
            &specs,
            load,
            &SvmConfig::default(),
            &RvmConfig::default(),
            &PipelineConfig::default(),
            5,
        );
        assert!(r.rows[0].outcome.is_ok());
        assert_eq!(r.rows[1].outcome, Err("no such corpus".to_string()));
    }
}
