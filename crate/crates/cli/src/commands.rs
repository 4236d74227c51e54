use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use tcb_core::corpus::{sample_subset, SubsetSpec};
use tcb_core::eval::{
    benchmark, compare_results, parse_manifest, parse_results, render_csv, render_table, ConfusionCounts, EvalError,
    Metrics,
};
use tcb_core::model::{read_model, write_model, Model, ModelConfig, ModelError};
use tcb_core::preprocess::io::{
    read_vectors, read_vocabulary, write_vectors, write_vocabulary, VectorSet, VocabularyFile,
};
use tcb_core::preprocess::{build_vocabulary, vectorize, LabeledVector, PipelineConfig};
use tcb_core::rvm::{RvmConfig, RvmError};
use tcb_core::svm::{SvmConfig, SvmError};

use crate::output::{require_exists, usage, write_all_atomic, write_atomic};
use crate::{
    BenchmarkArgs, Cli, Command, EvaluateArgs, InputFormat, ModelArg, ModelFlags, PipelineArgs, PredictArgs,
    PrepareArgs, StatsArgs, TrainArgs,
};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Prepare(a) => prepare(cli, a),
        Command::Train(a) => train(cli, a),
        Command::Evaluate(a) => evaluate(cli, a),
        Command::Benchmark(a) => run_benchmark(cli, a),
        Command::Predict(a) => predict(cli, a),
        Command::Stats(a) => stats(cli, a),
    }
}

fn pipeline(a: &PipelineArgs) -> PipelineConfig {
    PipelineConfig {
        min_df: a.min_df,
        stem: !a.no_stem,
        ..PipelineConfig::default()
    }
}

fn svm_config(f: &ModelFlags, seed: u64) -> SvmConfig<f64> {
    let d = SvmConfig::default();
    SvmConfig {
        c: f.c.unwrap_or(d.c),
        tol: f.tol.unwrap_or(d.tol),
        max_epochs: f.max_iter.unwrap_or(d.max_epochs),
        shuffle_seed: seed,
        ..d
    }
}

fn rvm_config(f: &ModelFlags) -> RvmConfig<f64> {
    let d = RvmConfig::default();
    RvmConfig {
        alpha_init: f.alpha_init.unwrap_or(d.alpha_init),
        alpha_prune: f.alpha_prune.unwrap_or(d.alpha_prune),
        tol_alpha: f.tol.unwrap_or(d.tol_alpha),
        max_outer: f.max_iter.unwrap_or(d.max_outer),
        ..d
    }
}

fn model_config(kind: ModelArg, f: &ModelFlags, seed: u64) -> Result<ModelConfig<f64>> {
    Ok(match kind {
        ModelArg::Svm => {
            if f.alpha_init.is_some() || f.alpha_prune.is_some() {
                return Err(usage("--alpha-init and --alpha-prune apply to rvm only"));
            }
            ModelConfig::Svm(svm_config(f, seed))
        }
        ModelArg::Rvm => {
            if f.c.is_some() {
                return Err(usage("--c applies to svm only"));
            }
            ModelConfig::Rvm(rvm_config(f))
        }
    })
}

fn open(path: &Path, what: &str) -> Result<BufReader<File>> {
    require_exists(path, what)?;
    let f = File::open(path).with_context(|| format!("opening {what} {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn load_vectors(path: &Path) -> Result<VectorSet<f64>> {
    read_vectors(open(path, "vectors file")?).with_context(|| format!("reading vectors file {}", path.display()))
}

fn load_model(path: &Path) -> Result<Model<f64>> {
    read_model(open(path, "model file")?).with_context(|| format!("reading model file {}", path.display()))
}

fn required_out<'a>(cli: &'a Cli, what: &str) -> Result<&'a Path> {
    cli.out
        .as_deref()
        .ok_or_else(|| usage(format!("--out <path> is required for the {what}")))
}

fn prepare(cli: &Cli, a: &PrepareArgs) -> Result<()> {
    let out = required_out(cli, "vectors file")?;
    require_exists(&a.path, "corpus path")?;
    let corpus = a
        .source
        .load(&a.path)
        .with_context(|| format!("loading {} corpus from {}", a.source, a.path.display()))?;
    let corpus = match (a.docs, a.classes) {
        (None, None) => corpus,
        (docs, classes) => {
            let spec = SubsetSpec::new(
                docs.unwrap_or(corpus.len()),
                classes.unwrap_or(corpus.classes().len()),
                cli.seed,
            );
            sample_subset(&corpus, spec).map_err(|e| usage(e.to_string()))?
        }
    };
    let cfg = pipeline(&a.pipeline);
    let tokens: Vec<Vec<String>> = corpus.documents().iter().map(|d| cfg.analyze(&d.text)).collect();
    let vocabulary = build_vocabulary(&tokens, cfg.min_df)?;
    let set: VectorSet<f64> = VectorSet {
        p: vocabulary.len(),
        class_names: corpus.classes().to_vec(),
        rows: tokens
            .iter()
            .zip(corpus.labels())
            .map(|(t, y)| LabeledVector::new(vectorize(t, &vocabulary), y))
            .collect(),
    };
    let vocab_file = VocabularyFile {
        vocabulary,
        stem: cfg.stem,
        stopwords: cfg.stopwords,
    };
    let comments = vec![
        format!("source={} path={}", a.source, a.path.display()),
        format!("seed={} min_df={} stem={}", cli.seed, cfg.min_df, cfg.stem),
    ];
    let vocab_path = a.vocab.clone().unwrap_or_else(|| {
        let mut s = out.as_os_str().to_owned();
        s.push(".vocab");
        PathBuf::from(s)
    });
    write_all_atomic(vec![
        (out, Box::new(|w| write_vectors(w, &set, &comments))),
        (&vocab_path, Box::new(|w| write_vocabulary(w, &vocab_file))),
    ])?;
    log::info!(
        "wrote {} documents, {} classes, {} terms to {} and {}",
        set.n(),
        set.k(),
        set.p,
        out.display(),
        vocab_path.display()
    );
    Ok(())
}

/// Invalid hyperparameters are the operator's to fix.
fn classify_train_error(e: ModelError) -> anyhow::Error {
    match e {
        ModelError::Svm(SvmError::InvalidConfig(m)) | ModelError::Rvm(RvmError::InvalidConfig(m)) => usage(m),
        other => anyhow::Error::new(other).context("training failed"),
    }
}

fn train(cli: &Cli, a: &TrainArgs) -> Result<()> {
    let out = required_out(cli, "model file")?;
    let cfg = model_config(a.model, &a.flags, cli.seed)?;
    let set = load_vectors(&a.vectors)?;
    let start = Instant::now();
    let model = cfg.train(&set).map_err(classify_train_error)?;
    let secs = start.elapsed().as_secs_f64();
    let comments = vec![format!("seed={} vectors={}", cli.seed, a.vectors.display())];
    let mut text = Vec::new();
    write_model(&mut text, &model, &comments)?;
    write_atomic(out, &String::from_utf8(text).context("model text is not UTF-8")?)?;
    println!(
        "trained {} on {} documents ({} classes, {} features) in {secs:.3}s",
        model.kind(),
        set.n(),
        set.k(),
        set.p
    );
    Ok(())
}

fn metrics_text(c: &ConfusionCounts, class_names: &[String]) -> String {
    let m = Metrics::from_counts(c);
    let mut s = String::new();
    let _ = writeln!(s, "documents\t{}", c.total);
    let _ = writeln!(
        s,
        "micro\tprecision={:.6}\trecall={:.6}\tf1={:.6}",
        m.micro_p, m.micro_r, m.micro_f1
    );
    let _ = writeln!(
        s,
        "macro\tprecision={:.6}\trecall={:.6}\tf1={:.6}",
        m.macro_p, m.macro_r, m.macro_f1
    );
    let _ = writeln!(s, "accuracy\t{:.6}", m.accuracy);
    let _ = writeln!(s, "class\ttp\tfp\tfn");
    for (i, name) in class_names.iter().enumerate() {
        let _ = writeln!(s, "{name}\t{}\t{}\t{}", c.tp[i], c.fp[i], c.fn_[i]);
    }
    s
}

fn evaluate(cli: &Cli, a: &EvaluateArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let set = load_vectors(&a.vectors)?;
    if set.rows.is_empty() {
        bail!("vectors file {} holds no documents", a.vectors.display());
    }
    if set.p != model.p() {
        return Err(usage(format!(
            "incompatible inputs: model has p={} but vectors have p={}",
            model.p(),
            set.p
        )));
    }
    if set.class_names != model.class_names() {
        return Err(usage(format!(
            "incompatible inputs: model classes {:?} differ from vectors classes {:?}",
            model.class_names(),
            set.class_names
        )));
    }
    let mut counts = ConfusionCounts::with_classes(set.k());
    for row in &set.rows {
        counts.add(model.predict(&row.vector)?, row.class_index);
    }
    let text = metrics_text(&counts, &set.class_names);
    print!("{text}");
    if let Some(out) = &cli.out {
        write_atomic(out, &text)?;
    }
    Ok(())
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_benchmark(cli: &Cli, a: &BenchmarkArgs) -> Result<()> {
    if a.folds < 2 {
        return Err(usage(format!("--folds must be at least 2 (got {})", a.folds)));
    }
    let text =
        std::fs::read_to_string(&a.manifest).map_err(|e| usage(format!("manifest {}: {e}", a.manifest.display())))?;
    let mut specs =
        parse_manifest(&text, cli.seed).map_err(|e| usage(format!("manifest {}: {e}", a.manifest.display())))?;
    let base = a.manifest.parent().unwrap_or(Path::new(""));
    for s in &mut specs {
        if s.path.is_relative() {
            s.path = base.join(&s.path);
        }
    }
    let report = benchmark(
        &specs,
        |s| s.source.load(&s.path).map_err(|e| e.to_string()),
        &svm_config(&a.flags, cli.seed),
        &rvm_config(&a.flags),
        &pipeline(&a.pipeline),
        a.folds,
    );
    let header = format!(
        "# seed={} folds={} manifest={}\n",
        cli.seed,
        a.folds,
        a.manifest.display()
    );
    let table = render_table(&report.table_rows());
    print!("{table}");
    if let Some(stem) = &cli.out {
        let csv = format!("{header}{}", render_csv(&report));
        let table = format!("{header}{table}");
        let (csv_path, table_path) = (with_suffix(stem, ".csv"), with_suffix(stem, ".txt"));
        write_all_atomic(vec![
            (&csv_path, Box::new(|w| w.write_all(csv.as_bytes()))),
            (&table_path, Box::new(|w| w.write_all(table.as_bytes()))),
        ])?;
        log::info!("wrote {} and {}", csv_path.display(), table_path.display());
    }
    let failed = report.rows.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        bail!("{failed} of {} datasets failed", report.rows.len());
    }
    Ok(())
}

fn read_documents(path: &Path, format: InputFormat) -> Result<Vec<(String, String)>> {
    require_exists(path, "input")?;
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = String::from_utf8_lossy(&bytes);
    Ok(match format {
        InputFormat::Text => {
            let id = path
                .file_name()
                .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
            vec![(id, text.into_owned())]
        }
        InputFormat::Tsv => text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| match l.split_once('\t') {
                Some((id, body)) => (id.to_string(), body.to_string()),
                None => (format!("line{}", i + 1), l.to_string()),
            })
            .collect(),
    })
}

fn predict(cli: &Cli, a: &PredictArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let vocab = read_vocabulary(open(&a.vocab, "vocabulary file")?)
        .with_context(|| format!("reading vocabulary file {}", a.vocab.display()))?;
    if vocab.vocabulary.len() != model.p() {
        return Err(usage(format!(
            "incompatible inputs: model has p={} but vocabulary has p={}",
            model.p(),
            vocab.vocabulary.len()
        )));
    }
    let format = a.format.unwrap_or(match a.input.extension() {
        Some(e) if e.eq_ignore_ascii_case("tsv") => InputFormat::Tsv,
        _ => InputFormat::Text,
    });
    let docs = read_documents(&a.input, format)?;
    let cfg = vocab.pipeline();
    let names = model.class_names();
    let mut out = String::new();
    if matches!(model, Model::Rvm(_)) {
        let _ = writeln!(out, "#id\tpredicted\t{}", names.join("\t"));
    }
    for (id, text) in &docs {
        let x = vectorize(&cfg.analyze(text), &vocab.vocabulary);
        let label = &names[model.predict(&x)?];
        let _ = write!(out, "{id}\t{label}");
        if let Some(p) = model.predict_proba(&x)? {
            for v in p {
                let _ = write!(out, "\t{v}");
            }
        }
        out.push('\n');
    }
    print!("{out}");
    if let Some(path) = &cli.out {
        write_atomic(path, &out)?;
    }
    log::info!("classified {} documents", docs.len());
    Ok(())
}

fn stats(cli: &Cli, a: &StatsArgs) -> Result<()> {
    let load = |path: &Path, model: &Option<String>| -> Result<_> {
        require_exists(path, "result file")?;
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut records = parse_results(&text).with_context(|| format!("parsing {}", path.display()))?;
        if let Some(m) = model {
            records.retain(|r| &r.model == m);
            if records.is_empty() {
                return Err(usage(format!("{} has no rows for model {m:?}", path.display())));
            }
        }
        Ok(records)
    };
    let first = load(&a.first, &a.first_model)?;
    let second = load(&a.second, &a.second_model)?;
    let results = compare_results(&first, &second).map_err(|e| match e {
        EvalError::Pairing(m) => anyhow::anyhow!("cannot pair folds: {m}"),
        other => other.into(),
    })?;
    let mut out = String::from("dataset\tt\tdf\tp\tsignificant\n");
    for (dataset, r) in &results {
        let mark = if r.p < 0.05 { "*" } else { "" };
        let _ = writeln!(out, "{dataset}\t{:.4}\t{}\t{:.4}\t{mark}", r.t, r.df, r.p);
    }
    print!("{out}");
    if let Some(path) = &cli.out {
        write_atomic(path, &out)?;
    }
    Ok(())
}
