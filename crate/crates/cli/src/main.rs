//! `tcb`: prepare corpora, train and evaluate SVM/RVM document classifiers,
//! run manifest-driven benchmarks and compare result files.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tcb_core::corpus::CorpusSource;

use crate::output::UsageError;

#[derive(Debug, Parser)]
#[command(name = "tcb", version, about = "Document classification benchmark: SVM vs RVM")]
struct Cli {
    /// Seed for subset sampling, fold assignment and solver order.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output path (meaning depends on the command).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Only warnings and errors on the diagnostic stream.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load a corpus, draw a subset and write vectors plus vocabulary.
    Prepare(PrepareArgs),
    /// Train a model on a vectors file.
    Train(TrainArgs),
    /// Score a model on a labeled vectors file.
    Evaluate(EvaluateArgs),
    /// Cross-validate both models on every dataset of a manifest.
    Benchmark(BenchmarkArgs),
    /// Classify unlabeled documents.
    Predict(PredictArgs),
    /// Paired t-test between two result files.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct PipelineArgs {
    /// Drop terms seen in fewer training documents.
    #[arg(long, default_value_t = 2)]
    min_df: usize,
    /// Skip Porter stemming.
    #[arg(long)]
    no_stem: bool,
}

#[derive(Debug, Args)]
struct PrepareArgs {
    #[arg(long, value_parser = parse_source)]
    source: CorpusSource,
    /// Corpus directory or file.
    #[arg(long)]
    path: PathBuf,
    /// Subset size; the whole corpus when omitted together with --classes.
    #[arg(long)]
    docs: Option<usize>,
    /// Number of classes to keep (largest first).
    #[arg(long)]
    classes: Option<usize>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Vocabulary file; defaults to the vectors path with `.vocab` appended.
    #[arg(long)]
    vocab: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Svm,
    Rvm,
}

/// Hyperparameters; unset flags keep each model's defaults.
#[derive(Debug, Args)]
struct ModelFlags {
    /// SVM regularization constant.
    #[arg(long)]
    c: Option<f64>,
    /// SVM KKT tolerance, or RVM log-precision convergence tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Initial RVM precision.
    #[arg(long)]
    alpha_init: Option<f64>,
    /// RVM pruning threshold on the precision.
    #[arg(long)]
    alpha_prune: Option<f64>,
    /// SVM epochs or RVM outer iterations.
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(long)]
    vectors: PathBuf,
    #[command(flatten)]
    flags: ModelFlags,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Model file written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Labeled vectors file built with the model's vocabulary.
    #[arg(long)]
    vectors: PathBuf,
}

#[derive(Debug, Args)]
struct BenchmarkArgs {
    /// Lines of `id source path n_docs n_classes [seed]`.
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[command(flatten)]
    flags: ModelFlags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    /// The whole file is one document.
    Text,
    /// `id<TAB>text` per line.
    Tsv,
}

#[derive(Debug, Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    /// Vocabulary file written by `prepare`.
    #[arg(long)]
    vocab: PathBuf,
    /// Document file.
    #[arg(long)]
    input: PathBuf,
    /// Defaults to tsv for `.tsv` files, text otherwise.
    #[arg(long, value_enum)]
    format: Option<InputFormat>,
}

#[derive(Debug, Args)]
struct StatsArgs {
    /// First result file (the `a` in `a − b`).
    first: PathBuf,
    /// Second result file.
    second: PathBuf,
    /// Keep only this model's rows from the first file.
    #[arg(long)]
    first_model: Option<String>,
    /// Keep only this model's rows from the second file.
    #[arg(long)]
    second_model: Option<String>,
}

fn parse_source(s: &str) -> Result<CorpusSource, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    env_logger::Builder::new()
        .filter_level(if cli.quiet {
            log::LevelFilter::Warn
        } else {
            log::LevelFilter::Info
        })
        .parse_default_env()
        .init();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
