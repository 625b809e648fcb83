//! Command-line front end: `preprocess`, `train`, `eval`, `sweep`.
//!
//! Exit codes: 0 success, 1 usage, 2 parse, 3 empty corpus, 4 invalid
//! hyperparameters, 5 corpus/model mismatch.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::corpus::{
    build_corpus, bundled_stopwords, read_corpus_archive, read_csv, read_raw_documents,
    read_stopwords_file, write_corpus_archive, Pipeline, PipelineConfig,
};
use crate::error::Error;
use crate::eval::{evaluate, DEFAULT_TOP_WORDS};
use crate::lda::{
    read_model_archive, train, write_model_archive, LdaHyperparams, DEFAULT_ALPHA, DEFAULT_BETA,
    DEFAULT_ITERATIONS, DEFAULT_MIN_TOKEN_COUNT, DEFAULT_SEED,
};
use crate::report::{failures_tsv, render_tables, run_sweep, sweep_tsv, SweepSpec, TableFormat};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_EMPTY_CORPUS: i32 = 3;
pub const EXIT_INVALID_HYPERPARAMS: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

pub const LOG_ENV: &str = "TOPICFORGE_LOG";

#[derive(Debug, Parser)]
#[command(
    name = "topicforge",
    version,
    about = "Short-text topic modeling with LDA"
)]
pub struct Cli {
    /// More log output (repeatable); TOPICFORGE_LOG overrides
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean raw messages and write a corpus archive
    Preprocess(PreprocessArgs),
    /// Train an LDA model on a corpus archive
    Train(TrainArgs),
    /// Compute NMI and topic coherence for a trained model
    Eval(EvalArgs),
    /// Train and evaluate every (N, alpha, beta, seed) combination
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
struct PreprocessArgs {
    /// JSON-lines input, or CSV when the file ends in .csv
    #[arg(long, short)]
    input: PathBuf,
    /// Corpus archive directory to write
    #[arg(long, short)]
    output: PathBuf,
    /// Stopword file (one word per line); defaults to the bundled English list
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = crate::corpus::DEFAULT_MIN_WORD_LEN)]
    min_word_len: usize,
    #[arg(long, default_value_t = crate::corpus::DEFAULT_LANGUAGE_THRESHOLD)]
    language_threshold: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_TOKEN_COUNT)]
    min_token_count: u32,
    /// CSV column holding the message text
    #[arg(long, default_value = "text")]
    text_column: String,
    /// CSV column holding the message id
    #[arg(long, default_value = "id")]
    id_column: String,
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, short)]
    corpus: PathBuf,
    /// Model archive directory to write
    #[arg(long, short)]
    output: PathBuf,
    #[arg(long, short = 'n')]
    topics: usize,
    #[arg(long, default_value_t = DEFAULT_ALPHA, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, default_value_t = DEFAULT_BETA, allow_negative_numbers = true)]
    beta: f64,
    /// Must match the threshold the corpus archive was built with
    #[arg(long)]
    min_token_count: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, short)]
    model: PathBuf,
    #[arg(long, short)]
    corpus: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TOP_WORDS)]
    top_words: usize,
    /// Defaults to eval.json inside the model directory
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Markdown,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, short)]
    corpus: PathBuf,
    /// Directory for sweep.tsv (and sweep.md)
    #[arg(long, short)]
    output: PathBuf,
    /// Comma-separated topic numbers, e.g. 10,15,20
    #[arg(long, value_parser = parse_list::<usize>)]
    topic_numbers: List<usize>,
    #[arg(long, value_parser = parse_list::<f64>, default_value = "0.1")]
    alphas: List<f64>,
    #[arg(long, value_parser = parse_list::<f64>, default_value = "0.01")]
    betas: List<f64>,
    #[arg(long, value_parser = parse_list::<u64>, default_value = "1")]
    seeds: List<u64>,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iters: usize,
    #[arg(long, default_value_t = DEFAULT_TOP_WORDS)]
    top_words: usize,
    /// Worker threads; 0 uses every core
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Label prefix for table rows
    #[arg(long, default_value = "LDA")]
    name: String,
    /// Write measured runtimes into sweep.tsv (makes the file non-reproducible)
    #[arg(long)]
    record_runtime: bool,
}

#[derive(Debug, Clone)]
struct List<T>(Vec<T>);

fn parse_list<T: FromStr + Clone + Send + Sync + 'static>(s: &str) -> Result<List<T>, String>
where
    T::Err: std::fmt::Display,
{
    let items = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<T>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if items.is_empty() {
        return Err("list is empty".into());
    }
    Ok(List(items))
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } | Error::Archive { .. } => EXIT_PARSE,
            Error::EmptyCorpus => EXIT_EMPTY_CORPUS,
            Error::InvalidHyperparams(_) => EXIT_INVALID_HYPERPARAMS,
            Error::ArchiveMismatch(_) => EXIT_MISMATCH,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn require_dir(path: &Path, what: &str) -> Result<(), Failure> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(usage(format!(
            "{what} {} is not a directory",
            path.display()
        )))
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| {
        Failure::from(Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
    })
}

fn cmd_preprocess(args: &PreprocessArgs) -> Result<(), Failure> {
    if !args.input.is_file() {
        return Err(usage(format!(
            "input {} is not a readable file",
            args.input.display()
        )));
    }
    let stopwords = match &args.stopwords {
        Some(p) => read_stopwords_file(p)?,
        None => bundled_stopwords(),
    };
    let config = PipelineConfig {
        min_word_len: args.min_word_len,
        language_filter_threshold: args.language_threshold,
        ..PipelineConfig::new(stopwords)
    };
    let pipeline = Pipeline::new(config)?;

    let is_csv = args
        .input
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    let raw = if is_csv {
        read_csv(&args.input, &args.text_column, &args.id_column)?
    } else {
        read_raw_documents(&args.input)?
    };
    let (docs, summary) = pipeline.run(raw);
    let corpus = build_corpus(docs, args.min_token_count)?;
    write_corpus_archive(&corpus, &args.output)?;

    println!("documents read:        {}", summary.docs_in);
    println!("after deduplication:   {}", summary.after_dedup);
    println!("after language filter: {}", summary.after_language);
    println!("documents kept:        {}", corpus.num_docs());
    println!("documents emptied:     {}", corpus.excluded_docs().len());
    println!("tokens:                {}", corpus.num_tokens());
    println!("vocabulary size:       {}", corpus.vocab_size());
    if !corpus.excluded_docs().is_empty() {
        log::info!("emptied documents: {}", corpus.excluded_docs().join(", "));
    }
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<(), Failure> {
    require_dir(&args.corpus, "corpus archive")?;
    let corpus = read_corpus_archive(&args.corpus)?;
    if let Some(mtc) = args.min_token_count {
        if mtc != corpus.min_token_count() {
            return Err(Error::InvalidHyperparams(format!(
                "--min-token-count {mtc} differs from the corpus archive's {}; rerun preprocess",
                corpus.min_token_count()
            ))
            .into());
        }
    }
    let hp = LdaHyperparams {
        num_topics: args.topics,
        alpha: args.alpha,
        beta: args.beta,
        min_token_count: corpus.min_token_count(),
        iterations: args.iters,
        seed: args.seed,
    };
    hp.validate()?;
    log::info!(
        "training {hp} for {} sweeps, seed {}",
        hp.iterations,
        hp.seed
    );
    let model = train(&corpus, &hp)?;
    write_model_archive(&model, &args.output)?;

    println!("{}", hp.label("LDA"));
    for s in model.topic_summaries(10)? {
        let words: Vec<String> = s
            .entries
            .iter()
            .map(|e| format!("{}({})", e.word, e.count))
            .collect();
        println!("topic {:>3}: {}", s.topic_id, words.join(" "));
    }
    Ok(())
}

fn cmd_eval(args: &EvalArgs) -> Result<(), Failure> {
    require_dir(&args.model, "model archive")?;
    require_dir(&args.corpus, "corpus archive")?;
    if args.top_words < 1 {
        return Err(usage("--top-words must be at least 1"));
    }
    let corpus = read_corpus_archive(&args.corpus)?;
    let model = read_model_archive(&args.model, &corpus)?;
    let report = evaluate(&model, &corpus, args.top_words)?;
    let out = args
        .output
        .clone()
        .unwrap_or_else(|| args.model.join("eval.json"));
    let json = serde_json::to_string_pretty(&report.to_json()).expect("report serializes");
    write_text(&out, &(json + "\n"))?;

    println!("{}", report.model.label("LDA"));
    println!("NMI: {:.3}", report.nmi);
    println!(
        "Coherence (top {}): {:.3} ± {:.3}",
        report.coherence.top_m, report.coherence.mean_col, report.coherence.sd
    );
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), Failure> {
    require_dir(&args.corpus, "corpus archive")?;
    let corpus = read_corpus_archive(&args.corpus)?;
    let spec = SweepSpec {
        topic_numbers: args.topic_numbers.0.clone(),
        alphas: args.alphas.0.clone(),
        betas: args.betas.0.clone(),
        seeds: args.seeds.0.clone(),
        iterations: args.iters,
        top_m: args.top_words,
        name: args.name.clone(),
    };
    let result = run_sweep(&corpus, &spec, args.jobs)?;
    let rows = result.rows();
    let failures = result.failures();

    fs::create_dir_all(&args.output).map_err(|e| {
        Failure::from(Error::Io {
            path: args.output.clone(),
            source: e,
        })
    })?;
    write_text(
        &args.output.join("sweep.tsv"),
        &sweep_tsv(&rows, args.record_runtime),
    )?;
    if !failures.is_empty() {
        write_text(
            &args.output.join("sweep_failures.tsv"),
            &failures_tsv(&failures),
        )?;
        for f in &failures {
            eprintln!(
                "failed: {} seed {}: {}",
                f.label, f.hyperparams.seed, f.error
            );
        }
    }
    if rows.is_empty() {
        return Err(Failure {
            code: EXIT_INVALID_HYPERPARAMS,
            message: "every sweep cell failed".into(),
        });
    }
    let format = match args.format {
        FormatArg::Tsv => TableFormat::Tsv,
        FormatArg::Markdown => TableFormat::Markdown,
    };
    let tables = render_tables(&rows, format)?;
    if let FormatArg::Markdown = args.format {
        write_text(&args.output.join("sweep.md"), &tables)?;
    }
    print!("{tables}");
    let total: f64 = rows.iter().map(|r| r.runtime.as_secs_f64()).sum();
    eprintln!(
        "{} cells, {:.2}s of training and evaluation",
        rows.len(),
        total
    );
    Ok(())
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env(LOG_ENV)
        .format_timestamp(None)
        .try_init();
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    init_logging(cli.verbose);
    let outcome = match &cli.command {
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn list_parsing() {
        assert_eq!(
            parse_list::<usize>("10, 15,20").unwrap().0,
            vec![10, 15, 20]
        );
        assert!(parse_list::<usize>("").is_err());
        assert!(parse_list::<usize>(" , ").is_err());
        assert!(parse_list::<f64>("0.1,x").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run(["topicforge"]), EXIT_USAGE);
        assert_eq!(
            run([
                "topicforge",
                "sweep",
                "--corpus",
                ".",
                "--output",
                ".",
                "--topic-numbers",
                ""
            ]),
            EXIT_USAGE
        );
        assert_eq!(run(["topicforge", "train", "--corpus", "."]), EXIT_USAGE);
        assert_eq!(run(["topicforge", "--help"]), EXIT_OK);
    }
}
