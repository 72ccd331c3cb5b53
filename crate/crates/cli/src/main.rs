//! Command-line front end for the detoxification toolkit: train the
//! classifier and language model, build the retrieval index, rewrite toxic
//! sentences with any of the seven methods, and score the results.
//!
//! Every run is reproducible from its flags alone — no environment
//! variables, and every random choice flows from an explicit `--seed`.
//! Exit codes are stable: 0 success, 2 I/O, 3 invalid data or flags,
//! 4 misaligned files, 5 numeric failure.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use detox_core::baselines::{DeleteMethod, Detoxifier, DuplicateMethod, RetrieveMethod};
use detox_core::condbert::{CondBertConfig, CondBertMethod};
use detox_core::data_io::{
    load_labeled_corpus, load_parallel_corpus, load_sentences, save_sentences, split_corpus,
    CorpusFormat, LabeledCorpus, ParallelCorpus, SplitSpec, StyleLabel,
};
use detox_core::embeddings::{load_embeddings, load_index, save_index, RetrieveIndex};
use detox_core::metrics::{evaluate_outputs, format_report_records, format_report_table, EvalReport};
use detox_core::ngram::{load_lm, save_lm, GenerationParams, LmStyle, NgramLm};
use detox_core::promptgen::{finetune_corpus, PromptMode, PromptTemplate, PromptedMethod};
use detox_core::text::{load_lemma_table, Sentence};
use detox_core::toxicity::{
    extract_lexicon, f1, load_lexicon, load_manual_words, load_model, save_lexicon, save_model,
    threshold_for_top_fraction, train, ToxicityLexicon, ToxicityModel, TrainConfig,
};
use detox_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "detox",
    version,
    about = "Text detoxification: train models, rewrite toxic sentences, evaluate rewrites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the bag-of-words toxicity classifier and report held-out F1
    TrainClassifier(TrainClassifierArgs),
    /// Train the style-conditioned n-gram language model
    TrainLm(TrainLmArgs),
    /// Build the nearest-neighbour index over neutral sentences
    BuildIndex(BuildIndexArgs),
    /// Rewrite sentences (one per line) with a detoxification method
    Detox(DetoxArgs),
    /// Score method outputs against their inputs and print the metrics table
    Evaluate(EvaluateArgs),
    /// Chain training, every applicable method, and evaluation in one run
    Pipeline(PipelineArgs),
}

#[derive(Copy, Clone, ValueEnum)]
enum FormatArg {
    /// Tab-separated `text<TAB>label` with a header line
    Tsv,
    /// Comma-separated with `text` and `label` header columns
    Csv,
}

impl From<FormatArg> for CorpusFormat {
    fn from(value: FormatArg) -> CorpusFormat {
        match value {
            FormatArg::Tsv => CorpusFormat::Tsv,
            FormatArg::Csv => CorpusFormat::Csv,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum StyleArg {
    Toxic,
    Neutral,
    Any,
}

impl From<StyleArg> for LmStyle {
    fn from(value: StyleArg) -> LmStyle {
        match value {
            StyleArg::Toxic => LmStyle::Toxic,
            StyleArg::Neutral => LmStyle::Neutral,
            StyleArg::Any => LmStyle::Any,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    /// Return the input unchanged (upper bound on content, lower on style)
    Duplicate,
    /// Drop words found in the toxicity lexicon
    Delete,
    /// Return the most similar neutral sentence from the index
    Retrieve,
    /// Replace lexicon words via masked language-model substitution
    Condbert,
    /// Zero-shot paraphrase prompting
    PromptZero,
    /// Few-shot prompting with rewrite examples from a parallel corpus
    PromptFew,
    /// Prompting against an LM trained on rewrite records
    PromptFt,
}

impl MethodArg {
    fn name(self) -> &'static str {
        match self {
            MethodArg::Duplicate => "duplicate",
            MethodArg::Delete => "delete",
            MethodArg::Retrieve => "retrieve",
            MethodArg::Condbert => "condbert",
            MethodArg::PromptZero => "prompt-zero",
            MethodArg::PromptFew => "prompt-few",
            MethodArg::PromptFt => "prompt-ft",
        }
    }
}

#[derive(Args)]
struct TrainClassifierArgs {
    /// Labeled corpus file
    #[arg(long)]
    input: PathBuf,
    /// Corpus file format
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Where to write the trained model
    #[arg(long)]
    model_out: PathBuf,
    /// Held-out toxic sentences for the F1 report; defaults to a tenth of
    /// the toxic entries (at least one)
    #[arg(long)]
    test_size: Option<usize>,
    /// Seed for the train/test split
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Gradient-descent learning rate
    #[arg(long, default_value_t = 0.5)]
    learning_rate: f64,
    /// Full-batch gradient-descent epochs
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    /// L2 regularization strength
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    /// Drop words seen fewer than this many times from the vocabulary
    #[arg(long, default_value_t = 1)]
    min_count: usize,
    /// Also derive a toxicity lexicon from the trained weights
    #[arg(long)]
    lexicon_out: Option<PathBuf>,
    /// Fraction of the vocabulary (highest weights) to put in the lexicon
    #[arg(long, default_value_t = 0.01)]
    lexicon_top_fraction: f64,
    /// Absolute weight threshold for the lexicon; overrides the fraction
    #[arg(long)]
    lexicon_threshold: Option<f64>,
    /// Extra words (one per line) always included in the lexicon
    #[arg(long)]
    manual_words: Option<PathBuf>,
}

#[derive(Args)]
struct TrainLmArgs {
    /// Labeled corpus file
    #[arg(long)]
    input: PathBuf,
    /// Corpus file format
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Where to write the trained language model
    #[arg(long)]
    model_out: PathBuf,
    /// N-gram order
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Add-α smoothing constant
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
}

#[derive(Args)]
struct BuildIndexArgs {
    /// Labeled corpus file; only neutral entries are indexed
    #[arg(long)]
    input: PathBuf,
    /// Corpus file format
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Word-embedding file (word followed by vector components, one per line)
    #[arg(long)]
    embeddings: PathBuf,
    /// Where to write the index
    #[arg(long)]
    index_out: PathBuf,
}

#[derive(Args)]
struct DetoxArgs {
    /// Detoxification method
    #[arg(long, value_enum)]
    method: MethodArg,
    /// Input sentences, one per line
    #[arg(long)]
    input: PathBuf,
    /// Where to write the rewritten sentences, one per line
    #[arg(long)]
    output: PathBuf,
    /// Toxicity lexicon (needed by delete and condbert)
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Optional lemma table so delete also matches inflected forms
    #[arg(long)]
    lemmas: Option<PathBuf>,
    /// Retrieval index (needed by retrieve)
    #[arg(long)]
    index: Option<PathBuf>,
    /// Word-embedding file (needed by retrieve)
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Trained language model (needed by condbert, prompt-zero, prompt-few)
    #[arg(long)]
    lm: Option<PathBuf>,
    /// Parallel rewrite corpus (needed by prompt-few and prompt-ft)
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// condbert: toxicity penalty strength when soft-banning
    #[arg(long, default_value_t = 1.5)]
    lambda: f64,
    /// condbert: beam width for multi-token replacements
    #[arg(long, default_value_t = 10)]
    beam_width: usize,
    /// condbert: longest replacement for one masked word
    #[arg(long, default_value_t = 3)]
    max_len: usize,
    /// condbert: down-weight lexicon words by exp(-lambda*weight) instead of
    /// excluding them outright
    #[arg(long)]
    soft_ban: bool,
    /// condbert: which style's counts fill the gaps
    #[arg(long, value_enum, default_value = "neutral")]
    style: StyleArg,
    /// prompting: keep the top-k candidates at each generation step
    #[arg(long, default_value_t = 3)]
    top_k: usize,
    /// prompting: nucleus sampling cumulative-probability cutoff
    #[arg(long, default_value_t = 0.95)]
    top_p: f64,
    /// prompting: sampling temperature (higher is flatter)
    #[arg(long, default_value_t = 50.0)]
    temperature: f64,
    /// prompting: generation length cap
    #[arg(long, default_value_t = 30)]
    max_tokens: usize,
    /// prompting: number of few-shot examples
    #[arg(long, default_value_t = 5)]
    few_shot_k: usize,
    /// prompting: instruction line placed before the sentence
    #[arg(long, default_value = "Перефразируй")]
    prompt_prefix: String,
    /// prompting: separator between a source and its rewrite
    #[arg(long, default_value = ">>>")]
    separator: String,
    /// prompt-ft: n-gram order of the rewrite-record model
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// prompt-ft: add-α smoothing of the rewrite-record model
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Sampling seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Original (toxic) sentences, one per line
    #[arg(long)]
    input: PathBuf,
    /// Method output as name=path; repeat for several methods
    #[arg(long = "outputs", value_parser = parse_named_output, required = true)]
    outputs: Vec<(String, PathBuf)>,
    /// Trained toxicity classifier (for STA)
    #[arg(long)]
    classifier: PathBuf,
    /// Word-embedding file (for content similarity)
    #[arg(long)]
    embeddings: PathBuf,
    /// Trained language model (for perplexity)
    #[arg(long)]
    lm: PathBuf,
    /// Bootstrap resamples behind the GM standard deviation
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    /// Bootstrap seed
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also write the table to this file
    #[arg(long)]
    table_out: Option<PathBuf>,
    /// Also write full-precision key=value records to this file
    #[arg(long)]
    records_out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Labeled corpus file
    #[arg(long)]
    input: PathBuf,
    /// Corpus file format
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Directory for every artifact, output file, and report
    #[arg(long)]
    workdir: PathBuf,
    /// Word-embedding file
    #[arg(long)]
    embeddings: PathBuf,
    /// Parallel rewrite corpus; unlocks prompt-few and prompt-ft
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Held-out toxic sentences; defaults to a tenth of the toxic entries
    #[arg(long)]
    test_size: Option<usize>,
    /// Master seed for the split, sampling, and bootstrap
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Bootstrap resamples behind the GM standard deviation
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    /// Classifier gradient-descent epochs
    #[arg(long, default_value_t = 300)]
    epochs: usize,
    /// Classifier learning rate
    #[arg(long, default_value_t = 0.5)]
    learning_rate: f64,
    /// Fraction of the vocabulary to put in the toxicity lexicon
    #[arg(long, default_value_t = 0.01)]
    lexicon_top_fraction: f64,
    /// Extra words (one per line) always included in the lexicon
    #[arg(long)]
    manual_words: Option<PathBuf>,
    /// Language-model order
    #[arg(long, default_value_t = 3)]
    order: usize,
    /// Language-model add-α smoothing
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Few-shot example count for prompt-few
    #[arg(long, default_value_t = 5)]
    few_shot_k: usize,
    /// Keep only the k most probable words at each generation step
    #[arg(long, default_value_t = 3)]
    top_k: usize,
    /// Keep the smallest probability mass reaching p at each step
    #[arg(long, default_value_t = 0.95)]
    top_p: f64,
    /// Sampling temperature for the prompted methods
    #[arg(long, default_value_t = 50.0)]
    temperature: f64,
    /// Generation length cap for the prompted methods
    #[arg(long, default_value_t = 30)]
    max_tokens: usize,
}

fn parse_named_output(s: &str) -> std::result::Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => {
            Ok((name.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected name=path, got {s:?}")),
    }
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if let Err(err) = run(cli.command) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::TrainClassifier(args) => run_train_classifier(&args),
        Command::TrainLm(args) => run_train_lm(&args),
        Command::BuildIndex(args) => run_build_index(&args),
        Command::Detox(args) => run_detox(&args),
        Command::Evaluate(args) => run_evaluate(&args),
        Command::Pipeline(args) => run_pipeline(&args),
    }
}

/// A tenth of the toxic entries, at least one — the default held-out size.
fn default_test_size(corpus: &LabeledCorpus) -> usize {
    (corpus.count_label(StyleLabel::Toxic) / 10).max(1)
}

fn write_text(path: &Path, content: &str) -> Result<()> {
    fs::write(path, content).map_err(|e| Error::io(path, e))
}

fn run_train_classifier(args: &TrainClassifierArgs) -> Result<()> {
    let corpus = load_labeled_corpus(&args.input, args.format.into())?;
    let spec = SplitSpec {
        test_size: args.test_size.unwrap_or_else(|| default_test_size(&corpus)),
        seed: args.seed,
    };
    let (train_split, test_split) = split_corpus(&corpus, &spec)?;
    let config = TrainConfig {
        learning_rate: args.learning_rate,
        epochs: args.epochs,
        l2: args.l2,
        min_count: args.min_count,
        seed: args.seed,
    };
    let model: ToxicityModel<f64> = train(&train_split, &config)?;
    let score = f1(&model, &test_split);
    save_model(&model, &args.model_out)?;
    println!(
        "trained on {} entries, held out {} toxic sentences",
        train_split.len(),
        test_split.len()
    );
    println!("f1={score:?}");
    println!("model saved to {}", args.model_out.display());

    if let Some(lexicon_out) = &args.lexicon_out {
        let threshold = args
            .lexicon_threshold
            .unwrap_or_else(|| threshold_for_top_fraction(&model, args.lexicon_top_fraction));
        let manual = match &args.manual_words {
            Some(path) => load_manual_words(path)?,
            None => Vec::new(),
        };
        let lexicon = extract_lexicon(&model, threshold, &manual);
        save_lexicon(&lexicon, lexicon_out)?;
        println!(
            "lexicon saved to {} ({} words)",
            lexicon_out.display(),
            lexicon.len()
        );
    }
    Ok(())
}

fn run_train_lm(args: &TrainLmArgs) -> Result<()> {
    let corpus = load_labeled_corpus(&args.input, args.format.into())?;
    let lm = NgramLm::train(&corpus, args.order, args.alpha)?;
    save_lm(&lm, &args.model_out)?;
    println!(
        "lm saved to {} (order {}, {} words)",
        args.model_out.display(),
        args.order,
        lm.vocab().len()
    );
    Ok(())
}

fn run_build_index(args: &BuildIndexArgs) -> Result<()> {
    let corpus = load_labeled_corpus(&args.input, args.format.into())?;
    let table = load_embeddings::<f64>(&args.embeddings)?;
    let neutral: Vec<Sentence> = corpus
        .with_label(StyleLabel::Neutral)
        .map(|e| e.sentence.clone())
        .collect();
    if neutral.is_empty() {
        return Err(Error::Validation(
            "corpus has no neutral entries to index".into(),
        ));
    }
    let index = RetrieveIndex::build(neutral, &table);
    if index.is_empty() {
        return Err(Error::Validation(
            "no neutral sentence had an embedding; the index would be empty".into(),
        ));
    }
    save_index(&index, &args.index_out)?;
    println!(
        "index saved to {} ({} sentences)",
        args.index_out.display(),
        index.len()
    );
    Ok(())
}

/// Resolve an artifact flag a method depends on, naming the flag on failure.
fn require<'a>(path: &'a Option<PathBuf>, flag: &str, method: MethodArg) -> Result<&'a PathBuf> {
    path.as_ref().ok_or_else(|| {
        Error::Validation(format!("method {} requires {flag}", method.name()))
    })
}

fn run_detox(args: &DetoxArgs) -> Result<()> {
    let inputs = load_sentences(&args.input)?;
    let template = PromptTemplate::new(&args.prompt_prefix, &args.separator)?;
    let params = GenerationParams {
        top_k: args.top_k,
        top_p: args.top_p,
        temperature: args.temperature,
        max_tokens: args.max_tokens,
        seed: args.seed,
    };

    let outputs: Vec<Sentence> = match args.method {
        MethodArg::Duplicate => DuplicateMethod.detoxify_all(&inputs)?,
        MethodArg::Delete => {
            let lexicon: ToxicityLexicon<f64> =
                load_lexicon(require(&args.lexicon, "--lexicon", args.method)?)?;
            let lemmas = match &args.lemmas {
                Some(path) => Some(load_lemma_table(path)?),
                None => None,
            };
            DeleteMethod::new(lexicon, lemmas).detoxify_all(&inputs)?
        }
        MethodArg::Retrieve => {
            let table = load_embeddings::<f64>(require(&args.embeddings, "--embeddings", args.method)?)?;
            let index = load_index::<f64>(require(&args.index, "--index", args.method)?)?;
            RetrieveMethod::new(index, table).detoxify_all(&inputs)?
        }
        MethodArg::Condbert => {
            let lm = load_lm(require(&args.lm, "--lm", args.method)?)?;
            let lexicon: ToxicityLexicon<f64> =
                load_lexicon(require(&args.lexicon, "--lexicon", args.method)?)?;
            let config = CondBertConfig {
                lambda: args.lambda,
                beam_width: args.beam_width,
                max_len: args.max_len,
                hard_ban: !args.soft_ban,
                style: args.style.into(),
            };
            config.validate()?;
            CondBertMethod::new(&lm, lexicon, config).detoxify_all(&inputs)?
        }
        MethodArg::PromptZero => {
            let lm = load_lm(require(&args.lm, "--lm", args.method)?)?;
            PromptedMethod::new(&lm, PromptMode::ZeroShot, params, None, template)
                .detoxify_all(&inputs)?
        }
        MethodArg::PromptFew => {
            let lm = load_lm(require(&args.lm, "--lm", args.method)?)?;
            let pairs = load_parallel_corpus(require(&args.pairs, "--pairs", args.method)?)?;
            PromptedMethod::new(
                &lm,
                PromptMode::FewShot { k: args.few_shot_k },
                params,
                Some(pairs),
                template,
            )
            .detoxify_all(&inputs)?
        }
        MethodArg::PromptFt => {
            let pairs = load_parallel_corpus(require(&args.pairs, "--pairs", args.method)?)?;
            let records = finetune_corpus(&pairs, &template)?;
            let lm = NgramLm::train(&records, args.order, args.alpha)?;
            PromptedMethod::new(&lm, PromptMode::FinetunedSim, params, None, template)
                .detoxify_all(&inputs)?
        }
    };

    save_sentences(&outputs, &args.output)?;
    println!(
        "{} sentences written to {}",
        outputs.len(),
        args.output.display()
    );
    Ok(())
}

fn run_evaluate(args: &EvaluateArgs) -> Result<()> {
    let inputs = load_sentences(&args.input)?;
    let classifier: ToxicityModel<f64> = load_model(&args.classifier)?;
    let table = load_embeddings::<f64>(&args.embeddings)?;
    let lm = load_lm(&args.lm)?;

    let mut reports: Vec<EvalReport<f64>> = Vec::new();
    for (name, path) in &args.outputs {
        let outputs = load_sentences(path)?;
        reports.push(evaluate_outputs(
            name,
            &inputs,
            &outputs,
            &classifier,
            &table,
            &lm,
            args.resamples,
            args.seed,
        )?);
    }

    let table_text = format_report_table(&reports);
    print!("{table_text}");
    if let Some(path) = &args.table_out {
        write_text(path, &table_text)?;
    }
    if let Some(path) = &args.records_out {
        write_text(path, &format_report_records(&reports))?;
    }
    Ok(())
}

fn run_pipeline(args: &PipelineArgs) -> Result<()> {
    fs::create_dir_all(&args.workdir).map_err(|e| Error::io(&args.workdir, e))?;
    let corpus = load_labeled_corpus(&args.input, args.format.into())?;
    let spec = SplitSpec {
        test_size: args.test_size.unwrap_or_else(|| default_test_size(&corpus)),
        seed: args.seed,
    };
    let (train_split, test_split) = split_corpus(&corpus, &spec)?;

    // Models: classifier (+ lexicon from its weights) and the n-gram LM.
    let config = TrainConfig {
        learning_rate: args.learning_rate,
        epochs: args.epochs,
        seed: args.seed,
        ..TrainConfig::default()
    };
    let classifier: ToxicityModel<f64> = train(&train_split, &config)?;
    let score = f1(&classifier, &test_split);
    save_model(&classifier, &args.workdir.join("classifier.tsv"))?;
    println!("f1={score:?}");

    let threshold = threshold_for_top_fraction(&classifier, args.lexicon_top_fraction);
    let manual = match &args.manual_words {
        Some(path) => load_manual_words(path)?,
        None => Vec::new(),
    };
    let lexicon = extract_lexicon(&classifier, threshold, &manual);
    save_lexicon(&lexicon, &args.workdir.join("lexicon.tsv"))?;
    println!("lexicon: {} words", lexicon.len());

    let lm = NgramLm::train(&train_split, args.order, args.alpha)?;
    save_lm(&lm, &args.workdir.join("lm.tsv"))?;

    let table = load_embeddings::<f64>(&args.embeddings)?;
    let neutral: Vec<Sentence> = train_split
        .with_label(StyleLabel::Neutral)
        .map(|e| e.sentence.clone())
        .collect();
    let index = RetrieveIndex::build(neutral, &table);
    if index.is_empty() {
        return Err(Error::Validation(
            "no neutral training sentence had an embedding; retrieve has nothing to search".into(),
        ));
    }
    save_index(&index, &args.workdir.join("index.tsv"))?;

    // Held-out toxic sentences are what every method rewrites.
    let inputs: Vec<Sentence> = test_split.entries.iter().map(|e| e.sentence.clone()).collect();
    save_sentences(&inputs, &args.workdir.join("inputs.txt"))?;

    let pairs: Option<ParallelCorpus> = match &args.pairs {
        Some(path) => Some(load_parallel_corpus(path)?),
        None => None,
    };
    let template = PromptTemplate::default();
    let params = GenerationParams {
        top_k: args.top_k,
        top_p: args.top_p,
        temperature: args.temperature,
        max_tokens: args.max_tokens,
        seed: args.seed,
    };
    let ft_lm: Option<NgramLm> = match &pairs {
        Some(p) => Some(NgramLm::train(
            &finetune_corpus(p, &template)?,
            args.order,
            args.alpha,
        )?),
        None => None,
    };

    let mut methods: Vec<Box<dyn Detoxifier + '_>> = vec![
        Box::new(DuplicateMethod),
        Box::new(DeleteMethod::new(lexicon.clone(), None)),
        Box::new(RetrieveMethod::new(index, table.clone())),
        Box::new(CondBertMethod::new(
            &lm,
            lexicon.clone(),
            CondBertConfig::default(),
        )),
        Box::new(PromptedMethod::new(
            &lm,
            PromptMode::ZeroShot,
            params,
            None,
            template.clone(),
        )),
    ];
    if let Some(p) = &pairs {
        methods.push(Box::new(PromptedMethod::new(
            &lm,
            PromptMode::FewShot { k: args.few_shot_k },
            params,
            Some(p.clone()),
            template.clone(),
        )));
    }
    if let Some(ft) = &ft_lm {
        methods.push(Box::new(PromptedMethod::new(
            ft,
            PromptMode::FinetunedSim,
            params,
            None,
            template.clone(),
        )));
    }

    let mut reports: Vec<EvalReport<f64>> = Vec::new();
    for method in &methods {
        let outputs = method.detoxify_all(&inputs)?;
        save_sentences(&outputs, &args.workdir.join(format!("{}.txt", method.name())))?;
        reports.push(evaluate_outputs(
            method.name(),
            &inputs,
            &outputs,
            &classifier,
            &table,
            &lm,
            args.resamples,
            args.seed,
        )?);
    }

    let table_text = format_report_table(&reports);
    print!("{table_text}");
    write_text(&args.workdir.join("report.txt"), &table_text)?;
    write_text(
        &args.workdir.join("report_records.txt"),
        &format_report_records(&reports),
    )?;
    Ok(())
}
