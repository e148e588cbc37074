//! Command-line interface.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or config error. Results go
//! to stdout (or `--out`), diagnostics and the resolved settings to stderr.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::classifier::{self, LinearModel};
use crate::config::{self, PartialConfig, Settings};
use crate::corpus::{self, Corpus, Polarity};
use crate::eval::{
    self, generate_synthetic, ExperimentManifest, ExperimentSpec, InputFile, InputRecord, Resources, SyntheticSpec,
};
use crate::features::{self, Featurizer, Lexicons, Vocabulary};
use crate::lexicon::{self, FilterList, NegationLexicon, ObjectiveLexicon, SentimentLexicon};
use crate::textproc;

const MODEL_FILE: &str = "model.txt";
const VOCAB_FILE: &str = "vocab.txt";
const SENTIMENT_FILE: &str = "sentiment.tsv";
const NEGATION_FILE: &str = "negation.txt";
const OBJECTIVE_FILE: &str = "objective.tsv";

#[derive(Debug, Parser)]
#[command(name = "arsent", version, about = "Lexicon and SVM polarity classification for colloquial Arabic reviews")]
pub struct Cli {
    /// TOML config file (default: $ARSENT_CONFIG if set)
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// More log output (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the normalized tokens of each input text
    Normalize(NormalizeArgs),
    /// Induce the objective-word tendency lexicon from labeled reviews
    BuildLexicon(BuildLexiconArgs),
    /// Write a feature matrix for a corpus
    Featurize(FeaturizeArgs),
    /// Train a model on a corpus and write it to a directory
    Train(TrainArgs),
    /// Score a trained model on a labeled corpus
    Evaluate(EvaluateArgs),
    /// Predict the polarity of one text
    Predict(PredictArgs),
    /// Split, train and evaluate one configuration or a grid
    Experiment(ExperimentArgs),
    /// Generate a synthetic corpus with planted lexicons
    Synth(SynthArgs),
}

/// Settings shared by the pipeline subcommands. Unset flags fall back to
/// the config file, then to defaults.
#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Seed for the split and the SVM
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training share of the corpus
    #[arg(long)]
    pub train_fraction: Option<f64>,
    /// Feature mode: baseline1 (unigram), baseline2 (sentiment) or proposed (tendency)
    #[arg(long)]
    pub mode: Option<String>,
    /// N-gram orders, e.g. 1,2,3 ("none" for no n-grams)
    #[arg(long)]
    pub ngrams: Option<String>,
    /// Tendency threshold in (0.5, 1]
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Words seen fewer times are neutral
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Count occurrences or documents
    #[arg(long)]
    pub counting: Option<String>,
    /// SVM hinge-loss weight
    #[arg(long = "c")]
    pub c: Option<f64>,
    /// Relative duality-gap tolerance
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// Sentiment lexicon (term<TAB>polarity)
    #[arg(long, value_name = "FILE")]
    pub sentiment: Option<PathBuf>,
    /// Negation words, one per line
    #[arg(long, value_name = "FILE")]
    pub negation: Option<PathBuf>,
    /// Words excluded from the objective lexicon
    #[arg(long, value_name = "FILE")]
    pub filter: Option<PathBuf>,
    /// Extra character mapping FROM=TO (repeatable)
    #[arg(long, value_name = "FROM=TO")]
    pub char_map: Vec<String>,
}

impl RunArgs {
    fn partial(&self) -> PartialConfig {
        PartialConfig {
            seed: self.seed,
            train_fraction: self.train_fraction,
            mode: self.mode.clone(),
            ngrams: self.ngrams.clone(),
            threshold: self.threshold,
            min_count: self.min_count,
            counting: self.counting.clone(),
            c: self.c,
            tolerance: self.tolerance,
            max_epochs: self.max_epochs,
            sentiment: self.sentiment.clone(),
            negation: self.negation.clone(),
            filter: self.filter.clone(),
            char_map: (!self.char_map.is_empty()).then(|| self.char_map.clone()),
            ..Default::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct NormalizeArgs {
    /// Text to normalize
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub text: Option<String>,
    /// File with one text per line
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct BuildLexiconArgs {
    /// Labeled corpus (JSON lines)
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Output lexicon file (default: stdout)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Use every review instead of the training split
    #[arg(long)]
    pub full_corpus: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct FeaturizeArgs {
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Objective lexicon; built from the corpus when absent
    #[arg(long, value_name = "FILE")]
    pub objective: Option<PathBuf>,
    /// Fitted vocabulary to reuse; fitted on the corpus when absent
    #[arg(long, value_name = "FILE")]
    pub vocab: Option<PathBuf>,
    /// Where to write the fitted vocabulary
    #[arg(long, value_name = "FILE")]
    pub vocab_out: Option<PathBuf>,
    /// Feature matrix output (default: stdout)
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training corpus; every review is used
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    /// Objective lexicon; built from the corpus when absent
    #[arg(long, value_name = "FILE")]
    pub objective: Option<PathBuf>,
    /// Model directory to create
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Model directory written by `train`
    #[arg(long, value_name = "DIR")]
    pub model: PathBuf,
    /// Labeled test corpus
    #[arg(long, value_name = "FILE")]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model directory written by `train`
    #[arg(long, value_name = "DIR")]
    pub model: PathBuf,
    /// Review text
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub text: Option<String>,
    /// File with one text per line
    #[arg(long, value_name = "FILE")]
    pub input: Option<PathBuf>,
    /// Also print the decision value
    #[arg(long)]
    pub score: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// unigram, sentiment features, sentiment + tendency
    Comparison,
    /// proposed features with n-gram orders {1} {2} {3} {1,2} {1,2,3} {1,2,3,4}
    Ngrams,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Labeled corpus (JSON lines)
    #[arg(long, value_name = "FILE", required_unless_present = "manifest")]
    pub corpus: Option<PathBuf>,
    /// Run a preset grid instead of a single configuration
    #[arg(long, value_enum, conflicts_with = "manifest")]
    pub grid: Option<Grid>,
    /// Rerun the experiments recorded in a manifest
    #[arg(long, value_name = "FILE", conflicts_with = "corpus")]
    pub manifest: Option<PathBuf>,
    /// Write report.txt, report.jsonl and manifest.json here
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Build the objective lexicon from the whole corpus (leaks test labels)
    #[arg(long)]
    pub lexicon_from_full_corpus: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Corpus output (JSON lines)
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,
    /// Directory for the planted lexicons
    #[arg(long, value_name = "DIR")]
    pub lexicon_dir: Option<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    pub reviews: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Share of slots carrying class signal
    #[arg(long, default_value_t = 0.25)]
    pub signal: f64,
    /// Fraction of the signal planted in objective tendency words
    #[arg(long, default_value_t = 0.4)]
    pub objective_share: f64,
    /// Planted same-class share of tendency-word occurrences
    #[arg(long, default_value_t = 0.8)]
    pub strength: f64,
    #[arg(long, default_value_t = 0.1)]
    pub negation_rate: f64,
    #[arg(long, default_value_t = 0.05)]
    pub phrase_rate: f64,
}

enum Failure {
    Usage(String),
    Data(String),
}

type Outcome = Result<(), Failure>;

fn data<E: Display>(e: E) -> Failure {
    Failure::Data(e.to_string())
}

/// Entry point for the binary: parses `std::env::args`, sets up logging.
pub fn run() -> i32 {
    let args: Vec<OsString> = std::env::args_os().collect();
    let verbosity = args
        .iter()
        .filter_map(|a| a.to_str())
        .map(|a| match a {
            "--verbose" => 1,
            s if s.starts_with('-') && !s.starts_with("--") && s[1..].chars().all(|c| c == 'v') => s.len() - 1,
            _ => 0,
        })
        .sum::<usize>();
    let level = match verbosity {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env("RUST_LOG")
        .format_timestamp(None)
        .try_init();
    // Unlocked handles: worker threads log to stderr while a grid runs.
    run_with_io(args, &mut std::io::stdout(), &mut std::io::stderr())
}

/// Runs one command line, writing results to `out` and diagnostics to
/// `err`. Returns the process exit code.
pub fn run_with_io<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn file_config(path: Option<&Path>) -> Result<PartialConfig, Failure> {
    let env_path = std::env::var_os(config::CONFIG_ENV).map(PathBuf::from);
    match path.map(Path::to_path_buf).or(env_path) {
        Some(p) => config::load_config(&p).map_err(data),
        None => Ok(PartialConfig::default()),
    }
}

fn settings(flags: PartialConfig, file: &PartialConfig, err: &mut dyn Write) -> Result<Settings, Failure> {
    let s = flags.or(file.clone()).resolve().map_err(data)?;
    let _ = writeln!(
        err,
        "settings: {}",
        serde_json::to_string(&s).expect("settings serialize")
    );
    let _ = writeln!(err, "seeds: split={} svm={}", s.split.seed, s.train.seed);
    Ok(s)
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let file = file_config(cli.config.as_deref())?;
    match cli.command {
        Command::Normalize(a) => normalize(a, &file, out, err),
        Command::BuildLexicon(a) => build_lexicon(a, &file, out, err),
        Command::Featurize(a) => featurize(a, &file, out, err),
        Command::Train(a) => train(a, &file, out, err),
        Command::Evaluate(a) => evaluate(a, out, err),
        Command::Predict(a) => predict(a, out, err),
        Command::Experiment(a) => experiment(a, &file, out, err),
        Command::Synth(a) => synth(a, out, err),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| data(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(data),
    }
}

fn read_lines(path: &Path) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(str::to_string).collect())
}

fn normalize(a: NormalizeArgs, file: &PartialConfig, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = settings(a.run.partial(), file, err)?;
    let texts = match (&a.text, &a.input) {
        (Some(t), _) => vec![t.clone()],
        (None, Some(p)) => read_lines(p)?,
        (None, None) => return Err(Failure::Usage("--text or --input is required".into())),
    };
    let mut buf = String::new();
    for t in texts {
        buf.push_str(&textproc::preprocess_words(&t, &s.normalization).join(" "));
        buf.push('\n');
    }
    emit(out, None, &buf)
}

struct Loaded {
    sentiment: Option<SentimentLexicon>,
    negation: Option<NegationLexicon>,
    filter: Option<FilterList>,
}

fn load_lexicons(s: &Settings, err: &mut dyn Write) -> Result<Loaded, Failure> {
    let norm = &s.normalization;
    let sentiment = s
        .sentiment
        .as_ref()
        .map(|p| lexicon::load_sentiment_lexicon(p, norm))
        .transpose()
        .map_err(data)?;
    let negation = s
        .negation
        .as_ref()
        .map(|p| NegationLexicon::load(p, norm))
        .transpose()
        .map_err(data)?;
    let filter = s
        .filter
        .as_ref()
        .map(|p| FilterList::load(p, norm))
        .transpose()
        .map_err(data)?;
    if let (Some(n), Some(sl)) = (&negation, &sentiment) {
        n.check_disjoint(sl).map_err(data)?;
    }
    for (name, hash) in [
        ("sentiment", sentiment.as_ref().map(SentimentLexicon::content_hash)),
        ("negation", negation.as_ref().map(NegationLexicon::content_hash)),
        ("filter", filter.as_ref().map(FilterList::content_hash)),
    ] {
        if let Some(h) = hash {
            let _ = writeln!(err, "{name} lexicon hash: {h}");
        }
    }
    Ok(Loaded {
        sentiment,
        negation,
        filter,
    })
}

fn require_sentiment(l: &Loaded, s: &Settings) -> Result<(), Failure> {
    if s.features.mode.uses_dense() && l.sentiment.is_none() {
        return Err(Failure::Usage(format!(
            "mode {} needs --sentiment",
            s.features.mode
        )));
    }
    Ok(())
}

fn load_corpus(path: &Path, err: &mut dyn Write) -> Result<Corpus, Failure> {
    let c = corpus::load_corpus(path).map_err(data)?;
    let _ = writeln!(err, "corpus {}: {} reviews, hash {}", path.display(), c.len(), c.content_hash());
    Ok(c)
}

fn build_objective(l: &Loaded, s: &Settings, source: &Corpus) -> Result<ObjectiveLexicon, Failure> {
    let slex = l
        .sentiment
        .as_ref()
        .ok_or_else(|| Failure::Usage("the objective lexicon needs --sentiment".into()))?;
    lexicon::build_objective_lexicon(
        source,
        slex,
        l.negation.as_ref().unwrap_or(&NegationLexicon::new()),
        l.filter.as_ref().unwrap_or(&FilterList::new()),
        &s.objective,
        &s.normalization,
    )
    .map_err(data)
}

fn build_lexicon(a: BuildLexiconArgs, file: &PartialConfig, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = settings(a.run.partial(), file, err)?;
    let l = load_lexicons(&s, err)?;
    let c = load_corpus(&a.corpus, err)?;
    let source = if a.full_corpus {
        c
    } else {
        corpus::split(&c, &s.split).map_err(data)?.0
    };
    let olex = build_objective(&l, &s, &source)?;
    let _ = writeln!(err, "{}", olex.stats());
    let mut buf = Vec::new();
    olex.write_to(&mut buf).map_err(data)?;
    emit(out, a.out.as_deref(), &String::from_utf8(buf).expect("utf-8"))
}

fn objective_for(
    path: Option<&Path>,
    l: &Loaded,
    s: &Settings,
    corpus: &Corpus,
) -> Result<Option<ObjectiveLexicon>, Failure> {
    if !s.features.mode.uses_objective() {
        return Ok(None);
    }
    match path {
        Some(p) => lexicon::load_objective_lexicon(p).map(Some).map_err(data),
        None => {
            log::info!("building objective lexicon from {}", corpus.name());
            build_objective(l, s, corpus).map(Some)
        }
    }
}

fn featurize(a: FeaturizeArgs, file: &PartialConfig, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = settings(a.run.partial(), file, err)?;
    let l = load_lexicons(&s, err)?;
    require_sentiment(&l, &s)?;
    let c = load_corpus(&a.corpus, err)?;
    let olex = objective_for(a.objective.as_deref(), &l, &s, &c)?;
    let mut fz = Featurizer::new(
        s.features.clone(),
        s.normalization.clone(),
        Lexicons {
            sentiment: l.sentiment.as_ref(),
            negation: l.negation.as_ref(),
            objective: olex.as_ref(),
        },
    )
    .map_err(data)?;
    match &a.vocab {
        Some(p) => fz = fz.with_vocabulary(Vocabulary::load(p).map_err(data)?),
        None => {
            fz.fit(&c);
        }
    }
    if let Some(p) = &a.vocab_out {
        fz.vocabulary().expect("fitted").save(p).map_err(data)?;
    }
    let _ = writeln!(err, "vocabulary hash: {} ({} columns)", fz.vocab_hash(), fz.dim());
    let rows = fz.vectorize_corpus(&c).map_err(data)?;
    let labels: Vec<Polarity> = c.iter().map(|r| r.label).collect();
    let mut buf = Vec::new();
    features::write_feature_matrix(&mut buf, &rows, &labels).map_err(data)?;
    emit(out, a.out.as_deref(), &String::from_utf8(buf).expect("utf-8"))
}

fn train(a: TrainArgs, file: &PartialConfig, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let s = settings(a.run.partial(), file, err)?;
    let l = load_lexicons(&s, err)?;
    require_sentiment(&l, &s)?;
    let c = load_corpus(&a.corpus, err)?;
    let olex = objective_for(a.objective.as_deref(), &l, &s, &c)?;
    let mode = s.features.mode;
    let mut fz = Featurizer::new(
        s.features.clone(),
        s.normalization.clone(),
        Lexicons {
            sentiment: l.sentiment.as_ref(),
            negation: l.negation.as_ref(),
            objective: olex.as_ref(),
        },
    )
    .map_err(data)?;
    let vocab = fz.fit(&c).clone();
    let rows = fz.vectorize_corpus(&c).map_err(data)?;
    let labels: Vec<Polarity> = c.iter().map(|r| r.label).collect();
    let offset = mode.uses_dense().then(|| vocab.len());
    let (mut model, summary) = classifier::train_with_summary(&rows, &labels, offset, &s.train).map_err(data)?;
    model.meta.vocab_hash = fz.vocab_hash();
    model.meta.features = Some(fz.feature_set().clone());
    model.meta.normalization = Some(s.normalization.clone());
    let _ = writeln!(
        err,
        "trained in {} epochs (converged: {}, relative gap {:.2e})",
        summary.epochs,
        summary.converged,
        summary.relative_gap()
    );

    let dir = &a.out_dir;
    fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
    classifier::save_model(&model, dir.join(MODEL_FILE)).map_err(data)?;
    vocab.save(dir.join(VOCAB_FILE)).map_err(data)?;
    if mode.uses_dense() {
        let slex = l.sentiment.as_ref().expect("checked");
        lexicon::save_sentiment_lexicon(slex, dir.join(SENTIMENT_FILE)).map_err(data)?;
        l.negation
            .clone()
            .unwrap_or_default()
            .save(dir.join(NEGATION_FILE))
            .map_err(data)?;
    }
    if let Some(o) = &olex {
        lexicon::save_objective_lexicon(o, dir.join(OBJECTIVE_FILE)).map_err(data)?;
    }
    let _ = writeln!(out, "model {} written to {}", model.content_hash(), dir.display());
    Ok(())
}

struct ModelDir {
    model: LinearModel,
    vocab: Vocabulary,
    sentiment: Option<SentimentLexicon>,
    negation: Option<NegationLexicon>,
    objective: Option<ObjectiveLexicon>,
}

fn load_model_dir(dir: &Path, err: &mut dyn Write) -> Result<ModelDir, Failure> {
    let model = classifier::load_model(dir.join(MODEL_FILE)).map_err(data)?;
    let vocab = Vocabulary::load(dir.join(VOCAB_FILE)).map_err(data)?;
    model.check_vocab(&vocab.content_hash()).map_err(data)?;
    let features = model
        .meta
        .features
        .clone()
        .ok_or_else(|| data("model does not record its feature set"))?;
    let norm = model.meta.normalization.clone().unwrap_or_default();
    let (sentiment, negation) = if features.mode.uses_dense() {
        (
            Some(lexicon::load_sentiment_lexicon(dir.join(SENTIMENT_FILE), &norm).map_err(data)?),
            Some(NegationLexicon::load(dir.join(NEGATION_FILE), &norm).map_err(data)?),
        )
    } else {
        (None, None)
    };
    let objective = if features.mode.uses_objective() {
        Some(lexicon::load_objective_lexicon(dir.join(OBJECTIVE_FILE)).map_err(data)?)
    } else {
        None
    };
    let _ = writeln!(err, "model {} ({})", model.content_hash(), features);
    Ok(ModelDir {
        model,
        vocab,
        sentiment,
        negation,
        objective,
    })
}

impl ModelDir {
    fn featurizer(&self) -> Result<Featurizer<'_>, Failure> {
        let meta = &self.model.meta;
        Ok(Featurizer::new(
            meta.features.clone().expect("checked on load"),
            meta.normalization.clone().unwrap_or_default(),
            Lexicons {
                sentiment: self.sentiment.as_ref(),
                negation: self.negation.as_ref(),
                objective: self.objective.as_ref(),
            },
        )
        .map_err(data)?
        .with_vocabulary(self.vocab.clone()))
    }
}

fn evaluate(a: EvaluateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let md = load_model_dir(&a.model, err)?;
    let fz = md.featurizer()?;
    let test = load_corpus(&a.corpus, err)?;
    let report = eval::evaluate(&md.model, &test, &fz, &fz.feature_set().label()).map_err(data)?;
    let text = match a.format {
        Format::Table => eval::render_table(std::slice::from_ref(&report)),
        Format::Json => eval::render_json_lines(std::slice::from_ref(&report)),
    };
    emit(out, None, &text)
}

fn predict(a: PredictArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let md = load_model_dir(&a.model, err)?;
    let fz = md.featurizer()?;
    let texts = match (&a.text, &a.input) {
        (Some(t), _) => vec![t.clone()],
        (None, Some(p)) => read_lines(p)?,
        (None, None) => return Err(Failure::Usage("--text or --input is required".into())),
    };
    let mut buf = String::new();
    for t in texts {
        let row = fz.vectorize(&t).map_err(data)?;
        let d = md.model.decision_value(&row).map_err(data)?;
        let label = if d >= 0.0 { Polarity::Positive } else { Polarity::Negative };
        if a.score {
            buf.push_str(&format!("{label}\t{d}\n"));
        } else {
            buf.push_str(&format!("{label}\n"));
        }
    }
    emit(out, None, &buf)
}

fn input_file(path: &Path, hash: String) -> Result<InputFile, Failure> {
    let abs = fs::canonicalize(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    Ok(InputFile {
        path: abs.to_string_lossy().into_owned(),
        hash,
    })
}

fn experiment(a: ExperimentArgs, file: &PartialConfig, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let (specs, corpus, resources, inputs, recorded) = match &a.manifest {
        Some(m) => {
            let text = fs::read_to_string(m).map_err(|e| data(format!("{}: {e}", m.display())))?;
            let manifest = ExperimentManifest::from_json(&text).map_err(data)?;
            let (c, r) = load_manifest_inputs(&manifest, err)?;
            (manifest.specs.clone(), c, r, manifest.inputs.clone(), Some(manifest))
        }
        None => {
            let mut flags = a.run.partial();
            if a.lexicon_from_full_corpus {
                flags.lexicon_from_full_corpus = Some(true);
            }
            let s = settings(flags, file, err)?;
            let l = load_lexicons(&s, err)?;
            let path = a.corpus.as_ref().expect("required by clap");
            let c = load_corpus(path, err)?;
            let base = ExperimentSpec {
                name: s.features.label(),
                features: s.features.clone(),
                split: s.split,
                train: s.train.clone(),
                objective: s.objective,
                normalization: s.normalization.clone(),
                lexicon_from_full_corpus: s.lexicon_from_full_corpus,
            };
            let specs = match a.grid {
                None => vec![base],
                Some(Grid::Comparison) => eval::comparison_grid(&base),
                Some(Grid::Ngrams) => eval::ngram_grid(&base),
            };
            if specs.iter().any(|sp| sp.features.mode.uses_dense()) && l.sentiment.is_none() {
                return Err(Failure::Usage("these experiments need --sentiment".into()));
            }
            let opt = |p: &Option<PathBuf>, h: Option<String>| -> Result<Option<InputFile>, Failure> {
                match (p, h) {
                    (Some(p), Some(h)) => input_file(p, h).map(Some),
                    _ => Ok(None),
                }
            };
            let inputs = InputRecord {
                corpus: input_file(path, c.content_hash())?,
                sentiment: opt(&s.sentiment, l.sentiment.as_ref().map(SentimentLexicon::content_hash))?,
                negation: opt(&s.negation, l.negation.as_ref().map(NegationLexicon::content_hash))?,
                filter: opt(&s.filter, l.filter.as_ref().map(FilterList::content_hash))?,
            };
            let r = Resources {
                sentiment: l.sentiment,
                negation: l.negation,
                filter: l.filter,
            };
            (specs, c, r, inputs, None)
        }
    };
    for sp in &specs {
        let _ = writeln!(
            err,
            "experiment `{}`: {} split seed {} svm seed {}",
            sp.name, sp.features, sp.split.seed, sp.train.seed
        );
    }
    let outcomes = eval::run_grid(&specs, &corpus, &resources).map_err(data)?;
    if let Some(m) = &recorded {
        m.verify(&outcomes).map_err(data)?;
        let _ = writeln!(err, "rerun matches manifest");
    }
    let reports: Vec<_> = outcomes.iter().map(|o| o.report.clone()).collect();
    let table = eval::render_table(&reports);
    let json = eval::render_json_lines(&reports);
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
        let manifest = ExperimentManifest::new(inputs, specs, &outcomes);
        for (name, text) in [
            ("report.txt", table.as_str()),
            ("report.jsonl", json.as_str()),
            ("manifest.json", manifest.to_json().as_str()),
        ] {
            emit(out, Some(&dir.join(name)), text)?;
        }
    }
    match a.format {
        Format::Table => emit(out, None, &table),
        Format::Json => emit(out, None, &json),
    }
}

fn load_manifest_inputs(m: &ExperimentManifest, err: &mut dyn Write) -> Result<(Corpus, Resources), Failure> {
    let norm = m
        .specs
        .first()
        .map(|s| s.normalization.clone())
        .ok_or_else(|| data("manifest lists no experiments"))?;
    let check = |what: &str, f: &InputFile, actual: String| {
        if actual == f.hash {
            Ok(())
        } else {
            Err(data(format!("{what} {} changed since the manifest was written", f.path)))
        }
    };
    let corpus = load_corpus(Path::new(&m.inputs.corpus.path), err)?;
    check("corpus", &m.inputs.corpus, corpus.content_hash())?;
    let mut r = Resources::default();
    if let Some(f) = &m.inputs.sentiment {
        let l = lexicon::load_sentiment_lexicon(&f.path, &norm).map_err(data)?;
        check("sentiment lexicon", f, l.content_hash())?;
        r.sentiment = Some(l);
    }
    if let Some(f) = &m.inputs.negation {
        let l = NegationLexicon::load(&f.path, &norm).map_err(data)?;
        check("negation lexicon", f, l.content_hash())?;
        r.negation = Some(l);
    }
    if let Some(f) = &m.inputs.filter {
        let l = FilterList::load(&f.path, &norm).map_err(data)?;
        check("filter list", f, l.content_hash())?;
        r.filter = Some(l);
    }
    Ok((corpus, r))
}

fn synth(a: SynthArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let spec = SyntheticSpec {
        n_reviews: a.reviews,
        seed: a.seed,
        sentiment_rate: a.signal * (1.0 - a.objective_share),
        objective_rate: a.signal * a.objective_share,
        objective_strength: a.strength,
        negation_rate: a.negation_rate,
        phrase_rate: a.phrase_rate,
        ..Default::default()
    };
    let _ = writeln!(err, "synthetic spec: {}", serde_json::to_string(&spec).expect("spec serializes"));
    let _ = writeln!(err, "seeds: generator={}", spec.seed);
    let d = generate_synthetic(&spec).map_err(data)?;
    corpus::save_corpus(&d.corpus, &a.out).map_err(data)?;
    if let Some(dir) = &a.lexicon_dir {
        fs::create_dir_all(dir).map_err(|e| data(format!("{}: {e}", dir.display())))?;
        lexicon::save_sentiment_lexicon(&d.sentiment, dir.join(SENTIMENT_FILE)).map_err(data)?;
        d.negation.save(dir.join(NEGATION_FILE)).map_err(data)?;
        let mut t = String::from("# word\tplanted tendency\tplanted pt\n");
        for (w, tend) in &d.tendency {
            let pt = d.planted_pt.get(w).map_or("-".to_string(), |p| p.to_string());
            t.push_str(&format!("{w}\t{tend}\t{pt}\n"));
        }
        emit(out, Some(&dir.join("tendency.tsv")), &t)?;
    }
    let (p, n) = d.corpus.label_counts();
    let _ = writeln!(
        out,
        "{} reviews ({p} positive, {n} negative) written to {}",
        d.corpus.len(),
        a.out.display()
    );
    Ok(())
}
