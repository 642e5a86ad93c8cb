//! Command-line interface.
//!
//! Human-readable tables go to stdout, machine-readable files to `--out`
//! style paths. Exit codes: 0 success, 1 usage or configuration error,
//! 2 data error. `REVMINE_LOG` sets the log filter (for example `info`).

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::corpus::{compute_stats, load_corpus, load_corpus_with_log, save_corpus, stratified_sample, tag_missing_pos, Corpus, DatasetStats, Format, Stratum};
use crate::error::{Error, Result};
use crate::evaluation::{dice_agreement, evaluate_all, type_key, Language};
use crate::experiments::{emit_report, import_semeval, run_experiment, ExperimentConfig, Procedure, ReportFormat};
use crate::guidelines::{length_cutoff_sweep, removal_table_csv, removal_table_markdown, run_pipeline, Cutoff, PipelineConfig, Step};
use crate::synth::{synthetic_corpus, SynthConfig};
use crate::tagger::{load_embeddings, load_model, predict_spans, save_model, train, training_sequences, EmbeddingTable, FeatureTemplateConfig, TrainConfig, MODEL_ANNOTATOR};

#[derive(Debug, Parser)]
#[command(name = "revmine", version, about = "App-feature extraction from app reviews")]
pub struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads for experiment folds.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// More log output (-v info, -vv debug); REVMINE_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset characteristics.
    Stats(StatsArgs),
    /// Apply guideline simulation steps.
    Simulate(SimulateArgs),
    /// Train a CRF model.
    Train(TrainArgs),
    /// Tag a corpus with a trained model.
    Tag(TagArgs),
    /// Score predictions against gold spans.
    Eval(EvalArgs),
    /// Run a training procedure and report per-category scores.
    Experiment(ExperimentArgs),
    /// Feature-length cutoff sweep over one or more corpora.
    Sweep(SweepArgs),
    /// Dice agreement between two annotators.
    Agreement(AgreementArgs),
    /// Rating-stratified sample of a review pool.
    Sample(SampleArgs),
    /// Generate a synthetic corpus.
    Synth(SynthArgs),
    /// Convert SemEval aspect-term XML to a corpus.
    ImportSemeval(ImportArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArg {
    /// Corpus file (.jsonl or .conll).
    pub corpus: PathBuf,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: CorpusArg,
    /// Count only this annotator's spans.
    #[arg(long)]
    pub annotator: Option<String>,
    #[arg(long)]
    pub per_category: bool,
    /// Also write the table as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub input: CorpusArg,
    /// Comma-separated steps: pre, self, noun, len.
    #[arg(long, default_value = "pre,self,noun,len")]
    pub steps: String,
    #[arg(long, default_value_t = 3)]
    pub max_len: usize,
    /// Comma-separated self-reference words replacing the default list.
    #[arg(long)]
    pub lexicon: Option<String>,
    /// Fill missing POS tags with the heuristic tagger first.
    #[arg(long)]
    pub tag_pos: bool,
    #[arg(long)]
    pub keep_empty_reviews: bool,
    #[arg(long)]
    pub out: PathBuf,
    /// Removal reports as JSON.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Before/after statistics as CSV.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TaggerArgs {
    /// Whitespace-separated word vectors used as features.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    #[arg(long)]
    pub no_pos: bool,
    #[arg(long)]
    pub no_position: bool,
    #[arg(long)]
    pub no_stylistics: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub input: CorpusArg,
    #[arg(long)]
    pub annotator: String,
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub tagger: TaggerArgs,
}

#[derive(Debug, Args)]
pub struct TagArgs {
    #[command(flatten)]
    pub input: CorpusArg,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Corpus holding the predicted spans.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub annotator: String,
    #[arg(long, default_value = MODEL_ANNOTATOR)]
    pub pred_annotator: String,
    /// Stemming language for types; defaults to the gold corpus language.
    #[arg(long)]
    pub language: Option<String>,
    #[arg(long)]
    pub per_category: bool,
    /// Full reports as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[command(flatten)]
    pub input: CorpusArg,
    /// ccv, appcat, scv, ccv-ext or scv-ext.
    #[arg(long)]
    pub procedure: String,
    #[arg(long)]
    pub annotator: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// External training corpora for the *-ext procedures.
    #[arg(long)]
    pub external: Vec<PathBuf>,
    #[arg(long)]
    pub language: Option<String>,
    #[command(flatten)]
    pub tagger: TaggerArgs,
    /// Report file; format from --report-format or the extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report_format: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Corpora, already passed through the noun filter.
    #[arg(required = true)]
    pub corpora: Vec<PathBuf>,
    #[arg(long)]
    pub annotator: String,
    #[arg(long, default_value = "1,2,3,4,inf")]
    pub cutoffs: String,
    #[arg(long, default_value = "ccv")]
    pub procedure: String,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[command(flatten)]
    pub tagger: TaggerArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AgreementArgs {
    #[command(flatten)]
    pub input: CorpusArg,
    #[arg(long)]
    pub a: String,
    #[arg(long)]
    pub b: String,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub input: CorpusArg,
    #[arg(long)]
    pub per_app: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 3)]
    pub categories: usize,
    #[arg(long, default_value_t = 30)]
    pub reviews: usize,
    #[arg(long, default_value_t = 2)]
    pub apps: usize,
    #[arg(long, default_value_t = 10)]
    pub features: usize,
    #[arg(long, default_value_t = 0.7)]
    pub shared: f64,
    #[arg(long, default_value_t = 0.25)]
    pub noise: f64,
    #[arg(long, default_value_t = 0.1)]
    pub empty: f64,
    #[arg(long, default_value = "a1")]
    pub annotator: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ImportArgs {
    pub xml: PathBuf,
    /// Domain name used as app and category, e.g. laptop.
    #[arg(long)]
    pub domain: String,
    #[arg(long)]
    pub out: PathBuf,
}

/// Exit code for an error: 1 for usage and configuration problems, 2 for
/// problems with the data.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::UnknownAnnotator(_) => 1,
        _ => 2,
    }
}

fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_env(env_logger::Env::new().filter("REVMINE_LOG"))
        .try_init();
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Tables are written to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    init_logging(cli.verbose);
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::Config(format!("input file {} does not exist", path.display())))
    }
}

fn format_of(path: &Path, explicit: Option<&str>) -> Result<Format> {
    match explicit {
        Some(f) => f.parse(),
        None => Ok(Format::from_path(path)),
    }
}

fn read_input(input: &CorpusArg) -> Result<Corpus> {
    require_file(&input.corpus)?;
    let (corpus, log) = load_corpus_with_log(&input.corpus, format_of(&input.corpus, input.format.as_deref())?)?;
    if log.repaired_bio + log.dropped_fragments > 0 {
        log::warn!(
            "{}: repaired {} BIO labels, dropped {} fragmented annotations",
            input.corpus.display(),
            log.repaired_bio,
            log.dropped_fragments
        );
    }
    Ok(corpus)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn save(corpus: &Corpus, path: &Path) -> Result<()> {
    save_corpus(corpus, path, Format::from_path(path))
}

fn language(explicit: Option<&str>, corpus: &Corpus) -> Result<Language> {
    match explicit {
        Some(l) => l.parse(),
        None => Ok(Language::for_corpus(corpus.language())),
    }
}

fn load_table(path: Option<&Path>) -> Result<Option<EmbeddingTable>> {
    path.map(|p| {
        require_file(p)?;
        load_embeddings(p)
    })
    .transpose()
}

fn tagger_settings(args: &TaggerArgs, seed: u64, embeddings: Option<&EmbeddingTable>) -> (FeatureTemplateConfig, TrainConfig) {
    let mut template = FeatureTemplateConfig {
        window: args.window,
        use_pos: !args.no_pos,
        use_position: !args.no_position,
        use_stylistics: !args.no_stylistics,
        ..FeatureTemplateConfig::default()
    };
    if let Some(table) = embeddings {
        template = template.with_embeddings(table);
    }
    let train = TrainConfig {
        l2_lambda: args.l2,
        max_iterations: args.max_iter,
        convergence_tol: args.tol,
        seed,
    };
    (template, train)
}

const STATS_COLUMNS: [&str; 9] = ["", "reviews", "sents", "tokens", "types", "single", "multi", "TTR", "feats/review"];

fn stats_row(name: &str, s: &DatasetStats) -> [String; 9] {
    [
        name.to_string(),
        s.n_reviews.to_string(),
        s.n_sentences.to_string(),
        s.feature_tokens.to_string(),
        s.feature_types.to_string(),
        s.single_word.to_string(),
        s.multi_word.to_string(),
        format!("{:.2}", s.type_token_ratio),
        format!("{:.2}", s.features_per_review),
    ]
}

fn aligned(rows: &[Vec<String>]) -> String {
    let widths: Vec<usize> = (0..rows[0].len())
        .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in rows {
        let line: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(i, cell)| if i == 0 { format!("{cell:<w$}", w = widths[i]) } else { format!("{cell:>w$}", w = widths[i]) })
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

fn print(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Stats(a) => cmd_stats(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Train(a) => cmd_train(a, cli.seed, out),
        Command::Tag(a) => cmd_tag(a, out),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Experiment(a) => cmd_experiment(a, cli.seed, cli.jobs, out),
        Command::Sweep(a) => cmd_sweep(a, cli.seed, cli.jobs, out),
        Command::Agreement(a) => cmd_agreement(a, out),
        Command::Sample(a) => cmd_sample(a, cli.seed, out),
        Command::Synth(a) => cmd_synth(a, cli.seed, out),
        Command::ImportSemeval(a) => cmd_import(a, out),
    }
}

pub fn cmd_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = read_input(&args.input)?;
    let lang = Language::for_corpus(corpus.language());
    let stats = compute_stats(&corpus, args.annotator.as_deref(), |w| type_key(w, lang))?;
    let mut rows = vec![STATS_COLUMNS.map(String::from).to_vec()];
    if args.per_category {
        rows.extend(stats.per_category.iter().map(|(c, s)| stats_row(c, s).to_vec()));
    }
    rows.push(stats_row("Total", &stats.total).to_vec());
    if let Some(path) = &args.out {
        let mut csv = String::from("category,reviews,sents,tokens,types,single,multi,ttr,feats_per_review\n");
        for row in &rows[1..] {
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
        write_file(path, &csv)?;
    }
    print(out, &aligned(&rows))
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let steps = args
        .steps
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<Step>())
        .collect::<Result<Vec<_>>>()?;
    let config = PipelineConfig {
        steps,
        max_len: args.max_len,
        self_ref_lexicon: args
            .lexicon
            .as_ref()
            .map(|l| l.split(',').map(|w| w.trim().to_string()).filter(|w| !w.is_empty()).collect::<BTreeSet<_>>()),
        drop_empty_reviews_after_each_step: !args.keep_empty_reviews,
        ..PipelineConfig::default()
    };
    config.validate()?;
    let mut corpus = read_input(&args.input)?;
    if args.tag_pos {
        corpus = tag_missing_pos(&corpus)?;
    }
    let (result, reports) = run_pipeline(&corpus, &config)?;
    save(&result, &args.out)?;
    if let Some(path) = &args.report {
        write_file(path, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    }
    if let Some(path) = &args.table {
        write_file(path, &removal_table_csv(&reports))?;
    }
    print(out, &removal_table_markdown(&reports))
}

pub fn cmd_train(args: &TrainArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let corpus = read_input(&args.input)?;
    let table = load_table(args.tagger.embeddings.as_deref())?;
    let (template, config) = tagger_settings(&args.tagger, seed, table.as_ref());
    let sequences = training_sequences(&corpus, &args.annotator)?;
    let model = train(&sequences, &template, table.as_ref(), &config)?;
    save_model(&model, &args.model)?;
    let meta = &model.train_meta;
    print(
        out,
        &format!(
            "trained on {} sentences: {} features, {} iterations, objective {:.6}, converged {}\n",
            meta.n_sequences,
            model.n_features(),
            meta.iterations,
            meta.final_objective,
            meta.converged
        ),
    )
}

pub fn cmd_tag(args: &TagArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&args.model)?;
    let corpus = read_input(&args.input)?;
    let model = load_model(&args.model)?;
    let table = load_table(args.embeddings.as_deref())?;
    let spans = predict_spans(&model, &corpus, table.as_ref())?;
    let n = spans.len();
    let tagged = Corpus::new(corpus.reviews().to_vec(), spans)?
        .with_annotators([MODEL_ANNOTATOR])
        .with_metadata(corpus.metadata().clone());
    save(&tagged, &args.out)?;
    print(out, &format!("tagged {} reviews, {n} predicted features\n", tagged.len()))
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&args.gold)?;
    require_file(&args.pred)?;
    let gold_corpus = load_corpus(&args.gold, Format::from_path(&args.gold))?;
    let pred_corpus = load_corpus(&args.pred, Format::from_path(&args.pred))?;
    let lang = language(args.language.as_deref(), &gold_corpus)?;
    let gold: Vec<_> = gold_corpus.spans(Some(&args.annotator))?.into_iter().cloned().collect();
    let pred: Vec<_> = pred_corpus.spans(Some(&args.pred_annotator))?.into_iter().cloned().collect();
    for span in &pred {
        let review = gold_corpus
            .review(&span.review_id)
            .ok_or_else(|| Error::Data(format!("predicted span for unknown review `{}`", span.review_id)))?;
        let fits = review.sentences.get(span.sentence).is_some_and(|s| span.end <= s.len());
        if !fits {
            return Err(Error::Data(format!("predicted span outside review `{}`", span.review_id)));
        }
    }
    let reports = evaluate_all(&gold_corpus, &pred, &gold, lang);
    let mut rows = vec![["mode", "TP", "FP", "FN", "P", "R", "F1"].map(String::from).to_vec()];
    for r in &reports {
        let t = &r.total;
        rows.push(vec![
            r.mode.to_string(),
            t.tp.to_string(),
            t.fp.to_string(),
            t.fn_.to_string(),
            format!("{:.3}", t.precision),
            format!("{:.3}", t.recall),
            format!("{:.3}", t.f1),
        ]);
    }
    let mut text = aligned(&rows);
    if args.per_category {
        for r in &reports {
            let _ = writeln!(text, "\n{}", r.mode);
            let mut cat_rows = vec![["category", "P", "R", "F1"].map(String::from).to_vec()];
            for (c, s) in &r.per_category {
                cat_rows.push(vec![c.clone(), format!("{:.3}", s.precision), format!("{:.3}", s.recall), format!("{:.3}", s.f1)]);
            }
            text.push_str(&aligned(&cat_rows));
        }
    }
    if let Some(path) = &args.out {
        write_file(path, &(serde_json::to_string_pretty(&reports)? + "\n"))?;
    }
    print(out, &text)
}

fn experiment_config(procedure: &str, annotator: &str, k: usize, tagger: &TaggerArgs, seed: u64, jobs: usize) -> Result<(ExperimentConfig, Option<EmbeddingTable>)> {
    let procedure: Procedure = procedure.parse()?;
    let table = load_table(tagger.embeddings.as_deref())?;
    let (features, train) = tagger_settings(tagger, seed, table.as_ref());
    let mut config = ExperimentConfig::new(procedure, annotator);
    config.k_folds = k;
    config.seed = seed;
    config.features = features;
    config.train = train;
    config.jobs = jobs;
    Ok((config, table))
}

pub fn cmd_experiment(args: &ExperimentArgs, seed: u64, jobs: usize, out: &mut dyn Write) -> Result<()> {
    let (mut config, table) = experiment_config(&args.procedure, &args.annotator, args.k, &args.tagger, seed, jobs)?;
    if config.procedure.uses_external() && args.external.is_empty() {
        return Err(Error::Config(format!("{} needs at least one --external corpus", config.procedure)));
    }
    let format = args.report_format.as_deref().map(str::parse::<ReportFormat>).transpose()?;
    for p in &args.external {
        require_file(p)?;
    }
    let corpus = read_input(&args.input)?;
    config.language = args.language.as_deref().map(str::parse).transpose()?;
    config.embeddings = table.map(Arc::new);
    config.external_corpora = args
        .external
        .iter()
        .map(|p| load_corpus(p, Format::from_path(p)))
        .collect::<Result<_>>()?;
    let result = run_experiment(&corpus, &config)?;
    let results = [result];
    if let Some(path) = &args.out {
        let format = format.unwrap_or_else(|| ReportFormat::from_path(path));
        write_file(path, &emit_report(&results, format)?)?;
    }
    print(out, &emit_report(&results, ReportFormat::Markdown)?)
}

pub fn cmd_sweep(args: &SweepArgs, seed: u64, jobs: usize, out: &mut dyn Write) -> Result<()> {
    let cutoffs = args.cutoffs.split(',').map(str::parse::<Cutoff>).collect::<Result<Vec<_>>>()?;
    let (mut config, table) = experiment_config(&args.procedure, &args.annotator, args.k, &args.tagger, seed, jobs)?;
    if config.procedure.uses_external() {
        return Err(Error::Config("the sweep supports procedures without external data only".into()));
    }
    config.embeddings = table.map(Arc::new);
    for p in &args.corpora {
        require_file(p)?;
    }
    let datasets = args
        .corpora
        .iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            load_corpus(p, Format::from_path(p)).map(|c| (name, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let sweep = length_cutoff_sweep(&datasets, &cutoffs, &config)?;
    let csv = sweep.to_csv();
    write_file(&args.out, &csv)?;
    print(out, &csv)
}

pub fn cmd_agreement(args: &AgreementArgs, out: &mut dyn Write) -> Result<()> {
    let corpus = read_input(&args.input)?;
    let a: Vec<_> = corpus.spans(Some(&args.a))?.into_iter().cloned().collect();
    let b: Vec<_> = corpus.spans(Some(&args.b))?.into_iter().cloned().collect();
    print(out, &format!("Dice {:.3}\n", dice_agreement(&a, &b)))
}

pub fn cmd_sample(args: &SampleArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let pool = read_input(&args.input)?;
    let sample = stratified_sample(&pool, args.per_app, Stratum::Rating, seed)?;
    save(&sample, &args.out)?;
    print(out, &format!("sampled {} of {} reviews\n", sample.len(), pool.len()))
}

pub fn cmd_synth(args: &SynthArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let config = SynthConfig {
        categories: args.categories,
        apps_per_category: args.apps,
        reviews_per_category: args.reviews,
        features_per_category: args.features,
        shared_vocab_fraction: args.shared,
        noise_rate: args.noise,
        empty_review_rate: args.empty,
        annotator: args.annotator.clone(),
        seed,
    };
    let corpus = synthetic_corpus(&config)?;
    save(&corpus, &args.out)?;
    print(out, &format!("wrote {} reviews, {} features\n", corpus.len(), corpus.annotations().len()))
}

pub fn cmd_import(args: &ImportArgs, out: &mut dyn Write) -> Result<()> {
    require_file(&args.xml)?;
    let (corpus, log) = import_semeval(&args.xml, &args.domain)?;
    save(&corpus, &args.out)?;
    print(
        out,
        &format!(
            "imported {} sentences, {} aspect terms, {} dropped\n",
            corpus.len(),
            corpus.annotations().len(),
            log.dropped_fragments
        ),
    )
}
