//! Training procedures and their evaluation.
//!
//! Five procedures differ in what a model is trained on:
//!
//! - `CCV` holds out one app category at a time and trains on the others.
//! - `appCat` runs k-fold cross-validation inside each category.
//! - `SCV` runs k-fold cross-validation over the whole corpus with folds
//!   stratified by category.
//! - `CCV_Ext` and `SCV_Ext` add external annotated corpora (for example
//!   product reviews) to every training fold.
//!
//! Folds are built over reviews, so sentences of one review never end up
//! on both sides. Each fold is scored in all four evaluation modes; per
//! category numbers are averaged into a macro average.

mod folds;
mod report;
mod semeval;

use std::sync::Arc;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{write_corpus, AnnotationSpan, Corpus, Format};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_all, macro_average, EvalMode, EvalReport, Language, Prf};
use crate::tagger::{predict_spans, train, training_sequences, EmbeddingTable, FeatureTemplateConfig, TrainConfig, TrainingSequence};

pub use folds::{app_cat_folds, ccv_folds, plan_folds, stratified_folds, Fold};
pub use report::{emit_report, procedure_series_csv, size_labels, write_report, ReportFormat, REPORT_SCHEMA_VERSION};
pub use semeval::{import_semeval, read_semeval, tokenize_with_offsets, SEMEVAL_ANNOTATOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Procedure {
    #[serde(rename = "CCV")]
    Ccv,
    #[serde(rename = "appCat")]
    AppCat,
    #[serde(rename = "SCV")]
    Scv,
    #[serde(rename = "CCV_Ext")]
    CcvExt,
    #[serde(rename = "SCV_Ext")]
    ScvExt,
}

impl Procedure {
    pub const ALL: [Procedure; 5] = [Procedure::Ccv, Procedure::AppCat, Procedure::Scv, Procedure::CcvExt, Procedure::ScvExt];

    pub fn name(self) -> &'static str {
        match self {
            Procedure::Ccv => "CCV",
            Procedure::AppCat => "appCat",
            Procedure::Scv => "SCV",
            Procedure::CcvExt => "CCV_Ext",
            Procedure::ScvExt => "SCV_Ext",
        }
    }

    pub fn uses_external(self) -> bool {
        matches!(self, Procedure::CcvExt | Procedure::ScvExt)
    }
}

impl fmt::Display for Procedure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Procedure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Procedure> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "ccv" => Ok(Procedure::Ccv),
            "appcat" => Ok(Procedure::AppCat),
            "scv" => Ok(Procedure::Scv),
            "ccv-ext" => Ok(Procedure::CcvExt),
            "scv-ext" => Ok(Procedure::ScvExt),
            _ => Err(Error::Config(format!(
                "unknown procedure `{s}` (expected ccv, appcat, scv, ccv-ext or scv-ext)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub procedure: Procedure,
    pub k_folds: usize,
    /// Seeds fold assignment.
    pub seed: u64,
    pub train: TrainConfig,
    pub features: FeatureTemplateConfig,
    /// Gold annotator of the primary corpus.
    pub annotator: String,
    /// Stemming language for type-based evaluation; `None` follows the corpus metadata.
    pub language: Option<Language>,
    /// Added to every training fold of the `*_Ext` procedures.
    #[serde(skip)]
    pub external_corpora: Vec<Corpus>,
    #[serde(skip)]
    pub embeddings: Option<Arc<EmbeddingTable>>,
    /// Worker threads for fold-level parallelism; results do not depend on it.
    #[serde(skip)]
    pub jobs: usize,
}

impl ExperimentConfig {
    pub fn new(procedure: Procedure, annotator: impl Into<String>) -> Self {
        ExperimentConfig {
            procedure,
            k_folds: 10,
            seed: 42,
            train: TrainConfig::default(),
            features: FeatureTemplateConfig::default(),
            annotator: annotator.into(),
            language: None,
            external_corpora: Vec::new(),
            embeddings: None,
            jobs: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_folds < 2 {
            return Err(Error::Config(format!("k_folds must be at least 2, got {}", self.k_folds)));
        }
        if self.procedure.uses_external() && self.external_corpora.is_empty() {
            return Err(Error::Config(format!("{} needs at least one external corpus", self.procedure)));
        }
        if !self.procedure.uses_external() && !self.external_corpora.is_empty() {
            log::warn!("{} ignores the {} external corpora", self.procedure, self.external_corpora.len());
        }
        self.train.validate()?;
        self.features.validate()
    }

    /// SHA-256 over the canonical JSON of the result-determining settings.
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(json))
    }
}

/// SHA-256 of the canonical JSONL serialization.
pub fn corpus_fingerprint(corpus: &Corpus) -> String {
    let mut buf = Vec::new();
    write_corpus(corpus, &mut buf, Format::Jsonl).expect("writing to memory cannot fail");
    hex::encode(Sha256::digest(buf))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub id: usize,
    pub category: Option<String>,
    pub train_review_ids: Vec<String>,
    pub test_review_ids: Vec<String>,
    /// Training sentences, external ones included.
    pub training_sequences: usize,
    pub external_sequences: usize,
    /// Gold feature tokens seen in training, external ones included.
    pub training_feature_tokens: usize,
    /// One report per mode in [`EvalMode::ALL`] order.
    pub reports: Vec<EvalReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryResult {
    pub category: String,
    /// One entry per mode in [`EvalMode::ALL`] order.
    pub modes: Vec<Prf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub corpus_fingerprint: String,
    pub external_fingerprints: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub procedure: Procedure,
    pub k_folds: usize,
    pub folds: Vec<FoldResult>,
    pub per_category: Vec<CategoryResult>,
    /// Macro average over categories, one entry per mode in [`EvalMode::ALL`] order.
    pub aggregate: Vec<Prf>,
    /// Mean gold feature tokens per training fold.
    pub mean_training_feature_tokens: f64,
    pub provenance: Provenance,
}

impl ExperimentResult {
    pub fn aggregate_for(&self, mode: EvalMode) -> Prf {
        self.aggregate[mode_index(mode)]
    }

    pub fn category(&self, name: &str) -> Option<&CategoryResult> {
        self.per_category.iter().find(|c| c.category == name)
    }
}

fn mode_index(mode: EvalMode) -> usize {
    EvalMode::ALL.iter().position(|&m| m == mode).expect("mode listed in ALL")
}

/// Annotator whose spans an external corpus contributes: the primary
/// annotator id if present there, else its only annotator.
fn external_annotator<'a>(corpus: &'a Corpus, primary: &'a str) -> Result<&'a str> {
    let ids = corpus.annotator_ids();
    if ids.contains(primary) {
        return Ok(primary);
    }
    match ids.len() {
        1 => Ok(ids.iter().next().unwrap()),
        n => Err(Error::Config(format!(
            "external corpus has {n} annotators and none is `{primary}`"
        ))),
    }
}

/// Training sequences of `train_corpus` followed by those of every external
/// corpus. External corpora must share the primary corpus language.
pub fn augment_training(train_corpus: &Corpus, annotator: &str, external: &[Corpus]) -> Result<Vec<TrainingSequence>> {
    let mut sequences = training_sequences(train_corpus, annotator)?;
    for (i, ext) in external.iter().enumerate() {
        if ext.language() != train_corpus.language() {
            return Err(Error::Config(format!(
                "external corpus {i} has language `{}`, primary corpus has `{}`",
                ext.language(),
                train_corpus.language()
            )));
        }
        sequences.extend(training_sequences(ext, external_annotator(ext, annotator)?)?);
    }
    Ok(sequences)
}

fn run_fold(corpus: &Corpus, fold: &Fold, config: &ExperimentConfig, language: Language) -> Result<FoldResult> {
    let train_corpus = corpus.select(&fold.train);
    let test_corpus = corpus.select(&fold.test);
    let own = training_sequences(&train_corpus, &config.annotator)?;
    let mut feature_tokens = train_corpus.spans(Some(&config.annotator))?.len();
    let sequences = if config.procedure.uses_external() {
        for ext in &config.external_corpora {
            feature_tokens += ext.spans(Some(external_annotator(ext, &config.annotator)?))?.len();
        }
        augment_training(&train_corpus, &config.annotator, &config.external_corpora)?
    } else {
        own.clone()
    };
    log::info!(
        "{} fold {}: {} training sentences, {} test reviews",
        config.procedure,
        fold.id,
        sequences.len(),
        test_corpus.len()
    );
    let embeddings = config.embeddings.as_deref();
    let model = train(&sequences, &config.features, embeddings, &config.train)?;
    let predicted = predict_spans(&model, &test_corpus, embeddings)?;
    let gold: Vec<AnnotationSpan> = test_corpus.spans(Some(&config.annotator))?.into_iter().cloned().collect();
    let reports = evaluate_all(&test_corpus, &predicted, &gold, language);
    Ok(FoldResult {
        id: fold.id,
        category: fold.category.clone(),
        train_review_ids: train_corpus.reviews().iter().map(|r| r.id.clone()).collect(),
        test_review_ids: test_corpus.reviews().iter().map(|r| r.id.clone()).collect(),
        training_sequences: sequences.len(),
        external_sequences: sequences.len() - own.len(),
        training_feature_tokens: feature_tokens,
        reports: reports.to_vec(),
    })
}

fn mean_prf(items: &[Prf]) -> Prf {
    macro_average(items).unwrap_or_default()
}

fn per_category_results(corpus: &Corpus, procedure: Procedure, folds: &[FoldResult]) -> Vec<CategoryResult> {
    corpus
        .categories()
        .into_iter()
        .map(|c| {
            let modes = (0..EvalMode::ALL.len())
                .map(|m| match procedure {
                    Procedure::Ccv | Procedure::CcvExt | Procedure::AppCat => {
                        let own: Vec<Prf> = folds
                            .iter()
                            .filter(|f| f.category.as_deref() == Some(c))
                            .map(|f| f.reports[m].total.prf())
                            .collect();
                        mean_prf(&own)
                    }
                    Procedure::Scv | Procedure::ScvExt => {
                        let own: Vec<Prf> = folds
                            .iter()
                            .filter_map(|f| f.reports[m].category(c).map(|s| s.prf()))
                            .collect();
                        mean_prf(&own)
                    }
                })
                .collect();
            CategoryResult {
                category: c.to_string(),
                modes,
            }
        })
        .collect()
}

fn execute(corpus: &Corpus, config: &ExperimentConfig, expected: Procedure) -> Result<ExperimentResult> {
    debug_assert_eq!(config.procedure, expected);
    config.validate()?;
    corpus.check_annotator(&config.annotator)?;
    let language = config.language.unwrap_or_else(|| Language::for_corpus(corpus.language()));
    let folds = plan_folds(corpus, config.procedure, config.k_folds, config.seed)?;
    let run = || -> Result<Vec<FoldResult>> {
        folds.par_iter().map(|f| run_fold(corpus, f, config, language)).collect()
    };
    let mut results = if config.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", config.jobs)))?
            .install(run)?
    } else {
        folds.iter().map(|f| run_fold(corpus, f, config, language)).collect::<Result<Vec<_>>>()?
    };
    results.sort_by_key(|f| f.id);
    let per_category = per_category_results(corpus, config.procedure, &results);
    let aggregate = (0..EvalMode::ALL.len())
        .map(|m| mean_prf(&per_category.iter().map(|c| c.modes[m]).collect::<Vec<_>>()))
        .collect();
    let mean_tokens = results.iter().map(|f| f.training_feature_tokens as f64).sum::<f64>() / results.len().max(1) as f64;
    let external_fingerprints = if config.procedure.uses_external() {
        config.external_corpora.iter().map(corpus_fingerprint).collect()
    } else {
        Vec::new()
    };
    Ok(ExperimentResult {
        procedure: config.procedure,
        k_folds: config.k_folds,
        folds: results,
        per_category,
        aggregate,
        mean_training_feature_tokens: mean_tokens,
        provenance: Provenance {
            config_hash: config.hash(),
            corpus_fingerprint: corpus_fingerprint(corpus),
            external_fingerprints,
        },
    })
}

fn with_procedure(config: &ExperimentConfig, allowed: &[Procedure], fallback: Procedure) -> ExperimentConfig {
    let mut c = config.clone();
    if !allowed.contains(&c.procedure) {
        c.procedure = fallback;
    }
    c
}

/// Hold out each category, train on the rest. Runs `CCV_Ext` when the
/// config asks for it.
pub fn cross_category_validation(corpus: &Corpus, config: &ExperimentConfig) -> Result<ExperimentResult> {
    let c = with_procedure(config, &[Procedure::Ccv, Procedure::CcvExt], Procedure::Ccv);
    execute(corpus, &c, c.procedure)
}

/// k-fold cross-validation inside each category; a category's result is
/// the mean over its folds.
pub fn per_category_cv(corpus: &Corpus, config: &ExperimentConfig) -> Result<ExperimentResult> {
    let c = with_procedure(config, &[Procedure::AppCat], Procedure::AppCat);
    execute(corpus, &c, Procedure::AppCat)
}

/// k-fold cross-validation over the whole corpus, stratified by category.
/// Runs `SCV_Ext` when the config asks for it.
pub fn stratified_cv(corpus: &Corpus, config: &ExperimentConfig) -> Result<ExperimentResult> {
    let c = with_procedure(config, &[Procedure::Scv, Procedure::ScvExt], Procedure::Scv);
    execute(corpus, &c, c.procedure)
}

pub fn run_experiment(corpus: &Corpus, config: &ExperimentConfig) -> Result<ExperimentResult> {
    match config.procedure {
        Procedure::Ccv | Procedure::CcvExt => cross_category_validation(corpus, config),
        Procedure::AppCat => per_category_cv(corpus, config),
        Procedure::Scv | Procedure::ScvExt => stratified_cv(corpus, config),
    }
}
