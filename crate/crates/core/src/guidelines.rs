//! Annotation-guideline changes simulated on annotated corpora.
//!
//! Each step removes spans (never edits them) and then, by default, drops
//! reviews left without any span. Steps run in a fixed order: preprocessing,
//! self-reference removal, removal of noun-less features, length cap. Every
//! step reports what it removed together with dataset statistics before and
//! after, so a chain of steps yields a before/after table per step.
//!
//! Steps act on the spans of all annotators in the corpus.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{compute_stats, AnnotationSpan, Corpus, CorpusStats, DatasetStats};
use crate::error::{Error, Result};
use crate::evaluation::{type_key, EvalMode, Language};
use crate::experiments::{run_experiment, ExperimentConfig};

/// Words that refer to the app itself. App names are added per corpus.
pub const DEFAULT_SELF_REFERENCES: [&str; 4] = ["app", "apps", "application", "applications"];
pub const DEFAULT_NOUN_TAGS: [&str; 4] = ["NN", "NNS", "NNP", "NNPS"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Step {
    Preprocess,
    SelfRefs,
    Nounless,
    LengthCap,
}

impl Step {
    pub const ALL: [Step; 4] = [Step::Preprocess, Step::SelfRefs, Step::Nounless, Step::LengthCap];

    pub fn name(self) -> &'static str {
        match self {
            Step::Preprocess => "preprocess",
            Step::SelfRefs => "self_refs",
            Step::Nounless => "nounless",
            Step::LengthCap => "length_cap",
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Step {
    type Err = Error;

    fn from_str(s: &str) -> Result<Step> {
        match s {
            "pre" | "preprocess" => Ok(Step::Preprocess),
            "self" | "self_refs" => Ok(Step::SelfRefs),
            "noun" | "nounless" => Ok(Step::Nounless),
            "len" | "length" | "length_cap" => Ok(Step::LengthCap),
            other => Err(Error::Config(format!("unknown simulation step `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub steps: Vec<Step>,
    pub max_len: usize,
    /// Extra self-reference words; `None` uses [`DEFAULT_SELF_REFERENCES`].
    /// App names of the corpus are always included.
    pub self_ref_lexicon: Option<BTreeSet<String>>,
    pub noun_tags: BTreeSet<String>,
    pub drop_empty_reviews_after_each_step: bool,
    /// Permit steps out of the canonical order.
    pub allow_reordering: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            steps: Step::ALL.to_vec(),
            max_len: 3,
            self_ref_lexicon: None,
            noun_tags: DEFAULT_NOUN_TAGS.iter().map(|s| s.to_string()).collect(),
            drop_empty_reviews_after_each_step: true,
            allow_reordering: false,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_len == 0 {
            return Err(Error::Config("max_len must be at least 1".into()));
        }
        if !self.allow_reordering && self.steps.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "steps must follow the order {:?} without repeats",
                Step::ALL.map(Step::name)
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedSpan {
    pub review_id: String,
    pub text: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemovalReport {
    pub step_name: String,
    pub spans_removed: usize,
    pub reviews_removed: usize,
    pub removed_examples: Vec<RemovedSpan>,
    pub stats_before: CorpusStats,
    pub stats_after: CorpusStats,
}

fn stats(corpus: &Corpus) -> CorpusStats {
    let language = Language::for_corpus(corpus.language());
    compute_stats(corpus, None, |w| type_key(w, language)).expect("all-annotator stats cannot fail")
}

/// Removes spans for which `reason` returns `Some`, then optionally drops
/// span-free reviews.
fn removal_step<F>(corpus: &Corpus, name: &str, drop_empty: bool, mut reason: F) -> Result<(Corpus, RemovalReport)>
where
    F: FnMut(&Corpus, &AnnotationSpan) -> Result<Option<String>>,
{
    let stats_before = stats(corpus);
    let mut removed = Vec::new();
    let mut doomed = BTreeSet::new();
    for (i, span) in corpus.annotations().iter().enumerate() {
        if let Some(why) = reason(corpus, span)? {
            removed.push(RemovedSpan {
                review_id: span.review_id.clone(),
                text: corpus.span_text(span),
                reason: why,
            });
            doomed.insert(i);
        }
    }
    let mut i = 0;
    let mut out = corpus.retain_spans(|_| {
        let keep = !doomed.contains(&i);
        i += 1;
        keep
    });
    if drop_empty {
        out = drop_span_free_reviews(&out);
    }
    let stats_after = stats(&out);
    let report = RemovalReport {
        step_name: name.to_string(),
        spans_removed: removed.len(),
        reviews_removed: corpus.len() - out.len(),
        removed_examples: removed,
        stats_before,
        stats_after,
    };
    Ok((out, report))
}

fn drop_span_free_reviews(corpus: &Corpus) -> Corpus {
    let annotated: BTreeSet<&str> = corpus.annotations().iter().map(|s| s.review_id.as_str()).collect();
    corpus.filter_reviews(|r| annotated.contains(r.id.as_str()))
}

/// Drops reviews without any annotated feature.
pub fn preprocess(corpus: &Corpus) -> Result<(Corpus, RemovalReport)> {
    removal_step(corpus, Step::Preprocess.name(), true, |_, _| Ok(None))
}

/// The default lexicon plus the lowercased app names of `corpus`.
pub fn self_reference_lexicon(corpus: &Corpus, extra: Option<&BTreeSet<String>>) -> BTreeSet<String> {
    let mut lexicon: BTreeSet<String> = match extra {
        Some(words) => words.iter().map(|w| w.to_lowercase()).collect(),
        None => DEFAULT_SELF_REFERENCES.iter().map(|s| s.to_string()).collect(),
    };
    lexicon.extend(corpus.apps().into_iter().map(str::to_lowercase));
    lexicon
}

fn self_refs_step(corpus: &Corpus, lexicon: Option<&BTreeSet<String>>, drop_empty: bool) -> Result<(Corpus, RemovalReport)> {
    let lexicon = self_reference_lexicon(corpus, lexicon);
    removal_step(corpus, Step::SelfRefs.name(), drop_empty, |c, span| {
        let text = c.span_text(span).to_lowercase();
        let own_app = c.review(&span.review_id).map(|r| r.app.to_lowercase());
        Ok(if own_app.as_deref() == Some(text.as_str()) {
            Some("names the reviewed app".into())
        } else if lexicon.contains(&text) {
            Some(format!("self-reference `{text}`"))
        } else {
            None
        })
    })
}

/// Removes features whose whole text (case-insensitive) is a self-reference
/// word or an app name, then drops span-free reviews.
pub fn remove_self_references(corpus: &Corpus, lexicon: Option<&BTreeSet<String>>) -> Result<(Corpus, RemovalReport)> {
    self_refs_step(corpus, lexicon, true)
}

fn nounless_step(corpus: &Corpus, noun_tags: &BTreeSet<String>, drop_empty: bool) -> Result<(Corpus, RemovalReport)> {
    removal_step(corpus, Step::Nounless.name(), drop_empty, |c, span| {
        let mut has_noun = false;
        for (offset, token) in c.span_tokens(span).iter().enumerate() {
            let tag = token.pos.as_deref().ok_or_else(|| {
                Error::Data(format!(
                    "token `{}` (review `{}`, sentence {}, position {}) has no POS tag",
                    token.text,
                    span.review_id,
                    span.sentence,
                    span.start + offset
                ))
            })?;
            has_noun |= noun_tags.contains(tag);
        }
        Ok((!has_noun).then(|| "contains no noun".to_string()))
    })
}

/// Removes features without any noun-tagged token. Every span token must
/// carry a POS tag.
pub fn remove_nounless(corpus: &Corpus, noun_tags: &BTreeSet<String>) -> Result<(Corpus, RemovalReport)> {
    nounless_step(corpus, noun_tags, true)
}

fn length_step(corpus: &Corpus, max_len: usize, drop_empty: bool) -> Result<(Corpus, RemovalReport)> {
    if max_len == 0 {
        return Err(Error::Config("max_len must be at least 1".into()));
    }
    removal_step(corpus, Step::LengthCap.name(), drop_empty, |_, span| {
        Ok((span.len() > max_len).then(|| format!("{} words > {max_len}", span.len())))
    })
}

/// Removes (does not truncate) features longer than `max_len` words.
pub fn cap_feature_length(corpus: &Corpus, max_len: usize) -> Result<(Corpus, RemovalReport)> {
    length_step(corpus, max_len, true)
}

pub fn apply_step(corpus: &Corpus, step: Step, config: &PipelineConfig) -> Result<(Corpus, RemovalReport)> {
    let drop = config.drop_empty_reviews_after_each_step;
    match step {
        Step::Preprocess => preprocess(corpus),
        Step::SelfRefs => self_refs_step(corpus, config.self_ref_lexicon.as_ref(), drop),
        Step::Nounless => nounless_step(corpus, &config.noun_tags, drop),
        Step::LengthCap => length_step(corpus, config.max_len, drop),
    }
}

/// Applies the configured steps in order, returning one report per step.
pub fn run_pipeline(corpus: &Corpus, config: &PipelineConfig) -> Result<(Corpus, Vec<RemovalReport>)> {
    config.validate()?;
    let mut current = corpus.clone();
    let mut reports = Vec::with_capacity(config.steps.len());
    for &step in &config.steps {
        let (next, report) = apply_step(&current, step, config)?;
        log::info!(
            "{step}: removed {} spans and {} reviews",
            report.spans_removed,
            report.reviews_removed
        );
        current = next;
        reports.push(report);
    }
    Ok((current, reports))
}

const STATS_HEADER: [&str; 8] = ["reviews", "sents", "tokens", "types", "single", "multi", "ttr", "feats_per_review"];

fn stats_cells(s: &DatasetStats) -> [String; 8] {
    [
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

fn removal_rows(reports: &[RemovalReport]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    if let Some(first) = reports.first() {
        let mut row = vec!["initial".to_string()];
        row.extend(stats_cells(&first.stats_before.total));
        row.extend(["0".to_string(), "0".to_string()]);
        rows.push(row);
    }
    for r in reports {
        let mut row = vec![r.step_name.clone()];
        row.extend(stats_cells(&r.stats_after.total));
        row.extend([r.spans_removed.to_string(), r.reviews_removed.to_string()]);
        rows.push(row);
    }
    rows
}

fn removal_header() -> Vec<&'static str> {
    let mut h = vec!["step"];
    h.extend(STATS_HEADER);
    h.extend(["spans_removed", "reviews_removed"]);
    h
}

/// Before/after statistics of a step chain as CSV, one row per step.
pub fn removal_table_csv(reports: &[RemovalReport]) -> String {
    let mut out = removal_header().join(",");
    out.push('\n');
    for row in removal_rows(reports) {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn removal_table_markdown(reports: &[RemovalReport]) -> String {
    let header = removal_header();
    let mut out = format!("| {} |\n|{}\n", header.join(" | "), "---|".repeat(header.len()));
    for row in removal_rows(reports) {
        let _ = writeln!(out, "| {} |", row.join(" | "));
    }
    out
}

/// Maximum feature length for a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Cutoff {
    Words(usize),
    Unbounded,
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Words(n) => write!(f, "{n}"),
            Cutoff::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Cutoff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Cutoff> {
        match s.trim() {
            "inf" | "∞" | "none" => Ok(Cutoff::Unbounded),
            n => match n.parse::<usize>() {
                Ok(0) | Err(_) => Err(Error::Config(format!("invalid cutoff `{n}`"))),
                Ok(k) => Ok(Cutoff::Words(k)),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub cutoff: Cutoff,
    pub mode: EvalMode,
    /// Macro F1 per dataset, in input order.
    pub f1: Vec<f64>,
    pub min: f64,
    pub avg: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub datasets: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn rows_for(&self, mode: EvalMode) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(move |r| r.mode == mode)
    }

    /// Tidy CSV: `cutoff,mode,min,avg,max` followed by one F1 column per dataset.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cutoff,mode,min,avg,max");
        for d in &self.datasets {
            out.push(',');
            out.push_str(d);
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{},{:.4},{:.4},{:.4}", r.cutoff, r.mode, r.min, r.avg, r.max);
            for v in &r.f1 {
                let _ = write!(out, ",{v:.4}");
            }
            out.push('\n');
        }
        out
    }
}

/// For each cutoff, caps feature length on every dataset, runs the
/// configured experiment (normally cross-category validation) and records
/// the macro F1 of all four evaluation modes, with min/avg/max across
/// datasets. Datasets are expected to have passed the noun filter already.
pub fn length_cutoff_sweep(datasets: &[(String, Corpus)], cutoffs: &[Cutoff], config: &ExperimentConfig) -> Result<SweepTable> {
    if datasets.is_empty() {
        return Err(Error::Config("length sweep needs at least one dataset".into()));
    }
    let mut rows = Vec::new();
    for &cutoff in cutoffs {
        let mut per_mode: Vec<Vec<f64>> = vec![Vec::new(); EvalMode::ALL.len()];
        for (name, corpus) in datasets {
            let capped = match cutoff {
                Cutoff::Words(n) => cap_feature_length(corpus, n)?.0,
                Cutoff::Unbounded => corpus.clone(),
            };
            log::info!("sweep cutoff {cutoff} on {name}: {} reviews", capped.len());
            let result = run_experiment(&capped, config)?;
            for (m, slot) in per_mode.iter_mut().enumerate() {
                slot.push(result.aggregate[m].f1);
            }
        }
        for (m, f1) in per_mode.into_iter().enumerate() {
            let min = f1.iter().copied().fold(f64::INFINITY, f64::min);
            let max = f1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let avg = f1.iter().sum::<f64>() / f1.len() as f64;
            rows.push(SweepRow {
                cutoff,
                mode: EvalMode::ALL[m],
                f1,
                min,
                avg,
                max,
            });
        }
    }
    Ok(SweepTable {
        datasets: datasets.iter().map(|(n, _)| n.clone()).collect(),
        rows,
    })
}
