use std::collections::BTreeSet;

use revmine::corpus::Corpus;
use revmine::guidelines::{apply_step, PipelineConfig, RemovalReport, Step};

pub fn span_set(c: &Corpus) -> BTreeSet<(String, String, usize, usize, usize)> {
    c.annotations()
        .iter()
        .map(|s| (s.annotator.clone(), s.review_id.clone(), s.sentence, s.start, s.end))
        .collect()
}

/// Removal-only, idempotent, report arithmetic consistent.
pub fn check_step(corpus: &Corpus, step: Step, config: &PipelineConfig) -> Result<(), String> {
    let (out, report) = apply_step(corpus, step, config).map_err(|e| e.to_string())?;
    check_report(corpus, &out, &report)?;
    if !span_set(&out).is_subset(&span_set(corpus)) {
        return Err(format!("{step} added spans"));
    }
    for r in out.reviews() {
        if corpus.review(&r.id) != Some(r) {
            return Err(format!("{step} altered review {}", r.id));
        }
    }
    let (twice, again) = apply_step(&out, step, config).map_err(|e| e.to_string())?;
    if twice != out || again.spans_removed != 0 || again.reviews_removed != 0 {
        return Err(format!("{step} is not idempotent"));
    }
    Ok(())
}

pub fn check_report(before: &Corpus, after: &Corpus, r: &RemovalReport) -> Result<(), String> {
    let ok = r.spans_removed == before.annotations().len() - after.annotations().len()
        && r.reviews_removed == before.len() - after.len()
        && r.removed_examples.len() == r.spans_removed
        && r.stats_before.total.feature_tokens - r.spans_removed == r.stats_after.total.feature_tokens
        && r.stats_before.total.n_reviews - r.reviews_removed == r.stats_after.total.n_reviews
        && r.stats_after.total.n_reviews == after.len()
        && r.stats_after.total.n_sentences <= r.stats_before.total.n_sentences
        && r.stats_after.total.feature_types <= r.stats_before.total.feature_types;
    if ok {
        Ok(())
    } else {
        Err(format!("report arithmetic broken for {}", r.step_name))
    }
}

/// A step applied to a span subset keeps a subset of what it keeps on the
/// full corpus.
pub fn check_monotone(corpus: &Corpus, smaller: &Corpus, config: &PipelineConfig) -> Result<(), String> {
    for step in Step::ALL {
        let (big, _) = apply_step(corpus, step, config).map_err(|e| e.to_string())?;
        let (small, _) = apply_step(smaller, step, config).map_err(|e| e.to_string())?;
        if !span_set(&small).is_subset(&span_set(&big)) || small.len() > big.len() {
            return Err(format!("{step} is not monotone"));
        }
    }
    Ok(())
}
