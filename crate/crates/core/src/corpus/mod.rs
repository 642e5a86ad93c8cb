//! Annotated app-review corpora.
//!
//! A [`Corpus`] holds pre-tokenized reviews (review → sentence → token) and
//! a flat list of [`AnnotationSpan`]s, each marking one app-feature instance
//! as a half-open token range `[start, end)` inside one sentence. Spans are
//! consecutive by construction; fragmented annotations are dropped at import.

mod bio;
mod io;
mod pos;
mod sample;
mod stats;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bio::{bio_decode, bio_encode, Label, LabeledSequence};
pub use io::{load_corpus, load_corpus_with_log, read_corpus, save_corpus, write_corpus, Format, ImportLog};
pub use pos::{fallback_pos_tag, tag_missing_pos};
pub use sample::{largest_remainder, stratified_sample, Stratum};
pub use stats::{compute_stats, CorpusStats, DatasetStats};

/// Metadata key holding the corpus language (`en` when absent).
pub const LANGUAGE_KEY: &str = "language";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub text: String,
    pub pos: Option<String>,
}

impl Token {
    pub fn new(text: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            pos: None,
        }
    }

    pub fn tagged(text: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            text: text.into(),
            pos: Some(pos.into()),
        }
    }
}

/// A tokenized sentence. A token's index is its position in `tokens`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence { tokens }
    }

    /// Builds an untagged sentence from whitespace-separated words.
    pub fn from_text(text: &str) -> Self {
        Sentence {
            tokens: text.split_whitespace().map(Token::new).collect(),
        }
    }

    /// Builds a tagged sentence from `word/TAG` pairs separated by spaces.
    pub fn from_tagged(text: &str) -> Self {
        let tokens = text
            .split_whitespace()
            .map(|item| match item.rsplit_once('/') {
                Some((w, t)) if !w.is_empty() && !t.is_empty() => Token::tagged(w, t),
                _ => Token::new(item),
            })
            .collect();
        Sentence { tokens }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.tokens.iter().map(|t| t.text.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub app: String,
    pub category: String,
    pub rating: u8,
    pub sentences: Vec<Sentence>,
}

/// One annotated app-feature instance: tokens `start..end` of a sentence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AnnotationSpan {
    pub annotator: String,
    pub review_id: String,
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
}

impl AnnotationSpan {
    pub fn new(
        annotator: impl Into<String>,
        review_id: impl Into<String>,
        sentence: usize,
        start: usize,
        end: usize,
    ) -> Self {
        AnnotationSpan {
            annotator: annotator.into(),
            review_id: review_id.into(),
            sentence,
            start,
            end,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    /// Position identity, ignoring the annotator.
    pub fn location(&self) -> (&str, usize, usize, usize) {
        (&self.review_id, self.sentence, self.start, self.end)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    reviews: Vec<Review>,
    annotations: Vec<AnnotationSpan>,
    annotator_ids: BTreeSet<String>,
    metadata: BTreeMap<String, String>,
    index: HashMap<String, usize>,
}

impl PartialEq for Corpus {
    fn eq(&self, other: &Self) -> bool {
        self.reviews == other.reviews
            && self.annotations == other.annotations
            && self.annotator_ids == other.annotator_ids
            && self.metadata == other.metadata
    }
}

impl Corpus {
    /// Validates reviews and spans and returns a corpus with spans in
    /// canonical order (review order, sentence, start, end, annotator).
    pub fn new(reviews: Vec<Review>, annotations: Vec<AnnotationSpan>) -> Result<Self> {
        let mut index = HashMap::with_capacity(reviews.len());
        for (pos, review) in reviews.iter().enumerate() {
            validate_review(review)?;
            if index.insert(review.id.clone(), pos).is_some() {
                return Err(Error::Data(format!("duplicate review id `{}`", review.id)));
            }
        }
        let mut corpus = Corpus {
            reviews,
            annotations: Vec::new(),
            annotator_ids: BTreeSet::new(),
            metadata: BTreeMap::new(),
            index,
        };
        corpus.set_annotations(annotations)?;
        Ok(corpus)
    }

    pub fn empty() -> Self {
        Corpus::default()
    }

    fn set_annotations(&mut self, mut annotations: Vec<AnnotationSpan>) -> Result<()> {
        for span in &annotations {
            self.validate_span(span)?;
        }
        annotations.sort_by(|a, b| self.span_order(a).cmp(&self.span_order(b)));
        // overlap is checked in annotator-major order
        let mut by_annotator: Vec<&AnnotationSpan> = annotations.iter().collect();
        by_annotator.sort_by(|a, b| {
            (&a.annotator, self.index[&a.review_id], a.sentence, a.start)
                .cmp(&(&b.annotator, self.index[&b.review_id], b.sentence, b.start))
        });
        for pair in by_annotator.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if a.annotator == b.annotator
                && a.review_id == b.review_id
                && a.sentence == b.sentence
                && b.start < a.end
            {
                return Err(Error::Data(format!(
                    "overlapping spans for annotator `{}` in review `{}` sentence {}: [{},{}) and [{},{})",
                    a.annotator, a.review_id, a.sentence, a.start, a.end, b.start, b.end
                )));
            }
        }
        self.annotator_ids
            .extend(annotations.iter().map(|s| s.annotator.clone()));
        self.annotations = annotations;
        Ok(())
    }

    fn span_order<'a>(&self, s: &'a AnnotationSpan) -> (usize, usize, usize, usize, &'a str) {
        (
            self.index[&s.review_id],
            s.sentence,
            s.start,
            s.end,
            s.annotator.as_str(),
        )
    }

    fn validate_span(&self, span: &AnnotationSpan) -> Result<()> {
        let review = self.review(&span.review_id).ok_or_else(|| {
            Error::Data(format!("span references unknown review `{}`", span.review_id))
        })?;
        let sentence = review.sentences.get(span.sentence).ok_or_else(|| {
            Error::Data(format!(
                "span references sentence {} of review `{}` which has {} sentences",
                span.sentence,
                review.id,
                review.sentences.len()
            ))
        })?;
        if span.start >= span.end || span.end > sentence.len() {
            return Err(Error::Data(format!(
                "span [{},{}) out of range for sentence {} of review `{}` ({} tokens)",
                span.start,
                span.end,
                span.sentence,
                review.id,
                sentence.len()
            )));
        }
        if span.annotator.is_empty() {
            return Err(Error::Data("span with empty annotator id".into()));
        }
        Ok(())
    }

    /// Registers annotator ids that may have no spans.
    pub fn with_annotators<I, S>(mut self, ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.annotator_ids.extend(ids.into_iter().map(Into::into));
        self
    }

    pub fn with_metadata(mut self, metadata: BTreeMap<String, String>) -> Self {
        self.metadata = metadata;
        self
    }

    pub fn set_metadata(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.metadata.insert(key.into(), value.into());
    }

    pub fn reviews(&self) -> &[Review] {
        &self.reviews
    }

    pub fn annotations(&self) -> &[AnnotationSpan] {
        &self.annotations
    }

    pub fn annotator_ids(&self) -> &BTreeSet<String> {
        &self.annotator_ids
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn language(&self) -> &str {
        self.metadata
            .get(LANGUAGE_KEY)
            .map(String::as_str)
            .unwrap_or("en")
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    pub fn n_sentences(&self) -> usize {
        self.reviews.iter().map(|r| r.sentences.len()).sum()
    }

    pub fn review(&self, id: &str) -> Option<&Review> {
        self.index.get(id).map(|&i| &self.reviews[i])
    }

    pub fn review_position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    /// Distinct categories in order of first appearance.
    pub fn categories(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.reviews
            .iter()
            .filter(|r| seen.insert(r.category.as_str()))
            .map(|r| r.category.as_str())
            .collect()
    }

    /// Distinct apps in order of first appearance.
    pub fn apps(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.reviews
            .iter()
            .filter(|r| seen.insert(r.app.as_str()))
            .map(|r| r.app.as_str())
            .collect()
    }

    pub fn check_annotator(&self, annotator: &str) -> Result<()> {
        if self.annotator_ids.contains(annotator) {
            Ok(())
        } else {
            Err(Error::UnknownAnnotator(annotator.to_string()))
        }
    }

    /// Spans of one annotator, or of every annotator when `annotator` is `None`.
    pub fn spans(&self, annotator: Option<&str>) -> Result<Vec<&AnnotationSpan>> {
        match annotator {
            Some(a) => {
                self.check_annotator(a)?;
                Ok(self.annotations.iter().filter(|s| s.annotator == a).collect())
            }
            None => Ok(self.annotations.iter().collect()),
        }
    }

    pub fn sentence_of(&self, span: &AnnotationSpan) -> &Sentence {
        &self.review(&span.review_id).expect("validated span").sentences[span.sentence]
    }

    pub fn span_tokens(&self, span: &AnnotationSpan) -> &[Token] {
        &self.sentence_of(span).tokens[span.start..span.end]
    }

    /// Space-joined surface text of a span.
    pub fn span_text(&self, span: &AnnotationSpan) -> String {
        self.span_tokens(span)
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn category_of(&self, review_id: &str) -> Option<&str> {
        self.review(review_id).map(|r| r.category.as_str())
    }

    /// Keeps reviews matching `keep` together with their spans. Annotator ids
    /// and metadata are carried over unchanged.
    pub fn filter_reviews(&self, mut keep: impl FnMut(&Review) -> bool) -> Corpus {
        let reviews: Vec<Review> = self.reviews.iter().filter(|r| keep(r)).cloned().collect();
        self.rebuild(reviews)
    }

    /// Subset by review positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> Corpus {
        let reviews = positions.iter().map(|&i| self.reviews[i].clone()).collect();
        self.rebuild(reviews)
    }

    fn rebuild(&self, reviews: Vec<Review>) -> Corpus {
        let index: HashMap<String, usize> = reviews
            .iter()
            .enumerate()
            .map(|(i, r)| (r.id.clone(), i))
            .collect();
        let mut annotations: Vec<AnnotationSpan> = self
            .annotations
            .iter()
            .filter(|s| index.contains_key(&s.review_id))
            .cloned()
            .collect();
        annotations.sort_by(|a, b| {
            (index[&a.review_id], a.sentence, a.start, a.end, &a.annotator)
                .cmp(&(index[&b.review_id], b.sentence, b.start, b.end, &b.annotator))
        });
        Corpus {
            reviews,
            annotations,
            annotator_ids: self.annotator_ids.clone(),
            metadata: self.metadata.clone(),
            index,
        }
    }

    /// Keeps spans matching `keep`; reviews are untouched.
    pub fn retain_spans(&self, mut keep: impl FnMut(&AnnotationSpan) -> bool) -> Corpus {
        let mut out = self.clone();
        out.annotations.retain(|s| keep(s));
        out
    }

    /// Replaces the span list, validating the new spans against this corpus.
    pub fn with_annotations(&self, annotations: Vec<AnnotationSpan>) -> Result<Corpus> {
        let mut out = self.clone();
        out.annotations.clear();
        out.set_annotations(annotations)?;
        Ok(out)
    }

    /// Same reviews with every sentence passed through `f`; token counts must not change.
    pub fn map_sentences(&self, mut f: impl FnMut(&Sentence) -> Sentence) -> Result<Corpus> {
        let mut out = self.clone();
        for review in &mut out.reviews {
            for sentence in &mut review.sentences {
                let mapped = f(sentence);
                if mapped.len() != sentence.len() {
                    return Err(Error::Data("sentence mapping changed token count".into()));
                }
                *sentence = mapped;
            }
        }
        Ok(out)
    }
}

fn validate_review(review: &Review) -> Result<()> {
    if review.id.is_empty() {
        return Err(Error::Data("review with empty id".into()));
    }
    if !(1..=5).contains(&review.rating) {
        return Err(Error::Data(format!(
            "review `{}` has rating {} outside 1..=5",
            review.id, review.rating
        )));
    }
    for (si, sentence) in review.sentences.iter().enumerate() {
        if sentence.is_empty() {
            return Err(Error::Data(format!(
                "review `{}` sentence {} has no tokens",
                review.id, si
            )));
        }
        for (ti, token) in sentence.tokens.iter().enumerate() {
            if token.text.is_empty() || token.text.chars().any(char::is_whitespace) {
                return Err(Error::Data(format!(
                    "review `{}` sentence {} token {}: `{}` is empty or contains whitespace",
                    review.id, si, ti, token.text
                )));
            }
            if let Some(pos) = &token.pos {
                if pos.is_empty() || pos.chars().any(char::is_whitespace) {
                    return Err(Error::Data(format!(
                        "review `{}` sentence {} token {}: invalid POS tag `{}`",
                        review.id, si, ti, pos
                    )));
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn review(id: &str, text: &str) -> Review {
        Review {
            id: id.into(),
            app: "App".into(),
            category: "Cat".into(),
            rating: 4,
            sentences: vec![Sentence::from_text(text)],
        }
    }

    #[test]
    fn rejects_overlapping_spans_of_one_annotator() {
        let err = Corpus::new(
            vec![review("r1", "a b c d")],
            vec![
                AnnotationSpan::new("x", "r1", 0, 0, 2),
                AnnotationSpan::new("x", "r1", 0, 1, 3),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Data(_)));
    }

    #[test]
    fn overlap_across_annotators_is_fine() {
        let c = Corpus::new(
            vec![review("r1", "a b c d")],
            vec![
                AnnotationSpan::new("x", "r1", 0, 0, 2),
                AnnotationSpan::new("y", "r1", 0, 1, 3),
                AnnotationSpan::new("x", "r1", 0, 2, 3),
            ],
        )
        .unwrap();
        assert_eq!(c.annotations().len(), 3);
        assert_eq!(c.annotator_ids().len(), 2);
    }

    #[test]
    fn rejects_out_of_range_and_bad_rating() {
        assert!(Corpus::new(
            vec![review("r1", "a b")],
            vec![AnnotationSpan::new("x", "r1", 0, 1, 3)]
        )
        .is_err());
        assert!(Corpus::new(
            vec![review("r1", "a b")],
            vec![AnnotationSpan::new("x", "r1", 0, 1, 1)]
        )
        .is_err());
        let mut r = review("r1", "a");
        r.rating = 6;
        assert!(Corpus::new(vec![r], vec![]).is_err());
        assert!(Corpus::new(vec![review("r1", "a"), review("r1", "b")], vec![]).is_err());
    }

    #[test]
    fn spans_sorted_in_text_order() {
        let c = Corpus::new(
            vec![review("r1", "a b c"), review("r2", "d e")],
            vec![
                AnnotationSpan::new("x", "r2", 0, 0, 1),
                AnnotationSpan::new("x", "r1", 0, 2, 3),
                AnnotationSpan::new("x", "r1", 0, 0, 1),
            ],
        )
        .unwrap();
        let order: Vec<_> = c
            .annotations()
            .iter()
            .map(|s| (s.review_id.as_str(), s.start))
            .collect();
        assert_eq!(order, vec![("r1", 0), ("r1", 2), ("r2", 0)]);
        assert_eq!(c.span_text(&c.annotations()[1]), "c");
    }
}
