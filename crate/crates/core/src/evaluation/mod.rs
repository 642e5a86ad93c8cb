//! Span-level evaluation: exact and partial matching, counted over feature
//! tokens (every instance) or feature types (stem-collapsed distinct forms).

mod agreement;
mod report;
mod stem;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotationSpan, Corpus};
use crate::error::{Error, Result};

pub use agreement::dice_agreement;
pub use report::{macro_average, EvalReport, Prf, Scores};
pub use stem::{stem, type_key, Language};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    Exact,
    Partial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    Token,
    Type,
}

/// One of the four evaluation procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvalMode {
    pub matching: MatchMode,
    pub unit: UnitMode,
}

impl EvalMode {
    pub const EXACT_TOKEN: EvalMode = EvalMode::new(MatchMode::Exact, UnitMode::Token);
    pub const PARTIAL_TOKEN: EvalMode = EvalMode::new(MatchMode::Partial, UnitMode::Token);
    pub const EXACT_TYPE: EvalMode = EvalMode::new(MatchMode::Exact, UnitMode::Type);
    pub const PARTIAL_TYPE: EvalMode = EvalMode::new(MatchMode::Partial, UnitMode::Type);

    /// Reporting order: exact tokens, partial tokens, exact types, partial types.
    pub const ALL: [EvalMode; 4] = [
        EvalMode::EXACT_TOKEN,
        EvalMode::PARTIAL_TOKEN,
        EvalMode::EXACT_TYPE,
        EvalMode::PARTIAL_TYPE,
    ];

    pub const fn new(matching: MatchMode, unit: UnitMode) -> Self {
        EvalMode { matching, unit }
    }

    pub fn slug(&self) -> &'static str {
        match (self.matching, self.unit) {
            (MatchMode::Exact, UnitMode::Token) => "exact_token",
            (MatchMode::Partial, UnitMode::Token) => "partial_token",
            (MatchMode::Exact, UnitMode::Type) => "exact_type",
            (MatchMode::Partial, UnitMode::Type) => "partial_type",
        }
    }

    pub fn title(&self) -> &'static str {
        match (self.matching, self.unit) {
            (MatchMode::Exact, UnitMode::Token) => "Exact Tokens",
            (MatchMode::Partial, UnitMode::Token) => "Partial Tokens",
            (MatchMode::Exact, UnitMode::Type) => "Exact Types",
            (MatchMode::Partial, UnitMode::Type) => "Partial Types",
        }
    }
}

impl fmt::Display for EvalMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

impl FromStr for EvalMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<EvalMode> {
        EvalMode::ALL
            .into_iter()
            .find(|m| m.slug() == s)
            .ok_or_else(|| Error::Config(format!("unknown evaluation mode `{s}`")))
    }
}

/// Overlapping positions and size of the symmetric difference of two
/// half-open ranges.
fn overlap_and_difference(a: (usize, usize), b: (usize, usize)) -> (usize, usize) {
    let inter = a.1.min(b.1).saturating_sub(a.0.max(b.0));
    (inter, (a.1 - a.0) + (b.1 - b.0) - 2 * inter)
}

/// Exact: same sentence and identical bounds. Partial: same sentence, at
/// least one shared token position and at most one position in only one of
/// the two spans.
pub fn spans_match(pred: &AnnotationSpan, gold: &AnnotationSpan, mode: MatchMode) -> bool {
    if pred.review_id != gold.review_id || pred.sentence != gold.sentence {
        return false;
    }
    match mode {
        MatchMode::Exact => pred.start == gold.start && pred.end == gold.end,
        MatchMode::Partial => {
            let (inter, diff) = overlap_and_difference((pred.start, pred.end), (gold.start, gold.end));
            inter >= 1 && diff <= 1
        }
    }
}

/// Multiset variant of the partial rule over the stems of two type keys.
fn keys_match(pred: &str, gold: &str, mode: MatchMode) -> bool {
    match mode {
        MatchMode::Exact => pred == gold,
        MatchMode::Partial => {
            let mut counts: HashMap<&str, (usize, usize)> = HashMap::new();
            for w in pred.split(' ') {
                counts.entry(w).or_default().0 += 1;
            }
            for w in gold.split(' ') {
                counts.entry(w).or_default().1 += 1;
            }
            let (mut inter, mut diff) = (0, 0);
            for (p, g) in counts.values() {
                inter += p.min(g);
                diff += p.max(g) - p.min(g);
            }
            inter >= 1 && diff <= 1
        }
    }
}

/// Greedy one-to-one matching: predictions in textual order each take the
/// first still-unmatched gold span (also in textual order) they match.
/// Returns the number of matched pairs.
fn match_token_spans(pred: &[&AnnotationSpan], gold: &[&AnnotationSpan], mode: MatchMode, corpus: &Corpus) -> usize {
    type Key<'a> = (usize, usize);
    let key = |s: &AnnotationSpan| -> Key {
        (corpus.review_position(&s.review_id).unwrap_or(usize::MAX), s.sentence)
    };
    let mut gold_by_sentence: BTreeMap<Key, Vec<(&AnnotationSpan, bool)>> = BTreeMap::new();
    for g in gold {
        gold_by_sentence.entry(key(g)).or_default().push((g, false));
    }
    for list in gold_by_sentence.values_mut() {
        list.sort_by_key(|(s, _)| (s.start, s.end));
    }
    let mut preds: Vec<&AnnotationSpan> = pred.to_vec();
    preds.sort_by_key(|s| (key(s), s.start, s.end));
    let mut tp = 0;
    for p in preds {
        if let Some(list) = gold_by_sentence.get_mut(&key(p)) {
            if let Some(slot) = list
                .iter_mut()
                .find(|(g, used)| !*used && spans_match(p, g, mode))
            {
                slot.1 = true;
                tp += 1;
            }
        }
    }
    tp
}

fn match_type_keys(pred: &BTreeSet<String>, gold: &BTreeSet<String>, mode: MatchMode) -> usize {
    match mode {
        MatchMode::Exact => pred.intersection(gold).count(),
        MatchMode::Partial => {
            let mut used = vec![false; gold.len()];
            let gold: Vec<&String> = gold.iter().collect();
            let mut tp = 0;
            for p in pred {
                if let Some(i) = (0..gold.len()).find(|&i| !used[i] && keys_match(p, gold[i], mode)) {
                    used[i] = true;
                    tp += 1;
                }
            }
            tp
        }
    }
}

/// Splits spans by the category of their review. Spans on reviews outside
/// the corpus are ignored.
fn by_category<'a>(corpus: &'a Corpus, spans: &'a [AnnotationSpan]) -> HashMap<&'a str, Vec<&'a AnnotationSpan>> {
    let mut out: HashMap<&str, Vec<&AnnotationSpan>> = HashMap::new();
    for s in spans {
        if let Some(c) = corpus.category_of(&s.review_id) {
            out.entry(c).or_default().push(s);
        }
    }
    out
}

fn assemble<F>(corpus: &Corpus, mode: EvalMode, pred: &[AnnotationSpan], gold: &[AnnotationSpan], mut count: F) -> EvalReport
where
    F: FnMut(&[&AnnotationSpan], &[&AnnotationSpan]) -> (usize, usize, usize),
{
    let pred_by = by_category(corpus, pred);
    let gold_by = by_category(corpus, gold);
    let empty = Vec::new();
    let per_category: Vec<(String, Scores)> = corpus
        .categories()
        .into_iter()
        .map(|c| {
            let (n_pred, n_gold, tp) = count(
                pred_by.get(c).unwrap_or(&empty),
                gold_by.get(c).unwrap_or(&empty),
            );
            (c.to_string(), Scores::from_counts(tp, n_pred - tp, n_gold - tp))
        })
        .collect();
    let all_pred: Vec<&AnnotationSpan> = pred.iter().filter(|s| corpus.review(&s.review_id).is_some()).collect();
    let all_gold: Vec<&AnnotationSpan> = gold.iter().filter(|s| corpus.review(&s.review_id).is_some()).collect();
    let (n_pred, n_gold, tp) = count(&all_pred, &all_gold);
    EvalReport::new(mode, Scores::from_counts(tp, n_pred - tp, n_gold - tp), per_category)
}

/// Token-level evaluation: every feature instance counts separately.
pub fn evaluate_tokens(corpus: &Corpus, pred: &[AnnotationSpan], gold: &[AnnotationSpan], mode: MatchMode) -> EvalReport {
    let eval_mode = EvalMode::new(mode, UnitMode::Token);
    assemble(corpus, eval_mode, pred, gold, |p, g| {
        (p.len(), g.len(), match_token_spans(p, g, mode, corpus))
    })
}

fn key_set(corpus: &Corpus, spans: &[&AnnotationSpan], language: Language) -> BTreeSet<String> {
    spans
        .iter()
        .map(|s| {
            let words: Vec<&str> = corpus.span_tokens(s).iter().map(|t| t.text.as_str()).collect();
            type_key(&words, language)
        })
        .collect()
}

/// Type-level evaluation: spans collapse to distinct stemmed keys; exact
/// matching intersects the key sets, partial matching pairs keys greedily
/// in lexicographic order.
pub fn evaluate_types(
    corpus: &Corpus,
    pred: &[AnnotationSpan],
    gold: &[AnnotationSpan],
    mode: MatchMode,
    language: Language,
) -> EvalReport {
    let eval_mode = EvalMode::new(mode, UnitMode::Type);
    assemble(corpus, eval_mode, pred, gold, |p, g| {
        let pk = key_set(corpus, p, language);
        let gk = key_set(corpus, g, language);
        let tp = match_type_keys(&pk, &gk, mode);
        (pk.len(), gk.len(), tp)
    })
}

pub fn evaluate(corpus: &Corpus, pred: &[AnnotationSpan], gold: &[AnnotationSpan], mode: EvalMode, language: Language) -> EvalReport {
    match mode.unit {
        UnitMode::Token => evaluate_tokens(corpus, pred, gold, mode.matching),
        UnitMode::Type => evaluate_types(corpus, pred, gold, mode.matching, language),
    }
}

/// Reports for all four modes in [`EvalMode::ALL`] order.
pub fn evaluate_all(corpus: &Corpus, pred: &[AnnotationSpan], gold: &[AnnotationSpan], language: Language) -> [EvalReport; 4] {
    EvalMode::ALL.map(|m| evaluate(corpus, pred, gold, m, language))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Review, Sentence};

    fn one_sentence(text: &str) -> Corpus {
        Corpus::new(
            vec![Review {
                id: "r".into(),
                app: "a".into(),
                category: "c".into(),
                rating: 3,
                sentences: vec![Sentence::from_text(text)],
            }],
            vec![],
        )
        .unwrap()
    }

    fn span(s: usize, e: usize) -> AnnotationSpan {
        AnnotationSpan::new("x", "r", 0, s, e)
    }

    // "failed to upload video to": failed=0 to=1 upload=2 video=3 to=4
    #[test]
    fn worked_partial_examples() {
        let gold = span(1, 4); // to upload video
        assert!(spans_match(&span(2, 4), &gold, MatchMode::Partial));
        assert!(!spans_match(&span(2, 4), &gold, MatchMode::Exact));
        assert!(!spans_match(&span(3, 4), &gold, MatchMode::Partial));
        assert!(spans_match(&span(0, 4), &gold, MatchMode::Partial));
        assert!(!spans_match(&span(0, 5), &gold, MatchMode::Partial));
    }

    #[test]
    fn shifted_overlap_is_not_partial() {
        assert!(!spans_match(&span(1, 4), &span(2, 5), MatchMode::Partial));
        assert!(!spans_match(&span(0, 1), &span(1, 2), MatchMode::Partial));
    }

    #[test]
    fn token_eval_worked_example() {
        let c = one_sentence("failed to upload video to");
        let exact = evaluate_tokens(&c, &[span(2, 4)], &[span(1, 4)], MatchMode::Exact);
        assert_eq!((exact.total.tp, exact.total.fp, exact.total.fn_), (0, 1, 1));
        let partial = evaluate_tokens(&c, &[span(2, 4)], &[span(1, 4)], MatchMode::Partial);
        assert_eq!((partial.total.tp, partial.total.fp, partial.total.fn_), (1, 0, 0));
    }

    #[test]
    fn one_to_one_matching() {
        let c = one_sentence("failed to upload video to");
        let r = evaluate_tokens(&c, &[span(2, 4), span(0, 4)], &[span(1, 4)], MatchMode::Partial);
        assert_eq!((r.total.tp, r.total.fp, r.total.fn_), (1, 1, 0));
    }

    #[test]
    fn identity_is_perfect() {
        let c = one_sentence("a b c d");
        let spans = [span(0, 1), span(2, 4)];
        for m in EvalMode::ALL {
            let r = evaluate(&c, &spans, &spans, m, Language::English);
            assert_eq!(r.total.f1, 1.0, "{m}");
        }
    }

    #[test]
    fn type_collapse() {
        let c = one_sentence("video video videos other");
        let gold = [span(0, 1), span(1, 2), span(2, 3)];
        let r = evaluate_types(&c, &[span(0, 1)], &gold, MatchMode::Exact, Language::English);
        assert_eq!((r.total.tp, r.total.fp, r.total.fn_), (1, 0, 0));
        let r = evaluate_types(&c, &[span(3, 4)], &gold, MatchMode::Exact, Language::English);
        assert_eq!((r.total.precision, r.total.recall, r.total.f1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn type_partial_uses_stems() {
        let c = one_sentence("to upload videos and upload video");
        let gold = [span(0, 3)];
        let pred = [span(4, 6)];
        let r = evaluate_types(&c, &pred, &gold, MatchMode::Partial, Language::English);
        assert_eq!(r.total.tp, 1);
        assert!(keys_match("upload video", "to upload video", MatchMode::Partial));
        assert!(!keys_match("video", "to upload video", MatchMode::Partial));
        assert!(!keys_match("a a", "a b c", MatchMode::Partial));
    }

    #[test]
    fn mode_names_round_trip() {
        for m in EvalMode::ALL {
            assert_eq!(m.slug().parse::<EvalMode>().unwrap(), m);
        }
    }
}
