use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::error::Result;

/// Dataset characteristics in the usual reporting order: reviews, sentences,
/// feature tokens, feature types, single- and multi-word features,
/// type-token ratio and features per review.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub n_reviews: usize,
    pub n_sentences: usize,
    pub feature_tokens: usize,
    pub feature_types: usize,
    pub single_word: usize,
    pub multi_word: usize,
    pub type_token_ratio: f64,
    pub features_per_review: f64,
}

impl DatasetStats {
    fn finish(&mut self) {
        self.type_token_ratio = ratio(self.feature_types, self.feature_tokens);
        self.features_per_review = ratio(self.feature_tokens, self.n_reviews);
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Categories in order of first appearance.
    pub per_category: Vec<(String, DatasetStats)>,
    pub total: DatasetStats,
}

impl CorpusStats {
    pub fn category(&self, name: &str) -> Option<&DatasetStats> {
        self.per_category
            .iter()
            .find(|(c, _)| c == name)
            .map(|(_, s)| s)
    }
}

/// Counts per category and in total. Types are distinct `type_key` values of
/// the span words; the total counts distinct types across all categories.
pub fn compute_stats<F>(corpus: &Corpus, annotator: Option<&str>, type_key: F) -> Result<CorpusStats>
where
    F: Fn(&[&str]) -> String,
{
    let spans = corpus.spans(annotator)?;
    let categories = corpus.categories();
    let slot: HashMap<&str, usize> = categories.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut per: Vec<DatasetStats> = vec![DatasetStats::default(); categories.len()];
    let mut types: Vec<BTreeSet<String>> = vec![BTreeSet::new(); categories.len()];
    let mut total = DatasetStats::default();
    let mut total_types = BTreeSet::new();

    for review in corpus.reviews() {
        let s = &mut per[slot[review.category.as_str()]];
        s.n_reviews += 1;
        s.n_sentences += review.sentences.len();
    }
    for span in spans {
        let i = slot[corpus.category_of(&span.review_id).expect("validated span")];
        let words: Vec<&str> = corpus.span_tokens(span).iter().map(|t| t.text.as_str()).collect();
        let key = type_key(&words);
        let s = &mut per[i];
        s.feature_tokens += 1;
        if words.len() == 1 {
            s.single_word += 1;
        } else {
            s.multi_word += 1;
        }
        types[i].insert(key.clone());
        total_types.insert(key);
    }
    for (s, t) in per.iter_mut().zip(&types) {
        s.feature_types = t.len();
        s.finish();
        total.n_reviews += s.n_reviews;
        total.n_sentences += s.n_sentences;
        total.feature_tokens += s.feature_tokens;
        total.single_word += s.single_word;
        total.multi_word += s.multi_word;
    }
    total.feature_types = total_types.len();
    total.finish();
    Ok(CorpusStats {
        per_category: categories.into_iter().map(String::from).zip(per).collect(),
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotationSpan, Review, Sentence};
    use crate::evaluation::{type_key, Language};

    fn key(words: &[&str]) -> String {
        type_key(words, Language::English)
    }

    fn review(id: &str, cat: &str, text: &str) -> Review {
        Review {
            id: id.into(),
            app: "app".into(),
            category: cat.into(),
            rating: 5,
            sentences: vec![Sentence::from_text(text)],
        }
    }

    #[test]
    fn hand_counted_fixture() {
        let c = Corpus::new(
            vec![
                review("r1", "Video", "upload video is slow"),
                review("r2", "Video", "upload video and sound"),
            ],
            vec![
                AnnotationSpan::new("a", "r1", 0, 0, 2),
                AnnotationSpan::new("a", "r2", 0, 0, 2),
                AnnotationSpan::new("a", "r2", 0, 3, 4),
            ],
        )
        .unwrap();
        let s = compute_stats(&c, Some("a"), key).unwrap().total;
        assert_eq!(s.feature_tokens, 3);
        assert_eq!(s.feature_types, 2);
        assert_eq!(s.single_word, 1);
        assert_eq!(s.multi_word, 2);
        assert!((s.type_token_ratio - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.features_per_review - 1.5).abs() < 1e-12);
    }

    #[test]
    fn no_spans_gives_zero_ratios() {
        let c = Corpus::new(vec![review("r1", "X", "nothing here")], vec![]).unwrap();
        let s = compute_stats(&c, None, key).unwrap().total;
        assert_eq!(s.feature_tokens, 0);
        assert_eq!(s.type_token_ratio, 0.0);
        assert_eq!(s.features_per_review, 0.0);
        assert_eq!(s.n_sentences, 1);
    }

    #[test]
    fn stemming_merges_types() {
        let c = Corpus::new(
            vec![review("r1", "X", "editing edited")],
            vec![
                AnnotationSpan::new("a", "r1", 0, 0, 1),
                AnnotationSpan::new("a", "r1", 0, 1, 2),
            ],
        )
        .unwrap();
        assert_eq!(compute_stats(&c, Some("a"), key).unwrap().total.feature_types, 1);
    }

    #[test]
    fn unknown_annotator_errors() {
        let c = Corpus::new(vec![review("r1", "X", "a")], vec![]).unwrap();
        assert!(compute_stats(&c, Some("zz"), key).is_err());
    }

    #[test]
    fn per_category_rows() {
        let c = Corpus::new(
            vec![review("r1", "A", "x y"), review("r2", "B", "x y"), review("r3", "A", "z")],
            vec![
                AnnotationSpan::new("a", "r1", 0, 0, 1),
                AnnotationSpan::new("a", "r2", 0, 0, 1),
            ],
        )
        .unwrap();
        let st = compute_stats(&c, Some("a"), key).unwrap();
        assert_eq!(st.per_category.len(), 2);
        assert_eq!(st.category("A").unwrap().n_reviews, 2);
        assert_eq!(st.category("A").unwrap().feature_types, 1);
        // same type in both categories counts once overall
        assert_eq!(st.total.feature_types, 1);
        assert_eq!(st.total.feature_tokens, 2);
    }
}
