use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Corpus;
use crate::error::{Error, Result};

/// BIO label. The discriminant order B < I < O is also the decoder's
/// tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    B,
    I,
    O,
}

impl Label {
    pub const ALL: [Label; 3] = [Label::B, Label::I, Label::O];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Label {
        Label::ALL[i]
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::B => "B",
            Label::I => "I",
            Label::O => "O",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    /// Accepts bare `B`/`I`/`O` and typed variants such as `B-FEATURE`.
    fn from_str(s: &str) -> Result<Label> {
        match s.split('-').next().unwrap_or("") {
            "B" => Ok(Label::B),
            "I" => Ok(Label::I),
            "O" => Ok(Label::O),
            _ => Err(Error::Data(format!("invalid BIO label `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledSequence {
    pub review_id: String,
    pub sentence: usize,
    pub labels: Vec<Label>,
}

impl LabeledSequence {
    /// True when no `I` follows `O` or opens the sequence.
    pub fn is_valid(&self) -> bool {
        is_valid_bio(&self.labels)
    }
}

pub fn is_valid_bio(labels: &[Label]) -> bool {
    let mut prev = Label::O;
    for &l in labels {
        if l == Label::I && prev == Label::O {
            return false;
        }
        prev = l;
    }
    true
}

/// One labeled sequence per sentence of the corpus, in corpus order.
pub fn bio_encode(corpus: &Corpus, annotator: &str) -> Result<Vec<LabeledSequence>> {
    corpus.check_annotator(annotator)?;
    let mut out = Vec::with_capacity(corpus.n_sentences());
    let mut spans = corpus
        .annotations()
        .iter()
        .filter(|s| s.annotator == annotator)
        .peekable();
    for review in corpus.reviews() {
        for (si, sentence) in review.sentences.iter().enumerate() {
            let mut labels = vec![Label::O; sentence.len()];
            // spans are in canonical corpus order, so they arrive per sentence
            while let Some(span) = spans.next_if(|s| s.review_id == review.id && s.sentence == si) {
                labels[span.start] = Label::B;
                for l in &mut labels[span.start + 1..span.end] {
                    *l = Label::I;
                }
            }
            out.push(LabeledSequence {
                review_id: review.id.clone(),
                sentence: si,
                labels,
            });
        }
    }
    Ok(out)
}

/// Maximal `B I*` runs as half-open ranges. An `I` that opens the sequence
/// or follows `O` starts a new span, as if it were `B`.
pub fn bio_decode(labels: &[Label]) -> Vec<(usize, usize)> {
    let mut spans = Vec::new();
    let mut open: Option<usize> = None;
    for (t, &label) in labels.iter().enumerate() {
        match label {
            Label::B => {
                if let Some(s) = open.take() {
                    spans.push((s, t));
                }
                open = Some(t);
            }
            Label::I => {
                if open.is_none() {
                    open = Some(t);
                }
            }
            Label::O => {
                if let Some(s) = open.take() {
                    spans.push((s, t));
                }
            }
        }
    }
    if let Some(s) = open {
        spans.push((s, labels.len()));
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{AnnotationSpan, Review, Sentence};
    use Label::*;

    fn corpus(text: &str, spans: &[(usize, usize)]) -> Corpus {
        Corpus::new(
            vec![Review {
                id: "r".into(),
                app: "a".into(),
                category: "c".into(),
                rating: 3,
                sentences: vec![Sentence::from_text(text)],
            }],
            spans
                .iter()
                .map(|&(s, e)| AnnotationSpan::new("ann", "r", 0, s, e))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn encode_examples() {
        let c = corpus("a b c", &[(0, 1)]);
        assert_eq!(bio_encode(&c, "ann").unwrap()[0].labels, vec![B, O, O]);
        let c = corpus("to upload video now", &[(1, 3)]);
        assert_eq!(bio_encode(&c, "ann").unwrap()[0].labels, vec![O, B, I, O]);
        let c = corpus("a b c", &[(0, 1), (2, 3)]);
        assert_eq!(bio_encode(&c, "ann").unwrap()[0].labels, vec![B, O, B]);
    }

    #[test]
    fn encode_unknown_annotator() {
        let c = corpus("a b c", &[(0, 1)]);
        assert!(matches!(bio_encode(&c, "nobody"), Err(Error::UnknownAnnotator(_))));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(bio_decode(&[B, I, O]), vec![(0, 2)]);
        assert_eq!(bio_decode(&[O, I, I]), vec![(1, 3)]);
        assert_eq!(bio_decode(&[O, O, O]), vec![]);
        assert_eq!(bio_decode(&[B, B, I]), vec![(0, 1), (1, 3)]);
        assert_eq!(bio_decode(&[I]), vec![(0, 1)]);
    }

    #[test]
    fn label_parsing() {
        assert_eq!("B-ASPECT".parse::<Label>().unwrap(), B);
        assert!("X".parse::<Label>().is_err());
    }
}
