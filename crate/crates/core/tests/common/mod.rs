#![allow(dead_code)]

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use revmine::corpus::{AnnotationSpan, Corpus, Review, Sentence, Token};
use revmine::tagger::FeaturizedSentence;

pub const WORDS: [&str; 16] = [
    "app", "video", "upload", "to", "the", "Notely", "sync", "dark", "mode", "is", "great", "ça", "fotos", "Chatter", "export", "!",
];
pub const TAGS: [&str; 8] = ["NN", "NNS", "NNP", "VB", "JJ", "DT", "TO", "."];

/// Random valid corpus: 0-`max_reviews` reviews in up to 3 categories,
/// 1-2 annotators with non-overlapping spans, every token POS-tagged.
pub fn random_corpus(rng: &mut ChaCha8Rng, max_reviews: usize) -> Corpus {
    let n_reviews = rng.gen_range(0..=max_reviews);
    let annotators: Vec<String> = (0..rng.gen_range(1..=2)).map(|i| format!("ann{i}")).collect();
    let apps = ["Notely", "Chatter", "Sky Cast"];
    let mut reviews = Vec::new();
    let mut spans = Vec::new();
    for r in 0..n_reviews {
        let id = format!("r{r}");
        let n_sent = rng.gen_range(1..=3);
        let mut sentences = Vec::new();
        for s in 0..n_sent {
            let len = rng.gen_range(1..=8);
            let tokens: Vec<Token> = (0..len)
                .map(|_| Token::tagged(*WORDS.choose(rng).unwrap(), *TAGS.choose(rng).unwrap()))
                .collect();
            for a in &annotators {
                let mut t = 0;
                while t < len {
                    if rng.gen_bool(0.3) {
                        let end = (t + rng.gen_range(1..=5)).min(len);
                        spans.push(AnnotationSpan::new(a.clone(), id.clone(), s, t, end));
                        t = end + rng.gen_range(0..=1);
                    } else {
                        t += 1;
                    }
                }
            }
            sentences.push(Sentence::new(tokens));
        }
        let c = rng.gen_range(0..3);
        reviews.push(Review {
            id,
            app: apps[c].to_string(),
            category: ["Tools", "Social", "Weather"][c].to_string(),
            rating: rng.gen_range(1..=5),
            sentences,
        });
    }
    Corpus::new(reviews, spans).unwrap().with_annotators(annotators)
}

/// Random sparse sentence over `n_features` columns with 1-3 active
/// features per token, mixing binary and real values.
pub fn random_sentence(rng: &mut ChaCha8Rng, n_features: usize, len: usize) -> FeaturizedSentence {
    FeaturizedSentence {
        positions: (0..len)
            .map(|_| {
                let k = rng.gen_range(1..=3.min(n_features));
                rand::seq::index::sample(rng, n_features, k)
                    .into_iter()
                    .map(|f| (f, if rng.gen_bool(0.5) { 1.0 } else { rng.gen_range(-1.5..1.5) }))
                    .collect()
            })
            .collect(),
    }
}

pub fn random_weights(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

/// Every label sequence of length `n` as label indices.
pub fn all_paths(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| (0..3).map(move |y| [p.clone(), vec![y]].concat()))
            .collect();
    }
    out
}

/// Valid BIO: no I (index 1) first or after O (index 2).
pub fn path_valid(p: &[usize]) -> bool {
    p.first() != Some(&1) && p.windows(2).all(|w| !(w[0] == 2 && w[1] == 1))
}
pub mod cli_runs;
pub mod sim_checks;
