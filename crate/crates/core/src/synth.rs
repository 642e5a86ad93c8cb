//! Deterministic synthetic review corpora.
//!
//! Reviews are assembled from sentence templates with feature slots. Each
//! category draws its features from an inventory of which a configurable
//! fraction is shared with every other category. A share of the slots is
//! filled with the noise that the guideline simulation removes: references
//! to the app itself, features without a noun and features longer than
//! three words. Some reviews carry no feature at all.

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotationSpan, Corpus, Review, Sentence, Token, LANGUAGE_KEY};
use crate::error::{Error, Result};

const CATEGORIES: [(&str, &str); 10] = [
    ("Productivity", "Notely"),
    ("Social", "Chatter"),
    ("Travel", "Tripster"),
    ("Games", "Blockfall"),
    ("Music", "Tunebox"),
    ("Photography", "Snapwise"),
    ("Weather", "Skycast"),
    ("Finance", "Coinpurse"),
    ("Health", "Fitloop"),
    ("Education", "Learnly"),
];

/// Feature phrases with their POS tags.
const FEATURES: [(&str, &str); 48] = [
    ("video", "NN"),
    ("photo editing", "NN NN"),
    ("notifications", "NNS"),
    ("dark mode", "JJ NN"),
    ("search function", "NN NN"),
    ("login", "NN"),
    ("offline mode", "JJ NN"),
    ("backup", "NN"),
    ("user interface", "NN NN"),
    ("widget", "NN"),
    ("file sharing", "NN NN"),
    ("password reset", "NN NN"),
    ("sync", "NN"),
    ("push notifications", "JJ NNS"),
    ("settings menu", "NNS NN"),
    ("calendar", "NN"),
    ("voice calls", "NN NNS"),
    ("group chat", "NN NN"),
    ("profile page", "NN NN"),
    ("news feed", "NN NN"),
    ("route planning", "NN NN"),
    ("map view", "NN NN"),
    ("hotel booking", "NN NN"),
    ("flight alerts", "NN NNS"),
    ("leaderboard", "NN"),
    ("level editor", "NN NN"),
    ("multiplayer", "NN"),
    ("playlist", "NN"),
    ("equalizer", "NN"),
    ("lyrics view", "NNS NN"),
    ("camera filters", "NN NNS"),
    ("photo album", "NN NN"),
    ("collage maker", "NN NN"),
    ("radar map", "NN NN"),
    ("hourly forecast", "JJ NN"),
    ("storm warnings", "NN NNS"),
    ("budget tracker", "NN NN"),
    ("expense report", "NN NN"),
    ("bank transfer", "NN NN"),
    ("step counter", "NN NN"),
    ("workout plans", "NN NNS"),
    ("sleep tracking", "NN NN"),
    ("flashcards", "NNS"),
    ("quiz mode", "NN NN"),
    ("lesson reminders", "NN NNS"),
    ("note templates", "NN NNS"),
    ("task list", "NN NN"),
    ("recurring reminders", "JJ NNS"),
];

const SELF_REFERENCES: [(&str, &str); 3] = [("app", "NN"), ("application", "NN"), ("apps", "NNS")];

const NOUNLESS: [(&str, &str); 4] = [("to upload", "TO VB"), ("share", "VB"), ("syncing", "VBG"), ("to export", "TO VB")];

const LONG: [(&str, &str); 4] = [
    ("ability to upload videos to cloud", "NN TO VB NNS TO NN"),
    ("sorting functionality in board section", "VBG NN IN NN NN"),
    ("option to change the font size", "NN TO VB DT NN NN"),
    ("way to export notes as pdf", "NN TO VB NNS IN NN"),
];

/// Tagged templates; `{F}` marks a feature slot.
const TEMPLATES: [&str; 10] = [
    "i/PRP love/VBP the/DT {F} ./.",
    "the/DT {F} is/VBZ great/JJ ./.",
    "please/UH fix/VB the/DT {F} ./.",
    "{F} stopped/VBD working/VBG after/IN the/DT last/JJ update/NN ./.",
    "can/MD you/PRP add/VB {F} ?/.",
    "great/JJ {F} and/CC {F} !/.",
    "the/DT {F} keeps/VBZ crashing/VBG ./.",
    "i/PRP really/RB like/VBP how/WRB {F} works/VBZ ./.",
    "why/WRB is/VBZ there/EX no/DT {F} ?/.",
    "{F} would/MD be/VB nice/JJ ./.",
];

const PLAIN_TEMPLATES: [&str; 4] = [
    "i/PRP use/VBP it/PRP every/DT day/NN ./.",
    "works/VBZ fine/RB for/IN me/PRP ./.",
    "five/CD stars/NNS !/.",
    "not/RB bad/JJ at/IN all/DT ./.",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    /// At most 10.
    pub categories: usize,
    pub apps_per_category: usize,
    pub reviews_per_category: usize,
    pub features_per_category: usize,
    /// Fraction of each category's inventory shared with all categories.
    pub shared_vocab_fraction: f64,
    /// Probability that a slot holds a self-reference, noun-less or long feature.
    pub noise_rate: f64,
    /// Probability that a review has no feature.
    pub empty_review_rate: f64,
    pub annotator: String,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            categories: 3,
            apps_per_category: 2,
            reviews_per_category: 30,
            features_per_category: 10,
            shared_vocab_fraction: 0.7,
            noise_rate: 0.25,
            empty_review_rate: 0.1,
            annotator: "a1".into(),
            seed: 42,
        }
    }
}

impl SynthConfig {
    fn split(&self) -> (usize, usize) {
        let shared = (self.shared_vocab_fraction * self.features_per_category as f64).round() as usize;
        (shared, self.features_per_category - shared)
    }

    pub fn validate(&self) -> Result<()> {
        let (shared, unique) = self.split();
        if self.categories == 0 || self.categories > CATEGORIES.len() {
            return Err(Error::Config(format!("categories must be in 1..={}", CATEGORIES.len())));
        }
        if self.apps_per_category == 0 || self.features_per_category == 0 {
            return Err(Error::Config("apps and features per category must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.shared_vocab_fraction)
            || !(0.0..=1.0).contains(&self.noise_rate)
            || !(0.0..=1.0).contains(&self.empty_review_rate)
        {
            return Err(Error::Config("fractions and rates must lie in [0, 1]".into()));
        }
        if shared + unique * self.categories > FEATURES.len() {
            return Err(Error::Config(format!(
                "{} categories × {unique} unique features plus {shared} shared exceed the {} available phrases",
                self.categories,
                FEATURES.len()
            )));
        }
        Ok(())
    }

    /// Category names in generation order.
    pub fn category_names(&self) -> Vec<&'static str> {
        CATEGORIES[..self.categories.min(CATEGORIES.len())].iter().map(|c| c.0).collect()
    }

    /// Feature phrases of category `c`: the shared block then its own block.
    pub fn inventory(&self, c: usize) -> Vec<&'static str> {
        let (shared, unique) = self.split();
        FEATURES[..shared]
            .iter()
            .chain(&FEATURES[shared + c * unique..shared + (c + 1) * unique])
            .map(|f| f.0)
            .collect()
    }
}

fn app_name(c: usize, a: usize) -> String {
    let base = CATEGORIES[c].1;
    match a {
        0 => base.to_string(),
        1 => format!("{base} Lite"),
        n => format!("{base} {}", n + 1),
    }
}

fn tagged(words: &str, tags: &str) -> Vec<Token> {
    words.split(' ').zip(tags.split(' ')).map(|(w, t)| Token::tagged(w, t)).collect()
}

fn capitalize(token: &mut Token) {
    let mut chars = token.text.chars();
    if let Some(first) = chars.next() {
        token.text = first.to_uppercase().chain(chars).collect();
    }
}

struct Builder<'a> {
    rng: ChaCha8Rng,
    config: &'a SynthConfig,
}

impl Builder<'_> {
    fn feature(&mut self, inventory: &[(&str, &str)], app: &str) -> Vec<Token> {
        if self.rng.gen_bool(self.config.noise_rate) {
            match self.rng.gen_range(0..4) {
                0 => {
                    let (w, t) = SELF_REFERENCES[self.rng.gen_range(0..SELF_REFERENCES.len())];
                    tagged(w, t)
                }
                1 => app.split(' ').map(|w| Token::tagged(w, "NNP")).collect(),
                2 => {
                    let (w, t) = NOUNLESS[self.rng.gen_range(0..NOUNLESS.len())];
                    tagged(w, t)
                }
                _ => {
                    let (w, t) = LONG[self.rng.gen_range(0..LONG.len())];
                    tagged(w, t)
                }
            }
        } else {
            let (w, t) = inventory[self.rng.gen_range(0..inventory.len())];
            tagged(w, t)
        }
    }

    /// A sentence and the feature spans it contains.
    fn sentence(&mut self, inventory: &[(&str, &str)], app: &str, with_feature: bool) -> (Sentence, Vec<(usize, usize)>) {
        let template = if with_feature {
            TEMPLATES[self.rng.gen_range(0..TEMPLATES.len())]
        } else {
            PLAIN_TEMPLATES[self.rng.gen_range(0..PLAIN_TEMPLATES.len())]
        };
        let mut tokens = Vec::new();
        let mut spans = Vec::new();
        for piece in template.split(' ') {
            if piece == "{F}" {
                let start = tokens.len();
                tokens.extend(self.feature(inventory, app));
                spans.push((start, tokens.len()));
            } else {
                let (w, t) = piece.rsplit_once('/').expect("templates are tagged");
                tokens.push(Token::tagged(w, t));
            }
        }
        capitalize(&mut tokens[0]);
        (Sentence::new(tokens), spans)
    }
}

fn rating(rng: &mut ChaCha8Rng) -> u8 {
    let dist = WeightedIndex::new([10, 10, 15, 25, 40]).expect("positive weights");
    dist.sample(rng) as u8 + 1
}

fn phrases(words: &[&'static str]) -> Vec<(&'static str, &'static str)> {
    words
        .iter()
        .map(|w| *FEATURES.iter().find(|f| f.0 == *w).expect("inventory entries come from FEATURES"))
        .collect()
}

/// Generates the corpus described by `config`; same config, same corpus.
pub fn synthetic_corpus(config: &SynthConfig) -> Result<Corpus> {
    config.validate()?;
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        config,
    };
    let mut reviews = Vec::new();
    let mut spans = Vec::new();
    for (c, name) in config.category_names().into_iter().enumerate() {
        let inventory = phrases(&config.inventory(c));
        for n in 0..config.reviews_per_category {
            let app = app_name(c, n % config.apps_per_category);
            let id = format!("{}-{n:03}", name.to_lowercase());
            let empty = b.rng.gen_bool(config.empty_review_rate);
            let n_sentences = b.rng.gen_range(1..=3);
            let mut sentences = Vec::new();
            for s in 0..n_sentences {
                let with_feature = !empty && (s == 0 || b.rng.gen_bool(0.6));
                let (sentence, found) = b.sentence(&inventory, &app, with_feature);
                spans.extend(found.into_iter().map(|(st, en)| AnnotationSpan::new(config.annotator.clone(), id.clone(), s, st, en)));
                sentences.push(sentence);
            }
            reviews.push(Review {
                id,
                app,
                category: name.to_string(),
                rating: rating(&mut b.rng),
                sentences,
            });
        }
    }
    let mut corpus = Corpus::new(reviews, spans)?.with_annotators([config.annotator.clone()]);
    corpus.set_metadata(LANGUAGE_KEY, "en");
    corpus.set_metadata("source", "synthetic");
    Ok(corpus)
}

/// An external corpus in category `domain` whose features are drawn from
/// the union of every category inventory of `config`, without noise.
pub fn synthetic_external(config: &SynthConfig, domain: &str, n_reviews: usize, seed: u64) -> Result<Corpus> {
    config.validate()?;
    let mut words: Vec<&'static str> = Vec::new();
    for c in 0..config.categories {
        for w in config.inventory(c) {
            if !words.contains(&w) {
                words.push(w);
            }
        }
    }
    let inventory = phrases(&words);
    let quiet = SynthConfig {
        noise_rate: 0.0,
        ..config.clone()
    };
    let mut b = Builder {
        rng: ChaCha8Rng::seed_from_u64(seed),
        config: &quiet,
    };
    let mut reviews = Vec::new();
    let mut spans = Vec::new();
    for n in 0..n_reviews {
        let id = format!("{domain}-{n:04}");
        let (sentence, found) = b.sentence(&inventory, domain, true);
        spans.extend(found.into_iter().map(|(s, e)| AnnotationSpan::new(config.annotator.clone(), id.clone(), 0, s, e)));
        reviews.push(Review {
            id,
            app: domain.to_string(),
            category: domain.to_string(),
            rating: rating(&mut b.rng),
            sentences: vec![sentence],
        });
    }
    let mut corpus = Corpus::new(reviews, spans)?.with_annotators([config.annotator.clone()]);
    corpus.set_metadata(LANGUAGE_KEY, "en");
    corpus.set_metadata("source", format!("synthetic:{domain}"));
    Ok(corpus)
}

/// Twenty one-sentence reviews in which every feature sits in a fixed
/// template position; a tagger should fit it perfectly.
pub fn overfit_corpus() -> Corpus {
    let features = [("video", "NN"), ("dark mode", "JJ NN"), ("sync", "NN"), ("photo album", "NN NN"), ("search function", "NN NN")];
    let templates = ["i/PRP love/VBP the/DT {F} ./.", "please/UH fix/VB the/DT {F} ./.", "no/DT features/NNS here/RB ./.", "the/DT {F} is/VBZ great/JJ ./."];
    let mut reviews = Vec::new();
    let mut spans = Vec::new();
    for n in 0..20 {
        let id = format!("fit-{n:02}");
        let (w, t) = features[n % features.len()];
        let mut tokens = Vec::new();
        for piece in templates[n % templates.len()].split(' ') {
            if piece == "{F}" {
                let start = tokens.len();
                tokens.extend(tagged(w, t));
                spans.push(AnnotationSpan::new("gold", id.clone(), 0, start, tokens.len()));
            } else {
                let (word, tag) = piece.rsplit_once('/').expect("tagged");
                tokens.push(Token::tagged(word, tag));
            }
        }
        reviews.push(Review {
            id,
            app: "Fixer".into(),
            category: if n < 10 { "Tools" } else { "Media" }.into(),
            rating: 5,
            sentences: vec![Sentence::new(tokens)],
        });
    }
    Corpus::new(reviews, spans).expect("fixture is valid").with_annotators(["gold"])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_shaped() {
        let cfg = SynthConfig::default();
        let a = synthetic_corpus(&cfg).unwrap();
        assert_eq!(a, synthetic_corpus(&cfg).unwrap());
        assert_eq!(a.len(), 90);
        assert_eq!(a.categories(), ["Productivity", "Social", "Travel"]);
        assert_eq!(a.apps().len(), 6);
        assert!(a.reviews().iter().flat_map(|r| &r.sentences).flat_map(|s| &s.tokens).all(|t| t.pos.is_some()));
        let other = synthetic_corpus(&SynthConfig { seed: 7, ..cfg.clone() }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn inventories_share_a_prefix() {
        let cfg = SynthConfig::default();
        let (a, b) = (cfg.inventory(0), cfg.inventory(1));
        assert_eq!(a.len(), 10);
        assert_eq!(a[..7], b[..7]);
        assert!(a[7..].iter().all(|w| !b.contains(w)));
        assert!(SynthConfig {
            categories: 10,
            features_per_category: 20,
            ..cfg
        }
        .validate()
        .is_err());
    }

    #[test]
    fn external_and_overfit() {
        let cfg = SynthConfig::default();
        let ext = synthetic_external(&cfg, "laptop", 50, 1).unwrap();
        assert_eq!(ext.len(), 50);
        assert!(ext.annotations().len() >= 50);
        let fit = overfit_corpus();
        assert_eq!(fit.n_sentences(), 20);
        assert_eq!(fit.annotations().len(), 15);
    }
}
