//! Linear-chain CRF app-feature tagger.

pub mod crf;
mod embeddings;
mod features;
pub mod lbfgs;
mod model;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{bio_decode, bio_encode, AnnotationSpan, Corpus, Label, Sentence, Token};
use crate::error::{Error, Result};

pub use crf::{forward_backward, nll_and_gradient, viterbi, CrfWeights, FeaturizedSentence, Marginals, TrainingInstance};
pub use embeddings::{load_embeddings, read_embeddings, EmbeddingTable};
pub use features::{embedding_feature, extract_features, FeatureTemplateConfig, FeatureVector, PAD};
pub use model::{load_model, read_model, save_model, write_model, CrfModel, TrainMeta, MODEL_VERSION};

/// Annotator id attached to predicted spans.
pub const MODEL_ANNOTATOR: &str = "model";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub l2_lambda: f64,
    pub max_iterations: usize,
    /// Relative objective change below which training stops.
    pub convergence_tol: f64,
    /// Recorded with the model; the optimizer itself is deterministic.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2_lambda: 1.0,
            max_iterations: 200,
            convergence_tol: 1e-5,
            seed: 42,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_lambda >= 0.0 && self.l2_lambda.is_finite()) {
            return Err(Error::Config(format!("l2_lambda must be ≥ 0, got {}", self.l2_lambda)));
        }
        if !(self.convergence_tol >= 0.0) {
            return Err(Error::Config("convergence_tol must be ≥ 0".into()));
        }
        Ok(())
    }
}

/// A sentence with gold labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingSequence {
    pub tokens: Vec<Token>,
    pub labels: Vec<Label>,
}

impl TrainingSequence {
    pub fn sentence(&self) -> Sentence {
        Sentence::new(self.tokens.clone())
    }
}

/// Every sentence of `corpus` labeled with the spans of `annotator`,
/// including sentences without spans.
pub fn training_sequences(corpus: &Corpus, annotator: &str) -> Result<Vec<TrainingSequence>> {
    let encoded = bio_encode(corpus, annotator)?;
    let sentences = corpus.reviews().iter().flat_map(|r| r.sentences.iter());
    Ok(sentences
        .zip(encoded)
        .map(|(s, seq)| TrainingSequence {
            tokens: s.tokens.clone(),
            labels: seq.labels,
        })
        .collect())
}

fn check_embeddings(config: &FeatureTemplateConfig, embeddings: Option<&EmbeddingTable>) -> Result<()> {
    if config.use_embeddings {
        let table = embeddings.ok_or_else(|| Error::Config("embedding features enabled but no embedding table given".into()))?;
        if table.dim() != config.embedding_dim {
            return Err(Error::Config(format!(
                "embedding table has dimension {}, features expect {}",
                table.dim(),
                config.embedding_dim
            )));
        }
    }
    Ok(())
}

fn sentence_features(sentence: &Sentence, config: &FeatureTemplateConfig, embeddings: Option<&EmbeddingTable>) -> Vec<FeatureVector> {
    (0..sentence.len())
        .map(|t| extract_features(sentence, t, config, embeddings))
        .collect()
}

fn to_columns(fvs: &[FeatureVector], index: &HashMap<String, usize>) -> FeaturizedSentence {
    FeaturizedSentence {
        positions: fvs
            .iter()
            .map(|fv| {
                fv.binary
                    .iter()
                    .filter_map(|f| index.get(f).map(|&c| (c, 1.0)))
                    .chain(
                        fv.continuous
                            .iter()
                            .filter(|(_, v)| *v != 0.0)
                            .filter_map(|(f, v)| index.get(f).map(|&c| (c, *v))),
                    )
                    .collect()
            })
            .collect(),
    }
}

/// Fits a CRF to `sequences` by minimizing the L2-regularized negative
/// conditional log-likelihood with L-BFGS from all-zero weights. The
/// feature dictionary holds every feature observed in training, sorted.
pub fn train(
    sequences: &[TrainingSequence],
    template: &FeatureTemplateConfig,
    embeddings: Option<&EmbeddingTable>,
    config: &TrainConfig,
) -> Result<CrfModel> {
    template.validate()?;
    config.validate()?;
    check_embeddings(template, embeddings)?;
    let sequences: Vec<&TrainingSequence> = sequences.iter().filter(|s| !s.tokens.is_empty()).collect();
    if sequences.is_empty() {
        return Err(Error::Training("no training data".into()));
    }
    for s in &sequences {
        if s.labels.len() != s.tokens.len() {
            return Err(Error::Data("label count differs from token count".into()));
        }
    }

    let featurized: Vec<Vec<FeatureVector>> = sequences
        .iter()
        .map(|s| sentence_features(&s.sentence(), template, embeddings))
        .collect();
    let mut names = BTreeSet::new();
    for fv in featurized.iter().flatten() {
        names.extend(fv.binary.iter().cloned());
    }
    if template.use_embeddings {
        names.extend((0..template.embedding_dim).map(embedding_feature));
    }
    let features: Vec<String> = names.into_iter().collect();
    let index: HashMap<String, usize> = features.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
    let instances: Vec<TrainingInstance> = featurized
        .iter()
        .zip(&sequences)
        .map(|(fvs, s)| TrainingInstance {
            sentence: to_columns(fvs, &index),
            gold: s.labels.clone(),
        })
        .collect();
    drop(featurized);

    let n_features = features.len();
    let x0 = vec![0.0; crf::n_weights(n_features)];
    if config.max_iterations == 0 {
        log::warn!("max_iterations = 0, returning an untrained all-zero model");
    }
    let lbfgs_config = lbfgs::LbfgsConfig {
        max_iterations: config.max_iterations,
        relative_tolerance: config.convergence_tol,
        ..Default::default()
    };
    let outcome = lbfgs::minimize(
        |w| nll_and_gradient(n_features, w, &instances, config.l2_lambda),
        x0,
        &lbfgs_config,
    )?;
    log::info!(
        "trained CRF on {} sequences, {} features: {} iterations, objective {:.4}",
        instances.len(),
        n_features,
        outcome.iterations,
        outcome.objective
    );
    CrfModel::new(
        features,
        outcome.x,
        template.clone(),
        TrainMeta {
            iterations: outcome.iterations,
            final_objective: outcome.objective,
            converged: outcome.converged,
            n_sequences: instances.len(),
            l2_lambda: config.l2_lambda,
            seed: config.seed,
        },
    )
}

impl CrfModel {
    /// Feature columns of a sentence under this model's dictionary; unknown
    /// features are dropped.
    pub fn featurize(&self, sentence: &Sentence, embeddings: Option<&EmbeddingTable>) -> Result<FeaturizedSentence> {
        check_embeddings(&self.config, embeddings)?;
        let fvs = sentence_features(sentence, &self.config, embeddings);
        Ok(to_columns(&fvs, self.index()))
    }

    pub fn tag(&self, sentence: &Sentence, embeddings: Option<&EmbeddingTable>) -> Result<Vec<Label>> {
        if sentence.is_empty() {
            return Ok(Vec::new());
        }
        let fs = self.featurize(sentence, embeddings)?;
        Ok(viterbi(&self.weights(), &fs).0)
    }
}

/// Tags every sentence of `corpus` and decodes the labels into spans owned
/// by [`MODEL_ANNOTATOR`].
pub fn predict_spans(model: &CrfModel, corpus: &Corpus, embeddings: Option<&EmbeddingTable>) -> Result<Vec<AnnotationSpan>> {
    let mut out = Vec::new();
    for review in corpus.reviews() {
        for (si, sentence) in review.sentences.iter().enumerate() {
            let labels = model.tag(sentence, embeddings)?;
            for (start, end) in bio_decode(&labels) {
                out.push(AnnotationSpan::new(MODEL_ANNOTATOR, review.id.clone(), si, start, end));
            }
        }
    }
    Ok(out)
}
