use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::crf::{n_weights, CrfWeights, N_LABELS};
use super::features::FeatureTemplateConfig;
use crate::corpus::Label;
use crate::error::{Error, Result};

pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub iterations: usize,
    pub final_objective: f64,
    pub converged: bool,
    pub n_sequences: usize,
    pub l2_lambda: f64,
    pub seed: u64,
}

/// A trained tagger: feature dictionary, state and transition weights and
/// the feature templates they were trained with.
#[derive(Debug, Clone, PartialEq)]
pub struct CrfModel {
    pub labels: [Label; N_LABELS],
    features: Vec<String>,
    index: HashMap<String, usize>,
    weights: Vec<f64>,
    pub config: FeatureTemplateConfig,
    pub train_meta: TrainMeta,
}

impl CrfModel {
    pub fn new(features: Vec<String>, weights: Vec<f64>, config: FeatureTemplateConfig, train_meta: TrainMeta) -> Result<Self> {
        if weights.len() != n_weights(features.len()) {
            return Err(Error::Data(format!(
                "{} weights for {} features",
                weights.len(),
                features.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::Data("non-finite model weight".into()));
        }
        let index: HashMap<String, usize> = features.iter().enumerate().map(|(i, f)| (f.clone(), i)).collect();
        if index.len() != features.len() {
            return Err(Error::Data("duplicate feature id in model".into()));
        }
        Ok(CrfModel {
            labels: Label::ALL,
            features,
            index,
            weights,
            config,
            train_meta,
        })
    }

    pub fn weights(&self) -> CrfWeights<'_> {
        CrfWeights::new(self.features.len(), &self.weights)
    }

    pub fn raw_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn feature_names(&self) -> &[String] {
        &self.features
    }

    pub(crate) fn index(&self) -> &HashMap<String, usize> {
        &self.index
    }

    pub fn n_features(&self) -> usize {
        self.features.len()
    }

    /// Weight of `feature` for `label`; 0 for features outside the dictionary.
    pub fn state_weight(&self, feature: &str, label: Label) -> f64 {
        self.index
            .get(feature)
            .map_or(0.0, |&f| self.weights().state(f, label.index()))
    }

    /// `from = None` is the start state.
    pub fn transition_weight(&self, from: Option<Label>, to: Label) -> f64 {
        let row = from.map_or(super::crf::START, Label::index);
        self.weights().transition(row, to.index())
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    version: u32,
    labels: Vec<Label>,
    config: FeatureTemplateConfig,
    train_meta: TrainMeta,
    /// `(feature id, [B, I, O] weights)`, sorted by id.
    features: Vec<(String, [f64; N_LABELS])>,
    /// Rows B, I, O, start; columns B, I, O.
    transitions: Vec<[f64; N_LABELS]>,
}

#[derive(Deserialize)]
struct VersionProbe {
    version: u32,
}

pub fn write_model<W: Write>(model: &CrfModel, w: W) -> Result<()> {
    let nf = model.n_features();
    let cw = model.weights();
    let mut order: Vec<usize> = (0..nf).collect();
    order.sort_by(|&a, &b| model.features[a].cmp(&model.features[b]));
    let file = ModelFile {
        version: MODEL_VERSION,
        labels: model.labels.to_vec(),
        config: model.config.clone(),
        train_meta: model.train_meta.clone(),
        features: order
            .into_iter()
            .map(|f| (model.features[f].clone(), std::array::from_fn(|y| cw.state(f, y))))
            .collect(),
        transitions: (0..=N_LABELS)
            .map(|p| std::array::from_fn(|y| cw.transition(p, y)))
            .collect(),
    };
    serde_json::to_writer_pretty(w, &file)?;
    Ok(())
}

pub fn read_model<R: Read>(reader: R) -> Result<CrfModel> {
    let value: serde_json::Value = serde_json::from_reader(reader)
        .map_err(|e| Error::Data(format!("corrupt model file: {e}")))?;
    let probe: VersionProbe = serde_json::from_value(value.clone())
        .map_err(|e| Error::Data(format!("corrupt model file: {e}")))?;
    if probe.version != MODEL_VERSION {
        return Err(Error::Version {
            found: probe.version,
            expected: MODEL_VERSION,
        });
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| Error::Data(format!("corrupt model file: {e}")))?;
    if file.labels != Label::ALL || file.transitions.len() != N_LABELS + 1 {
        return Err(Error::Data("corrupt model file: unexpected label layout".into()));
    }
    let mut features = Vec::with_capacity(file.features.len());
    let mut weights = Vec::with_capacity(n_weights(file.features.len()));
    for (name, w) in file.features {
        features.push(name);
        weights.extend(w);
    }
    for row in file.transitions {
        weights.extend(row);
    }
    CrfModel::new(features, weights, file.config, file.train_meta)
}

pub fn save_model(model: &CrfModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_model(model, &mut w)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<CrfModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_model(BufReader::new(file))
}
