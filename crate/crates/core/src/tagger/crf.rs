//! Linear-chain CRF inference over the three BIO labels.
//!
//! A weight vector holds `n_features × 3` state weights (feature-major)
//! followed by a `4 × 3` transition block whose last row scores the
//! transition out of the start state. The score of a label path `y` for
//! feature values `x` is
//!
//! ```text
//! Σ_t Σ_f x_t[f]·state[f][y_t] + trans[start][y_0] + Σ_{t≥1} trans[y_{t-1}][y_t]
//! ```
//!
//! All probabilities are handled as logarithms.

use rayon::prelude::*;

use crate::corpus::Label;

pub const N_LABELS: usize = 3;
/// Row of the transition block used for the first token.
pub const START: usize = N_LABELS;
const N_TRANSITIONS: usize = (N_LABELS + 1) * N_LABELS;

/// Sentences per gradient partition. Partition boundaries are fixed so that
/// the reduction order does not depend on the thread count.
const PARTITION: usize = 64;

/// Sparse feature values of each token, as `(column, value)` pairs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeaturizedSentence {
    pub positions: Vec<Vec<(usize, f64)>>,
}

impl FeaturizedSentence {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Numerically stable `ln Σ exp(x)`; `-∞` for an empty or all `-∞` input.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln()
}

/// Borrowed view of a CRF weight vector.
#[derive(Debug, Clone, Copy)]
pub struct CrfWeights<'a> {
    n_features: usize,
    w: &'a [f64],
}

impl<'a> CrfWeights<'a> {
    pub fn new(n_features: usize, w: &'a [f64]) -> Self {
        assert_eq!(w.len(), n_weights(n_features), "weight vector length");
        CrfWeights { n_features, w }
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn state(&self, feature: usize, label: usize) -> f64 {
        self.w[feature * N_LABELS + label]
    }

    /// `from` is a label index or [`START`].
    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.w[self.n_features * N_LABELS + from * N_LABELS + to]
    }

    /// Per-token label scores; columns at or beyond `n_features` are ignored.
    pub fn emissions(&self, sentence: &FeaturizedSentence) -> Vec<[f64; N_LABELS]> {
        sentence
            .positions
            .iter()
            .map(|feats| {
                let mut e = [0.0; N_LABELS];
                for &(f, v) in feats {
                    if f < self.n_features {
                        for (y, slot) in e.iter_mut().enumerate() {
                            *slot += v * self.state(f, y);
                        }
                    }
                }
                e
            })
            .collect()
    }

    pub fn path_score(&self, sentence: &FeaturizedSentence, labels: &[Label]) -> f64 {
        assert_eq!(sentence.len(), labels.len());
        let emissions = self.emissions(sentence);
        let mut score = 0.0;
        let mut prev = START;
        for (e, &l) in emissions.iter().zip(labels) {
            let y = l.index();
            score += self.transition(prev, y) + e[y];
            prev = y;
        }
        score
    }
}

pub fn n_weights(n_features: usize) -> usize {
    n_features * N_LABELS + N_TRANSITIONS
}

/// Output of [`forward_backward`].
#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub log_z: f64,
    /// `state[t][y]` = P(y_t = y | x).
    pub state: Vec<[f64; N_LABELS]>,
    /// `transition[t][p][y]` = P(y_{t-1} = p, y_t = y | x) for `t ≥ 1`;
    /// entry 0 is all zeros.
    pub transition: Vec<[[f64; N_LABELS]; N_LABELS]>,
}

fn forward(weights: &CrfWeights, emissions: &[[f64; N_LABELS]]) -> Vec<[f64; N_LABELS]> {
    let mut alpha = vec![[0.0; N_LABELS]; emissions.len()];
    for y in 0..N_LABELS {
        alpha[0][y] = weights.transition(START, y) + emissions[0][y];
    }
    for t in 1..emissions.len() {
        for y in 0..N_LABELS {
            let terms: [f64; N_LABELS] =
                std::array::from_fn(|p| alpha[t - 1][p] + weights.transition(p, y));
            alpha[t][y] = logsumexp(&terms) + emissions[t][y];
        }
    }
    alpha
}

/// Log partition function only.
pub fn log_partition(weights: &CrfWeights, sentence: &FeaturizedSentence) -> f64 {
    let emissions = weights.emissions(sentence);
    let alpha = forward(weights, &emissions);
    logsumexp(alpha.last().expect("non-empty sentence"))
}

/// Log partition function and posterior marginals.
///
/// # Panics
///
/// On an empty sentence.
pub fn forward_backward(weights: &CrfWeights, sentence: &FeaturizedSentence) -> Marginals {
    assert!(!sentence.is_empty(), "forward_backward on empty sentence");
    let n = sentence.len();
    let emissions = weights.emissions(sentence);
    let alpha = forward(weights, &emissions);
    let log_z = logsumexp(&alpha[n - 1]);

    let mut beta = vec![[0.0; N_LABELS]; n];
    for t in (0..n - 1).rev() {
        for p in 0..N_LABELS {
            let terms: [f64; N_LABELS] = std::array::from_fn(|y| {
                weights.transition(p, y) + emissions[t + 1][y] + beta[t + 1][y]
            });
            beta[t][p] = logsumexp(&terms);
        }
    }

    let state = (0..n)
        .map(|t| std::array::from_fn(|y| (alpha[t][y] + beta[t][y] - log_z).exp()))
        .collect();
    let mut transition = vec![[[0.0; N_LABELS]; N_LABELS]; n];
    for t in 1..n {
        for p in 0..N_LABELS {
            for y in 0..N_LABELS {
                transition[t][p][y] = (alpha[t - 1][p]
                    + weights.transition(p, y)
                    + emissions[t][y]
                    + beta[t][y]
                    - log_z)
                    .exp();
            }
        }
    }
    Marginals {
        log_z,
        state,
        transition,
    }
}

/// Whether decoding may move from `from` (a label index or [`START`]) to `to`.
pub fn transition_allowed(from: usize, to: usize) -> bool {
    !(to == Label::I.index() && (from == START || from == Label::O.index()))
}

/// Highest-scoring label path among those that never enter `I` from the
/// start state or from `O`. Ties prefer the lower label (B < I < O).
pub fn viterbi(weights: &CrfWeights, sentence: &FeaturizedSentence) -> (Vec<Label>, f64) {
    assert!(!sentence.is_empty(), "viterbi on empty sentence");
    let n = sentence.len();
    let emissions = weights.emissions(sentence);
    let masked = |from: usize, to: usize| {
        if transition_allowed(from, to) {
            weights.transition(from, to)
        } else {
            f64::NEG_INFINITY
        }
    };
    let mut delta = vec![[f64::NEG_INFINITY; N_LABELS]; n];
    let mut back = vec![[0usize; N_LABELS]; n];
    for y in 0..N_LABELS {
        delta[0][y] = masked(START, y) + emissions[0][y];
    }
    for t in 1..n {
        for y in 0..N_LABELS {
            let mut best = (f64::NEG_INFINITY, 0);
            for p in 0..N_LABELS {
                let s = delta[t - 1][p] + masked(p, y);
                if s > best.0 {
                    best = (s, p);
                }
            }
            delta[t][y] = best.0 + emissions[t][y];
            back[t][y] = best.1;
        }
    }
    let mut last = 0;
    for y in 1..N_LABELS {
        if delta[n - 1][y] > delta[n - 1][last] {
            last = y;
        }
    }
    let score = delta[n - 1][last];
    let mut path = vec![Label::from_index(last); n];
    let mut y = last;
    for t in (1..n).rev() {
        y = back[t][y];
        path[t - 1] = Label::from_index(y);
    }
    (path, score)
}

/// One training example in featurized form.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingInstance {
    pub sentence: FeaturizedSentence,
    pub gold: Vec<Label>,
}

fn accumulate(
    weights: &CrfWeights,
    instance: &TrainingInstance,
    grad: &mut [f64],
) -> f64 {
    let nf = weights.n_features();
    let m = forward_backward(weights, &instance.sentence);
    let gold_score = weights.path_score(&instance.sentence, &instance.gold);
    let trans_base = nf * N_LABELS;
    for (t, feats) in instance.sentence.positions.iter().enumerate() {
        let g = instance.gold[t].index();
        for &(f, v) in feats {
            if f >= nf {
                continue;
            }
            for y in 0..N_LABELS {
                grad[f * N_LABELS + y] += v * m.state[t][y];
            }
            grad[f * N_LABELS + g] -= v;
        }
        if t == 0 {
            for y in 0..N_LABELS {
                grad[trans_base + START * N_LABELS + y] += m.state[0][y];
            }
            grad[trans_base + START * N_LABELS + g] -= 1.0;
        } else {
            for p in 0..N_LABELS {
                for y in 0..N_LABELS {
                    grad[trans_base + p * N_LABELS + y] += m.transition[t][p][y];
                }
            }
            let gp = instance.gold[t - 1].index();
            grad[trans_base + gp * N_LABELS + g] -= 1.0;
        }
    }
    m.log_z - gold_score
}

/// Regularized negative conditional log-likelihood
/// `Σ (log Z − score(gold)) + λ‖w‖²` and its gradient
/// `E[counts] − gold counts + 2λw`.
///
/// Sentences are processed in fixed partitions in parallel and summed in
/// partition order, so the result is bit-identical across thread counts.
pub fn nll_and_gradient(
    n_features: usize,
    w: &[f64],
    batch: &[TrainingInstance],
    l2_lambda: f64,
) -> (f64, Vec<f64>) {
    let weights = CrfWeights::new(n_features, w);
    let partials: Vec<(f64, Vec<f64>)> = batch
        .par_chunks(PARTITION)
        .map(|chunk| {
            let mut grad = vec![0.0; w.len()];
            let mut obj = 0.0;
            for inst in chunk {
                obj += accumulate(&weights, inst, &mut grad);
            }
            (obj, grad)
        })
        .collect();
    let mut objective = 0.0;
    let mut grad = vec![0.0; w.len()];
    for (o, g) in &partials {
        objective += o;
        for (acc, x) in grad.iter_mut().zip(g) {
            *acc += x;
        }
    }
    if l2_lambda > 0.0 {
        for (g, &wi) in grad.iter_mut().zip(w) {
            objective += l2_lambda * wi * wi;
            *g += 2.0 * l2_lambda * wi;
        }
    }
    (objective, grad)
}
