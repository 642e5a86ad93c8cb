mod common;

use common::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use revmine::corpus::Label;
use revmine::tagger::crf::{log_partition, logsumexp, n_weights, nll_and_gradient, viterbi, CrfWeights, TrainingInstance};
use revmine::tagger::forward_backward;

fn labels(p: &[usize]) -> Vec<Label> {
    p.iter().map(|&i| Label::from_index(i)).collect()
}

#[test]
fn viterbi_and_partition_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let nf = rng.gen_range(1..6);
        let w = random_weights(&mut rng, n_weights(nf), 2.0);
        let cw = CrfWeights::new(nf, &w);
        let len = rng.gen_range(1..=5);
        let s = random_sentence(&mut rng, nf, len);
        let paths = all_paths(len);
        let scores: Vec<f64> = paths.iter().map(|p| cw.path_score(&s, &labels(p))).collect();
        assert!((log_partition(&cw, &s) - logsumexp(&scores)).abs() < 1e-9);
        let best = paths
            .iter()
            .zip(&scores)
            .filter(|(p, _)| path_valid(p))
            .map(|(_, &v)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        let (path, score) = viterbi(&cw, &s);
        assert!((score - best).abs() < 1e-9);
        assert!((cw.path_score(&s, &path) - score).abs() < 1e-9);
        assert!(path_valid(&path.iter().map(|l| l.index()).collect::<Vec<_>>()));
    }
}

#[test]
fn marginals_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let nf = 4;
        let w = random_weights(&mut rng, n_weights(nf), 1.5);
        let cw = CrfWeights::new(nf, &w);
        let len = rng.gen_range(1..=4);
        let s = random_sentence(&mut rng, nf, len);
        let m = forward_backward(&cw, &s);
        let paths = all_paths(len);
        let scores: Vec<f64> = paths.iter().map(|p| cw.path_score(&s, &labels(p))).collect();
        let z = logsumexp(&scores);
        for t in 0..len {
            for y in 0..3 {
                let p: f64 = paths.iter().zip(&scores).filter(|(p, _)| p[t] == y).map(|(_, v)| (v - z).exp()).sum();
                assert!((m.state[t][y] - p).abs() < 1e-9);
            }
            if t > 0 {
                for a in 0..3 {
                    for b in 0..3 {
                        let p: f64 = paths
                            .iter()
                            .zip(&scores)
                            .filter(|(p, _)| p[t - 1] == a && p[t] == b)
                            .map(|(_, v)| (v - z).exp())
                            .sum();
                        assert!((m.transition[t][a][b] - p).abs() < 1e-9);
                    }
                }
            }
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let nf = 6;
    let batch: Vec<TrainingInstance> = (0..5)
        .map(|_| {
            let len = rng.gen_range(1..=5);
            TrainingInstance {
                sentence: random_sentence(&mut rng, nf, len),
                gold: (0..len).map(|_| Label::from_index(rng.gen_range(0..3))).collect(),
            }
        })
        .collect();
    let w = random_weights(&mut rng, n_weights(nf), 1.0);
    let (_, g) = nll_and_gradient(nf, &w, &batch, 0.3);
    let h = 1e-5;
    for i in 0..w.len() {
        let mut plus = w.clone();
        plus[i] += h;
        let mut minus = w.clone();
        minus[i] -= h;
        let fd = (nll_and_gradient(nf, &plus, &batch, 0.3).0 - nll_and_gradient(nf, &minus, &batch, 0.3).0) / (2.0 * h);
        assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + fd.abs()), "coordinate {i}: {fd} vs {}", g[i]);
    }
}

#[test]
fn gradient_independent_of_threads() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let nf = 8;
    let batch: Vec<TrainingInstance> = (0..300)
        .map(|_| {
            let len = rng.gen_range(1..=6);
            TrainingInstance {
                sentence: random_sentence(&mut rng, nf, len),
                gold: (0..len).map(|_| Label::from_index(rng.gen_range(0..3))).collect(),
            }
        })
        .collect();
    let w = random_weights(&mut rng, n_weights(nf), 1.0);
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = one.install(|| nll_and_gradient(nf, &w, &batch, 1.0));
    let b = four.install(|| nll_and_gradient(nf, &w, &batch, 1.0));
    assert_eq!(a.0.to_bits(), b.0.to_bits());
    assert!(a.1.iter().zip(&b.1).all(|(x, y)| x.to_bits() == y.to_bits()));
}
