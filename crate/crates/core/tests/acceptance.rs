//! Acceptance gate: one line per criterion, non-zero exit if a hard
//! criterion fails. Criterion 12 is reported but never fails the run.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use revmine::corpus::{load_corpus, stratified_sample, AnnotationSpan, Corpus, Format, Label, Review, Sentence, Stratum};
use revmine::evaluation::{dice_agreement, evaluate_tokens, macro_average, EvalMode, MatchMode, Prf};
use revmine::experiments::{run_experiment, ExperimentConfig, Procedure};
use revmine::guidelines::{length_cutoff_sweep, run_pipeline, Cutoff, PipelineConfig, Step};
use revmine::synth::{overfit_corpus, synthetic_corpus, synthetic_external, SynthConfig};
use revmine::tagger::crf::{log_partition, logsumexp, n_weights, nll_and_gradient, viterbi, CrfWeights, TrainingInstance};
use revmine::tagger::{predict_spans, train, training_sequences, FeatureTemplateConfig, TrainConfig};

const DECODE_TOL: f64 = 1e-8;
const GRAD_STEP: f64 = 1e-5;
const GRAD_REL_TOL: f64 = 1e-4;
/// Denominator floor of the gradient relative error.
const GRAD_FLOOR: f64 = 1e-2;
const MACRO_TOL: f64 = 0.05;

type Outcome = Result<String, String>;

fn within(elapsed: Duration, limit_s: u64, detail: String) -> Outcome {
    if elapsed.as_secs_f64() < limit_s as f64 {
        Ok(format!("{detail}, {:.1}s < {limit_s}s", elapsed.as_secs_f64()))
    } else {
        Err(format!("{detail}, but took {:.1}s (limit {limit_s}s)", elapsed.as_secs_f64()))
    }
}

fn c1_decoding_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_v, mut worst_z) = (0.0f64, 0.0f64);
    let models = 250;
    for _ in 0..models {
        let nf = rng.gen_range(1..8);
        let w = random_weights(&mut rng, n_weights(nf), 3.0);
        let cw = CrfWeights::new(nf, &w);
        for _ in 0..2 {
            let len = rng.gen_range(1..=6);
            let s = random_sentence(&mut rng, nf, len);
            let paths = all_paths(len);
            let scores: Vec<f64> = paths
                .iter()
                .map(|p| cw.path_score(&s, &p.iter().map(|&i| Label::from_index(i)).collect::<Vec<_>>()))
                .collect();
            let best = paths.iter().zip(&scores).filter(|(p, _)| path_valid(p)).map(|(_, &v)| v).fold(f64::NEG_INFINITY, f64::max);
            worst_v = worst_v.max((viterbi(&cw, &s).1 - best).abs());
            worst_z = worst_z.max((log_partition(&cw, &s) - logsumexp(&scores)).abs());
        }
    }
    let detail = format!("{models} models × 2 sentences, max Viterbi error {worst_v:.1e}, max logZ error {worst_z:.1e}");
    if worst_v > DECODE_TOL || worst_z > DECODE_TOL {
        return Err(detail);
    }
    within(start.elapsed(), 30, detail)
}

fn c2_gradient_check() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let nf = 12;
    let (mut checked, mut worst) = (0, 0.0f64);
    for _ in 0..12 {
        let batch: Vec<TrainingInstance> = (0..rng.gen_range(1..=4))
            .map(|_| {
                let len = rng.gen_range(1..=6);
                TrainingInstance {
                    sentence: random_sentence(&mut rng, nf, len),
                    gold: (0..len).map(|_| Label::from_index(rng.gen_range(0..3))).collect(),
                }
            })
            .collect();
        let l2 = rng.gen_range(0.0..2.0);
        let w = random_weights(&mut rng, n_weights(nf), 1.0);
        let (_, g) = nll_and_gradient(nf, &w, &batch, l2);
        for _ in 0..6 {
            let i = rng.gen_range(0..w.len());
            let at = |d: f64| {
                let mut v = w.clone();
                v[i] += d;
                nll_and_gradient(nf, &v, &batch, l2).0
            };
            let fd = (at(GRAD_STEP) - at(-GRAD_STEP)) / (2.0 * GRAD_STEP);
            let rel = (fd - g[i]).abs() / fd.abs().max(g[i].abs()).max(GRAD_FLOOR);
            worst = worst.max(rel);
            checked += 1;
        }
    }
    let detail = format!("{checked} coordinates over 12 instances, max relative error {worst:.1e}");
    if worst > GRAD_REL_TOL {
        return Err(detail);
    }
    within(start.elapsed(), 30, detail)
}

fn c3_overfit() -> Outcome {
    let start = Instant::now();
    let corpus = overfit_corpus();
    let config = TrainConfig {
        max_iterations: 200,
        ..TrainConfig::default()
    };
    let model = train(&training_sequences(&corpus, "gold").map_err(|e| e.to_string())?, &FeatureTemplateConfig::default(), None, &config)
        .map_err(|e| e.to_string())?;
    let pred = predict_spans(&model, &corpus, None).map_err(|e| e.to_string())?;
    let gold: Vec<AnnotationSpan> = corpus.annotations().to_vec();
    let f1 = evaluate_tokens(&corpus, &pred, &gold, MatchMode::Exact).total.f1;
    let detail = format!("exact-token F1 {f1:.3} after {} iterations", model.train_meta.iterations);
    if f1 != 1.0 || model.train_meta.iterations > 200 {
        return Err(detail);
    }
    within(start.elapsed(), 60, detail)
}

fn c4_worked_examples() -> Outcome {
    let corpus = Corpus::new(
        vec![Review {
            id: "r".into(),
            app: "A".into(),
            category: "C".into(),
            rating: 3,
            sentences: vec![Sentence::from_text("i failed to upload video to drive")],
        }],
        vec![],
    )
    .unwrap();
    let gold = [AnnotationSpan::new("g", "r", 0, 2, 5)];
    // (prediction, exact TP?, partial TP?)
    let cases = [
        ((2, 5), true, true),
        ((3, 5), false, true),
        ((4, 5), false, false),
        ((1, 5), false, true),
        ((1, 6), false, false),
    ];
    for ((s, e), exact_tp, partial_tp) in cases {
        let pred = [AnnotationSpan::new("p", "r", 0, s, e)];
        for (mode, want) in [(MatchMode::Exact, exact_tp), (MatchMode::Partial, partial_tp)] {
            let t = evaluate_tokens(&corpus, &pred, &gold, mode).total;
            let got = (t.tp, t.fp);
            let expected = if want { (1, 0) } else { (0, 1) };
            if got != expected {
                return Err(format!("prediction {s}..{e} under {mode:?}: TP/FP {got:?}, expected {expected:?}"));
            }
        }
    }
    Ok("upload video / video / failed to upload video / failed to upload video to, vs gold to upload video".into())
}

fn c5_macro_average() -> Outcome {
    let precisions = [46.0, 26.5, 53.5, 26.5, 43.6, 37.5];
    let prfs: Vec<Prf> = precisions.iter().map(|&p| Prf::new(p / 100.0, 0.1)).collect();
    let avg = 100.0 * macro_average(&prfs).map_err(|e| e.to_string())?.precision;
    let detail = format!("macro precision {avg:.3} vs expected 38.9");
    if (avg - 38.9).abs() <= MACRO_TOL {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c6_dice() -> Outcome {
    let span = |i: usize| AnnotationSpan::new("x", "r", i, 0, 1);
    let a: Vec<_> = (0..4).map(span).collect();
    let b: Vec<_> = (2..8).map(span).collect();
    let disjoint: Vec<_> = (10..13).map(span).collect();
    let values = (dice_agreement(&a, &a), dice_agreement(&a, &disjoint), dice_agreement(&a, &b));
    if values == (1.0, 0.0, 0.4) {
        Ok("identical 1.0, disjoint 0.0, |A|=4 |B|=6 |A∩B|=2 gives 0.4".into())
    } else {
        Err(format!("got {values:?}"))
    }
}

fn c7_simulation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..1000 {
        let corpus = random_corpus(&mut rng, 10);
        let config = PipelineConfig {
            max_len: rng.gen_range(1..=4),
            ..Default::default()
        };
        for step in Step::ALL {
            sim_checks::check_step(&corpus, step, &config).map_err(|e| format!("corpus {i}: {e}"))?;
        }
        let smaller = corpus.retain_spans(|_| rng.gen_bool(0.6));
        sim_checks::check_monotone(&corpus, &smaller, &config).map_err(|e| format!("corpus {i}: {e}"))?;
        let (_, reports) = run_pipeline(&corpus, &config).map_err(|e| e.to_string())?;
        if reports.windows(2).any(|w| w[0].stats_after != w[1].stats_before) {
            return Err(format!("corpus {i}: reports do not chain"));
        }
    }
    let fixture = load_corpus(cli_runs::fixture("synthetic.jsonl"), Format::Jsonl).map_err(|e| e.to_string())?;
    let (sim3, _) = run_pipeline(&fixture, &PipelineConfig::default()).map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    revmine::corpus::write_corpus(&sim3, &mut bytes, Format::Jsonl).map_err(|e| e.to_string())?;
    let golden = std::fs::read(cli_runs::fixture("synthetic_sim3.jsonl")).map_err(|e| e.to_string())?;
    if bytes != golden {
        return Err("Simulation III-3 output differs from the golden corpus".into());
    }
    Ok("1000 random corpora: idempotent, removal-only, monotone, reports consistent; golden corpus identical".into())
}

fn c8_fold_hygiene() -> Outcome {
    let cfg = SynthConfig::default();
    let corpus = synthetic_corpus(&cfg).map_err(|e| e.to_string())?;
    let external = synthetic_external(&cfg, "laptop", 40, 3).map_err(|e| e.to_string())?;
    let ext_ids: BTreeSet<&str> = external.reviews().iter().map(|r| r.id.as_str()).collect();
    let mut folds = 0;
    for p in Procedure::ALL {
        let mut config = ExperimentConfig::new(p, "a1");
        config.train.max_iterations = 40;
        if p.uses_external() {
            config.external_corpora = vec![external.clone()];
        }
        let result = run_experiment(&corpus, &config).map_err(|e| format!("{p}: {e}"))?;
        for f in &result.folds {
            folds += 1;
            let train: BTreeSet<&str> = f.train_review_ids.iter().map(String::as_str).collect();
            let test: BTreeSet<&str> = f.test_review_ids.iter().map(String::as_str).collect();
            let cats = |ids: &BTreeSet<&str>| ids.iter().map(|id| corpus.category_of(id).unwrap_or("?")).collect::<BTreeSet<_>>();
            if !train.is_disjoint(&test) {
                return Err(format!("{p} fold {}: train and test overlap", f.id));
            }
            if !test.is_disjoint(&ext_ids) || test.iter().any(|id| corpus.review(id).is_none()) {
                return Err(format!("{p} fold {}: test contains external reviews", f.id));
            }
            match p {
                Procedure::Ccv | Procedure::CcvExt if cats(&test).len() != 1 || !cats(&train).is_disjoint(&cats(&test)) => {
                    return Err(format!("{p} fold {}: test not a single held-out category", f.id));
                }
                Procedure::Scv | Procedure::ScvExt if cats(&test).len() != 3 => {
                    return Err(format!("{p} fold {}: missing a category", f.id));
                }
                _ => {}
            }
        }
    }
    Ok(format!("5 procedures, {folds} folds on 3 categories × 30 reviews"))
}

fn c9_sampling() -> Outcome {
    let mix = [(5u8, 3000), (4, 4000), (3, 2000), (2, 800), (1, 200)];
    let mut reviews = Vec::new();
    for (rating, n) in mix {
        for i in 0..n {
            reviews.push(Review {
                id: format!("{rating}-{i}"),
                app: "App".into(),
                category: "C".into(),
                rating,
                sentences: vec![Sentence::from_text("ok")],
            });
        }
    }
    reviews.shuffle(&mut ChaCha8Rng::seed_from_u64(9));
    let pool = Corpus::new(reviews, vec![]).map_err(|e| e.to_string())?;
    let sample = stratified_sample(&pool, 100, Stratum::Rating, 42).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = [5u8, 4, 3, 2, 1]
        .iter()
        .map(|&r| sample.reviews().iter().filter(|x| x.rating == r).count())
        .collect();
    if counts == [30, 40, 20, 8, 2] {
        Ok(format!("10000-review pool, per-stratum counts {counts:?}"))
    } else {
        Err(format!("counts {counts:?}"))
    }
}

fn c10_determinism() -> Outcome {
    cli_runs::check_determinism().map(|n| format!("{n} command runs byte-identical across two executions"))
}

fn c11_sweep() -> Outcome {
    let start = Instant::now();
    let fixture = load_corpus(cli_runs::fixture("synthetic.jsonl"), Format::Jsonl).map_err(|e| e.to_string())?;
    let steps = PipelineConfig {
        steps: vec![Step::Preprocess, Step::SelfRefs, Step::Nounless],
        ..Default::default()
    };
    let (filtered, _) = run_pipeline(&fixture, &steps).map_err(|e| e.to_string())?;
    let cutoffs = [Cutoff::Words(1), Cutoff::Words(2), Cutoff::Words(3), Cutoff::Words(4), Cutoff::Unbounded];
    let config = ExperimentConfig::new(Procedure::Ccv, "a1");
    let table = length_cutoff_sweep(&[("synthetic".into(), filtered)], &cutoffs, &config).map_err(|e| e.to_string())?;
    let csv = table.to_csv();
    let out = std::env::temp_dir().join("revmine_acceptance_sweep.csv");
    std::fs::write(&out, &csv).map_err(|e| e.to_string())?;
    if !csv.starts_with("cutoff,mode,min,avg,max") || EvalMode::ALL.iter().any(|&m| table.rows_for(m).count() != 5) {
        return Err("sweep CSV does not have 5 rows per mode".into());
    }
    let avg_inf = table.rows_for(EvalMode::PARTIAL_TYPE).last().map(|r| r.avg).unwrap_or(0.0);
    within(start.elapsed(), 300, format!("5 cutoffs × 4 modes written to {}, partial-type F1 at ∞ {avg_inf:.3}", out.display()))
}

/// Soft check; returns the message and whether the trend held.
fn c12_trend() -> (String, bool) {
    let cfg = SynthConfig {
        categories: 4,
        reviews_per_category: 40,
        ..SynthConfig::default()
    };
    let corpus = match synthetic_corpus(&cfg) {
        Ok(c) => c,
        Err(e) => return (e.to_string(), false),
    };
    let f1 = |p: Procedure| {
        run_experiment(&corpus, &ExperimentConfig::new(p, "a1"))
            .map(|r| (r.aggregate_for(EvalMode::EXACT_TOKEN).f1, r.aggregate_for(EvalMode::PARTIAL_TYPE).f1))
    };
    match (f1(Procedure::AppCat), f1(Procedure::Ccv)) {
        (Ok(app), Ok(ccv)) => {
            let holds = app.1 < ccv.1;
            (
                format!(
                    "appCat macro F1 {:.3} (exact tokens) / {:.3} (partial types), CCV {:.3} / {:.3}; appCat lower: {}",
                    app.0, app.1, ccv.0, ccv.1, holds
                ),
                holds,
            )
        }
        (Err(e), _) | (_, Err(e)) => (e.to_string(), false),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 decoding oracle", c1_decoding_oracle),
        ("2 gradient check", c2_gradient_check),
        ("3 overfit", c3_overfit),
        ("4 evaluation semantics", c4_worked_examples),
        ("5 macro-average arithmetic", c5_macro_average),
        ("6 Dice properties", c6_dice),
        ("7 simulation pipeline", c7_simulation),
        ("8 fold hygiene", c8_fold_hygiene),
        ("9 stratified sampling", c9_sampling),
        ("10 CLI determinism", c10_determinism),
        ("11 cutoff sweep", c11_sweep),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name}: {detail}");
            }
        }
    }
    let (detail, holds) = c12_trend();
    println!("{}  criterion 12 trend (soft, not asserted): {detail}", if holds { "PASS" } else { "SOFT" });
    println!("acceptance: {} of 11 hard criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
