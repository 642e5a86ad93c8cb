mod common;

use common::random_corpus;
use common::sim_checks::{check_monotone, check_step};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use revmine::guidelines::{run_pipeline, PipelineConfig, Step};

proptest! {
    #[test]
    fn steps_are_removal_only_and_idempotent(seed in any::<u64>(), max_len in 1usize..5) {
        let corpus = random_corpus(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        let config = PipelineConfig { max_len, ..Default::default() };
        for step in Step::ALL {
            prop_assert_eq!(check_step(&corpus, step, &config), Ok(()));
        }
    }

    #[test]
    fn pipeline_chains_reports(seed in any::<u64>()) {
        let corpus = random_corpus(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        let (out, reports) = run_pipeline(&corpus, &PipelineConfig::default()).unwrap();
        prop_assert_eq!(reports.len(), 4);
        for pair in reports.windows(2) {
            prop_assert_eq!(&pair[0].stats_after, &pair[1].stats_before);
        }
        let removed: usize = reports.iter().map(|r| r.spans_removed).sum();
        prop_assert_eq!(removed, corpus.annotations().len() - out.annotations().len());
        for span in out.annotations() {
            prop_assert!(span.len() <= 3);
        }
    }

    #[test]
    fn monotone_under_span_subsets(seed in any::<u64>(), keep in any::<u64>()) {
        let corpus = random_corpus(&mut ChaCha8Rng::seed_from_u64(seed), 8);
        let mut bit = 0u32;
        let smaller = corpus.retain_spans(|_| { bit = (bit + 1) % 64; keep >> bit & 1 == 1 });
        prop_assert_eq!(check_monotone(&corpus, &smaller, &PipelineConfig::default()), Ok(()));
    }
}
