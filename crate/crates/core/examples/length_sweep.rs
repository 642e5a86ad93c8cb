//! Feature-length cutoff sweep: cap feature length, rerun cross-category
//! validation and collect min/avg/max F1 across datasets.

use revmine::experiments::{ExperimentConfig, Procedure};
use revmine::guidelines::{length_cutoff_sweep, run_pipeline, Cutoff, PipelineConfig, Step};
use revmine::synth::{synthetic_corpus, SynthConfig};

fn main() -> revmine::Result<()> {
    let until_nouns = PipelineConfig {
        steps: vec![Step::Preprocess, Step::SelfRefs, Step::Nounless],
        ..PipelineConfig::default()
    };
    let mut datasets = Vec::new();
    for seed in [1, 2, 3] {
        let raw = synthetic_corpus(&SynthConfig {
            seed,
            ..SynthConfig::default()
        })?;
        datasets.push((format!("synthetic{seed}"), run_pipeline(&raw, &until_nouns)?.0));
    }
    let cutoffs: Vec<Cutoff> = ["1", "2", "3", "4", "inf"].iter().map(|c| c.parse()).collect::<revmine::Result<_>>()?;
    let table = length_cutoff_sweep(&datasets, &cutoffs, &ExperimentConfig::new(Procedure::Ccv, "a1"))?;
    print!("{}", table.to_csv());
    Ok(())
}
