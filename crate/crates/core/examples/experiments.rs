//! Compare the training procedures on a synthetic corpus and print the
//! per-category and per-procedure reports.

use revmine::experiments::{emit_report, run_experiment, ExperimentConfig, Procedure, ReportFormat};
use revmine::synth::{synthetic_corpus, synthetic_external, SynthConfig};

fn main() -> revmine::Result<()> {
    let cfg = SynthConfig {
        categories: 4,
        reviews_per_category: 40,
        ..SynthConfig::default()
    };
    let corpus = synthetic_corpus(&cfg)?;
    let external = synthetic_external(&cfg, "laptop", 200, 7)?;

    let mut results = Vec::new();
    for procedure in Procedure::ALL {
        let mut config = ExperimentConfig::new(procedure, "a1");
        config.jobs = 4;
        if procedure.uses_external() {
            config.external_corpora = vec![external.clone()];
        }
        results.push(run_experiment(&corpus, &config)?);
    }
    print!("{}", emit_report(&results[..1], ReportFormat::Markdown)?);
    println!();
    print!("{}", emit_report(&results, ReportFormat::Markdown)?);
    Ok(())
}
