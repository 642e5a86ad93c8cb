//! Apply the guideline simulation steps and print what each one removed.

use revmine::corpus::{load_corpus, Format};
use revmine::guidelines::{removal_table_markdown, run_pipeline, PipelineConfig};

fn main() -> revmine::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic.jsonl");
    let corpus = load_corpus(path, Format::Jsonl)?;
    let (simulated, reports) = run_pipeline(&corpus, &PipelineConfig::default())?;
    print!("{}", removal_table_markdown(&reports));
    for report in &reports {
        for removed in report.removed_examples.iter().take(2) {
            println!("{:<11} {:<40} {}", report.step_name, removed.text, removed.reason);
        }
    }
    println!("{} reviews and {} features remain", simulated.len(), simulated.annotations().len());
    Ok(())
}
