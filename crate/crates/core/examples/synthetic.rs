//! Generate a seeded synthetic review corpus and write it as JSONL.

use revmine::corpus::{write_corpus, Format};
use revmine::synth::{synthetic_corpus, SynthConfig};

fn main() -> revmine::Result<()> {
    let cfg = SynthConfig {
        categories: 2,
        reviews_per_category: 4,
        noise_rate: 0.5,
        ..SynthConfig::default()
    };
    for c in 0..cfg.categories {
        println!("{}: {:?}", cfg.category_names()[c], cfg.inventory(c));
    }
    let corpus = synthetic_corpus(&cfg)?;
    let mut out = std::io::stdout().lock();
    write_corpus(&corpus, &mut out, Format::Jsonl)
}
