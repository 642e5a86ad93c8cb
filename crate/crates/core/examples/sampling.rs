//! Rating-stratified sampling with largest-remainder apportionment.

use revmine::corpus::{largest_remainder, stratified_sample, Stratum};
use revmine::synth::{synthetic_corpus, SynthConfig};

fn main() -> revmine::Result<()> {
    println!("100 from strata [300, 400, 200, 80, 20]: {:?}", largest_remainder(100, &[300, 400, 200, 80, 20]));

    let pool = synthetic_corpus(&SynthConfig {
        reviews_per_category: 200,
        ..SynthConfig::default()
    })?;
    let sample = stratified_sample(&pool, 25, Stratum::Rating, 42)?;
    for app in sample.apps() {
        let mut counts = [0; 5];
        for r in sample.reviews().iter().filter(|r| r.app == app) {
            counts[5 - r.rating as usize] += 1;
        }
        println!("{app:<16} 5★..1★ {counts:?}");
    }
    Ok(())
}
