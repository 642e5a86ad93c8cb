//! Train a CRF, save and reload it, and tag new sentences.

use revmine::corpus::{bio_decode, load_corpus, Format, Sentence};
use revmine::tagger::{load_model, save_model, train, training_sequences, FeatureTemplateConfig, TrainConfig};

fn main() -> revmine::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic_sim3.jsonl");
    let corpus = load_corpus(path, Format::Jsonl)?;
    let sequences = training_sequences(&corpus, "a1")?;
    let model = train(&sequences, &FeatureTemplateConfig::default(), None, &TrainConfig::default())?;
    println!(
        "{} features, {} iterations, objective {:.3}",
        model.n_features(),
        model.train_meta.iterations,
        model.train_meta.final_objective
    );

    let file = std::env::temp_dir().join("revmine_example_model.json");
    save_model(&model, &file)?;
    let model = load_model(&file)?;

    for text in ["I/PRP love/VBP the/DT hotel/NN booking/NN ./.", "Please/UH fix/VB the/DT leaderboard/NN ./."] {
        let sentence = Sentence::from_tagged(text);
        let labels = model.tag(&sentence, None)?;
        let words: Vec<&str> = sentence.words().collect();
        let found: Vec<String> = bio_decode(&labels).into_iter().map(|(s, e)| words[s..e].join(" ")).collect();
        println!("{text}\n  -> {found:?}");
    }
    Ok(())
}
