//! Load the synthetic fixture, print its statistics, look at BIO labels and
//! convert it to CoNLL.

use revmine::corpus::{bio_encode, compute_stats, load_corpus, read_corpus, write_corpus, Format};
use revmine::evaluation::{type_key, Language};

fn main() -> revmine::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/synthetic.jsonl");
    let corpus = load_corpus(path, Format::Jsonl)?;
    println!("{} reviews, {} sentences, annotators {:?}", corpus.len(), corpus.n_sentences(), corpus.annotator_ids());

    let stats = compute_stats(&corpus, Some("a1"), |w| type_key(w, Language::English))?;
    for (category, s) in &stats.per_category {
        println!("{category:<14} tokens={:>3} types={:>3} ttr={:.2}", s.feature_tokens, s.feature_types, s.type_token_ratio);
    }

    let review = &corpus.reviews()[0];
    let labels = &bio_encode(&corpus, "a1")?[0].labels;
    for (token, label) in review.sentences[0].tokens.iter().zip(labels) {
        print!("{}/{} ", token.text, label);
    }
    println!();

    let mut conll = Vec::new();
    write_corpus(&corpus, &mut conll, Format::Conll)?;
    let (back, _) = read_corpus(&conll[..], Format::Conll)?;
    assert_eq!(back, corpus);
    println!("CoNLL round trip ok ({} bytes)", conll.len());
    Ok(())
}
