//! Import SemEval aspect-term XML as an external training corpus.

use revmine::experiments::import_semeval;

fn main() -> revmine::Result<()> {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/semeval_sample.xml");
    let (corpus, log) = import_semeval(path, "laptop")?;
    for span in corpus.annotations() {
        println!("{:<12} {}", span.review_id, corpus.span_text(span));
    }
    println!("{} sentences, {} dropped aspect terms", corpus.len(), log.dropped_fragments);
    Ok(())
}
