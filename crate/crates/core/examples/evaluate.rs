//! The four evaluation modes on a small example, plus Dice agreement.

use revmine::corpus::{AnnotationSpan, Corpus, Review, Sentence};
use revmine::evaluation::{dice_agreement, evaluate_all, Language};

fn main() -> revmine::Result<()> {
    let corpus = Corpus::new(
        vec![Review {
            id: "r1".into(),
            app: "Vidly".into(),
            category: "Video".into(),
            rating: 2,
            sentences: vec![
                Sentence::from_text("it failed to upload video to drive"),
                Sentence::from_text("uploading videos is slow"),
            ],
        }],
        vec![],
    )?;
    let gold = vec![AnnotationSpan::new("gold", "r1", 0, 2, 5), AnnotationSpan::new("gold", "r1", 1, 0, 2)];
    let pred = vec![AnnotationSpan::new("model", "r1", 0, 3, 5), AnnotationSpan::new("model", "r1", 1, 1, 2)];
    for report in evaluate_all(&corpus, &pred, &gold, Language::English) {
        let t = &report.total;
        println!("{:<14} tp={} fp={} fn={} f1={:.2}", report.mode.title(), t.tp, t.fp, t.fn_, t.f1);
    }
    println!("Dice(gold, model) = {:.2}", dice_agreement(&gold, &pred));
    Ok(())
}
