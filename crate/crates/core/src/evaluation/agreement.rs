use std::collections::BTreeSet;

use crate::corpus::AnnotationSpan;

/// Dice coefficient `2|A∩B| / (|A|+|B|)` over span positions (review,
/// sentence, start, end); annotator ids are ignored. Two empty sets agree
/// fully.
pub fn dice_agreement(a: &[AnnotationSpan], b: &[AnnotationSpan]) -> f64 {
    let a: BTreeSet<_> = a.iter().map(AnnotationSpan::location).collect();
    let b: BTreeSet<_> = b.iter().map(AnnotationSpan::location).collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    2.0 * a.intersection(&b).count() as f64 / (a.len() + b.len()) as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spans(who: &str, starts: &[usize]) -> Vec<AnnotationSpan> {
        starts.iter().map(|&s| AnnotationSpan::new(who, "r", 0, s, s + 1)).collect()
    }

    #[test]
    fn dice_cases() {
        assert_eq!(dice_agreement(&spans("a", &[1, 2]), &spans("b", &[1, 2])), 1.0);
        assert_eq!(dice_agreement(&spans("a", &[0, 1, 2]), &spans("b", &[3, 4, 5, 6, 7])), 0.0);
        assert_eq!(dice_agreement(&spans("a", &[0, 1, 2, 3]), &spans("b", &[2, 3, 4, 5, 6, 7])), 0.4);
        assert_eq!(dice_agreement(&[], &[]), 1.0);
        assert_eq!(dice_agreement(&spans("a", &[0]), &[]), 0.0);
    }
}
