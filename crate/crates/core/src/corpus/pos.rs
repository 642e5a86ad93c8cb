//! Heuristic Penn-style POS tagger for corpora that arrive untagged.
//!
//! Rules, first match wins:
//!
//! 1. closed-class lexicon (determiners, prepositions, pronouns, modals,
//!    auxiliaries, conjunctions, common adverbs)
//! 2. numbers → `CD`; pure punctuation → `.` for `.!?`, `,` otherwise
//! 3. after `TO` or a modal → `VB`
//! 4. suffixes: `-ing` → `VBG`, `-ed` → `VBD`, `-ly` → `RB`,
//!    adjective suffixes (`-ous -ful -able -ible -ive -less -ic -al`) → `JJ`
//! 5. plural: ends in `s` but not `ss`/`us`/`is` → `NNS`
//! 6. capitalized word not in sentence-initial position → `NNP`
//! 7. otherwise `NN`
//!
//! Tokens that already carry a tag are left alone.

use super::{Corpus, Sentence};
use crate::error::Result;

const LEXICON: &[(&str, &str)] = &[
    ("the", "DT"), ("a", "DT"), ("an", "DT"), ("this", "DT"), ("that", "DT"),
    ("these", "DT"), ("those", "DT"), ("every", "DT"), ("each", "DT"), ("some", "DT"),
    ("any", "DT"), ("no", "DT"), ("all", "DT"),
    ("to", "TO"),
    ("in", "IN"), ("on", "IN"), ("at", "IN"), ("of", "IN"), ("for", "IN"), ("with", "IN"),
    ("by", "IN"), ("from", "IN"), ("about", "IN"), ("into", "IN"), ("after", "IN"),
    ("before", "IN"), ("since", "IN"), ("because", "IN"), ("if", "IN"), ("while", "IN"),
    ("during", "IN"), ("without", "IN"), ("than", "IN"), ("like", "IN"),
    ("and", "CC"), ("or", "CC"), ("but", "CC"), ("nor", "CC"),
    ("i", "PRP"), ("you", "PRP"), ("he", "PRP"), ("she", "PRP"), ("it", "PRP"),
    ("we", "PRP"), ("they", "PRP"), ("me", "PRP"), ("him", "PRP"), ("her", "PRP$"),
    ("us", "PRP"), ("them", "PRP"),
    ("my", "PRP$"), ("your", "PRP$"), ("his", "PRP$"), ("its", "PRP$"), ("our", "PRP$"),
    ("their", "PRP$"),
    ("can", "MD"), ("could", "MD"), ("will", "MD"), ("would", "MD"), ("should", "MD"),
    ("may", "MD"), ("might", "MD"), ("must", "MD"), ("shall", "MD"),
    ("is", "VBZ"), ("are", "VBP"), ("am", "VBP"), ("was", "VBD"), ("were", "VBD"),
    ("be", "VB"), ("been", "VBN"), ("being", "VBG"),
    ("has", "VBZ"), ("have", "VBP"), ("had", "VBD"),
    ("do", "VBP"), ("does", "VBZ"), ("did", "VBD"),
    ("not", "RB"), ("n't", "RB"), ("very", "RB"), ("too", "RB"), ("also", "RB"),
    ("just", "RB"), ("really", "RB"), ("so", "RB"), ("always", "RB"), ("never", "RB"),
    ("now", "RB"), ("again", "RB"), ("still", "RB"),
    ("what", "WP"), ("who", "WP"), ("which", "WDT"), ("when", "WRB"), ("where", "WRB"),
    ("how", "WRB"), ("why", "WRB"),
    ("there", "EX"),
    ("great", "JJ"), ("good", "JJ"), ("bad", "JJ"), ("nice", "JJ"), ("slow", "JJ"),
    ("fast", "JJ"), ("new", "JJ"), ("easy", "JJ"), ("best", "JJS"), ("better", "JJR"),
];

const ADJ_SUFFIXES: &[&str] = &["ous", "ful", "able", "ible", "ive", "less", "ic", "al"];

fn lookup(lower: &str) -> Option<&'static str> {
    LEXICON.iter().find(|(w, _)| *w == lower).map(|(_, t)| *t)
}

fn guess(word: &str, position: usize, prev: Option<&str>) -> &'static str {
    let lower = word.to_lowercase();
    if let Some(tag) = lookup(&lower) {
        return tag;
    }
    if word.chars().all(|c| c.is_ascii_digit() || c == '.' || c == ',')
        && word.chars().any(|c| c.is_ascii_digit())
    {
        return "CD";
    }
    if word.chars().all(|c| !c.is_alphanumeric()) {
        return if matches!(word, "." | "!" | "?") { "." } else { "," };
    }
    if matches!(prev, Some("TO") | Some("MD")) {
        return "VB";
    }
    let n = lower.chars().count();
    if n > 4 && lower.ends_with("ing") {
        return "VBG";
    }
    if n > 3 && lower.ends_with("ed") {
        return "VBD";
    }
    if n > 3 && lower.ends_with("ly") {
        return "RB";
    }
    if n > 4 && ADJ_SUFFIXES.iter().any(|s| lower.ends_with(s)) {
        return "JJ";
    }
    if n > 2 && lower.ends_with('s') && !["ss", "us", "is"].iter().any(|s| lower.ends_with(s)) {
        return "NNS";
    }
    if position > 0 && word.chars().next().is_some_and(char::is_uppercase) {
        return "NNP";
    }
    "NN"
}

/// Tags for every token of `sentence`; existing tags are returned unchanged
/// and also feed the `TO`/modal context rule.
pub fn fallback_pos_tag(sentence: &Sentence) -> Vec<String> {
    let mut tags: Vec<String> = Vec::with_capacity(sentence.len());
    for (i, token) in sentence.tokens.iter().enumerate() {
        let tag = match &token.pos {
            Some(t) => t.clone(),
            None => {
                let prev = tags.last().map(String::as_str);
                guess(&token.text, i, prev).to_string()
            }
        };
        tags.push(tag);
    }
    tags
}

/// Copy of `corpus` where every untagged token received a fallback tag.
pub fn tag_missing_pos(corpus: &Corpus) -> Result<Corpus> {
    corpus.map_sentences(|s| {
        let tags = fallback_pos_tag(s);
        let mut out = s.clone();
        for (t, tag) in out.tokens.iter_mut().zip(tags) {
            t.pos = Some(tag);
        }
        out
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Token;

    fn tags(text: &str) -> Vec<String> {
        fallback_pos_tag(&Sentence::from_text(text))
    }

    #[test]
    fn rule_table() {
        assert_eq!(tags("videos"), ["NNS"]);
        assert_eq!(tags("the"), ["DT"]);
        assert_eq!(tags("I want to upload videos quickly"), ["PRP", "NN", "TO", "VB", "NNS", "RB"]);
        assert_eq!(tags("Loving the Dropbox sync"), ["VBG", "DT", "NNP", "NN"]);
        assert_eq!(tags("3 crashes !"), ["CD", "NNS", "."]);
        assert_eq!(tags("useful status"), ["JJ", "NN"]);
    }

    #[test]
    fn existing_tags_untouched() {
        let s = Sentence::new(vec![Token::tagged("upload", "VB"), Token::new("photos")]);
        assert_eq!(fallback_pos_tag(&s), ["VB", "NNS"]);
    }
}
