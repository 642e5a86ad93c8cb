//! Importer for SemEval-style aspect-term XML (laptop and restaurant reviews).
//!
//! ```xml
//! <sentences>
//!   <sentence id="2339">
//!     <text>I charge it at night.</text>
//!     <aspectTerms><aspectTerm term="charge" from="2" to="8"/></aspectTerms>
//!   </sentence>
//! </sentences>
//! ```
//!
//! Every sentence becomes a one-sentence review whose app and category are
//! the domain name. Offsets count characters. Aspect terms whose offsets do
//! not fall on token boundaries are dropped with a warning.

use std::fs;
use std::path::Path;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::corpus::{tag_missing_pos, AnnotationSpan, Corpus, ImportLog, Review, Sentence, Token, LANGUAGE_KEY};
use crate::error::{Error, Result};

pub const SEMEVAL_ANNOTATOR: &str = "semeval";
/// Placeholder rating; the XML carries none.
const NEUTRAL_RATING: u8 = 3;

/// Splits text into runs of alphanumerics (apostrophes kept inside words)
/// and single punctuation characters. Offsets are character positions.
pub fn tokenize_with_offsets(text: &str) -> Vec<(String, usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric()
                    || (chars[i] == '\'' && i + 1 < chars.len() && chars[i + 1].is_alphanumeric()))
            {
                i += 1;
            }
            out.push((chars[start..i].iter().collect(), start, i));
        } else {
            out.push((c.to_string(), i, i + 1));
            i += 1;
        }
    }
    out
}

struct RawSentence {
    id: String,
    text: String,
    terms: Vec<(String, usize, usize)>,
    line: usize,
}

fn attr(e: &BytesStart, name: &str, line: usize) -> Result<Option<String>> {
    match e.try_get_attribute(name) {
        Ok(Some(a)) => a
            .unescape_value()
            .map(|v| Some(v.into_owned()))
            .map_err(|err| Error::parse(line, format!("attribute `{name}`: {err}"))),
        Ok(None) => Ok(None),
        Err(err) => Err(Error::parse(line, format!("attribute `{name}`: {err}"))),
    }
}

fn parse_sentences(xml: &str) -> Result<Vec<RawSentence>> {
    let mut reader = Reader::from_str(xml);
    let line_at = |pos: u64| xml.as_bytes()[..(pos as usize).min(xml.len())].iter().filter(|&&b| b == b'\n').count() + 1;
    let mut sentences = Vec::new();
    let mut current: Option<RawSentence> = None;
    let mut in_text = false;
    loop {
        let pos = reader.buffer_position();
        let event = reader
            .read_event()
            .map_err(|e| Error::parse(line_at(reader.error_position()), e.to_string()))?;
        let line = line_at(pos);
        match event {
            Event::Start(e) | Event::Empty(e) => match e.name().as_ref() {
                b"sentence" => {
                    let id = attr(&e, "id", line)?.ok_or_else(|| Error::parse(line, "sentence without id"))?;
                    current = Some(RawSentence {
                        id,
                        text: String::new(),
                        terms: Vec::new(),
                        line,
                    });
                }
                b"text" => in_text = true,
                b"aspectTerm" => {
                    let s = current.as_mut().ok_or_else(|| Error::parse(line, "aspectTerm outside sentence"))?;
                    let term = attr(&e, "term", line)?.unwrap_or_default();
                    let offset = |name: &str| -> Result<usize> {
                        attr(&e, name, line)?
                            .ok_or_else(|| Error::parse(line, format!("aspectTerm without `{name}`")))?
                            .parse()
                            .map_err(|_| Error::parse(line, format!("aspectTerm `{name}` is not an offset")))
                    };
                    s.terms.push((term, offset("from")?, offset("to")?));
                }
                _ => {}
            },
            Event::Text(t) if in_text => {
                let text = t.unescape().map_err(|e| Error::parse(line, e.to_string()))?;
                if let Some(s) = current.as_mut() {
                    s.text.push_str(&text);
                }
            }
            Event::CData(t) if in_text => {
                if let Some(s) = current.as_mut() {
                    s.text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::End(e) => match e.name().as_ref() {
                b"text" => in_text = false,
                b"sentence" => sentences.extend(current.take()),
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    Ok(sentences)
}

/// Parses SemEval aspect-term XML into a corpus annotated by
/// [`SEMEVAL_ANNOTATOR`]. Tokens get heuristic POS tags.
pub fn read_semeval(xml: &str, domain: &str) -> Result<(Corpus, ImportLog)> {
    let mut log = ImportLog::default();
    let mut reviews = Vec::new();
    let mut spans = Vec::new();
    for raw in parse_sentences(xml)? {
        let tokens = tokenize_with_offsets(&raw.text);
        if tokens.is_empty() {
            log.warn(format!("line {}: sentence `{}` has no tokens, skipped", raw.line, raw.id));
            continue;
        }
        let review_id = format!("{domain}-{}", raw.id);
        let mut taken: Vec<(usize, usize)> = Vec::new();
        for (term, from, to) in &raw.terms {
            let start = tokens.iter().position(|t| t.1 == *from);
            let end = tokens.iter().position(|t| t.2 == *to).map(|i| i + 1);
            match (start, end) {
                (Some(s), Some(e)) if s < e => {
                    if taken.iter().any(|&(a, b)| s < b && a < e) {
                        log.warn(format!("line {}: aspect `{term}` overlaps an earlier one, dropped", raw.line));
                    } else {
                        taken.push((s, e));
                        spans.push(AnnotationSpan::new(SEMEVAL_ANNOTATOR, review_id.clone(), 0, s, e));
                    }
                }
                _ => {
                    log.dropped_fragments += 1;
                    log.warn(format!(
                        "line {}: aspect `{term}` at {from}..{to} does not align with tokens, dropped",
                        raw.line
                    ));
                }
            }
        }
        reviews.push(Review {
            id: review_id,
            app: domain.to_string(),
            category: domain.to_string(),
            rating: NEUTRAL_RATING,
            sentences: vec![Sentence::new(tokens.into_iter().map(|(t, _, _)| Token::new(t)).collect())],
        });
    }
    let mut corpus = Corpus::new(reviews, spans)?.with_annotators([SEMEVAL_ANNOTATOR]);
    corpus.set_metadata(LANGUAGE_KEY, "en");
    corpus.set_metadata("source", format!("semeval:{domain}"));
    Ok((tag_missing_pos(&corpus)?, log))
}

pub fn import_semeval(path: impl AsRef<Path>, domain: &str) -> Result<(Corpus, ImportLog)> {
    let path = path.as_ref();
    let xml = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_semeval(&xml, domain)
}
