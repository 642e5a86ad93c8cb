//! JSON Lines and CoNLL-style TSV readers and writers.
//!
//! JSONL is the canonical format: one review per line,
//!
//! ```text
//! {"id":"r1","app":"Dropbox","category":"Productivity","rating":4,
//!  "sentences":[{"tokens":[{"t":"sync","pos":"NN"}]}],
//!  "annotations":[{"annotator":"a1","sentence":0,"start":0,"end":1}]}
//! ```
//!
//! An optional first line `{"meta":{...},"annotators":[...]}` carries corpus
//! metadata and annotator ids that have no spans. An annotation may give
//! `"tokens":[i,j,..]` instead of `start`/`end`; fragmented position lists
//! are dropped and counted in the [`ImportLog`].
//!
//! CoNLL TSV has columns `TOKEN POS BIO...` (one BIO column per annotator
//! named in the review header), `_` for a missing POS, a blank line after
//! every sentence and a comment line opening every review:
//!
//! ```text
//! #review id=r1 app=Dropbox category=Productivity rating=4 annotator=a1
//! ```
//!
//! Optional leading `#meta k=v ...` and `#annotators a,b` lines carry corpus
//! metadata and the full annotator list. Header values are percent-escaped for space, tab, newline, `%` and `,`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::bio::{bio_decode, bio_encode, Label};
use super::{AnnotationSpan, Corpus, Review, Sentence, Token};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Jsonl,
    Conll,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" | "json" => Ok(Format::Jsonl),
            "conll" | "tsv" => Ok(Format::Conll),
            other => Err(Error::Config(format!("unknown corpus format `{other}`"))),
        }
    }
}

impl Format {
    /// Guesses from the file extension, defaulting to JSONL.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("conll") | Some("tsv") => Format::Conll,
            _ => Format::Jsonl,
        }
    }
}

/// Repairs and drops performed while importing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ImportLog {
    /// `I` labels that opened a span (after `O` or at position 0).
    pub repaired_bio: usize,
    /// Non-consecutive annotations that were dropped.
    pub dropped_fragments: usize,
    pub warnings: Vec<String>,
}

impl ImportLog {
    pub(crate) fn warn(&mut self, msg: String) {
        log::warn!("{msg}");
        self.warnings.push(msg);
    }
}

pub fn load_corpus(path: impl AsRef<Path>, format: Format) -> Result<Corpus> {
    load_corpus_with_log(path, format).map(|(c, _)| c)
}

pub fn load_corpus_with_log(path: impl AsRef<Path>, format: Format) -> Result<(Corpus, ImportLog)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file), format)
}

pub fn read_corpus<R: Read>(reader: R, format: Format) -> Result<(Corpus, ImportLog)> {
    let reader = BufReader::new(reader);
    match format {
        Format::Jsonl => read_jsonl(reader),
        Format::Conll => read_conll(reader),
    }
}

pub fn save_corpus(corpus: &Corpus, path: impl AsRef<Path>, format: Format) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_corpus(corpus, &mut w, format).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_corpus<W: Write>(corpus: &Corpus, w: &mut W, format: Format) -> Result<()> {
    match format {
        Format::Jsonl => write_jsonl(corpus, w),
        Format::Conll => write_conll(corpus, w),
    }
}

// ---------------------------------------------------------------------------
// JSONL

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonToken {
    t: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pos: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSentence {
    tokens: Vec<JsonToken>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonAnnotation {
    annotator: String,
    sentence: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    end: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tokens: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonReview {
    id: String,
    app: String,
    category: String,
    rating: u8,
    sentences: Vec<JsonSentence>,
    #[serde(default)]
    annotations: Vec<JsonAnnotation>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonHeader {
    meta: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    annotators: Vec<String>,
}

fn read_jsonl<R: BufRead>(reader: R) -> Result<(Corpus, ImportLog)> {
    let mut log = ImportLog::default();
    let mut reviews = Vec::new();
    let mut spans = Vec::new();
    let mut header: Option<JsonHeader> = None;
    let mut seen_content = false;
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if !seen_content && trimmed.starts_with("{\"meta\"") {
            let h: JsonHeader =
                serde_json::from_str(trimmed).map_err(|e| Error::parse(lineno, e.to_string()))?;
            header = Some(h);
            seen_content = true;
            continue;
        }
        seen_content = true;
        let jr: JsonReview =
            serde_json::from_str(trimmed).map_err(|e| Error::parse(lineno, e.to_string()))?;
        for a in jr.annotations {
            let range = match (a.start, a.end, a.tokens) {
                (Some(s), Some(e), None) => Some((s, e)),
                (None, None, Some(mut positions)) => {
                    positions.sort_unstable();
                    positions.dedup();
                    let consecutive = !positions.is_empty()
                        && positions.windows(2).all(|w| w[1] == w[0] + 1);
                    if consecutive {
                        Some((positions[0], positions[positions.len() - 1] + 1))
                    } else {
                        log.dropped_fragments += 1;
                        log.warn(format!(
                            "line {lineno}: dropped non-consecutive annotation {:?} of `{}` in review `{}`",
                            positions, a.annotator, jr.id
                        ));
                        None
                    }
                }
                _ => {
                    return Err(Error::parse(
                        lineno,
                        "annotation needs either start/end or tokens",
                    ))
                }
            };
            if let Some((start, end)) = range {
                spans.push(AnnotationSpan::new(a.annotator, jr.id.clone(), a.sentence, start, end));
            }
        }
        reviews.push(Review {
            id: jr.id,
            app: jr.app,
            category: jr.category,
            rating: jr.rating,
            sentences: jr
                .sentences
                .into_iter()
                .map(|s| Sentence {
                    tokens: s
                        .tokens
                        .into_iter()
                        .map(|t| Token { text: t.t, pos: t.pos })
                        .collect(),
                })
                .collect(),
        });
    }
    let mut corpus = Corpus::new(reviews, spans)?;
    if let Some(h) = header {
        corpus = corpus.with_annotators(h.annotators).with_metadata(h.meta);
    }
    Ok((corpus, log))
}

fn write_jsonl<W: Write>(corpus: &Corpus, w: &mut W) -> Result<()> {
    let io = |e| Error::io("<writer>", e);
    let spanless: Vec<String> = corpus
        .annotator_ids()
        .iter()
        .filter(|a| !corpus.annotations().iter().any(|s| &s.annotator == *a))
        .cloned()
        .collect();
    if !corpus.metadata().is_empty() || !spanless.is_empty() {
        let header = JsonHeader {
            meta: corpus.metadata().clone(),
            annotators: spanless,
        };
        serde_json::to_writer(&mut *w, &header)?;
        w.write_all(b"\n").map_err(io)?;
    }
    let mut spans = corpus.annotations().iter().peekable();
    for review in corpus.reviews() {
        let mut annotations = Vec::new();
        while let Some(s) = spans.next_if(|s| s.review_id == review.id) {
            annotations.push(JsonAnnotation {
                annotator: s.annotator.clone(),
                sentence: s.sentence,
                start: Some(s.start),
                end: Some(s.end),
                tokens: None,
            });
        }
        let jr = JsonReview {
            id: review.id.clone(),
            app: review.app.clone(),
            category: review.category.clone(),
            rating: review.rating,
            sentences: review
                .sentences
                .iter()
                .map(|s| JsonSentence {
                    tokens: s
                        .tokens
                        .iter()
                        .map(|t| JsonToken {
                            t: t.text.clone(),
                            pos: t.pos.clone(),
                        })
                        .collect(),
                })
                .collect(),
            annotations,
        };
        serde_json::to_writer(&mut *w, &jr)?;
        w.write_all(b"\n").map_err(io)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// CoNLL

fn escape(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '%' => out.push_str("%25"),
            ' ' => out.push_str("%20"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            ',' => out.push_str("%2C"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(value: &str, line: usize) -> Result<String> {
    let mut out = String::with_capacity(value.len());
    let mut rest = value;
    while let Some(i) = rest.find('%') {
        out.push_str(&rest[..i]);
        let code = rest
            .get(i + 1..i + 3)
            .ok_or_else(|| Error::parse(line, format!("truncated escape in `{value}`")))?;
        let byte = u8::from_str_radix(code, 16)
            .map_err(|_| Error::parse(line, format!("bad escape `%{code}`")))?;
        out.push(byte as char);
        rest = &rest[i + 3..];
    }
    out.push_str(rest);
    Ok(out)
}

fn parse_fields(rest: &str, line: usize) -> Result<BTreeMap<String, String>> {
    let mut fields = BTreeMap::new();
    for item in rest.split_whitespace() {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::parse(line, format!("expected key=value, got `{item}`")))?;
        fields.insert(k.to_string(), unescape(v, line)?);
    }
    Ok(fields)
}

struct PendingReview {
    review: Review,
    annotators: Vec<String>,
    line: usize,
}

fn read_conll<R: BufRead>(reader: R) -> Result<(Corpus, ImportLog)> {
    let mut log = ImportLog::default();
    let mut reviews = Vec::new();
    let mut spans = Vec::new();
    let mut metadata = BTreeMap::new();
    let mut annotators_seen: Vec<String> = Vec::new();
    let mut current: Option<PendingReview> = None;
    // token rows of the sentence being read: (token, labels per annotator)
    let mut rows: Vec<(Token, Vec<Label>)> = Vec::new();

    let flush_sentence = |current: &mut Option<PendingReview>,
                              rows: &mut Vec<(Token, Vec<Label>)>,
                              spans: &mut Vec<AnnotationSpan>,
                              log: &mut ImportLog| {
        if rows.is_empty() {
            return;
        }
        let pending = current.as_mut().expect("rows only collected inside a review");
        let si = pending.review.sentences.len();
        for (ai, annotator) in pending.annotators.iter().enumerate() {
            let labels: Vec<Label> = rows.iter().map(|(_, l)| l[ai]).collect();
            let mut prev = Label::O;
            for &l in &labels {
                if l == Label::I && prev == Label::O {
                    log.repaired_bio += 1;
                }
                prev = l;
            }
            for (s, e) in bio_decode(&labels) {
                spans.push(AnnotationSpan::new(
                    annotator.clone(),
                    pending.review.id.clone(),
                    si,
                    s,
                    e,
                ));
            }
        }
        pending.review.sentences.push(Sentence {
            tokens: rows.drain(..).map(|(t, _)| t).collect(),
        });
    };

    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() {
            flush_sentence(&mut current, &mut rows, &mut spans, &mut log);
            continue;
        }
        if let Some(rest) = line.strip_prefix("#review") {
            flush_sentence(&mut current, &mut rows, &mut spans, &mut log);
            if let Some(done) = current.take() {
                reviews.push(done.review);
            }
            let fields = parse_fields(rest, lineno)?;
            let get = |k: &str| {
                fields
                    .get(k)
                    .cloned()
                    .ok_or_else(|| Error::parse(lineno, format!("review header lacks `{k}`")))
            };
            let rating = get("rating")?
                .parse::<u8>()
                .map_err(|e| Error::parse(lineno, format!("bad rating: {e}")))?;
            let annotators: Vec<String> = match fields.get("annotator") {
                Some(list) if !list.is_empty() => rest
                    .split_whitespace()
                    .find_map(|item| item.strip_prefix("annotator="))
                    .unwrap_or("")
                    .split(',')
                    .map(|a| unescape(a, lineno))
                    .collect::<Result<_>>()?,
                _ => Vec::new(),
            };
            for a in &annotators {
                if !annotators_seen.contains(a) {
                    annotators_seen.push(a.clone());
                }
            }
            current = Some(PendingReview {
                review: Review {
                    id: get("id")?,
                    app: get("app")?,
                    category: get("category")?,
                    rating,
                    sentences: Vec::new(),
                },
                annotators,
                line: lineno,
            });
            continue;
        }
        if let Some(rest) = line.strip_prefix("#meta") {
            metadata.extend(parse_fields(rest, lineno)?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("#annotators") {
            for a in rest.trim().split(',').filter(|a| !a.is_empty()) {
                let a = unescape(a, lineno)?;
                if !annotators_seen.contains(&a) {
                    annotators_seen.push(a);
                }
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let pending = current
            .as_ref()
            .ok_or_else(|| Error::parse(lineno, "token line before any #review header"))?;
        let cols: Vec<&str> = line.split('\t').collect();
        let expected = 2 + pending.annotators.len();
        if cols.len() != expected {
            return Err(Error::parse(
                lineno,
                format!(
                    "expected {expected} tab-separated columns for review opened at line {}, found {}",
                    pending.line,
                    cols.len()
                ),
            ));
        }
        let pos = match cols[1] {
            "_" => None,
            p => Some(p.to_string()),
        };
        let labels = cols[2..]
            .iter()
            .map(|c| c.parse::<Label>().map_err(|e| Error::parse(lineno, e.to_string())))
            .collect::<Result<Vec<_>>>()?;
        rows.push((
            Token {
                text: cols[0].to_string(),
                pos,
            },
            labels,
        ));
    }
    flush_sentence(&mut current, &mut rows, &mut spans, &mut log);
    if let Some(done) = current.take() {
        reviews.push(done.review);
    }
    if log.repaired_bio > 0 {
        log.warn(format!(
            "repaired {} I labels that did not continue a span",
            log.repaired_bio
        ));
    }
    let corpus = Corpus::new(reviews, spans)?
        .with_annotators(annotators_seen)
        .with_metadata(metadata);
    Ok((corpus, log))
}

fn write_conll<W: Write>(corpus: &Corpus, w: &mut W) -> Result<()> {
    let io = |e| Error::io("<writer>", e);
    if !corpus.metadata().is_empty() {
        let fields: Vec<String> = corpus
            .metadata()
            .iter()
            .map(|(k, v)| format!("{}={}", escape(k), escape(v)))
            .collect();
        writeln!(w, "#meta {}", fields.join(" ")).map_err(io)?;
    }
    let annotators: Vec<&String> = corpus.annotator_ids().iter().collect();
    if !annotators.is_empty() {
        let names: Vec<String> = annotators.iter().map(|a| escape(a)).collect();
        writeln!(w, "#annotators {}", names.join(",")).map_err(io)?;
    }
    let encoded = annotators
        .iter()
        .map(|a| bio_encode(corpus, a))
        .collect::<Result<Vec<_>>>()?;
    let mut seq = 0;
    for review in corpus.reviews() {
        let names: Vec<String> = annotators.iter().map(|a| escape(a)).collect();
        writeln!(
            w,
            "#review id={} app={} category={} rating={} annotator={}",
            escape(&review.id),
            escape(&review.app),
            escape(&review.category),
            review.rating,
            names.join(",")
        )
        .map_err(io)?;
        for sentence in &review.sentences {
            for (t, token) in sentence.tokens.iter().enumerate() {
                let mut line = format!("{}\t{}", token.text, token.pos.as_deref().unwrap_or("_"));
                for labels in &encoded {
                    line.push('\t');
                    line.push_str(labels[seq].labels[t].as_str());
                }
                writeln!(w, "{line}").map_err(io)?;
            }
            writeln!(w).map_err(io)?;
            seq += 1;
        }
    }
    Ok(())
}
