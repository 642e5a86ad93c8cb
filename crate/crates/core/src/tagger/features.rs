//! Per-token feature templates.
//!
//! For every offset `o` in `-window..=window` the lowercased word `w[o]=..`
//! and, when enabled, its tag `pos[o]=..` (`<PAD>` outside the sentence).
//! For the current token only: prefixes/suffixes `pre{k}[0]`/`suf{k}[0]`,
//! `pos_in_sent`, `style[0]` flags and the `emb[d]` embedding values.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::embeddings::EmbeddingTable;
use crate::corpus::Sentence;
use crate::error::{Error, Result};

pub const PAD: &str = "<PAD>";
const NO_TAG: &str = "<NONE>";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureTemplateConfig {
    pub window: usize,
    pub affix_lengths: BTreeSet<usize>,
    pub use_pos: bool,
    pub use_position: bool,
    pub use_stylistics: bool,
    pub use_embeddings: bool,
    pub embedding_dim: usize,
}

impl Default for FeatureTemplateConfig {
    fn default() -> Self {
        FeatureTemplateConfig {
            window: 2,
            affix_lengths: (1..=4).collect(),
            use_pos: true,
            use_position: true,
            use_stylistics: true,
            use_embeddings: false,
            embedding_dim: 0,
        }
    }
}

impl FeatureTemplateConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.affix_lengths.iter().find(|&&k| !(1..=4).contains(&k)) {
            return Err(Error::Config(format!("affix length {bad} outside 1..=4")));
        }
        if self.use_embeddings && self.embedding_dim == 0 {
            return Err(Error::Config("embeddings enabled with dimension 0".into()));
        }
        Ok(())
    }

    /// Enables embedding features with the table's dimension.
    pub fn with_embeddings(mut self, table: &EmbeddingTable) -> Self {
        self.use_embeddings = true;
        self.embedding_dim = table.dim();
        self
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Sorted, duplicate-free binary feature ids.
    pub binary: Vec<String>,
    /// `emb[d]` features with their raw values.
    pub continuous: Vec<(String, f64)>,
}

impl FeatureVector {
    pub fn contains(&self, id: &str) -> bool {
        self.binary.binary_search_by(|f| f.as_str().cmp(id)).is_ok()
    }

    pub fn value(&self, id: &str) -> Option<f64> {
        if self.contains(id) {
            return Some(1.0);
        }
        self.continuous.iter().find(|(n, _)| n == id).map(|(_, v)| *v)
    }
}

fn offset_label(o: isize) -> String {
    if o > 0 {
        format!("+{o}")
    } else {
        o.to_string()
    }
}

pub fn embedding_feature(d: usize) -> String {
    format!("emb[{d}]")
}

fn stylistics(word: &str) -> Vec<&'static str> {
    let mut out = Vec::new();
    let letters: Vec<char> = word.chars().filter(|c| c.is_alphabetic()).collect();
    if word.chars().next().is_some_and(char::is_uppercase) {
        out.push("init_cap");
    }
    if word.chars().count() > 1 && !letters.is_empty() && letters.iter().all(|c| c.is_uppercase()) {
        out.push("all_caps");
    }
    if word.chars().any(|c| c.is_numeric()) {
        out.push("has_digit");
    }
    if word.chars().any(|c| !c.is_alphanumeric()) {
        out.push("has_symbol");
    } else {
        out.push("alnum");
    }
    out
}

/// Features of token `t` of `sentence`.
///
/// # Panics
///
/// If `t` is out of bounds, or embeddings are enabled and `embeddings` is
/// `None`.
pub fn extract_features(
    sentence: &Sentence,
    t: usize,
    config: &FeatureTemplateConfig,
    embeddings: Option<&EmbeddingTable>,
) -> FeatureVector {
    let tokens = &sentence.tokens;
    assert!(t < tokens.len(), "token {t} out of bounds");
    let mut binary = Vec::new();
    let w = config.window as isize;
    for o in -w..=w {
        let idx = t as isize + o;
        let tok = (0..tokens.len() as isize).contains(&idx).then(|| &tokens[idx as usize]);
        let label = offset_label(o);
        match tok {
            Some(tok) => {
                binary.push(format!("w[{label}]={}", tok.text.to_lowercase()));
                if config.use_pos {
                    binary.push(format!("pos[{label}]={}", tok.pos.as_deref().unwrap_or(NO_TAG)));
                }
            }
            None => {
                binary.push(format!("w[{label}]={PAD}"));
                if config.use_pos {
                    binary.push(format!("pos[{label}]={PAD}"));
                }
            }
        }
    }
    let word = &tokens[t].text;
    let lower: Vec<char> = word.to_lowercase().chars().collect();
    for &k in &config.affix_lengths {
        if k <= lower.len() {
            let pre: String = lower[..k].iter().collect();
            let suf: String = lower[lower.len() - k..].iter().collect();
            binary.push(format!("pre{k}[0]={pre}"));
            binary.push(format!("suf{k}[0]={suf}"));
        }
    }
    if config.use_position {
        let place = if t == 0 {
            "first"
        } else if t + 1 == tokens.len() {
            "last"
        } else {
            "inner"
        };
        binary.push(format!("pos_in_sent={place}"));
    }
    if config.use_stylistics {
        for s in stylistics(word) {
            binary.push(format!("style[0]={s}"));
        }
    }
    binary.sort_unstable();
    binary.dedup();

    let mut continuous = Vec::new();
    if config.use_embeddings {
        let table = embeddings.expect("embedding features enabled without a table");
        let vector = table.lookup(word);
        for d in 0..config.embedding_dim {
            let v = vector.map_or(0.0, |v| v[d]);
            continuous.push((embedding_feature(d), v));
        }
    }
    FeatureVector { binary, continuous }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_token_template_trace() {
        let s = Sentence::from_text("Great");
        let f = extract_features(&s, 0, &FeatureTemplateConfig::default(), None);
        for id in ["w[0]=great", "pre1[0]=g", "suf1[0]=t", "pos_in_sent=first", "style[0]=init_cap", "w[-1]=<PAD>", "w[+2]=<PAD>", "pre4[0]=grea", "suf4[0]=reat", "pos[0]=<NONE>"] {
            assert!(f.contains(id), "missing {id}: {:?}", f.binary);
        }
        assert!(!f.contains("style[0]=all_caps"));
    }

    #[test]
    fn short_word_clamps_affixes() {
        let s = Sentence::from_text("a b");
        let f = extract_features(&s, 0, &FeatureTemplateConfig::default(), None);
        let affixes: Vec<_> = f.binary.iter().filter(|b| b.starts_with("pre") || b.starts_with("suf")).collect();
        assert_eq!(affixes, ["pre1[0]=a", "suf1[0]=a"]);
    }

    #[test]
    fn neighbours_and_tags() {
        let s = Sentence::from_tagged("to/TO upload/VB video/NN");
        let f = extract_features(&s, 1, &FeatureTemplateConfig::default(), None);
        assert!(f.contains("w[-1]=to"));
        assert!(f.contains("pos[+1]=NN"));
        assert!(f.contains("pos_in_sent=inner"));
        assert!(f.contains("w[-2]=<PAD>"));
        let f = extract_features(&s, 2, &FeatureTemplateConfig::default(), None);
        assert!(f.contains("pos_in_sent=last"));
    }

    #[test]
    fn oov_embeddings_are_zero() {
        let table = EmbeddingTable::from_vectors(2, [("video".to_string(), vec![0.5, -1.0])]).unwrap();
        let cfg = FeatureTemplateConfig::default().with_embeddings(&table);
        let s = Sentence::from_text("Video zzz");
        let f = extract_features(&s, 0, &cfg, Some(&table));
        assert_eq!(f.value("emb[1]"), Some(-1.0));
        let f = extract_features(&s, 1, &cfg, Some(&table));
        assert_eq!(f.continuous, vec![("emb[0]".to_string(), 0.0), ("emb[1]".to_string(), 0.0)]);
    }

    #[test]
    fn style_flags() {
        assert_eq!(stylistics("GPS"), ["init_cap", "all_caps", "alnum"]);
        assert_eq!(stylistics("mp3"), ["has_digit", "alnum"]);
        assert_eq!(stylistics("wi-fi"), ["has_symbol"]);
    }

    #[test]
    fn affix_validation() {
        let mut cfg = FeatureTemplateConfig::default();
        cfg.affix_lengths.insert(5);
        assert!(cfg.validate().is_err());
    }
}
