use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use crate::error::{Error, Result};

/// Word vectors read from a whitespace-separated text file.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
    /// Lowercase query words before lookup.
    pub lowercase_lookup: bool,
}

impl EmbeddingTable {
    pub fn from_vectors<I>(dim: usize, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<f64>)>,
    {
        let mut map = HashMap::new();
        for (word, v) in vectors {
            if v.len() != dim {
                return Err(Error::Data(format!(
                    "vector for `{word}` has length {} instead of {dim}",
                    v.len()
                )));
            }
            map.insert(word, v);
        }
        Ok(EmbeddingTable {
            dim,
            vectors: map,
            lowercase_lookup: true,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn lookup(&self, word: &str) -> Option<&[f64]> {
        if self.lowercase_lookup {
            self.vectors.get(&word.to_lowercase())
        } else {
            self.vectors.get(word)
        }
        .map(Vec::as_slice)
    }
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_embeddings(file)
}

/// Parses `word v1 .. vD` lines with an optional leading `N D` header.
/// A repeated word keeps its last vector.
pub fn read_embeddings<R: Read>(reader: R) -> Result<EmbeddingTable> {
    let mut dim: Option<usize> = None;
    let mut declared_rows = None;
    let mut vectors: HashMap<String, Vec<f64>> = HashMap::new();
    let mut first = true;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::parse(lineno, e.to_string()))?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if std::mem::take(&mut first) && fields.len() == 2 {
            if let (Ok(n), Ok(d)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                dim = Some(d);
                declared_rows = Some(n);
                continue;
            }
        }
        let values = fields[1..]
            .iter()
            .map(|v| {
                v.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::parse(lineno, format!("non-numeric value `{v}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let d = *dim.get_or_insert(values.len());
        if values.len() != d || d == 0 {
            return Err(Error::parse(
                lineno,
                format!("expected {d} values, found {}", values.len()),
            ));
        }
        if vectors.insert(fields[0].to_string(), values).is_some() {
            log::warn!("embeddings line {lineno}: duplicate word `{}`, keeping the last vector", fields[0]);
        }
    }
    if let Some(n) = declared_rows {
        if n != vectors.len() {
            log::warn!("embedding header declares {n} rows, read {}", vectors.len());
        }
    }
    Ok(EmbeddingTable {
        dim: dim.unwrap_or(0),
        vectors,
        lowercase_lookup: true,
    })
}
