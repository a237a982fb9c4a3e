//! Text to unit-vector sequence: tokenization, GloVe text-format tables and
//! the per-token lookup that feeds the autocorrelation.
//!
//! The GloVe text format has one entry per line, a word followed by its
//! space-separated components and no header:
//!
//! ```text
//! the 0.418 0.24968 -0.41242 ...
//! ```

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// Lowercased word tokens with the character offset at which each starts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
    pub source_char_offsets: Vec<usize>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\''
}

/// Splits text into maximal runs of letters, digits and apostrophes,
/// lowercased. Everything else separates tokens.
pub fn tokenize(raw_text: &str) -> TokenSequence {
    let mut seq = TokenSequence::default();
    let mut current = String::new();
    let mut start = 0;
    for (pos, c) in raw_text.chars().enumerate() {
        if is_word_char(c) {
            if current.is_empty() {
                start = pos;
            }
            current.extend(c.to_lowercase());
        } else if !current.is_empty() {
            seq.tokens.push(std::mem::take(&mut current));
            seq.source_char_offsets.push(start);
        }
    }
    if !current.is_empty() {
        seq.tokens.push(current);
        seq.source_char_offsets.push(start);
    }
    seq
}

/// Number of tokens `tokenize` would produce, without allocating them.
pub fn count_tokens(raw_text: &str) -> usize {
    let mut count = 0;
    let mut in_word = false;
    for c in raw_text.chars() {
        let w = is_word_char(c);
        if w && !in_word {
            count += 1;
        }
        in_word = w;
    }
    count
}

/// Pretrained word vectors, immutable once loaded.
#[derive(Clone, Debug)]
pub struct EmbeddingTable {
    name: String,
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f64>,
    rejected_zero_vectors: usize,
}

impl EmbeddingTable {
    /// Reads a GloVe text-format table. The dimension is taken from the
    /// first entry; repeated words keep their first vector.
    pub fn load<R: BufRead>(reader: R, name: impl Into<String>) -> Result<Self> {
        Self::load_filtered(reader, name, |_| true)
    }

    /// Like [`EmbeddingTable::load`], but only retains words accepted by
    /// `keep`. Every line is still parsed and validated.
    pub fn load_filtered<R, F>(mut reader: R, name: impl Into<String>, keep: F) -> Result<Self>
    where
        R: BufRead,
        F: Fn(&str) -> bool,
    {
        let mut table = EmbeddingTable {
            name: name.into(),
            dim: 0,
            index: HashMap::new(),
            data: Vec::new(),
            rejected_zero_vectors: 0,
        };
        let mut line = String::new();
        let mut line_no = 0;
        let mut components = Vec::new();
        let mut seen_entry = false;
        loop {
            line.clear();
            if reader.read_line(&mut line)? == 0 {
                break;
            }
            line_no += 1;
            let content = line.trim_end_matches(['\n', '\r']);
            if content.trim().is_empty() {
                continue;
            }
            let (word, rest) = content.split_once(' ').unwrap_or((content, ""));
            if word.is_empty() {
                return Err(malformed(line_no, "line starts with a separator"));
            }

            components.clear();
            for field in rest.split_ascii_whitespace() {
                let value: f64 = field
                    .parse()
                    .map_err(|_| malformed(line_no, format!("non-numeric component {field:?}")))?;
                if !value.is_finite() {
                    return Err(malformed(line_no, format!("non-finite component {field:?}")));
                }
                components.push(value);
            }

            if !seen_entry {
                if components.is_empty() {
                    return Err(malformed(line_no, "entry has no components"));
                }
                table.dim = components.len();
                seen_entry = true;
            } else if components.len() != table.dim {
                return Err(malformed(
                    line_no,
                    format!("expected {} components, found {}", table.dim, components.len()),
                ));
            }

            if components.iter().all(|&c| c == 0.0) {
                table.rejected_zero_vectors += 1;
                continue;
            }
            if !keep(word) {
                continue;
            }
            if let Entry::Vacant(slot) = table.index.entry(word.to_owned()) {
                slot.insert(table.data.len() / table.dim);
                table.data.extend_from_slice(&components);
            }
        }
        if !seen_entry {
            return Err(Error::EmptyTable);
        }
        Ok(table)
    }

    /// Opens a table file; the table is named after the file stem
    /// (`glove.6B.300d.txt` becomes `glove.6B.300d`).
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_path_filtered(path, |_| true)
    }

    pub fn from_path_filtered<F>(path: impl AsRef<Path>, keep: F) -> Result<Self>
    where
        F: Fn(&str) -> bool,
    {
        let path = path.as_ref();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let reader = BufReader::with_capacity(1 << 20, File::open(path)?);
        Self::load_filtered(reader, name, keep)
    }

    /// Builds a table from in-memory entries, applying the same validation
    /// as the text loader.
    pub fn from_entries<I, S>(name: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Vec<f64>)>,
        S: Into<String>,
    {
        let mut table = EmbeddingTable {
            name: name.into(),
            dim: 0,
            index: HashMap::new(),
            data: Vec::new(),
            rejected_zero_vectors: 0,
        };
        for (i, (word, vector)) in entries.into_iter().enumerate() {
            let line = i + 1;
            let word = word.into();
            if word.is_empty() || word.contains(char::is_whitespace) {
                return Err(malformed(line, format!("invalid word {word:?}")));
            }
            if table.dim == 0 {
                if vector.is_empty() {
                    return Err(malformed(line, "entry has no components"));
                }
                table.dim = vector.len();
            } else if vector.len() != table.dim {
                return Err(malformed(
                    line,
                    format!("expected {} components, found {}", table.dim, vector.len()),
                ));
            }
            if vector.iter().any(|c| !c.is_finite()) {
                return Err(malformed(line, "non-finite component"));
            }
            if vector.iter().all(|&c| c == 0.0) {
                table.rejected_zero_vectors += 1;
                continue;
            }
            if let Entry::Vacant(slot) = table.index.entry(word) {
                slot.insert(table.data.len() / table.dim);
                table.data.extend_from_slice(&vector);
            }
        }
        if table.dim == 0 {
            return Err(Error::EmptyTable);
        }
        Ok(table)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Entries skipped at load because every component was zero.
    pub fn rejected_zero_vectors(&self) -> usize {
        self.rejected_zero_vectors
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.index
            .get(word)
            .map(|&row| &self.data[row * self.dim..(row + 1) * self.dim])
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }
}

fn malformed(line: usize, reason: impl Into<String>) -> Error {
    Error::MalformedEmbeddingFile {
        line,
        reason: reason.into(),
    }
}

/// A text as consecutive unit-norm vectors, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitVectorSequence {
    data: Vec<f64>,
    len: usize,
    dim: usize,
    dropped_oov_fraction: f64,
}

impl UnitVectorSequence {
    /// Normalizes each row of a row-major `len x dim` buffer.
    pub fn from_rows(dim: usize, mut data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidVector("dimension must be positive".into()));
        }
        if !data.len().is_multiple_of(dim) {
            return Err(Error::InvalidVector(format!(
                "buffer of {} values is not a multiple of dimension {dim}",
                data.len()
            )));
        }
        for (i, row) in data.chunks_exact_mut(dim).enumerate() {
            if row.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidVector(format!("row {i} has non-finite components")));
            }
            let norm = l2_norm(row);
            if norm == 0.0 {
                return Err(Error::InvalidVector(format!("row {i} is the zero vector")));
            }
            row.iter_mut().for_each(|c| *c /= norm);
        }
        let len = data.len() / dim;
        Ok(UnitVectorSequence {
            data,
            len,
            dim,
            dropped_oov_fraction: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dropped_oov_fraction(&self) -> f64 {
        self.dropped_oov_fraction
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, f64> {
        self.data.chunks_exact(self.dim)
    }

    /// Row-major backing buffer.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// The same vectors in reverse order.
    pub fn reversed(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for row in self.data.rchunks_exact(self.dim) {
            data.extend_from_slice(row);
        }
        UnitVectorSequence { data, ..*self }
    }
}

fn l2_norm(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Maps each in-vocabulary token to its normalized table vector. Tokens
/// missing from the table are dropped and the gap closes up.
pub fn embed_sequence(tokens: &TokenSequence, table: &EmbeddingTable) -> Result<UnitVectorSequence> {
    // Loaders reject empty files, so an empty table here was filtered down
    // to the text's vocabulary and shares no word with it.
    if table.is_empty() {
        return Err(Error::EmptyVocabularyOverlap);
    }
    let dim = table.dim();
    let mut data = Vec::with_capacity(tokens.len() * dim);
    let mut kept = 0usize;
    for token in &tokens.tokens {
        if let Some(v) = table.get(token) {
            let norm = l2_norm(v);
            data.extend(v.iter().map(|c| c / norm));
            kept += 1;
        }
    }
    if kept == 0 {
        return Err(Error::EmptyVocabularyOverlap);
    }
    let dropped = tokens.len() - kept;
    Ok(UnitVectorSequence {
        data,
        len: kept,
        dim,
        dropped_oov_fraction: dropped as f64 / tokens.len() as f64,
    })
}
