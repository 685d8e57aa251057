//! Sentence vectors and the math on them.
//!
//! Two sources of vectors are supported:
//!
//! * word-vector dictionaries in the common text format (`<count> <dim>`
//!   header, then `word v1 .. vdim` rows), pooled into sentence vectors by
//!   averaging the vectors of in-vocabulary tokens;
//! * precomputed sentence vectors from an external encoder, stored in the
//!   little-endian `EMBF` binary format (see [`write_embedding_file`]).
//!
//! Vectors are stored as `f32`; sums, means and dot products are accumulated
//! in `f64`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, ErrorKind, Read, Write};
use std::path::Path;

use unicode_general_category::{get_general_category, GeneralCategory};

use crate::error::{Error, Result};
use crate::lines::LineReader;

/// A finite, non-empty `f32` vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f32>);

impl EmbeddingVector {
    pub fn new(components: Vec<f32>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "embedding vector".into(),
                expected: 1,
                found: 0,
            });
        }
        if !components.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite("embedding vector".into()));
        }
        Ok(EmbeddingVector(components))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f32> {
        self.0
    }
}

impl AsRef<[f32]> for EmbeddingVector {
    fn as_ref(&self) -> &[f32] {
        &self.0
    }
}

fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

/// Case-folds, splits on whitespace, then peels leading and trailing
/// punctuation characters off each chunk as one-character tokens.
///
/// Inner punctuation stays attached (`"co-operate"` is one token).
pub fn tokenize(text: &str) -> Vec<String> {
    let folded = caseless::default_case_fold_str(text);
    let mut tokens = Vec::new();
    for chunk in folded.split_whitespace() {
        let core = chunk.trim_start_matches(is_punctuation);
        tokens.extend(chunk[..chunk.len() - core.len()].chars().map(String::from));
        let word = core.trim_end_matches(is_punctuation);
        if !word.is_empty() {
            tokens.push(word.to_string());
        }
        tokens.extend(core[word.len()..].chars().map(String::from));
    }
    tokens
}

/// Word vectors for one language, stored as a dense row-major matrix.
#[derive(Debug, Clone)]
pub struct WordEmbeddingTable {
    language: String,
    dim: usize,
    index: HashMap<String, usize>,
    data: Vec<f32>,
    duplicates: usize,
}

impl WordEmbeddingTable {
    pub fn new(language: impl Into<String>, dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        WordEmbeddingTable {
            language: language.into(),
            dim,
            index: HashMap::new(),
            data: Vec::new(),
            duplicates: 0,
        }
    }

    /// Adds a word; a word already present keeps its first vector and the
    /// call returns `Ok(false)`.
    pub fn insert(&mut self, word: impl Into<String>, vector: &[f32]) -> Result<bool> {
        let word = word.into();
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: format!("word `{word}`"),
                expected: self.dim,
                found: vector.len(),
            });
        }
        if !vector.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite(format!("word `{word}`")));
        }
        if self.index.contains_key(&word) {
            self.duplicates += 1;
            return Ok(false);
        }
        self.index.insert(word, self.index.len());
        self.data.extend_from_slice(vector);
        Ok(true)
    }

    pub fn language(&self) -> &str {
        &self.language
    }

    pub fn set_language(&mut self, language: impl Into<String>) {
        self.language = language.into();
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

    /// Rows skipped while loading because the word was already present.
    pub fn duplicates(&self) -> usize {
        self.duplicates
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index.get(word).map(|&row| self.row(row))
    }

    fn row(&self, row: usize) -> &[f32] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }
}

/// Loads a word-vector text file. The language tag is taken from the file
/// stem's last dot-separated part (`wiki.multi.pl.vec` → `pl`).
pub fn load_word_table(path: &Path) -> Result<WordEmbeddingTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let language = path
        .file_stem()
        .and_then(|s| s.to_str())
        .and_then(|s| s.rsplit('.').next())
        .unwrap_or("")
        .to_string();
    read_word_table(path, Box::new(file), language)
}

pub(crate) fn read_word_table(
    path: &Path,
    reader: Box<dyn Read>,
    language: String,
) -> Result<WordEmbeddingTable> {
    let mut lines = LineReader::new(path, reader);
    let header = lines
        .next_line()?
        .ok_or_else(|| Error::MalformedHeader("file is empty".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let parsed: Vec<usize> = fields.iter().filter_map(|f| f.parse().ok()).collect();
    let dim = match (fields.len(), parsed.as_slice()) {
        (2, &[_, dim]) if dim >= 1 => dim,
        _ => {
            return Err(Error::MalformedHeader(format!(
                "expected `<count> <dim>`, found `{header}`"
            )))
        }
    };

    let mut table = WordEmbeddingTable::new(language, dim);
    let mut row = Vec::with_capacity(dim);
    while let Some(line) = lines.next_line()? {
        let mut parts = line.split(' ').filter(|p| !p.is_empty());
        let Some(word) = parts.next() else { continue };
        let context = || format!("{}:{}", path.display(), lines.line_no);
        row.clear();
        for token in parts {
            match token.parse::<f32>() {
                Ok(v) if v.is_finite() => row.push(v),
                _ => {
                    return Err(Error::InvalidNumber {
                        context: context(),
                        token: token.to_string(),
                    })
                }
            }
        }
        if row.len() != dim {
            return Err(Error::DimensionMismatch {
                context: context(),
                expected: dim + 1,
                found: row.len() + 1,
            });
        }
        table.insert(word, &row)?;
    }
    Ok(table)
}

/// Mean of the vectors of in-vocabulary tokens; `None` when no token is
/// covered by the table.
///
/// Rows are summed in table order, so the result does not depend on token
/// order.
pub fn embed_sentence_mean<S: AsRef<str>>(
    tokens: &[S],
    table: &WordEmbeddingTable,
) -> Option<EmbeddingVector> {
    let mut rows: Vec<usize> = tokens
        .iter()
        .filter_map(|t| table.index.get(t.as_ref()).copied())
        .collect();
    if rows.is_empty() {
        return None;
    }
    rows.sort_unstable();
    let mut acc = vec![0f64; table.dim];
    for &r in &rows {
        for (a, &x) in acc.iter_mut().zip(table.row(r)) {
            *a += f64::from(x);
        }
    }
    let n = rows.len() as f64;
    Some(EmbeddingVector(
        acc.into_iter().map(|a| (a / n) as f32).collect(),
    ))
}

/// Cosine similarity of two slices, clamped to `[-1, 1]`.
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            context: "cosine similarity".into(),
            expected: u.len(),
            found: v.len(),
        });
    }
    let (mut dot, mut uu, mut vv) = (0f64, 0f64, 0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (f64::from(a), f64::from(b));
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0))
}

pub fn cosine_similarity(u: &EmbeddingVector, v: &EmbeddingVector) -> Result<f64> {
    cosine(&u.0, &v.0)
}

pub const EMBF_MAGIC: [u8; 4] = *b"EMBF";
pub const EMBF_VERSION: u16 = 1;
const EMBF_HEADER_LEN: u64 = 4 + 2 + 4 + 8;

/// Sentence vectors keyed by pair id, as loaded from an `EMBF` file.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    ids: Vec<u64>,
    data: Vec<f32>,
}

impl EmbeddingStore {
    /// Builds a store from records sorted by strictly increasing id.
    pub fn from_records<I, V>(dim: usize, records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, V)>,
        V: AsRef<[f32]>,
    {
        if dim == 0 {
            return Err(Error::MalformedHeader("dimension must be positive".into()));
        }
        let mut store = EmbeddingStore {
            dim,
            ids: Vec::new(),
            data: Vec::new(),
        };
        for (id, v) in records {
            store.push(id, v.as_ref())?;
        }
        Ok(store)
    }

    fn push(&mut self, id: u64, v: &[f32]) -> Result<()> {
        if let Some(&previous) = self.ids.last() {
            if id <= previous {
                return Err(Error::UnsortedIds { previous, next: id });
            }
        }
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                context: format!("record {id}"),
                expected: self.dim,
                found: v.len(),
            });
        }
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::NonFinite(format!("record {id}")));
        }
        self.ids.push(id);
        self.data.extend_from_slice(v);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn contains(&self, id: u64) -> bool {
        self.ids.binary_search(&id).is_ok()
    }

    pub fn get(&self, id: u64) -> Option<&[f32]> {
        let pos = self.ids.binary_search(&id).ok()?;
        Some(&self.data[pos * self.dim..(pos + 1) * self.dim])
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &[f32])> + '_ {
        self.ids
            .iter()
            .copied()
            .zip(self.data.chunks_exact(self.dim))
    }
}

/// Writes an `EMBF` file.
///
/// Layout, all little-endian: magic `EMBF`, `u16` version (1), `u32` dim,
/// `u64` count, then `count` records of `u64` pair id followed by `dim`
/// IEEE-754 `f32` components. Ids must be strictly increasing.
pub fn write_embedding_file<I, V>(path: &Path, dim: usize, records: I) -> Result<()>
where
    I: IntoIterator<Item = (u64, V)>,
    V: AsRef<[f32]>,
{
    let store = EmbeddingStore::from_records(dim, records)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_store(&store, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn write_store<W: Write>(store: &EmbeddingStore, out: &mut W) -> io::Result<()> {
    let dim = u32::try_from(store.dim)
        .map_err(|_| io::Error::new(ErrorKind::InvalidInput, "dimension exceeds u32"))?;
    out.write_all(&EMBF_MAGIC)?;
    out.write_all(&EMBF_VERSION.to_le_bytes())?;
    out.write_all(&dim.to_le_bytes())?;
    out.write_all(&(store.len() as u64).to_le_bytes())?;
    let mut record = Vec::with_capacity(8 + 4 * store.dim);
    for (id, v) in store.iter() {
        record.clear();
        record.extend_from_slice(&id.to_le_bytes());
        for c in v {
            record.extend_from_slice(&c.to_le_bytes());
        }
        out.write_all(&record)?;
    }
    Ok(())
}

pub fn load_embedding_file(path: &Path) -> Result<EmbeddingStore> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_store(path, BufReader::with_capacity(1 << 20, file))
}

/// Fills `buf` completely; returns `false` on clean or partial EOF.
fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<bool> {
    match r.read_exact(buf) {
        Ok(()) => Ok(true),
        Err(e) if e.kind() == ErrorKind::UnexpectedEof => Ok(false),
        Err(e) => Err(e),
    }
}

pub(crate) fn read_store<R: Read>(path: &Path, mut r: R) -> Result<EmbeddingStore> {
    let io_err = |e| Error::io(path, e);
    let mut header = Vec::with_capacity(EMBF_HEADER_LEN as usize);
    (&mut r)
        .take(EMBF_HEADER_LEN)
        .read_to_end(&mut header)
        .map_err(io_err)?;
    if header.len() >= 4 && header[0..4] != EMBF_MAGIC {
        return Err(Error::BadMagic(header[0..4].try_into().unwrap()));
    }
    if header.len() < EMBF_HEADER_LEN as usize {
        return Err(Error::TruncatedHeader(header.len()));
    }
    let version = u16::from_le_bytes(header[4..6].try_into().unwrap());
    if version != EMBF_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let dim = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
    let count = u64::from_le_bytes(header[10..18].try_into().unwrap());
    if dim == 0 {
        return Err(Error::MalformedHeader("EMBF dimension is zero".into()));
    }

    let mut store = EmbeddingStore {
        dim,
        ids: Vec::with_capacity(count.min(1 << 20) as usize),
        data: Vec::with_capacity(
            (count.min(1 << 20) as usize)
                .saturating_mul(dim)
                .min(1 << 28),
        ),
    };
    let mut record = vec![0u8; 8 + 4 * dim];
    let mut components = vec![0f32; dim];
    for found in 0..count {
        if !read_full(&mut r, &mut record).map_err(io_err)? {
            return Err(Error::TruncatedFile {
                declared: count,
                found,
            });
        }
        let id = u64::from_le_bytes(record[0..8].try_into().unwrap());
        for (c, bytes) in components.iter_mut().zip(record[8..].chunks_exact(4)) {
            *c = f32::from_le_bytes(bytes.try_into().unwrap());
        }
        store.push(id, &components)?;
    }
    let trailing = io::copy(&mut r, &mut io::sink()).map_err(io_err)?;
    if trailing > 0 {
        return Err(Error::TrailingBytes(trailing));
    }
    Ok(store)
}
