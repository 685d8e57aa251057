//! Parallel-corpus ingestion, the preprocessing cascade and corpus statistics.
//!
//! Filters are pure: they borrow a [`Corpus`] and return a new one holding the
//! surviving pairs in their original relative order, with ids and texts
//! untouched. Predicates are evaluated in parallel, but the output is always
//! identical to a sequential run.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::UnicodeNormalization;
use unicode_script::{Script, UnicodeScript};

use crate::error::{Error, Result};
use crate::lines::LineReader;

pub const DEFAULT_MIN_CHARS: usize = 15;
pub const DEFAULT_MAX_CHARS: usize = 200;

/// Which source corpus a pair came from. Stratified splits keep the
/// proportions of these strata.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    Ecdc,
    Emea,
    Subtitles,
    Other,
}

impl Origin {
    pub const ALL: [Origin; 4] = [Origin::Ecdc, Origin::Emea, Origin::Subtitles, Origin::Other];

    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Ecdc => "ECDC",
            Origin::Emea => "EMEA",
            Origin::Subtitles => "SUBTITLES",
            Origin::Other => "OTHER",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Origin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Origin::ALL
            .into_iter()
            .find(|o| o.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownOrigin(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SentencePair {
    pub pair_id: u64,
    pub source_text: String,
    pub target_text: String,
    pub origin: Origin,
}

impl SentencePair {
    pub fn new(
        pair_id: u64,
        source: impl Into<String>,
        target: impl Into<String>,
        origin: Origin,
    ) -> Self {
        SentencePair {
            pair_id,
            source_text: source.into(),
            target_text: target.into(),
            origin,
        }
    }
}

/// An ordered collection of sentence pairs with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pairs: Vec<SentencePair>,
    provenance: String,
}

impl Corpus {
    /// Builds a corpus, rejecting duplicate ids and empty sides.
    pub fn new(pairs: Vec<SentencePair>, provenance: impl Into<String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(pairs.len());
        for p in &pairs {
            if !seen.insert(p.pair_id) {
                return Err(Error::DuplicatePairId(p.pair_id));
            }
            if p.source_text.is_empty() || p.target_text.is_empty() {
                return Err(Error::EmptySentence(p.pair_id));
            }
        }
        Ok(Corpus {
            pairs,
            provenance: provenance.into(),
        })
    }

    /// Survivors of a filter; ids are already known to be unique.
    fn derived(&self, pairs: Vec<SentencePair>) -> Self {
        Corpus {
            pairs,
            provenance: self.provenance.clone(),
        }
    }

    pub fn pairs(&self) -> &[SentencePair] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<SentencePair> {
        self.pairs
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SentencePair> {
        self.pairs.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = u64> + '_ {
        self.pairs.iter().map(|p| p.pair_id)
    }

    /// Next free id: one past the current maximum, or 0 when empty.
    pub fn next_id(&self) -> u64 {
        self.pairs.iter().map(|p| p.pair_id + 1).max().unwrap_or(0)
    }

    /// Keeps the pairs at the given (ascending) positions.
    pub(crate) fn select_positions(&self, positions: &[usize]) -> Corpus {
        self.derived(positions.iter().map(|&i| self.pairs[i].clone()).collect())
    }

    /// Appends aligned files to this corpus, continuing id assignment after
    /// the current maximum.
    pub fn ingest_parallel(
        &mut self,
        source: &Path,
        target: &Path,
        origin: Origin,
    ) -> Result<usize> {
        let mut next = self.next_id();
        let before = self.pairs.len();
        let mut src = LineReader::open(source)?;
        let mut tgt = LineReader::open(target)?;
        loop {
            match (src.next_line()?, tgt.next_line()?) {
                (Some(s), Some(t)) => {
                    if let Some((s, t)) = clean_sides(&s, &t) {
                        self.pairs.push(SentencePair::new(next, s, t, origin));
                        next += 1;
                    }
                }
                (None, None) => break,
                (Some(_), None) | (None, Some(_)) => {
                    let (source_lines, target_lines) = (src.drain()?, tgt.drain()?);
                    return Err(Error::LineCountMismatch {
                        source_lines,
                        target_lines,
                    });
                }
            }
        }
        let entry = format!("{}+{} ({})", source.display(), target.display(), origin);
        if self.provenance.is_empty() {
            self.provenance = entry;
        } else {
            self.provenance = format!("{}; {}", self.provenance, entry);
        }
        Ok(self.pairs.len() - before)
    }
}

impl<'a> IntoIterator for &'a Corpus {
    type Item = &'a SentencePair;
    type IntoIter = std::slice::Iter<'a, SentencePair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

/// Trims both sides and turns embedded tabs into spaces so the pair can be
/// written as TSV. Returns `None` when either side ends up empty.
fn clean_sides(source: &str, target: &str) -> Option<(String, String)> {
    let clean = |s: &str| s.trim().replace('\t', " ");
    let (s, t) = (clean(source), clean(target));
    (!s.is_empty() && !t.is_empty()).then_some((s, t))
}

/// Reads two aligned one-sentence-per-line files into a fresh corpus with ids
/// starting at 0.
pub fn ingest_parallel(source: &Path, target: &Path, origin: Origin) -> Result<Corpus> {
    let mut corpus = Corpus::default();
    corpus.ingest_parallel(source, target, origin)?;
    Ok(corpus)
}

/// Reads a corpus TSV.
///
/// Two layouts are accepted, decided by the first non-blank line:
/// `source<TAB>target<TAB>origin` (ids assigned sequentially from 0) and
/// `pair_id<TAB>source<TAB>target<TAB>origin` (ids preserved, as written by
/// [`write_tsv`]).
pub fn read_tsv(path: &Path) -> Result<Corpus> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_tsv_from(path, Box::new(file))
}

pub(crate) fn read_tsv_from(path: &Path, reader: Box<dyn Read>) -> Result<Corpus> {
    let mut lines = LineReader::new(path, reader);
    let mut pairs = Vec::new();
    let mut columns = None;
    let mut seen = HashSet::new();
    let malformed = |line, reason: String| Error::MalformedTsv {
        path: path.to_path_buf(),
        line,
        reason,
    };
    while let Some(line) = lines.next_line()? {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let width = *columns.get_or_insert(fields.len());
        if fields.len() != width || !(width == 3 || width == 4) {
            return Err(malformed(
                lines.line_no,
                format!(
                    "expected 3 or 4 tab-separated columns consistently, found {}",
                    fields.len()
                ),
            ));
        }
        let (id, rest) = if width == 4 {
            let id = fields[0].trim().parse::<u64>().map_err(|_| {
                malformed(lines.line_no, format!("invalid pair id `{}`", fields[0]))
            })?;
            (id, &fields[1..])
        } else {
            (pairs.len() as u64, &fields[..])
        };
        let origin: Origin = rest[2].parse()?;
        let Some((s, t)) = clean_sides(rest[0], rest[1]) else {
            if width == 4 {
                return Err(malformed(lines.line_no, "empty sentence".into()));
            }
            continue;
        };
        if !seen.insert(id) {
            return Err(Error::DuplicatePairId(id));
        }
        pairs.push(SentencePair::new(id, s, t, origin));
    }
    Ok(Corpus {
        pairs,
        provenance: path.display().to_string(),
    })
}

/// Writes `pair_id<TAB>source<TAB>target<TAB>origin` lines.
pub fn write_tsv(corpus: &Corpus, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_tsv_to(corpus, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_tsv_to<W: Write>(corpus: &Corpus, out: &mut W) -> std::io::Result<()> {
    for p in corpus {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            p.pair_id, p.source_text, p.target_text, p.origin
        )?;
    }
    Ok(())
}

fn retain_where<F>(corpus: &Corpus, keep: F) -> Corpus
where
    F: Fn(&SentencePair) -> bool + Sync + Send,
{
    let mask: Vec<bool> = corpus.pairs.par_iter().map(keep).collect();
    let pairs = corpus
        .pairs
        .iter()
        .zip(mask)
        .filter(|(_, k)| *k)
        .map(|(p, _)| p.clone())
        .collect();
    corpus.derived(pairs)
}

/// Removes exact duplicates of the `(source, target)` tuple, compared after
/// NFC normalization and case-sensitively. The first occurrence survives.
pub fn dedup_exact(corpus: &Corpus) -> Corpus {
    let keys: Vec<(String, String)> = corpus
        .pairs
        .par_iter()
        .map(|p| (p.source_text.nfc().collect(), p.target_text.nfc().collect()))
        .collect();
    let mut seen = HashSet::with_capacity(keys.len());
    let pairs = corpus
        .pairs
        .iter()
        .zip(keys)
        .filter_map(|(p, key)| seen.insert(key).then(|| p.clone()))
        .collect();
    corpus.derived(pairs)
}

/// NFC, full case fold, whitespace runs collapsed to one space, trimmed.
pub fn normalize_for_comparison(text: &str) -> String {
    let folded = caseless::default_case_fold_str(&text.nfc().collect::<String>());
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Removes pairs whose two sides are the same text after
/// [`normalize_for_comparison`].
pub fn filter_untranslated(corpus: &Corpus) -> Corpus {
    retain_where(corpus, |p| {
        normalize_for_comparison(&p.source_text) != normalize_for_comparison(&p.target_text)
    })
}

/// Keeps a pair iff both sides have between `min_chars` and `max_chars`
/// Unicode scalar values, inclusive.
pub fn filter_by_length(corpus: &Corpus, min_chars: usize, max_chars: usize) -> Corpus {
    assert!(
        min_chars <= max_chars,
        "min_chars must not exceed max_chars"
    );
    let ok = |s: &str| (min_chars..=max_chars).contains(&s.chars().count());
    retain_where(corpus, |p| ok(&p.source_text) && ok(&p.target_text))
}

/// True for a letter (general category L*) outside the Latin script.
/// Script-neutral letters (Common, Inherited) are not counted as foreign.
pub fn is_foreign_letter(c: char) -> bool {
    if c.is_ascii() {
        return false;
    }
    let letter = matches!(
        get_general_category(c),
        GeneralCategory::UppercaseLetter
            | GeneralCategory::LowercaseLetter
            | GeneralCategory::TitlecaseLetter
            | GeneralCategory::ModifierLetter
            | GeneralCategory::OtherLetter
    );
    letter
        && !matches!(
            c.script(),
            Script::Latin | Script::Common | Script::Inherited
        )
}

/// Removes pairs where either side contains a non-Latin letter.
pub fn filter_charset(corpus: &Corpus) -> Corpus {
    retain_where(corpus, |p| {
        !p.source_text.chars().any(is_foreign_letter)
            && !p.target_text.chars().any(is_foreign_letter)
    })
}

/// Names of the preprocessing rules, in the order they are applied.
pub const RULES: [&str; 4] = ["dedup", "untranslated", "length", "charset"];

/// Runs dedup → untranslated → length → charset with the default bounds.
pub fn preprocess(corpus: &Corpus) -> (Corpus, CorpusStats) {
    preprocess_with(corpus, DEFAULT_MIN_CHARS, DEFAULT_MAX_CHARS)
}

pub fn preprocess_with(
    corpus: &Corpus,
    min_chars: usize,
    max_chars: usize,
) -> (Corpus, CorpusStats) {
    let mut removed = BTreeMap::new();
    let mut step = |name: &str, before: &Corpus, after: Corpus| {
        removed.insert(name.to_string(), before.len() - after.len());
        after
    };
    let c = step(RULES[0], corpus, dedup_exact(corpus));
    let c = step(RULES[1], &c, filter_untranslated(&c));
    let c = step(RULES[2], &c, filter_by_length(&c, min_chars, max_chars));
    let c = step(RULES[3], &c, filter_charset(&c));
    let mut stats = corpus_stats(&c);
    stats.removed_by_rule = removed;
    (c, stats)
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LengthSummary {
    pub min: usize,
    pub mean: f64,
    pub max: usize,
}

impl LengthSummary {
    fn of<'a>(texts: impl Iterator<Item = &'a str>) -> Self {
        let mut n = 0usize;
        let mut sum = 0usize;
        let (mut min, mut max) = (usize::MAX, 0);
        for t in texts {
            let len = t.chars().count();
            n += 1;
            sum += len;
            min = min.min(len);
            max = max.max(len);
        }
        if n == 0 {
            return LengthSummary::default();
        }
        LengthSummary {
            min,
            mean: sum as f64 / n as f64,
            max,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusStats {
    pub total_pairs: usize,
    pub per_origin_counts: BTreeMap<Origin, usize>,
    pub removed_by_rule: BTreeMap<String, usize>,
    pub source_lengths: LengthSummary,
    pub target_lengths: LengthSummary,
}

impl CorpusStats {
    pub fn total_removed(&self) -> usize {
        self.removed_by_rule.values().sum()
    }

    /// `key: value` lines, one statistic per line.
    pub fn to_report(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(": ");
            out.push_str(&v);
            out.push('\n');
        };
        line("total_pairs", self.total_pairs.to_string());
        for (origin, n) in &self.per_origin_counts {
            line(&format!("origin.{origin}"), n.to_string());
        }
        for rule in RULES {
            if let Some(n) = self.removed_by_rule.get(rule) {
                line(&format!("removed.{rule}"), n.to_string());
            }
        }
        for (side, s) in [
            ("source", &self.source_lengths),
            ("target", &self.target_lengths),
        ] {
            line(&format!("{side}_chars.min"), s.min.to_string());
            line(&format!("{side}_chars.mean"), format!("{:.3}", s.mean));
            line(&format!("{side}_chars.max"), s.max.to_string());
        }
        out
    }
}

pub fn corpus_stats(corpus: &Corpus) -> CorpusStats {
    let mut per_origin_counts = BTreeMap::new();
    for p in corpus {
        *per_origin_counts.entry(p.origin).or_insert(0) += 1;
    }
    CorpusStats {
        total_pairs: corpus.len(),
        per_origin_counts,
        removed_by_rule: BTreeMap::new(),
        source_lengths: LengthSummary::of(corpus.iter().map(|p| p.source_text.as_str())),
        target_lengths: LengthSummary::of(corpus.iter().map(|p| p.target_text.as_str())),
    }
}
