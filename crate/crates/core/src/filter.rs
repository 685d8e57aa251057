//! Pair scoring, top-fraction retention, seeded random subsets and stratified
//! train/validation splits.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::corpus::{Corpus, Origin};
use crate::embed::{cosine, embed_sentence_mean, tokenize, EmbeddingStore, WordEmbeddingTable};
use crate::error::{Error, Result};
use crate::lines::LineReader;
use crate::rng::{fnv1a64, round_count, shuffle, SplitMix64};

/// The embedding method a score came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Muse,
    Laser,
    Labse,
    Other,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Muse => "MUSE",
            Method::Laser => "LASER",
            Method::Labse => "LABSE",
            Method::Other => "OTHER",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Muse, Method::Laser, Method::Labse, Method::Other]
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairScore {
    pub pair_id: u64,
    pub method: Method,
    pub score: f64,
}

/// What to do with pairs that have no precomputed vector on one side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Fail with `MISSING_EMBEDDINGS`.
    #[default]
    Strict,
    /// Treat such pairs as uncovered.
    Permissive,
}

/// A corpus with at most one similarity score per pair. Pairs without a
/// score are "uncovered" and rank below every scored pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredCorpus {
    corpus: Corpus,
    method: Method,
    // aligned with corpus.pairs()
    scores: Vec<Option<f64>>,
}

impl ScoredCorpus {
    /// Attaches externally computed scores (e.g. read back from a score
    /// file). Corpus pairs absent from `scores` become uncovered.
    pub fn from_scores(corpus: Corpus, method: Method, scores: &HashMap<u64, f64>) -> Result<Self> {
        let mut known = 0;
        let aligned = corpus
            .iter()
            .map(|p| {
                let s = scores.get(&p.pair_id).copied();
                known += usize::from(s.is_some());
                s
            })
            .collect::<Vec<_>>();
        if known != scores.len() {
            let ids: std::collections::HashSet<u64> = corpus.ids().collect();
            let mut unknown: Vec<u64> = scores
                .keys()
                .copied()
                .filter(|id| !ids.contains(id))
                .collect();
            unknown.sort_unstable();
            return Err(Error::UnknownPairId(unknown[0]));
        }
        for &s in scores.values() {
            if !(-1.0..=1.0).contains(&s) {
                return Err(Error::InvalidNumber {
                    context: "score outside [-1, 1]".into(),
                    token: s.to_string(),
                });
            }
        }
        Ok(ScoredCorpus {
            corpus,
            method,
            scores: aligned,
        })
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn into_corpus(self) -> Corpus {
        self.corpus
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Scored pairs in corpus order.
    pub fn scores(&self) -> impl Iterator<Item = PairScore> + '_ {
        self.corpus
            .iter()
            .zip(&self.scores)
            .filter_map(move |(p, s)| {
                s.map(|score| PairScore {
                    pair_id: p.pair_id,
                    method: self.method,
                    score,
                })
            })
    }

    pub fn score_map(&self) -> BTreeMap<u64, f64> {
        self.scores().map(|s| (s.pair_id, s.score)).collect()
    }

    /// Ids of pairs without a score, in corpus order.
    pub fn uncovered(&self) -> Vec<u64> {
        self.corpus
            .iter()
            .zip(&self.scores)
            .filter_map(|(p, s)| s.is_none().then_some(p.pair_id))
            .collect()
    }

    /// Corpus positions from best to worst: scored pairs by descending score,
    /// then uncovered pairs; ties broken by ascending pair id.
    pub fn ranking(&self) -> Vec<usize> {
        let pairs = self.corpus.pairs();
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.sort_unstable_by(|&a, &b| {
            let key = |i: usize| self.scores[i];
            match (key(a), key(b)) {
                (Some(x), Some(y)) => y.total_cmp(&x),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, Some(_)) => std::cmp::Ordering::Greater,
                (None, None) => std::cmp::Ordering::Equal,
            }
            .then(pairs[a].pair_id.cmp(&pairs[b].pair_id))
        });
        order
    }

    /// `pair_id<TAB>score` lines with six decimals, in corpus order.
    pub fn write_scores_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for s in self.scores() {
            writeln!(out, "{}\t{:.6}", s.pair_id, s.score)?;
        }
        Ok(())
    }

    pub fn write_scores(&self, path: &Path) -> Result<()> {
        write_with(path, |out| self.write_scores_to(out))
    }

    pub fn write_uncovered(&self, path: &Path) -> Result<()> {
        write_with(path, |out| {
            self.uncovered()
                .iter()
                .try_for_each(|id| writeln!(out, "{id}"))
        })
    }
}

pub(crate) fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    f(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a `pair_id<TAB>score` file.
pub fn read_score_file(path: &Path) -> Result<HashMap<u64, f64>> {
    let mut lines = LineReader::open(path)?;
    let mut scores = HashMap::new();
    while let Some(line) = lines.next_line()? {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |reason: &str| Error::MalformedTsv {
            path: path.to_path_buf(),
            line: lines.line_no,
            reason: reason.to_string(),
        };
        let (id, score) = line
            .split_once('\t')
            .ok_or_else(|| malformed("expected pair_id<TAB>score"))?;
        let id: u64 = id
            .trim()
            .parse()
            .map_err(|_| malformed("invalid pair id"))?;
        let score: f64 = score
            .trim()
            .parse()
            .map_err(|_| malformed("invalid score"))?;
        if !score.is_finite() {
            return Err(malformed("non-finite score"));
        }
        if scores.insert(id, score).is_some() {
            return Err(Error::DuplicatePairId(id));
        }
    }
    Ok(scores)
}

/// Scores each pair by the cosine of the mean word vectors of its two sides.
/// Pairs where either side has no in-vocabulary token (or pools to a zero
/// vector) are left uncovered.
pub fn score_pairs_muse(
    corpus: Corpus,
    source_table: &WordEmbeddingTable,
    target_table: &WordEmbeddingTable,
) -> Result<ScoredCorpus> {
    if source_table.dim() != target_table.dim() {
        return Err(Error::DimensionMismatch {
            context: "word tables".into(),
            expected: source_table.dim(),
            found: target_table.dim(),
        });
    }
    let scores = corpus
        .pairs()
        .par_iter()
        .map(|p| {
            let s = embed_sentence_mean(&tokenize(&p.source_text), source_table)?;
            let t = embed_sentence_mean(&tokenize(&p.target_text), target_table)?;
            cosine(s.as_slice(), t.as_slice()).ok()
        })
        .collect();
    Ok(ScoredCorpus {
        corpus,
        method: Method::Muse,
        scores,
    })
}

/// Scores each pair by the cosine of its precomputed source and target
/// sentence vectors.
pub fn score_pairs_precomputed(
    corpus: Corpus,
    source: &EmbeddingStore,
    target: &EmbeddingStore,
    method: Method,
    policy: MissingPolicy,
) -> Result<ScoredCorpus> {
    if source.dim() != target.dim() {
        return Err(Error::DimensionMismatch {
            context: "embedding files".into(),
            expected: source.dim(),
            found: target.dim(),
        });
    }
    if policy == MissingPolicy::Strict {
        let missing: Vec<u64> = corpus
            .ids()
            .filter(|&id| !source.contains(id) || !target.contains(id))
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingEmbeddings(missing));
        }
    }
    let scores = corpus
        .pairs()
        .par_iter()
        .map(|p| {
            let s = source.get(p.pair_id)?;
            let t = target.get(p.pair_id)?;
            cosine(s, t).ok()
        })
        .collect();
    Ok(ScoredCorpus {
        corpus,
        method,
        scores,
    })
}

/// A fraction in `(0, 1]` of a corpus to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetentionSpec {
    fraction: f64,
}

impl RetentionSpec {
    pub fn new(fraction: f64) -> Result<Self> {
        if fraction > 0.0 && fraction <= 1.0 {
            Ok(RetentionSpec { fraction })
        } else {
            Err(Error::InvalidConfig(format!(
                "fraction {fraction} is not in (0, 1]"
            )))
        }
    }

    pub fn fraction(self) -> f64 {
        self.fraction
    }

    /// `round(fraction * n)`, halves rounded up.
    pub fn count(self, n: usize) -> usize {
        round_count(self.fraction, n)
    }
}

/// Keeps the best-ranked `round(fraction * N)` pairs (see
/// [`ScoredCorpus::ranking`]) in their original corpus order.
pub fn retain_top_fraction(scored: &ScoredCorpus, spec: RetentionSpec) -> Corpus {
    let k = spec.count(scored.len());
    let mut keep = scored.ranking();
    keep.truncate(k);
    keep.sort_unstable();
    scored.corpus.select_positions(&keep)
}

/// Uniformly random `round(fraction * N)` pairs, chosen by a seeded
/// Fisher–Yates shuffle of corpus positions; corpus order is preserved.
pub fn random_subset(corpus: &Corpus, spec: RetentionSpec, seed: u64) -> Corpus {
    let k = spec.count(corpus.len());
    let mut positions: Vec<usize> = (0..corpus.len()).collect();
    shuffle(&mut positions, &mut SplitMix64::new(seed));
    positions.truncate(k);
    positions.sort_unstable();
    corpus.select_positions(&positions)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    train_fraction: f64,
    seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        if train_fraction > 0.0 && train_fraction < 1.0 {
            Ok(SplitSpec {
                train_fraction,
                seed,
            })
        } else {
            Err(Error::InvalidConfig(format!(
                "train fraction {train_fraction} is not in (0, 1)"
            )))
        }
    }

    pub fn train_fraction(self) -> f64 {
        self.train_fraction
    }

    pub fn seed(self) -> u64 {
        self.seed
    }
}

/// Seed for one origin stratum: `seed XOR fnv1a64(origin name)`.
pub fn stratum_seed(seed: u64, origin: Origin) -> u64 {
    seed ^ fnv1a64(origin.as_str().as_bytes())
}

/// Splits each origin stratum independently: shuffle its positions with the
/// stratum seed and send the first `round(train_fraction * size)` to train.
/// Both halves keep corpus order.
pub fn stratified_split(corpus: &Corpus, spec: SplitSpec) -> (Corpus, Corpus) {
    let mut strata: BTreeMap<Origin, Vec<usize>> = BTreeMap::new();
    for (i, p) in corpus.iter().enumerate() {
        strata.entry(p.origin).or_default().push(i);
    }
    let mut train = Vec::with_capacity(corpus.len());
    let mut valid = Vec::with_capacity(corpus.len());
    for (origin, mut positions) in strata {
        let k = round_count(spec.train_fraction, positions.len());
        shuffle(
            &mut positions,
            &mut SplitMix64::new(stratum_seed(spec.seed, origin)),
        );
        train.extend_from_slice(&positions[..k]);
        valid.extend_from_slice(&positions[k..]);
    }
    train.sort_unstable();
    valid.sort_unstable();
    (
        corpus.select_positions(&train),
        corpus.select_positions(&valid),
    )
}
