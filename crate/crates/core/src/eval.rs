//! Corpus BLEU compatible with SacreBLEU's defaults (13a tokenization,
//! case-sensitive, BLEU-4, exponential smoothing), plus Pearson correlation
//! and score histograms for comparing filtering methods.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign};
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;

use crate::error::{Error, Result};
use crate::filter::{Method, ScoredCorpus};

pub const MAX_NGRAM_ORDER: usize = 4;

/// Whitespace as understood by Python's `str.split()`: Unicode White_Space
/// plus the ASCII information separators U+001C..U+001F.
fn is_py_whitespace(c: char) -> bool {
    c.is_whitespace() || ('\u{1c}'..='\u{1f}').contains(&c)
}

struct Rules {
    symbols: Regex,
    period_comma_after_nondigit: Regex,
    period_comma_before_nondigit: Regex,
    dash_after_digit: Regex,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        symbols: Regex::new(r"([{-~\[-` -&(-+:-@/])").unwrap(),
        period_comma_after_nondigit: Regex::new(r"([^0-9])([.,])").unwrap(),
        period_comma_before_nondigit: Regex::new(r"([.,])([^0-9])").unwrap(),
        dash_after_digit: Regex::new(r"([0-9])(-)").unwrap(),
    })
}

/// The `13a` tokenizer (mteval-v13a), token for token.
pub fn tokenize_13a(text: &str) -> Vec<String> {
    let mut line = text
        .trim_end_matches(is_py_whitespace)
        .replace("<skipped>", "");
    line = line.replace("-\n", "").replace('\n', " ");
    if line.contains('&') {
        line = line
            .replace("&quot;", "\"")
            .replace("&amp;", "&")
            .replace("&lt;", "<")
            .replace("&gt;", ">");
    }
    let r = rules();
    let line = format!(" {line} ");
    let line = r.symbols.replace_all(&line, " ${1} ");
    let line = r
        .period_comma_after_nondigit
        .replace_all(&line, "${1} ${2} ");
    let line = r
        .period_comma_before_nondigit
        .replace_all(&line, " ${1} ${2}");
    let line = r.dash_after_digit.replace_all(&line, "${1} ${2} ");
    line.split(is_py_whitespace)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Sufficient statistics for corpus BLEU; sums over segments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BleuStats {
    pub hyp_len: u64,
    pub ref_len: u64,
    pub correct: [u64; MAX_NGRAM_ORDER],
    pub total: [u64; MAX_NGRAM_ORDER],
}

impl Add for BleuStats {
    type Output = BleuStats;

    fn add(mut self, rhs: BleuStats) -> BleuStats {
        self += rhs;
        self
    }
}

impl AddAssign for BleuStats {
    fn add_assign(&mut self, rhs: BleuStats) {
        self.hyp_len += rhs.hyp_len;
        self.ref_len += rhs.ref_len;
        for n in 0..MAX_NGRAM_ORDER {
            self.correct[n] += rhs.correct[n];
            self.total[n] += rhs.total[n];
        }
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], u64> {
    let mut counts = HashMap::new();
    for gram in tokens.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

impl BleuStats {
    /// Clipped n-gram matches of one hypothesis against one reference.
    pub fn segment(hypothesis: &str, reference: &str) -> Self {
        let hyp = tokenize_13a(hypothesis);
        let reference = tokenize_13a(reference);
        let mut stats = BleuStats {
            hyp_len: hyp.len() as u64,
            ref_len: reference.len() as u64,
            ..Default::default()
        };
        for n in 1..=MAX_NGRAM_ORDER {
            let ref_counts = ngram_counts(&reference, n);
            for (gram, count) in ngram_counts(&hyp, n) {
                stats.total[n - 1] += count;
                if let Some(&r) = ref_counts.get(gram) {
                    stats.correct[n - 1] += count.min(r);
                }
            }
        }
        stats
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BleuResult {
    /// 0..=100.
    pub score: f64,
    /// Smoothed modified precisions for orders 1..=4, as fractions.
    pub precisions: [f64; MAX_NGRAM_ORDER],
    pub brevity_penalty: f64,
    pub hyp_len: u64,
    pub ref_len: u64,
    pub stats: BleuStats,
}

impl BleuResult {
    /// Scores aggregated statistics the way the reference tool does,
    /// including its early exit when nothing matches and its `exp`
    /// smoothing (the k-th zero-count order gets precision 1 / (2^k * total)).
    #[allow(clippy::needless_range_loop)]
    pub fn from_stats(stats: BleuStats) -> Self {
        let (hyp_len, ref_len) = (stats.hyp_len, stats.ref_len);
        let brevity_penalty = if hyp_len >= ref_len {
            1.0
        } else if hyp_len > 0 {
            (1.0 - ref_len as f64 / hyp_len as f64).exp()
        } else {
            0.0
        };
        // Fractions rather than the reference tool's percentages, so that a
        // perfect match scores exactly 100 (ln 1 = 0).
        let mut precisions = [0.0f64; MAX_NGRAM_ORDER];
        let mut score = 0.0;
        if stats.correct.iter().any(|&c| c > 0) {
            let mut smooth = 1.0f64;
            for n in 0..MAX_NGRAM_ORDER {
                let total = stats.total[n];
                if total == 0 {
                    break;
                }
                precisions[n] = if stats.correct[n] == 0 {
                    smooth *= 2.0;
                    1.0 / (smooth * total as f64)
                } else {
                    stats.correct[n] as f64 / total as f64
                };
            }
            let log_sum: f64 = precisions
                .iter()
                .map(|&p| if p == 0.0 { -9_999_999_999.0 } else { p.ln() })
                .sum();
            score = brevity_penalty * (log_sum / MAX_NGRAM_ORDER as f64).exp() * 100.0;
        }
        BleuResult {
            score,
            precisions,
            brevity_penalty,
            hyp_len,
            ref_len,
            stats,
        }
    }
}

impl fmt::Display for BleuResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precisions.map(|p| p * 100.0);
        write!(
            f,
            "BLEU = {:.3} {:.1}/{:.1}/{:.1}/{:.1} (BP = {:.3}, hyp_len = {}, ref_len = {})",
            self.score, p[0], p[1], p[2], p[3], self.brevity_penalty, self.hyp_len, self.ref_len
        )
    }
}

/// Corpus-level BLEU of hypotheses against single references.
pub fn corpus_bleu<H, R>(hypotheses: &[H], references: &[R]) -> Result<BleuResult>
where
    H: AsRef<str> + Sync,
    R: AsRef<str> + Sync,
{
    if hypotheses.len() != references.len() {
        return Err(Error::LengthMismatch {
            left: hypotheses.len(),
            right: references.len(),
        });
    }
    if hypotheses.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let stats = hypotheses
        .par_iter()
        .zip(references.par_iter())
        .map(|(h, r)| BleuStats::segment(h.as_ref(), r.as_ref()))
        .reduce(BleuStats::default, Add::add);
    Ok(BleuResult::from_stats(stats))
}

/// Sample Pearson correlation coefficient, clamped to `[-1, 1]`.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let n = xs.len();
    if n < 2 {
        return Err(Error::TooFewSamples(n));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantSeries);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub r: f64,
    pub n: usize,
    pub method_a: Method,
    pub method_b: Method,
}

impl fmt::Display for CorrelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method_a: {}", self.method_a)?;
        writeln!(f, "method_b: {}", self.method_b)?;
        writeln!(f, "n: {}", self.n)?;
        writeln!(f, "r: {:.6}", self.r)
    }
}

/// Pearson r over the pair ids scored by both methods.
pub fn correlate(
    a: &BTreeMap<u64, f64>,
    method_a: Method,
    b: &BTreeMap<u64, f64>,
    method_b: Method,
) -> Result<CorrelationReport> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .iter()
        .filter_map(|(id, &x)| b.get(id).map(|&y| (x, y)))
        .unzip();
    Ok(CorrelationReport {
        r: pearson(&xs, &ys)?,
        n: xs.len(),
        method_a,
        method_b,
    })
}

/// Equal-width histogram over `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidConfig(
                "histogram needs at least one bin".into(),
            ));
        }
        let edges = (0..=bins)
            .map(|i| -1.0 + 2.0 * i as f64 / bins as f64)
            .collect();
        Ok(Histogram {
            edges,
            counts: vec![0; bins],
        })
    }

    /// Adds a score; values outside `[-1, 1]` land in the end bins.
    pub fn add(&mut self, score: f64) {
        let bins = self.counts.len();
        let pos = ((score + 1.0) / 2.0 * bins as f64).floor();
        let bin = if pos <= 0.0 {
            0
        } else {
            (pos as usize).min(bins - 1)
        };
        self.counts[bin] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn score_histogram(scored: &ScoredCorpus, bins: usize) -> Result<Histogram> {
    let mut h = Histogram::new(bins)?;
    scored.scores().for_each(|s| h.add(s.score));
    Ok(h)
}
