//! The `bitext-filter` command line.
//!
//! Every subcommand reads a flat `key = value` config file (optional),
//! applies overrides from flags, and writes its artifacts into the output
//! directory. All randomness comes from seeds in the config.
//!
//! Recognised keys:
//!
//! | key | meaning |
//! |---|---|
//! | `input.tsv` | comma-separated corpus TSV files for `preprocess` |
//! | `input.<origin>.source`, `input.<origin>.target` | aligned text files for `preprocess` |
//! | `corpus` | stage input corpus TSV (default `<output_dir>/preprocessed.tsv`) |
//! | `method` | `muse` or `precomputed` |
//! | `method_tag` | label for precomputed scores: `laser`, `labse`, `other` |
//! | `source_table`, `target_table` | word-vector text files (`muse`) |
//! | `source_embeddings`, `target_embeddings` | EMBF files (`precomputed`) |
//! | `scores` | score TSV for `filter` (default `<output_dir>/scores_<tag>.tsv`) |
//! | `fractions` | retention / sampling fractions, e.g. `0.2,0.6` |
//! | `seeds` | sampling seeds, e.g. `1,2,3` |
//! | `train_fraction`, `split_seed` | stratified split parameters |
//! | `min_chars`, `max_chars` | length filter bounds |
//! | `missing_embeddings` | `strict` or `permissive` |
//! | `bins` | histogram bins in `report` |
//! | `hypotheses`, `references` | `bleu` inputs |
//! | `scores_a`, `scores_b`, `method_a`, `method_b` | `correlate` inputs |
//! | `output_dir`, `threads` | as the flags |

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{self, Corpus, Origin};
use crate::embed::{load_embedding_file, load_word_table};
use crate::error::{Error, Result};
use crate::eval::{corpus_bleu, correlate, Histogram};
use crate::filter::{
    random_subset, read_score_file, retain_top_fraction, score_pairs_muse, score_pairs_precomputed,
    stratified_split, Method, MissingPolicy, RetentionSpec, ScoredCorpus, SplitSpec,
};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "bitext-filter",
    version,
    about = "Filter and evaluate parallel corpora"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Flat key=value config file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, value_name = "PATH")]
    pub output_dir: Option<PathBuf>,

    /// Worker threads (0 = all cores). Never changes outputs.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Fail when a pair has no precomputed embedding (default).
    #[arg(long, global = true, conflicts_with = "permissive")]
    pub strict: bool,

    /// Leave pairs without precomputed embeddings unscored.
    #[arg(long, global = true)]
    pub permissive: bool,

    /// Override any config key.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ingest, deduplicate and clean a corpus.
    Preprocess {
        /// Corpus TSV input(s); repeatable.
        #[arg(long)]
        input: Vec<PathBuf>,
    },
    /// Score every pair with cosine similarity.
    Score {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        method: Option<String>,
    },
    /// Keep the best-scoring fraction(s) of a corpus.
    Filter {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        fractions: Option<String>,
    },
    /// Draw seeded random subsets.
    Sample {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        fractions: Option<String>,
        #[arg(long)]
        seeds: Option<String>,
    },
    /// Stratified train/validation split.
    Split {
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long)]
        train_fraction: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Corpus BLEU of a hypothesis file against a reference file.
    Bleu {
        #[arg(long = "hyp")]
        hypotheses: Option<PathBuf>,
        #[arg(long = "ref")]
        references: Option<PathBuf>,
    },
    /// Pearson correlation between two score files.
    Correlate {
        #[arg(long)]
        scores_a: Option<PathBuf>,
        #[arg(long)]
        scores_b: Option<PathBuf>,
    },
    /// Summarise the datasets and score files in the output directory.
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Preprocess { .. } => "preprocess",
            Command::Score { .. } => "score",
            Command::Filter { .. } => "filter",
            Command::Sample { .. } => "sample",
            Command::Split { .. } => "split",
            Command::Bleu { .. } => "bleu",
            Command::Correlate { .. } => "correlate",
            Command::Report => "report",
        }
    }

    fn overrides(&self) -> Vec<(String, String)> {
        let mut kv = Vec::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                kv.push((k.to_string(), v));
            }
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        match self {
            Command::Preprocess { input } => {
                if !input.is_empty() {
                    let joined = input
                        .iter()
                        .map(|p| p.display().to_string())
                        .collect::<Vec<_>>();
                    put("input.tsv", Some(joined.join(",")));
                }
            }
            Command::Score { corpus, method } => {
                put("corpus", path(corpus));
                put("method", method.clone());
            }
            Command::Filter {
                corpus,
                scores,
                fractions,
            } => {
                put("corpus", path(corpus));
                put("scores", path(scores));
                put("fractions", fractions.clone());
            }
            Command::Sample {
                corpus,
                fractions,
                seeds,
            } => {
                put("corpus", path(corpus));
                put("fractions", fractions.clone());
                put("seeds", seeds.clone());
            }
            Command::Split {
                corpus,
                train_fraction,
                seed,
            } => {
                put("corpus", path(corpus));
                put("train_fraction", train_fraction.map(|f| f.to_string()));
                put("split_seed", seed.map(|s| s.to_string()));
            }
            Command::Bleu {
                hypotheses,
                references,
            } => {
                put("hypotheses", path(hypotheses));
                put("references", path(references));
            }
            Command::Correlate { scores_a, scores_b } => {
                put("scores_a", path(scores_a));
                put("scores_b", path(scores_b));
            }
            Command::Report => {}
        }
        kv
    }
}

/// How sentence vectors are obtained for `score`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoringBackend {
    Muse,
    Precomputed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelInput {
    pub origin: Origin,
    pub source: PathBuf,
    pub target: PathBuf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub parallel_inputs: Vec<ParallelInput>,
    pub tsv_inputs: Vec<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub backend: ScoringBackend,
    pub method_tag: Method,
    pub source_table: Option<PathBuf>,
    pub target_table: Option<PathBuf>,
    pub source_embeddings: Option<PathBuf>,
    pub target_embeddings: Option<PathBuf>,
    pub scores: Option<PathBuf>,
    pub fractions: Vec<f64>,
    pub seeds: Vec<u64>,
    pub train_fraction: f64,
    pub split_seed: u64,
    pub min_chars: usize,
    pub max_chars: usize,
    pub missing: MissingPolicy,
    pub bins: usize,
    pub hypotheses: Option<PathBuf>,
    pub references: Option<PathBuf>,
    pub scores_a: Option<PathBuf>,
    pub scores_b: Option<PathBuf>,
    pub method_a: Method,
    pub method_b: Method,
    pub output_dir: PathBuf,
    pub threads: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            parallel_inputs: Vec::new(),
            tsv_inputs: Vec::new(),
            corpus: None,
            backend: ScoringBackend::Muse,
            method_tag: Method::Muse,
            source_table: None,
            target_table: None,
            source_embeddings: None,
            target_embeddings: None,
            scores: None,
            fractions: vec![0.2, 0.6],
            seeds: vec![1, 2, 3],
            train_fraction: 0.8,
            split_seed: 1,
            min_chars: corpus::DEFAULT_MIN_CHARS,
            max_chars: corpus::DEFAULT_MAX_CHARS,
            missing: MissingPolicy::Strict,
            bins: 20,
            hypotheses: None,
            references: None,
            scores_a: None,
            scores_b: None,
            method_a: Method::Other,
            method_b: Method::Other,
            output_dir: PathBuf::from("out"),
            threads: 0,
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| usage(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

/// Parses `key = value` lines; `#` starts a comment line. Later keys win.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

impl PipelineConfig {
    /// Builds a config from key/value pairs applied in order.
    pub fn from_pairs<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut cfg = PipelineConfig::default();
        let mut method_tag = None;
        let mut parallel: BTreeMap<Origin, (Option<PathBuf>, Option<PathBuf>)> = BTreeMap::new();
        for (k, v) in pairs {
            let (key, value) = (k.as_ref(), v.as_ref());
            let path = || Some(PathBuf::from(value));
            match key {
                "input.tsv" => {
                    cfg.tsv_inputs = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(PathBuf::from)
                        .collect()
                }
                "corpus" => cfg.corpus = path(),
                "method" => {
                    cfg.backend = match value.to_ascii_lowercase().as_str() {
                        "muse" => ScoringBackend::Muse,
                        "precomputed" => ScoringBackend::Precomputed,
                        _ => {
                            return Err(usage(format!(
                                "`method` must be muse or precomputed, got `{value}`"
                            )))
                        }
                    }
                }
                "method_tag" => method_tag = Some(value.parse::<Method>()?),
                "source_table" => cfg.source_table = path(),
                "target_table" => cfg.target_table = path(),
                "source_embeddings" => cfg.source_embeddings = path(),
                "target_embeddings" => cfg.target_embeddings = path(),
                "scores" => cfg.scores = path(),
                "fractions" => cfg.fractions = parse_list(key, value)?,
                "seeds" => cfg.seeds = parse_list(key, value)?,
                "train_fraction" => cfg.train_fraction = parse_value(key, value)?,
                "split_seed" => cfg.split_seed = parse_value(key, value)?,
                "min_chars" => cfg.min_chars = parse_value(key, value)?,
                "max_chars" => cfg.max_chars = parse_value(key, value)?,
                "missing_embeddings" => {
                    cfg.missing = match value.to_ascii_lowercase().as_str() {
                        "strict" => MissingPolicy::Strict,
                        "permissive" => MissingPolicy::Permissive,
                        _ => {
                            return Err(usage(format!(
                                "`missing_embeddings` must be strict or permissive, got `{value}`"
                            )))
                        }
                    }
                }
                "bins" => cfg.bins = parse_value(key, value)?,
                "hypotheses" => cfg.hypotheses = path(),
                "references" => cfg.references = path(),
                "scores_a" => cfg.scores_a = path(),
                "scores_b" => cfg.scores_b = path(),
                "method_a" => cfg.method_a = value.parse()?,
                "method_b" => cfg.method_b = value.parse()?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                "threads" => cfg.threads = parse_value(key, value)?,
                other => {
                    let side = other
                        .strip_prefix("input.")
                        .and_then(|rest| rest.rsplit_once('.'))
                        .filter(|(_, side)| matches!(*side, "source" | "target"));
                    let Some((origin, side)) = side else {
                        return Err(usage(format!("unknown config key `{other}`")));
                    };
                    let origin: Origin = origin
                        .parse()
                        .map_err(|_| usage(format!("unknown origin in `{other}`")))?;
                    let entry = parallel.entry(origin).or_default();
                    if side == "source" {
                        entry.0 = path();
                    } else {
                        entry.1 = path();
                    }
                }
            }
        }
        for (origin, files) in parallel {
            match files {
                (Some(source), Some(target)) => cfg.parallel_inputs.push(ParallelInput {
                    origin,
                    source,
                    target,
                }),
                _ => {
                    return Err(usage(format!(
                        "input.{origin} needs both .source and .target"
                    )))
                }
            }
        }
        cfg.method_tag = match (cfg.backend, method_tag) {
            (ScoringBackend::Muse, None | Some(Method::Muse)) => Method::Muse,
            (ScoringBackend::Muse, Some(tag)) => {
                return Err(usage(format!(
                    "method_tag {tag} requires method = precomputed"
                )))
            }
            (ScoringBackend::Precomputed, Some(Method::Muse)) => {
                return Err(usage("method_tag MUSE requires method = muse"))
            }
            (ScoringBackend::Precomputed, tag) => tag.unwrap_or(Method::Other),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        for &f in &self.fractions {
            RetentionSpec::new(f)?;
        }
        SplitSpec::new(self.train_fraction, self.split_seed)?;
        if self.min_chars > self.max_chars {
            return Err(usage("min_chars exceeds max_chars"));
        }
        if self.bins == 0 {
            return Err(usage("bins must be at least 1"));
        }
        Ok(())
    }

    /// Reads the config file (if any) and applies command-line overrides.
    pub fn from_cli(common: &CommonArgs, command: &Command) -> Result<Self> {
        let mut pairs = match &common.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                parse_config_text(&text)?
            }
            None => Vec::new(),
        };
        pairs.extend(command.overrides());
        for kv in &common.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            pairs.push((k.trim().to_string(), v.trim().to_string()));
        }
        if let Some(dir) = &common.output_dir {
            pairs.push(("output_dir".into(), dir.display().to_string()));
        }
        if let Some(n) = common.threads {
            pairs.push(("threads".into(), n.to_string()));
        }
        if common.strict {
            pairs.push(("missing_embeddings".into(), "strict".into()));
        }
        if common.permissive {
            pairs.push(("missing_embeddings".into(), "permissive".into()));
        }
        Self::from_pairs(pairs)
    }

    fn corpus_path(&self) -> PathBuf {
        self.corpus
            .clone()
            .unwrap_or_else(|| self.output_dir.join("preprocessed.tsv"))
    }

    fn tag(&self) -> String {
        self.method_tag.as_str().to_ascii_lowercase()
    }

    fn scores_path(&self) -> PathBuf {
        self.scores
            .clone()
            .unwrap_or_else(|| self.output_dir.join(format!("scores_{}.tsv", self.tag())))
    }
}

/// Percent label for file names: 0.2 → "20", 0.125 → "12.5".
pub fn percent_label(fraction: f64) -> String {
    let p = (fraction * 100.0 * 1e6).round() / 1e6;
    format!("{p}")
}

fn require<'a>(value: &'a Option<PathBuf>, key: &str) -> Result<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| usage(format!("`{key}` is required")))
}

/// Files written and text to print for one subcommand run.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub stdout: String,
}

impl Outcome {
    fn wrote(&mut self, path: PathBuf) {
        let _ = writeln!(self.stdout, "wrote {}", path.display());
        self.written.push(path);
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn read_nonempty_corpus(path: &Path) -> Result<Corpus> {
    let c = corpus::read_tsv(path)?;
    if c.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(c)
}

/// Runs one subcommand on a bounded thread pool.
pub fn execute(command: &Command, cfg: &PipelineConfig) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| usage(format!("cannot start {} threads: {e}", cfg.threads)))?;
    pool.install(|| match command {
        Command::Preprocess { .. } => cmd_preprocess(cfg),
        Command::Score { .. } => cmd_score(cfg),
        Command::Filter { .. } => cmd_filter(cfg),
        Command::Sample { .. } => cmd_sample(cfg),
        Command::Split { .. } => cmd_split(cfg),
        Command::Bleu { .. } => cmd_bleu(cfg),
        Command::Correlate { .. } => cmd_correlate(cfg),
        Command::Report => cmd_report(cfg),
    })
}

pub fn cmd_preprocess(cfg: &PipelineConfig) -> Result<Outcome> {
    if cfg.parallel_inputs.is_empty() && cfg.tsv_inputs.is_empty() {
        return Err(usage(
            "no input: set input.tsv or input.<origin>.source/.target",
        ));
    }
    let mut pairs = Vec::new();
    let mut provenance = Vec::new();
    let mut next_id = 0u64;
    let mut first = true;
    for input in &cfg.parallel_inputs {
        let mut part = Corpus::default();
        part.ingest_parallel(&input.source, &input.target, input.origin)?;
        append(&mut pairs, &mut next_id, &mut first, part, &mut provenance);
    }
    for path in &cfg.tsv_inputs {
        let part = corpus::read_tsv(path)?;
        append(&mut pairs, &mut next_id, &mut first, part, &mut provenance);
    }
    let input = Corpus::new(pairs, provenance.join("; "))?;
    if input.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let (clean, stats) = corpus::preprocess_with(&input, cfg.min_chars, cfg.max_chars);

    ensure_dir(&cfg.output_dir)?;
    let mut out = Outcome::default();
    let tsv = cfg.output_dir.join("preprocessed.tsv");
    corpus::write_tsv(&clean, &tsv)?;
    out.wrote(tsv);
    let report = cfg.output_dir.join("preprocess_stats.txt");
    let text = format!("input_pairs: {}\n{}", input.len(), stats.to_report());
    fs::write(&report, text).map_err(|e| Error::io(&report, e))?;
    out.wrote(report);
    Ok(out)
}

/// The first input keeps its ids; later inputs are numbered after the
/// running maximum, in their own order.
fn append(
    pairs: &mut Vec<corpus::SentencePair>,
    next_id: &mut u64,
    first: &mut bool,
    part: Corpus,
    provenance: &mut Vec<String>,
) {
    provenance.push(part.provenance().to_string());
    let renumber = !*first;
    *first = false;
    for mut p in part.into_pairs() {
        if renumber {
            p.pair_id = *next_id;
        }
        *next_id = (*next_id).max(p.pair_id + 1);
        pairs.push(p);
    }
}

pub fn cmd_score(cfg: &PipelineConfig) -> Result<Outcome> {
    let corpus = read_nonempty_corpus(&cfg.corpus_path())?;
    let scored = match cfg.backend {
        ScoringBackend::Muse => {
            let src = load_word_table(require(&cfg.source_table, "source_table")?)?;
            let tgt = load_word_table(require(&cfg.target_table, "target_table")?)?;
            score_pairs_muse(corpus, &src, &tgt)?
        }
        ScoringBackend::Precomputed => {
            let src = load_embedding_file(require(&cfg.source_embeddings, "source_embeddings")?)?;
            let tgt = load_embedding_file(require(&cfg.target_embeddings, "target_embeddings")?)?;
            score_pairs_precomputed(corpus, &src, &tgt, cfg.method_tag, cfg.missing)?
        }
    };
    ensure_dir(&cfg.output_dir)?;
    let mut out = Outcome::default();
    let scores = cfg.output_dir.join(format!("scores_{}.tsv", cfg.tag()));
    scored.write_scores(&scores)?;
    out.wrote(scores);
    let uncovered = cfg.output_dir.join(format!("uncovered_{}.txt", cfg.tag()));
    scored.write_uncovered(&uncovered)?;
    out.wrote(uncovered);
    Ok(out)
}

pub fn cmd_filter(cfg: &PipelineConfig) -> Result<Outcome> {
    let corpus = read_nonempty_corpus(&cfg.corpus_path())?;
    let scores = read_score_file(&cfg.scores_path())?;
    let scored = ScoredCorpus::from_scores(corpus, cfg.method_tag, &scores)?;
    ensure_dir(&cfg.output_dir)?;
    let mut out = Outcome::default();
    for &f in &cfg.fractions {
        let kept = retain_top_fraction(&scored, RetentionSpec::new(f)?);
        let path = cfg
            .output_dir
            .join(format!("filtered_{}_{}.tsv", cfg.tag(), percent_label(f)));
        corpus::write_tsv(&kept, &path)?;
        out.wrote(path);
    }
    Ok(out)
}

pub fn cmd_sample(cfg: &PipelineConfig) -> Result<Outcome> {
    let corpus = read_nonempty_corpus(&cfg.corpus_path())?;
    if cfg.seeds.is_empty() {
        return Err(usage("`seeds` is empty"));
    }
    ensure_dir(&cfg.output_dir)?;
    let mut out = Outcome::default();
    for &f in &cfg.fractions {
        for &seed in &cfg.seeds {
            let subset = random_subset(&corpus, RetentionSpec::new(f)?, seed);
            let path = cfg
                .output_dir
                .join(format!("random_{}_seed{seed}.tsv", percent_label(f)));
            corpus::write_tsv(&subset, &path)?;
            out.wrote(path);
        }
    }
    Ok(out)
}

pub fn cmd_split(cfg: &PipelineConfig) -> Result<Outcome> {
    let path = cfg.corpus_path();
    let corpus = read_nonempty_corpus(&path)?;
    let (train, valid) =
        stratified_split(&corpus, SplitSpec::new(cfg.train_fraction, cfg.split_seed)?);
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "corpus".into());
    ensure_dir(&cfg.output_dir)?;
    let mut out = Outcome::default();
    for (part, c) in [("train", &train), ("valid", &valid)] {
        let p = cfg.output_dir.join(format!("{stem}.{part}.tsv"));
        corpus::write_tsv(c, &p)?;
        out.wrote(p);
    }
    Ok(out)
}

fn read_segments(path: &Path) -> Result<Vec<String>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|e| {
        let valid = &e.as_bytes()[..e.utf8_error().valid_up_to()];
        Error::InvalidEncoding {
            path: path.to_path_buf(),
            line: valid.iter().filter(|&&b| b == b'\n').count() + 1,
        }
    })?;
    Ok(text
        .lines()
        .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
        .collect())
}

pub fn cmd_bleu(cfg: &PipelineConfig) -> Result<Outcome> {
    let hyps = read_segments(require(&cfg.hypotheses, "hypotheses")?)?;
    let refs = read_segments(require(&cfg.references, "references")?)?;
    let result = corpus_bleu(&hyps, &refs)?;
    Ok(Outcome {
        written: Vec::new(),
        stdout: format!("{result}\n"),
    })
}

pub fn cmd_correlate(cfg: &PipelineConfig) -> Result<Outcome> {
    let load =
        |p: &Path| -> Result<BTreeMap<u64, f64>> { Ok(read_score_file(p)?.into_iter().collect()) };
    let a = load(require(&cfg.scores_a, "scores_a")?)?;
    let b = load(require(&cfg.scores_b, "scores_b")?)?;
    let report = correlate(&a, cfg.method_a, &b, cfg.method_b)?;
    ensure_dir(&cfg.output_dir)?;
    let path = cfg.output_dir.join(format!(
        "correlation_{}_{}.txt",
        cfg.method_a.as_str().to_ascii_lowercase(),
        cfg.method_b.as_str().to_ascii_lowercase()
    ));
    fs::write(&path, report.to_string()).map_err(|e| Error::io(&path, e))?;
    let mut out = Outcome {
        stdout: report.to_string(),
        ..Default::default()
    };
    out.wrote(path);
    Ok(out)
}

fn histogram_line(h: &Histogram) -> String {
    h.counts
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// Dataset sizes per origin for every corpus TSV in the output directory,
/// plus score histograms for every score file.
pub fn cmd_report(cfg: &PipelineConfig) -> Result<Outcome> {
    let dir = &cfg.output_dir;
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "tsv"))
        .collect();
    files.sort();

    let mut text = String::new();
    let origins = Origin::ALL.map(|o| o.as_str()).join("\t");
    let _ = writeln!(text, "dataset\tpairs\t{origins}");
    let mut histograms = String::new();
    for path in &files {
        let name = path
            .file_stem()
            .unwrap_or_default()
            .to_string_lossy()
            .into_owned();
        if name.starts_with("scores_") {
            let scores = read_score_file(path)?;
            let mut h = Histogram::new(cfg.bins)?;
            let mut values: Vec<(u64, f64)> = scores.into_iter().collect();
            values.sort_by_key(|&(id, _)| id);
            values.iter().for_each(|&(_, s)| h.add(s));
            let _ = writeln!(histograms, "{name}\t{}\t{}", h.total(), histogram_line(&h));
            continue;
        }
        let corpus = corpus::read_tsv(path)?;
        let stats = corpus::corpus_stats(&corpus);
        let per_origin = Origin::ALL
            .map(|o| {
                stats
                    .per_origin_counts
                    .get(&o)
                    .copied()
                    .unwrap_or(0)
                    .to_string()
            })
            .join("\t");
        let _ = writeln!(text, "{name}\t{}\t{per_origin}", stats.total_pairs);
    }
    if !histograms.is_empty() {
        let _ = writeln!(
            text,
            "\nscores\tscored\thistogram[{} bins over -1..1]",
            cfg.bins
        );
        text.push_str(&histograms);
    }
    let path = dir.join("report.txt");
    fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
    let mut out = Outcome {
        stdout: text,
        ..Default::default()
    };
    out.wrote(path);
    Ok(out)
}

/// Parses arguments, runs the subcommand and returns the process exit code:
/// 0 on success, 2 for usage errors, 3 for data errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = PipelineConfig::from_cli(&cli.common, &cli.command)
        .and_then(|cfg| execute(&cli.command, &cfg));
    match result {
        Ok(outcome) => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            let _ = stdout
                .write_all(outcome.stdout.as_bytes())
                .and_then(|_| stdout.flush());
            0
        }
        Err(e) => {
            eprintln!("{}", e.diagnostic());
            if e.is_usage() {
                EXIT_USAGE
            } else {
                EXIT_DATA
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_text_and_overrides() {
        let text = "# grid\nfractions = 0.2, 0.6\nseeds=1,2,3\n\nmethod = precomputed\nmethod_tag = laser\n";
        let mut pairs = parse_config_text(text).unwrap();
        pairs.push(("fractions".into(), "0.5".into()));
        let cfg = PipelineConfig::from_pairs(pairs).unwrap();
        assert_eq!(cfg.fractions, [0.5]);
        assert_eq!(cfg.seeds, [1, 2, 3]);
        assert_eq!(cfg.backend, ScoringBackend::Precomputed);
        assert_eq!(cfg.method_tag, Method::Laser);
    }

    #[test]
    fn config_rejects_bad_values() {
        let bad = |k: &str, v: &str| PipelineConfig::from_pairs([(k, v)]).unwrap_err();
        assert!(bad("fractions", "0.2,0").is_usage());
        assert!(bad("fractions", "1.5").is_usage());
        assert!(bad("train_fraction", "1").is_usage());
        assert!(bad("nonsense", "1").is_usage());
        assert!(bad("method", "bert").is_usage());
        assert!(bad("input.ecdc.source", "a.en").is_usage());
        assert!(bad("method_tag", "laser").is_usage());
        assert!(parse_config_text("no equals sign").unwrap_err().is_usage());
    }

    #[test]
    fn parallel_inputs_by_origin() {
        let cfg = PipelineConfig::from_pairs([
            ("input.emea.source", "e.en"),
            ("input.emea.target", "e.pl"),
            ("input.ECDC.target", "c.pl"),
            ("input.ECDC.source", "c.en"),
        ])
        .unwrap();
        let origins: Vec<Origin> = cfg.parallel_inputs.iter().map(|p| p.origin).collect();
        assert_eq!(origins, [Origin::Ecdc, Origin::Emea]);
        assert_eq!(cfg.parallel_inputs[0].source, PathBuf::from("c.en"));
    }

    #[test]
    fn percent_labels() {
        assert_eq!(percent_label(0.2), "20");
        assert_eq!(percent_label(0.6), "60");
        assert_eq!(percent_label(0.125), "12.5");
        assert_eq!(percent_label(1.0), "100");
    }
}
