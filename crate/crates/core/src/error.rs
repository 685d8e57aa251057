use std::io;
use std::path::PathBuf;

/// Every failure the toolkit can report.
///
/// Each variant carries a stable, machine-parsable code (see [`Error::code`]);
/// the command-line front end prints diagnostics as `CODE: message`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("source has {source_lines} lines but target has {target_lines}")]
    LineCountMismatch {
        source_lines: usize,
        target_lines: usize,
    },

    #[error("{path}:{line}: byte sequence is not valid UTF-8")]
    InvalidEncoding { path: PathBuf, line: usize },

    #[error("{path}:{line}: {reason}")]
    MalformedTsv {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("unknown origin tag `{0}`")]
    UnknownOrigin(String),

    #[error("duplicate pair id {0}")]
    DuplicatePairId(u64),

    #[error("pair {0} has an empty side")]
    EmptySentence(u64),

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("malformed word-vector header: {0}")]
    MalformedHeader(String),

    #[error("{context}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    #[error("{context}: invalid number `{token}`")]
    InvalidNumber { context: String, token: String },

    #[error("{0}: vector has non-finite components")]
    NonFinite(String),

    #[error("vector has zero norm")]
    ZeroVector,

    #[error("bad magic {0:?}, expected \"EMBF\"")]
    BadMagic([u8; 4]),

    #[error("unsupported embedding file version {0}")]
    UnsupportedVersion(u16),

    #[error("embedding file truncated: header declares {declared} records, found {found}")]
    TruncatedFile { declared: u64, found: u64 },

    #[error("embedding file truncated: header is {0} bytes")]
    TruncatedHeader(usize),

    #[error("embedding file has {0} trailing bytes after the last record")]
    TrailingBytes(u64),

    #[error("pair ids not strictly increasing: {previous} then {next}")]
    UnsortedIds { previous: u64, next: u64 },

    #[error("{} pair(s) have no embedding: {}", .0.len(), format_ids(.0))]
    MissingEmbeddings(Vec<u64>),

    #[error("score file references pair id {0} absent from the corpus")]
    UnknownPairId(u64),

    #[error("sequences differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("series is constant; correlation undefined")]
    ConstantSeries,

    #[error("need at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

fn format_ids(ids: &[u64]) -> String {
    const SHOWN: usize = 20;
    let mut out = ids
        .iter()
        .take(SHOWN)
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    if ids.len() > SHOWN {
        out.push_str(",...");
    }
    out
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable upper-case code used in diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "IO_ERROR",
            Error::LineCountMismatch { .. } => "LINE_COUNT_MISMATCH",
            Error::InvalidEncoding { .. } => "INVALID_ENCODING",
            Error::MalformedTsv { .. } => "MALFORMED_TSV",
            Error::UnknownOrigin(_) => "UNKNOWN_ORIGIN",
            Error::DuplicatePairId(_) => "DUPLICATE_PAIR_ID",
            Error::EmptySentence(_) => "EMPTY_SENTENCE",
            Error::EmptyCorpus => "EMPTY_CORPUS",
            Error::MalformedHeader(_) => "MALFORMED_HEADER",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::InvalidNumber { .. } => "INVALID_NUMBER",
            Error::NonFinite(_) => "NON_FINITE",
            Error::ZeroVector => "ZERO_VECTOR",
            Error::BadMagic(_) => "BAD_MAGIC",
            Error::UnsupportedVersion(_) => "UNSUPPORTED_VERSION",
            Error::TruncatedFile { .. } => "TRUNCATED_FILE",
            Error::TruncatedHeader(_) => "TRUNCATED_FILE",
            Error::TrailingBytes(_) => "TRAILING_BYTES",
            Error::UnsortedIds { .. } => "UNSORTED_IDS",
            Error::MissingEmbeddings(_) => "MISSING_EMBEDDINGS",
            Error::UnknownPairId(_) => "UNKNOWN_PAIR_ID",
            Error::LengthMismatch { .. } => "LENGTH_MISMATCH",
            Error::ConstantSeries => "CONSTANT_SERIES",
            Error::TooFewSamples(_) => "TOO_FEW_SAMPLES",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
        }
    }

    /// Usage errors (bad flags or config) as opposed to data errors.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidConfig(_))
    }

    /// `CODE: message` on a single line.
    pub fn diagnostic(&self) -> String {
        let msg = self.to_string().replace(['\n', '\r'], " ");
        format!("{}: {}", self.code(), msg)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
