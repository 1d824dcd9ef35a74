use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("input text is empty")]
    EmptyText,

    #[error("no token survived the part-of-speech filter")]
    EmptyAfterFilter,

    #[error("document has no tokens")]
    EmptyDocument,

    #[error("corpus contains no usable tokens")]
    EmptyCorpus,

    #[error("invalid token {0:?}")]
    InvalidToken(String),

    #[error("record {id:?}: {reason}")]
    InvalidRecord { id: String, reason: String },

    #[error("knowledge space needs at least 2 documents, got {0}")]
    InsufficientKb(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("country {0} has no coordinates for this distance")]
    MissingCoordinates(String),

    #[error("unknown country code {0:?}")]
    UnknownCountry(String),

    #[error("conflicting distance entries for pair ({0}, {1})")]
    ConflictingEntry(String, String),

    #[error("no distance recorded for pair ({0}, {1})")]
    MissingPair(String, String),

    #[error("{context}: {message}")]
    Parse { context: String, message: String },

    #[error("dish {dish:?} from {origin}: knowledge size {kb_size}, variations {variation_count}")]
    IneligibleDish {
        dish: String,
        origin: String,
        kb_size: usize,
        variation_count: usize,
    },

    #[error("series is constant")]
    ConstantSeries,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("series is entirely tied")]
    AllTied,

    #[error("ranked list contains duplicate ids")]
    DuplicateIds,

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("need at least {needed} observations, got {got}")]
    InsufficientObservations { needed: usize, got: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
