//! Error type shared across the crate.

/// Everything that can go wrong in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The input corpus has no sentences.
    #[error("corpus contains no sentences")]
    EmptyCorpus,

    /// Too few sentences to produce the requested splits.
    #[error("need at least {need} sentences to split, found {found}")]
    CorpusTooSmall { need: usize, found: usize },

    /// Split ratios must be positive and sum to one.
    #[error("split ratios must be positive and sum to 1, got ({0}, {1}, {2})")]
    InvalidRatios(f64, f64, f64),

    /// A count vector was empty or contained a zero.
    #[error("count vector must be non-empty with strictly positive entries")]
    InvalidCounts,

    /// A character was missing from a character distribution.
    #[error("character {0:?} is missing from the character distribution")]
    UnknownChar(char),

    /// Casing could not be projected back onto a lowercase segmentation.
    #[error("cannot project the casing of {original:?} onto {lower:?}")]
    CaseFoldMismatch { original: String, lower: String },

    /// A segmenter was used before it had a trained lexicon.
    #[error("segmenter has no trained lexicon")]
    NotTrained,

    /// A token id fell outside the vocabulary.
    #[error("token id {id} out of range for vocabulary of size {size}")]
    InvalidId { id: u32, size: usize },

    /// A requested vocabulary size cannot cover the alphabet.
    #[error("target vocabulary size {target} is smaller than the alphabet ({alphabet} symbols)")]
    TargetTooSmall { target: usize, alphabet: usize },

    /// A model's stored counts disagree with its own analyses.
    #[error("model counts disagree with its analyses: {0}")]
    InconsistentModel(String),

    /// A state network's counts disagree with the supplied analyses.
    #[error("network counts disagree with the supplied analyses: {0}")]
    InconsistentNetwork(String),

    /// An empty word cannot be segmented.
    #[error("cannot segment an empty word")]
    EmptyWord,

    /// A decoded sentence came out with no words; carries the 0-based
    /// sentence index.
    #[error("sentence {index} decodes to no words")]
    EmptySentence { index: usize },

    /// An evaluation input was empty.
    #[error("evaluation input is empty")]
    EmptyEval,

    /// Predicted and reference segmentations do not line up.
    #[error("predicted and reference segmentations do not align: {0}")]
    AlignmentError(String),

    /// A file could not be parsed; carries the 1-based line number.
    #[error("{source_name}:{line}: {msg}")]
    ParseError {
        source_name: String,
        line: usize,
        msg: String,
    },

    /// A parameter violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// An I/O operation failed; carries the path for context.
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// An I/O failure wrapped with a human-readable context string.
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub(crate) fn parse(source_name: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::ParseError {
            source_name: source_name.into(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
