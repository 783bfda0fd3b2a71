use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("letter {letter} outside alphabet of size {alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },
    #[error("alphabet mismatch: {left} vs {right}")]
    AlphabetMismatch { left: usize, right: usize },
    #[error("not a full cycle")]
    NotAFullCycle,
    #[error("degenerate matrix")]
    DegenerateMatrix,
    #[error("det not coprime to n")]
    DetNotCoprime,
    #[error("finite order matrix")]
    FiniteOrderMatrix,
    #[error("domain not a p-power")]
    DomainNotPPower,
    #[error("not a p-group: {reason}")]
    NotAPGroup { reason: String },
    #[error("cap exceeded: {what}")]
    CapExceeded { what: String },
    #[error("not prefix-preserving")]
    NotPrefixPreserving,
    #[error("local action outside cyclic group")]
    LocalActionOutsideCyclic,
    #[error("non-permutational automaton at state {state}")]
    NonPermutational { state: String },
    #[error("alphabet size is not p = {p}")]
    AlphabetSizeNotP { p: usize },
    #[error("unknown state id: {id}")]
    UnknownState { id: String },
    #[error("M - C not divisible by p")]
    NotDivisibleByP,
    #[error("no orientation satisfies relations")]
    NoOrientationSatisfies,
    #[error("state permutation not prefix-preserving under pi")]
    EmbeddingMismatch,
    #[error("verification failed: {what}")]
    VerificationFailed { what: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid file: {0}")]
    InvalidFile(String),
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Tags an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// True for errors caused by malformed or out-of-contract input, as
    /// opposed to a verification that ran and failed.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::LengthMismatch { .. }
            | Error::LetterOutOfRange { .. }
            | Error::AlphabetMismatch { .. }
            | Error::NotAFullCycle
            | Error::DegenerateMatrix
            | Error::DetNotCoprime
            | Error::FiniteOrderMatrix
            | Error::DomainNotPPower
            | Error::AlphabetSizeNotP { .. }
            | Error::UnknownState { .. }
            | Error::NotDivisibleByP
            | Error::CapExceeded { .. }
            | Error::InvalidInput(_)
            | Error::InvalidFile(_)
            | Error::Io(_)
            | Error::Json(_) => true,
            Error::Stage { source, .. } => source.is_input_error(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
