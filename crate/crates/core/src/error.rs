use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice dimensions ({l1}, {l2}): {reason}")]
    InvalidDimensions {
        l1: usize,
        l2: usize,
        reason: String,
    },
    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("logical schedule: {0}")]
    Schedule(String),
    #[error("circuit already contains noise")]
    AlreadyNoisy,
    #[error("nondeterministic detectors {detectors:?} / observables {observables:?}")]
    NondeterministicDetector {
        detectors: Vec<usize>,
        observables: Vec<usize>,
    },
    #[error("mechanism `{0}` cannot be decomposed into graph edges")]
    UndecomposableMechanism(String),
    #[error("syndrome has an odd number of defects in a component without boundary")]
    OddSyndrome,
    #[error("rate curves do not cross in the sampled range")]
    NoCrossing,
    #[error("logical error rate does not decrease with distance")]
    AboveThreshold,
    #[error("unsupported observable: {0}")]
    UnsupportedObservable(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable identifier of the error kind.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidDimensions { .. } => "invalid_dimensions",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::InvalidCircuit(_) => "invalid_circuit",
            Error::Parse { .. } => "parse",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Schedule(_) => "schedule",
            Error::AlreadyNoisy => "already_noisy",
            Error::NondeterministicDetector { .. } => "nondeterministic_detector",
            Error::UndecomposableMechanism(_) => "undecomposable_mechanism",
            Error::OddSyndrome => "odd_syndrome",
            Error::NoCrossing => "no_crossing",
            Error::AboveThreshold => "above_threshold",
            Error::UnsupportedObservable(_) => "unsupported_observable",
            Error::Io(_) => "io",
        }
    }
}
