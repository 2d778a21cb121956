use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("row (state {state}, input {input}) sums to {sum}, expected 1")]
    RowNotNormalized {
        state: String,
        input: String,
        sum: f64,
    },
    #[error("negative probability {prob} on transition {from} --{input}/{output}--> {to}")]
    NegativeProbability {
        from: String,
        input: String,
        output: String,
        to: String,
        prob: f64,
    },
    #[error("state {state} has several successors for input {input} and output {output}")]
    NonUnifilar {
        state: String,
        input: String,
        output: String,
    },
    #[error("unknown symbol or state label `{0}`")]
    UnknownSymbol(String),
    #[error("duplicate label `{0}`")]
    DuplicateSymbol(String),
    #[error("{0} must not be empty")]
    EmptyAlphabet(&'static str),
    #[error("transition {from} --{input}/{output}--> {to} listed more than once")]
    DuplicateTransition {
        from: String,
        input: String,
        output: String,
        to: String,
    },
    #[error("input distribution is invalid: {0}")]
    InvalidDistribution(String),
    #[error("parameter {name} = {value} outside the open interval (0, 1)")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("state {state} never emits {output} on input {input}")]
    ImpossibleEmission {
        state: String,
        input: String,
        output: String,
    },
    #[error("partition is inconsistent with the transducer: {0}")]
    InconsistentPartition(String),
    #[error("induced chain is reducible; stationary occupancy is not unique")]
    ReducibleChain,
    #[error("horizon {horizon} exceeds the enumeration cap {cap}")]
    HorizonTooLarge { horizon: usize, cap: usize },
    #[error("distributions do not match: {0}")]
    HorizonMismatch(String),
    #[error("input word has {len} symbols, horizon needs {horizon}")]
    WordTooShort { len: usize, horizon: usize },
    #[error("gram matrix is not positive semidefinite (min eigenvalue {0})")]
    NotPsd(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("numerical rank failure: {0}")]
    NumericalRankFailure(String),
    #[error("refusing to materialize {amplitudes} amplitudes (limit {limit})")]
    DimensionGuard { amplitudes: usize, limit: usize },
    #[error("malformed spec: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable name used in JSON reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::RowNotNormalized { .. } => "RowNotNormalized",
            Error::NegativeProbability { .. } => "NegativeProbability",
            Error::NonUnifilar { .. } => "NonUnifilar",
            Error::UnknownSymbol(_) => "UnknownSymbol",
            Error::DuplicateSymbol(_) => "DuplicateSymbol",
            Error::EmptyAlphabet(_) => "EmptyAlphabet",
            Error::DuplicateTransition { .. } => "DuplicateTransition",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::ParameterOutOfRange { .. } => "ParameterOutOfRange",
            Error::ImpossibleEmission { .. } => "ImpossibleEmission",
            Error::InconsistentPartition(_) => "InconsistentPartition",
            Error::ReducibleChain => "ReducibleChain",
            Error::HorizonTooLarge { .. } => "HorizonTooLarge",
            Error::HorizonMismatch(_) => "HorizonMismatch",
            Error::WordTooShort { .. } => "WordTooShort",
            Error::NotPsd(_) => "NotPSD",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NumericalRankFailure(_) => "NumericalRankFailure",
            Error::DimensionGuard { .. } => "DimensionGuard",
            Error::Parse(_) => "Parse",
        }
    }
}
