use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("materialization needs {needed} candidate strings, cap is {cap}")]
    SizeCapExceeded { needed: u128, cap: u64 },

    #[error("arity {arity} exceeds the supported maximum of {max}")]
    ArityTooLarge { arity: usize, max: usize },

    #[error("unknown catalog function `{0}`")]
    UnknownName(String),

    #[error("function has an empty domain")]
    EmptyDomain,

    #[error("promise set is empty")]
    EmptyPromise,

    #[error("promise contains `{0}` which is outside the domain")]
    PromiseOutsideDomain(String),

    #[error("bit {index} is neither superfluous nor a duplicate")]
    NotDroppable { index: usize },

    #[error("duplicate domain entry `{0}`")]
    DuplicateEntry(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("{count} candidate blocks exceed the cap of {cap}")]
    TooManyBlocks { count: usize, cap: usize },

    #[error("step {index} is inapplicable: {reason}")]
    StepInapplicable { index: usize, reason: String },

    #[error("lifting through outer bit negation needs a switchability witness for the inner function")]
    SwitchabilityRequired,

    #[error("measure `{0}` has no configured composition law")]
    UnsupportedMeasure(String),

    #[error("evaluator `{0}` is not supported here")]
    UnsupportedEvaluator(String),

    #[error("value {0} is not attained by the base function")]
    UnattainableValue(u8),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
