//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by distribution construction, measure evaluation,
/// generators, and ingestion.
#[derive(Debug, Error)]
#[non_exhaustive]
pub enum Error {
    #[error("variable name must be non-empty")]
    EmptyName,

    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),

    #[error("duplicate category `{category}` in the alphabet of `{variable}`")]
    DuplicateCategory { variable: String, category: String },

    #[error("alphabet of `{0}` must contain at least one category")]
    EmptyAlphabet(String),

    #[error("all counts are zero; nothing to normalize")]
    AllZeroCounts,

    #[error("count {count} for tuple {tuple:?} is not a finite nonnegative number")]
    InvalidCount { tuple: Vec<usize>, count: f64 },

    #[error("tuple {tuple:?} is out of range for the declared alphabets")]
    TupleOutOfAlphabet { tuple: Vec<usize> },

    #[error("category `{category}` of `{variable}` is outside the declared alphabet")]
    CategoryOutsideAlphabet { variable: String, category: String },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable set must be non-empty")]
    EmptyVariableSet,

    #[error("variable sets overlap on `{0}`")]
    OverlappingSets(String),

    #[error("variables must be distinct, got `{0}` twice")]
    IdenticalVariables(String),

    #[error("conditioning event has zero probability")]
    ZeroProbabilityCondition,

    #[error("log base must be greater than 1, got {0}")]
    InvalidBase(f64),

    #[error("maximum entropy is zero; redundancy fraction is undefined")]
    DegenerateAlphabet,

    #[error("margin order {order} is out of range for {variables} variables")]
    InvalidOrder { order: usize, variables: usize },

    /// The closed-form and substitution routes for mutual redundancy disagree.
    /// This signals an implementation defect, never bad data.
    #[error(
        "redundancy paths disagree: closed form {closed}, substitution {substituted} \
         (|diff| = {diff:e})"
    )]
    PathMismatch {
        closed: f64,
        substituted: f64,
        diff: f64,
    },

    #[error("arity must be at least {required}, got {got}")]
    ArityTooSmall { required: usize, got: usize },

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("sparsification left no nonzero cells")]
    AllCellsZero,

    #[error("dense table of {cells} cells exceeds the oracle limit of {limit}")]
    TooLargeForOracle { cells: usize, limit: usize },

    #[error("dataset has no rows")]
    EmptyDataset,

    #[error("row at line {line} has {got} fields, expected {expected}")]
    RaggedRow { line: u64, expected: u64, got: u64 },

    #[error("input file is empty")]
    EmptyFile,

    #[error("I/O failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("dataset has no time column")]
    NoTimeColumn,

    #[error("time label `{0}` does not parse as an integer")]
    InvalidTimeLabel(String),

    #[error("the time column `{0}` cannot be a measured variable")]
    TimeColumnInVars(String),

    #[error("weight `{value}` at line {line} is not a finite nonnegative number")]
    InvalidWeight { line: u64, value: String },

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("measure `{0}` requires a conditioning set")]
    MissingConditioningSet(&'static str),

    #[error("window {label}: {source}")]
    Window { label: String, source: Box<Error> },
}

pub type Result<T> = std::result::Result<T, Error>;
