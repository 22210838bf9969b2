use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid identifier {0:?}: must be non-empty with no surrounding whitespace")]
    InvalidId(String),
    #[error("duplicate cell for model {model} on dataset {dataset}")]
    DuplicateCell { model: String, dataset: String },
    #[error("missing cell for model {model} on dataset {dataset}")]
    MissingCell { model: String, dataset: String },
    #[error("accuracy {value} for model {model} on dataset {dataset} is outside [0, 100]")]
    OutOfRange {
        model: String,
        dataset: String,
        value: f64,
    },
    #[error("need at least {required} models, found {found}")]
    TooFewModels { required: usize, found: usize },
    #[error("need at least 2 datasets, found {0}")]
    TooFewDatasets(usize),
    #[error("duplicate {kind} {name}")]
    Duplicate { kind: &'static str, name: String },
    #[error("dataset {dataset} has zero accuracy range (all values {value})")]
    DegenerateColumn { dataset: String, value: f64 },
    #[error("no anchor for dataset {0}")]
    AnchorMissing(String),
    #[error("anchor for dataset {dataset} has max {max} <= min {min}")]
    DegenerateAnchor { dataset: String, min: f64, max: f64 },
    #[error("lambda {0} is outside [0, 1]")]
    InvalidLambda(f64),
    #[error("subset size {k} is invalid for {n} datasets (need {min} <= k <= {n})")]
    BadSubsetSize { k: usize, n: usize, min: usize },
    #[error("search over {0} candidate subsets exceeds the limit of 1000000")]
    SearchTooLarge(u128),
    #[error("model sets differ: {0}")]
    ModelSetMismatch(String),
    #[error("unknown dataset {0}")]
    UnknownDataset(String),
    #[error("{0} has zero variance")]
    ConstantVariable(&'static str),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: u64,
        message: String,
    },
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the CLI: 2 for I/O and parse failures, 1 for
    /// every domain or validation error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) | Error::Parse { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn parse(line: u64, column: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
