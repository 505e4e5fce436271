use thiserror::Error;

/// Errors raised anywhere in the core library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },

    #[error("label {value} at index {index} is outside {{0, 1}}")]
    LabelDomain { index: usize, value: i64 },

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("mask reveals index {index} whose label is not an anomaly")]
    MaskNotAnomaly { index: usize },

    #[error("dimension mismatch: model trained on {expected} features, got {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("k = {k} is too large for {rows} training rows")]
    KTooLarge { k: usize, rows: usize },

    #[error("training labels contain a single class")]
    SingleClassTraining,

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("duplication factor {0} is outside 1..=6")]
    FactorOutOfRange(usize),

    #[error("ratio {value} is outside [{min}, {max}]")]
    RatioOutOfRange { value: f64, min: f64, max: f64 },

    #[error("evaluation labels contain a single class")]
    SingleClassEval,

    #[error("evaluation labels contain no positives")]
    NoPositives,

    #[error("class {class} has {count} members, at least 2 are required")]
    ClassTooSmall { class: u8, count: usize },

    #[error("training labels contain no anomalies")]
    NoAnomalies,

    #[error("missing result for dataset `{dataset}`, algorithm `{algorithm}`")]
    MissingCell { dataset: String, algorithm: String },

    #[error("degenerate rank table: {datasets} datasets, {algorithms} algorithms")]
    DegenerateTable { datasets: usize, algorithms: usize },

    #[error("need at least {needed} paired observations, got {got}")]
    TooFewPairs { needed: usize, got: usize },

    #[error("unknown parameter `{param}` for detector `{detector}`")]
    UnknownParameter { detector: String, param: String },

    #[error("invalid value {value} for parameter `{param}`: {reason}")]
    InvalidParameter { param: String, value: f64, reason: String },

    #[error("unknown detector `{0}`")]
    UnknownDetector(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Short stable name of the variant, used in error rows.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonFiniteValue { .. } => "NonFiniteValue",
            Error::LabelDomain { .. } => "LabelDomain",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::EmptyMatrix { .. } => "EmptyMatrix",
            Error::MaskNotAnomaly { .. } => "MaskNotAnomaly",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::DegenerateData(_) => "DegenerateData",
            Error::KTooLarge { .. } => "KTooLarge",
            Error::SingleClassTraining => "SingleClassTraining",
            Error::TooFewSamples { .. } => "TooFewSamples",
            Error::FactorOutOfRange(_) => "FactorOutOfRange",
            Error::RatioOutOfRange { .. } => "RatioOutOfRange",
            Error::SingleClassEval => "SingleClassEval",
            Error::NoPositives => "NoPositives",
            Error::ClassTooSmall { .. } => "ClassTooSmall",
            Error::NoAnomalies => "NoAnomalies",
            Error::MissingCell { .. } => "MissingCell",
            Error::DegenerateTable { .. } => "DegenerateTable",
            Error::TooFewPairs { .. } => "TooFewPairs",
            Error::UnknownParameter { .. } => "UnknownParameter",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::UnknownDetector(_) => "UnknownDetector",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
