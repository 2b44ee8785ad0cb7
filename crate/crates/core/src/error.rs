use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` declared twice")]
    DuplicateGenerator(String),
    #[error("degree mismatch in {context}: expected {expected}, found {found}")]
    DegreeMismatch {
        context: String,
        expected: i32,
        found: String,
    },
    #[error("morphism endpoints do not match: {0}")]
    PresentationMismatch(String),
    #[error("classical master equation fails, residual {0}")]
    MasterEquationViolated(String),
    #[error("relative master equation fails, residual {0}")]
    RelativeMasterEquationViolated(String),
    #[error("unsupported shift {0}")]
    UnsupportedShift(i32),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("cannot contract a weight-zero form")]
    WeightZero,
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("point {point} is not on the classical locus: d({generator}) evaluates to {value}")]
    PointNotOnClassicalLocus {
        point: String,
        generator: String,
        value: String,
    },
    #[error("invalid point: {0}")]
    InvalidPoint(String),
    #[error("matrix dimensions do not fit: {0}")]
    DimensionMismatch(String),
    #[error("not a chain map in degree {0}")]
    NotAChainMap(i32),
    #[error("d^2 != 0 in degree {0}")]
    NotAComplex(i32),
    #[error("degree {0} out of range")]
    DegreeOutOfRange(i32),
    #[error("form is not closed under the internal differential: {0}")]
    NotClosed(String),
    #[error("pairing is degenerate at point {0}")]
    DegenerateAtPoint(String),
    #[error("syntax error at {line}:{column}: {message}")]
    SyntaxError {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
