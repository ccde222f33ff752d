use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("composition of differentials is nonzero: {0}")]
    CompositionNonzero(String),
    #[error("d^2 != 0 on {0}")]
    DifferentialSquare(String),
    #[error("not a chain map: {0}")]
    NotChainMap(String),
    #[error("window too narrow: {0}")]
    WindowTooNarrow(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("external edge {0} cannot be contracted")]
    ExternalEdge(usize),
    #[error("inconsistent labels: {0}")]
    InconsistentLabels(String),
    #[error("mismatched edge: {0}")]
    MismatchedEdge(String),
    #[error("color mismatch: {0}")]
    ColorMismatch(String),
    #[error("no unit color designated")]
    NoUnitColor,
    #[error("unknown builtin {0}")]
    UnknownName(String),
    #[error("bad witness: {0}")]
    BadWitness(String),
    #[error("not augmented: {0}")]
    NotAugmented(String),
    #[error("not connected: {0}")]
    NotConnected(String),
    #[error("Maurer-Cartan violation at {element}: residual {residual}")]
    MCViolation { element: String, residual: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("source mismatch: {0}")]
    SourceMismatch(String),
    #[error("not composable: {0}")]
    NotComposable(String),
    #[error("invalid object: {0}")]
    InvalidObject(String),
    #[error("triangle identity fails: {0}")]
    TriangleViolation(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("coefficient {0} is not defined in the chosen field")]
    NotInField(String),
}

pub type Result<T> = std::result::Result<T, Error>;
