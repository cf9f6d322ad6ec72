use thiserror::Error;

/// Failures reported by the numerical toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("symbol is singular at the zero mode and the field has mean {mean:e}")]
    SingularZeroMode { mean: f64 },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("field has nonzero mean {0:e}; homogeneous norms need zero mean")]
    NonZeroMean(f64),
    #[error("grid hosts {0} dyadic shells, at least 3 are needed")]
    TooFewShells(usize),
    #[error("dyadic index {j} outside [{lo}, {hi}]")]
    BlockOutOfRange { j: i32, lo: i32, hi: i32 },
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("product engine is not padded; aliasing would break exact identities")]
    Unpadded,
    #[error("outside analyticity domain: sup |a| = {sup:e} but radius is {radius:e}")]
    OutsideAnalyticity { sup: f64, radius: f64 },
    #[error("index constraint violated for {law}: {reason}")]
    IndexConstraint { law: String, reason: String },
    #[error("unknown law id `{0}`")]
    UnknownLaw(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Gevrey weight overflow at shell |xi|_1 = {shell}: gain e^{exponent:.3} exceeds cap e^{cap}")]
    GevreyOverflow { shell: f64, exponent: f64, cap: f64 },
    #[error("unresolved radius: {0} usable shells, at least 4 needed")]
    UnresolvedRadius(usize),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
