use thiserror::Error;

/// Errors raised by operator construction, ensemble handling and decoding.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operator is not Hermitian (asymmetry {asymmetry:.3e})")]
    InvalidOperator { asymmetry: f64 },

    #[error("operator is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("state trace {trace} is not normalized")]
    NotNormalized { trace: f64 },

    #[error("dimension {dim} exceeds configured cap {cap}")]
    DimCapExceeded { dim: usize, cap: usize },

    #[error("operator is not a valid POVM element (eigenvalues in [{min:.3e}, {max:.3e}])")]
    InvalidPovmElement { min: f64, max: f64 },

    #[error("codebook size {0} is not a power of two")]
    InvalidCodeSize(usize),

    #[error("symbol {symbol} has zero probability")]
    ZeroProbSymbol { symbol: usize },

    #[error("enumeration of {count} sequences exceeds cap {cap}")]
    EnumerationCapExceeded { count: u128, cap: u64 },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
