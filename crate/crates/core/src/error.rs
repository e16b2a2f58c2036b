use std::path::PathBuf;

/// Errors raised by field operations, serialization and the command layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid size {0}: must be even and at least 8")]
    InvalidGrid(usize),

    #[error("grid mismatch: expected {expected} values, got {actual}")]
    GridMismatch { expected: usize, actual: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("hermitian symmetry violated: imaginary residue {residue:e} exceeds tolerance {tolerance:e}")]
    HermitianViolation { residue: f64, tolerance: f64 },

    #[error("invalid exponent p = {0}: must lie in [1, inf]")]
    InvalidExponent(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("snapshot has bad magic {0:?}")]
    BadMagic([u8; 4]),

    #[error("snapshot version {found} not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("snapshot truncated: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("snapshot has trailing bytes: expected {expected} bytes, got {actual}")]
    TrailingBytes { expected: usize, actual: usize },

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
