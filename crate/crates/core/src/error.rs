use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure classes, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
    SizeCap,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("matrix is numerically singular (pivot {pivot:.3e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("regularity of the interval matrix could not be verified")]
    UnknownRegularity,

    #[error("corner solution {point:?} leaves orthant {orthant}")]
    OrthantEscape { orthant: String, point: Vec<f64> },

    #[error("simplex did not terminate within {iterations} iterations")]
    NumericalFailure { iterations: usize },

    #[error("{n} variables exceed the orthant cap of {cap}")]
    SizeCap { n: usize, cap: usize },

    #[error("orthant {orthant}: {source}")]
    Orthant {
        orthant: String,
        #[source]
        source: Box<Error>,
    },

    #[error("inconsistent with the stability certificate: {0}")]
    Inconsistent(String),

    #[error("absolute value equation: {0}")]
    Gave(String),

    #[error("reading {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed problem document: {0}")]
    Parse(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Dimension(_) | Error::Input(_) | Error::Io { .. } | Error::Parse(_) => {
                ErrorKind::Input
            }
            Error::SizeCap { .. } => ErrorKind::SizeCap,
            Error::Orthant { source, .. } => source.kind(),
            _ => ErrorKind::Numerical,
        }
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
