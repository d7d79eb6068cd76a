use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A physical or mesh configuration violates its invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("no real root: {0}")]
    NoRealRoot(String),

    #[error("no critical mesh: {0}")]
    NoCriticalMesh(String),

    #[error("no admissible ratio: {0}")]
    NoAdmissibleRatio(String),

    /// Normalisation radicand of a mode profile is not positive.
    #[error("degenerate normalization for mode {mode}: {detail}")]
    DegenerateNormalization { mode: usize, detail: String },

    #[error("singular system in mode {mode} (pivot {pivot})")]
    SingularSystem { mode: usize, pivot: usize },

    /// Two independent evaluation routes disagree, or an internal
    /// invariant failed.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("problem too large for dense path: {unknowns} unknowns (limit {limit})")]
    TooLarge { unknowns: usize, limit: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
