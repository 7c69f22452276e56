use thiserror::Error;

/// Errors raised across the pipeline. Each variant names the stage that
/// produced it so diagnostics stay attributable.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("words: {0}")]
    Alphabet(String),
    #[error("words: contract violated: {0}")]
    Contract(String),
    #[error("words: cannot sample from an empty constrained set ({0})")]
    EmptySample(String),
    #[error("presentations: {0}")]
    Presentation(String),
    #[error("presentations: halving failed: {0}")]
    Halving(String),
    #[error("presentations: {0} is not a stored half")]
    Lookup(String),
    #[error("sampler: {0}")]
    Model(String),
    #[error("sampler: balanced extension infeasible: {0}")]
    Infeasible(String),
    #[error("cayley: canonicalization failed: {0}")]
    Canonicalization(String),
    #[error("cayley: oracle spec invalid: {0}")]
    OracleSpec(String),
    #[error("relhom: {0} is not trivial in the half group")]
    Domain(String),
    #[error("relhom: oracle budget exhausted on {0}")]
    Budget(String),
    #[error("cover: {0}")]
    Cover(String),
    #[error("range: {0}")]
    Range(String),
    #[error("cubecomplex: {0}")]
    Complex(String),
    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
