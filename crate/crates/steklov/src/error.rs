use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("truncation depth: order {order} is not available (have {have} components, need {need})")]
    TruncationDepth { order: String, have: usize, need: usize },
    #[error("symbol is not elliptic: {0}")]
    NotElliptic(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("self-adjointness violated: {0}")]
    SelfAdjointness(String),
    #[error("convention inconsistency: {0}")]
    Convention(String),
    #[error("commensurability: {0}")]
    Commensurability(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("size limit: {0}")]
    SizeLimit(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// short machine-readable tag
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGeometry(_) => "invalid_geometry",
            Error::InvalidInput(_) => "invalid_input",
            Error::TruncationDepth { .. } => "truncation_depth",
            Error::NotElliptic(_) => "not_elliptic",
            Error::Precondition(_) => "precondition",
            Error::SelfAdjointness(_) => "self_adjointness",
            Error::Convention(_) => "convention_inconsistency",
            Error::Commensurability(_) => "commensurability",
            Error::Fit(_) => "fit",
            Error::ModelMismatch(_) => "model_mismatch",
            Error::SizeLimit(_) => "size_limit",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
