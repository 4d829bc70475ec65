use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("unsupported group: {0}")]
    UnsupportedGroup(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("group closure exceeded the cap of {0} elements")]
    GroupTooLarge(usize),
    #[error("form is not invariant: {0}")]
    NotInvariant(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("empty stratum: {0}")]
    EmptyStratum(String),
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error("point is not on the zero fibre: {0}")]
    NotOnFibre(String),
    #[error("integration: {0}")]
    Integration(String),
    #[error("bundle: {0}")]
    Bundle(String),
    #[error("unknown example `{0}`")]
    UnknownExample(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
