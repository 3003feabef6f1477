use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible cospan: codomains {0} and {1} differ")]
    IncompatibleCospan(usize, usize),
    #[error("point {point} out of range for space of size {size}")]
    PointOutOfRange { point: usize, size: usize },
    #[error("invalid space map: {0}")]
    InvalidSpaceMap(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid group homomorphism: {0}")]
    InvalidGroupHom(String),
    #[error("mismatched parallel pair: {0}")]
    MismatchedPair(String),
    #[error("unknown group spec `{0}`")]
    UnknownGroupSpec(String),
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("invalid module homomorphism: {0}")]
    InvalidModuleHom(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("not a subgroup inclusion: {0}")]
    NotSubgroup(String),
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
    #[error("kind mismatch: {0}")]
    KindMismatch(String),
    #[error("unknown functor id `{0}`")]
    UnknownFunctor(String),
    #[error("invalid internal category: {0}")]
    InvalidCategory(String),
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("depth {depth} exceeds tower bound {max_depth}")]
    DepthExceeded { depth: usize, max_depth: usize },
    #[error("unsupported sample: {0}")]
    UnsupportedSample(String),
    #[error("enumeration budget exceeded: {0}")]
    TooLarge(String),
    #[error("tor degree {0} exceeds configured maximum {1}")]
    TorDegree(usize, usize),
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("json: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
