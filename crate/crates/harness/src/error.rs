use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
    #[error("bound {name} = {value} exceeds the cap {cap}")]
    BoundTooLarge { name: &'static str, value: usize, cap: usize },
    #[error("bound {0} must be at least 1")]
    BoundTooSmall(&'static str),
    #[error("instance for {instance} cannot be checked as {theorem}")]
    InstanceMismatch { theorem: String, instance: String },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Core(#[from] bundlecalc_core::error::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
