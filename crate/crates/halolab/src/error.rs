use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HaloError {
    #[error("descriptor mismatch: {0}")]
    DescriptorMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("resource cap exceeded: {0}")]
    Resource(String),
    #[error("no resolution within max depth {max_depth}{}", stage.map(|s| format!(" (stage {s})")).unwrap_or_default())]
    Truncated { max_depth: usize, stage: Option<usize> },
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("usage: {0}")]
    Usage(String),
}

impl HaloError {
    pub fn at_stage(self, stage: usize) -> Self {
        match self {
            HaloError::Truncated { max_depth, stage: None } => HaloError::Truncated {
                max_depth,
                stage: Some(stage),
            },
            other => other,
        }
    }

    pub fn is_truncation(&self) -> bool {
        matches!(self, HaloError::Truncated { .. })
    }
}

pub type Result<T> = std::result::Result<T, HaloError>;
