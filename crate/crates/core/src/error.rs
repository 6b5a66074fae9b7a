use thiserror::Error;

pub type Result<T> = std::result::Result<T, NppError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NppError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// An exhaustive operation was asked to run beyond its size guard.
    #[error("resource limit: {op} refuses n = {n} (limit {limit})")]
    ResourceLimit {
        op: &'static str,
        n: usize,
        limit: usize,
    },
}

impl NppError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        NppError::InvalidArgument(msg.into())
    }
}

pub(crate) fn guard(op: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(NppError::ResourceLimit { op, n, limit })
    } else {
        Ok(())
    }
}
