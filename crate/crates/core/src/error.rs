use crate::linalg::Mat4;

pub type Result<T, E = WalkError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum WalkError {
    /// An argument lies outside the domain of the operation.
    #[error("{what} out of range: {detail}")]
    Domain { what: &'static str, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The configuration is valid but the requested quantity is not defined
    /// for it (e.g. the averaged-deviation bound for even N).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge on matrix {matrix}")]
    NoConvergence { matrix: Box<Mat4> },

    /// An internal consistency check failed; this signals a construction bug.
    #[error("numerical assertion failed: {0}")]
    Numerical(String),
}

impl WalkError {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        WalkError::Domain {
            what,
            detail: detail.into(),
        }
    }
}
