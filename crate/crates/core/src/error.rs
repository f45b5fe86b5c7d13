use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("determinant {det} is not 1 mod {d}")]
    NotSymplectic { det: u32, d: u32 },

    #[error("{0}")]
    Domain(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Domain errors are caller mistakes; everything else is internal.
    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            Error::Domain(_) | Error::ModulusMismatch(..) | Error::NotSymplectic { .. } | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
