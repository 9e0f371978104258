use thiserror::Error;

/// Unified error type for all laboratory modules.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would exceed the configured memory budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// Input data failed schema or consistency validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// An internal consistency check that must never fail did fail.
    /// These indicate a data bug and abort the run.
    #[error("fatal consistency error: {0}")]
    DataBug(String),

    /// Network access was requested but is disabled.
    #[error("network disabled: {0}")]
    NetworkDisabled(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
    pub fn data_bug(msg: impl Into<String>) -> Self {
        Error::DataBug(msg.into())
    }
}
