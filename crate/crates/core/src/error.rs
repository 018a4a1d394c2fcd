use thiserror::Error;

/// Errors raised when an input cannot be interpreted at all.
///
/// Violations of mathematical laws by well-formed input are not errors; they
/// are reported through [`crate::report::Report`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("composition mismatch: codomain of `{g}` is not the domain of `{f}`")]
    CompositionMismatch { g: String, f: String },

    #[error("composition table has no entry for `{f}` after `{g}`")]
    MissingComposite { g: String, f: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("ill-conditioned spectrum: {0}")]
    IllConditioned(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}
