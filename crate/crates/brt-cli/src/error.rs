use thiserror::Error;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("bad magic: expected \"BRT1\", got {0:?}")]
    BadMagic([u8; 4]),

    #[error("unsupported field-file version {0}")]
    UnsupportedVersion(u16),

    #[error("unknown field kind {0}")]
    UnknownKind(u8),

    #[error("truncated payload: expected {expected} bytes, got {got}")]
    TruncatedPayload { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Core(#[from] brt_core::BrtError),
}

pub type Result<T> = std::result::Result<T, CliError>;
