use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wavelength grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("fixture parse error in {file}: {message}")]
    FixtureParse { file: String, message: String },

    #[error("optimization diverged at iteration {iteration}: {message}")]
    Divergence {
        iteration: usize,
        message: String,
        parameters: Vec<f64>,
    },

    #[error("scene too dark: every pixel stayed below the mask threshold")]
    SceneTooDark,

    #[error("no signal detected: no symbol exceeded the static threshold")]
    NoSignalDetected,

    #[error("corrupt frame container: {0}")]
    CorruptContainer(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
