//! Library side of the `koopman` command-line tool.

pub mod args;
pub mod commands;
pub mod map_file;
mod output;

pub use args::Cli;
pub use map_file::{parse_map, MapDescription, ParsedMap, TermRecord};

/// Directory that relative `--out` paths are resolved against, if set.
pub const OUT_DIR_ENV: &str = "KOOPMAN_OUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
/// Valid input, but the mathematics stops the pipeline (resonance).
pub const EXIT_OBSTRUCTION: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(koopman_core::Error),
    /// Resonances were found; the report has already been written.
    #[error("{0}")]
    Obstruction(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(koopman_core::Error::Resonance { .. }) | CliError::Obstruction(_) => EXIT_OBSTRUCTION,
            _ => EXIT_USAGE,
        }
    }
}

impl From<koopman_core::Error> for CliError {
    fn from(e: koopman_core::Error) -> Self {
        CliError::Core(e)
    }
}
