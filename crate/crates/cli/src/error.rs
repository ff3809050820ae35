use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),
    #[error("unknown preset {0:?}; run `lcse presets` for the list")]
    UnknownPreset(String),
    #[error(transparent)]
    Core(#[from] lcse_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for domain errors, 4 for numerical
    /// failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use lcse_core::Error as E;
        match self {
            Self::Config(_) | Self::UnknownPreset(_) => 2,
            Self::Core(E::InvalidInput(_)) => 2,
            Self::Core(E::Domain(_)) => 3,
            Self::Core(E::StepUnderflow { .. } | E::NonFinite { .. }) => 4,
            Self::Io { .. } => 1,
        }
    }
}
