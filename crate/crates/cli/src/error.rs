use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}key '{key}': {message}", line.map(|l| format!("config line {l}: ")).unwrap_or_default())]
    Config {
        key: String,
        line: Option<usize>,
        message: String,
    },
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Simulation(#[from] raman_vortex::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn config(key: &str, line: Option<usize>, message: impl Into<String>) -> Self {
        Self::Config {
            key: key.to_string(),
            line,
            message: message.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    /// 2 for bad input, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } | Self::Syntax { .. } | Self::Input { .. } => 2,
            Self::Simulation(_) | Self::Io { .. } | Self::Failed(_) => 1,
        }
    }
}
