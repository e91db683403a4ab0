use std::path::PathBuf;

use frametoric::error::FrameError;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}: {message}")]
    Input {
        origin: String,
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Core(#[from] FrameError),

    #[error("{path}: {error}")]
    Io { path: PathBuf, error: std::io::Error },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("experiment failed: {0}")]
    ExperimentFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ExperimentFailed(_) => 3,
            _ => 2,
        }
    }

    /// Structured diagnostic for the error stream.
    pub fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Input { .. } => "input",
            CliError::Core(_) => "precondition",
            CliError::Io { .. } => "io",
            CliError::Validation(_) => "validation",
            CliError::ExperimentFailed(_) => "experiment",
        };
        let mut body = json!({ "kind": kind, "message": self.to_string() });
        if let CliError::Input {
            origin, line, field, ..
        } = self
        {
            body["source"] = json!(origin);
            if let Some(line) = line {
                body["line"] = json!(line);
            }
            if let Some(field) = field {
                body["field"] = json!(field);
            }
        }
        json!({ "error": body })
    }
}
