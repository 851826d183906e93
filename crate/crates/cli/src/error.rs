use std::path::PathBuf;

use thiserror::Error;
use vat_game::{GridError, ModelError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Syntax { line: usize, text: String },
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    #[error("key {0:?} given twice")]
    Duplicate(String),
    #[error("{key}: {value:?} is not a number")]
    BadNumber { key: String, value: String },
    #[error("{key}: {value:?} is not one of {choices}")]
    BadChoice {
        key: &'static str,
        value: String,
        choices: &'static str,
    },
    #[error("unknown preset {0:?} (known: appendix, section6)")]
    UnknownPreset(String),
    #[error("precision must be at least 1, got {0}")]
    Precision(usize),
    #[error("missing parameters {}; set them or pick a preset", .0.join(", "))]
    Missing(Vec<&'static str>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("{0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    /// Computed values disagree with a reference; reported with exit code 2.
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Mismatch(_) => 2,
            _ => 1,
        }
    }
}
