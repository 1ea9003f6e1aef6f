//! Benchmark scenarios, report schema and settings for the `mvbeaver` CLI.

pub mod config;
pub mod mlp;
pub mod report;
pub mod scenarios;

pub use config::{Format, Resolved, Settings};
pub use report::{BenchReport, CSV_HEADER};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Engine(#[from] mvbeaver::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
