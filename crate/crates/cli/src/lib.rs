//! Configuration, execution and reporting for kernel experiments.

pub mod config;
pub mod report;
pub mod run;
pub mod spec;

pub use config::{ExperimentConfig, Format};
pub use report::{emit_plot_table, Payload, ReportEnvelope};
pub use run::execute;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] bergman_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Renders `env` in `format`.
pub fn render(env: &ReportEnvelope, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(env.to_json() + "\n"),
        Format::Csv => emit_plot_table(&env.payload),
    }
}
