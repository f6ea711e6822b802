//! Command-line front end: system files, commands and reports.

pub mod commands;
pub mod report;
pub mod system_file;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input or an argument outside its documented range (exit code 2).
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Compute(#[from] jetcomplex::Error),
}
