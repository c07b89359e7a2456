//! Library side of the `momentcone` command: instance parsing, the three
//! commands and their report formats.

pub mod instance;
pub mod report;
pub mod run;

pub use instance::{parse_instance, Instance, InstanceDomain, InstanceFile, MomentEntry};
pub use report::{Command, ModelFile, ReportFile};
pub use run::{run, Outcome, RunOptions};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid instance at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Moment(#[from] momentcone::MomentError),

    #[error("{0}")]
    Io(String),
}

/// Reads and validates an instance file.
pub fn load_instance(path: &std::path::Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text)
}
