//! Library side of the `skeinlab` command: diagram files, reports, commands.

pub mod commands;
pub mod diagram_file;
pub mod report;

pub use commands::{CliError, Common, Selector};
pub use report::{Report, Verdict};
