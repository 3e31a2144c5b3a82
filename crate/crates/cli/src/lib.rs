//! Instance files, seeded random instances, reports and the commands behind
//! the `pervin` binary.

pub mod commands;
pub mod fixtures;
pub mod gen;
pub mod instance;
pub mod randtest;
pub mod report;

pub use commands::{run, Cli, CliError, Command, Output};
pub use instance::{Instance, InstanceError};
pub use report::{Format, Report};
