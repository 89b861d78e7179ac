//! Command-line front end for the `hadamard6` library.

pub mod commands;
pub mod error;
pub mod matrix_file;
pub mod report;
pub mod scan;

pub use commands::run;
pub use error::{exit, CliError};
