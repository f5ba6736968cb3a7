//! Command-line front end for the mixed Riemann-Hilbert solver. The `mrh`
//! binary is a thin wrapper over [`commands`].

pub mod commands;
pub mod error;
pub mod problem_file;
pub mod tables;

pub use error::CliError;
