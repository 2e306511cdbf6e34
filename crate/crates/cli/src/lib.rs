//! Command-line front end for `entpoly-core`: state and operator
//! specifications, the polynomial atlas and the subcommands.

pub mod atlas;
pub mod commands;
pub mod error;
pub mod operator_spec;
pub mod state_spec;

pub use commands::{run, Cli, Output};
pub use error::CliError;
