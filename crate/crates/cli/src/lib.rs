//! Command-line front end for the road-network restoration toolkit.
//!
//! The library surface exists so integration tests can reuse the argument
//! parser, row schema, and sweep machinery without shelling out; the `netmend`
//! binary itself is a thin wrapper around [`dispatch`].

pub mod args;
pub mod commands;
pub mod inputs;
pub mod report;
pub mod row;
pub mod runner;
pub mod sweep;

pub use args::Cli;
pub use commands::dispatch;
pub use inputs::{CliError, CliResult};
