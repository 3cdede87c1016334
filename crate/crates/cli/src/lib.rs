//! Library side of the `ncyclo` command-line tool: configuration loading and
//! the command implementations, kept separate from argument parsing so they
//! can be tested directly.

pub mod commands;
pub mod config;
