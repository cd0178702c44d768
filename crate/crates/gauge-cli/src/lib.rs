//! Library surface of the `gauge` command-line tool: run configuration,
//! file formats, and the verification suite. The binary in `main.rs` is
//! a thin dispatcher over these modules.

pub mod commands;
pub mod config;
pub mod io;
pub mod verify;
