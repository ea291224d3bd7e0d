//! Command implementations for the `sumrange` binary.
//!
//! Everything lives in the library so integration tests can exercise the
//! atlas formats, the cache layout, and the argument surface directly; the
//! binary is a thin parse-and-dispatch shim.

pub mod cache;
pub mod commands;
pub mod config;
pub mod formats;

pub use commands::{run, Cli};
