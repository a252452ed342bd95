//! Library half of the `wshmin` command-line tool.
//!
//! The binary in `main.rs` only parses arguments; grid parsing, table
//! rendering, and the command implementations live here so they can be
//! unit-tested and fuzzed directly.

pub mod grid;
pub mod run;
pub mod table;
