//! IO companion to `aoi-core`: the JSON parameter documents, CSV output
//! formats, canned experiments, and the parallel fan-out they share. The
//! `aoi` binary is a thin argument parser over this library.

pub mod commands;
pub mod csvfmt;
pub mod error;
pub mod experiments;
pub mod par;
pub mod spec;

pub use error::CliError;
