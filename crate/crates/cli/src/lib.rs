//! Configuration parsing and report serialization for the `taulab` binary.

pub mod config;
pub mod output;
