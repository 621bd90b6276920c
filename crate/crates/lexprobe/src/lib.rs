//! File formats, ingest drivers, parallel builds and the command-line tool
//! around `lexprobe-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod ingest;
pub mod pipeline;

pub use error::{Error, Result};
