//! File formats, streaming ingestion, experiments and the command-line tool
//! around `typeforge-core`.

pub mod batch;
pub mod build;
pub mod cli;
pub mod cluster;
pub mod embeddings;
pub mod error;
pub mod experiment;
pub mod io;
pub mod model_io;
pub mod ntriples;
pub mod projection;
pub mod report;

pub use error::{Error, Result};
pub use typeforge_core as core;
