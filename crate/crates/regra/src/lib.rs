//! Command line, INC1 files and threaded check runs on top of `regra-core`.

pub mod cli;
pub mod error;
pub mod exec;
pub mod inc;

pub use error::{Error, Result};
