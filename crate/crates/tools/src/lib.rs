//! Storage formats, the live session service and the `jnd` command line on top
//! of `jnd-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod http;
pub mod partition;
pub mod pipeline;
pub mod samples;
pub mod service;
pub mod session;

pub use error::{Error, Result};
