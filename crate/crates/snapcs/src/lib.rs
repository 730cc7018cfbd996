//! File formats, system descriptions, RGB previews and the command-line
//! tool built on `snapcs-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod format;
pub mod preview;

pub use error::{Error, Result};
