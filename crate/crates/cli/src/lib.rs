//! Command-line front end for drop boundary continuation: branch files,
//! rendering, CSV export and the built-in verification suite.

pub mod commands;
pub mod error;
pub mod export;
pub mod records;
pub mod render;
pub mod verify;

pub use error::{CliError, Result};
