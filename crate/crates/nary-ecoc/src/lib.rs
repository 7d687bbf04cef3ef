//! Command-line front end and IO for the error-correcting ensemble
//! library: file formats, parallel training drivers, and experiment
//! sweeps.

pub mod cli;
pub mod error;
pub mod io;
pub mod parallel;
pub mod sweep;

pub use error::{AppError, Result};
