//! File formats, threaded execution and the command line for `gaussq-core`.
//!
//! Covariance matrices are stored as plain text: the mode count `N` on the
//! first line, then `2N` rows of `2N` whitespace-separated numbers.

pub mod io;
pub mod report;
pub mod runner;
pub mod scan;

pub use gaussq_core as core;
pub use io::{format_covmat, parse_covmat, read_covmat, ParseError};
pub use report::{analyze, Report};
pub use runner::ThreadRunner;
