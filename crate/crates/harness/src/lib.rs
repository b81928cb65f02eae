//! Identity suites for the Liouville vertical calculus, with their
//! configuration, report format and command line.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod config;
pub mod registry;
pub mod report;
pub mod suites;

pub use config::{ConfigError, RunConfig};
pub use registry::{IdentityDef, Suite, REGISTRY};
pub use report::{Report, Row, Tally};
pub use suites::{run, RunError};
