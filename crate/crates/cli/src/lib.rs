//! Command-line front end for `quantumness-core`: ensemble validation,
//! solver runs with JSON reports, and CSV sweeps.

pub mod error;
pub mod output;
pub mod report;
pub mod run;
pub mod spec;

pub use error::{CliError, Result};
pub use report::{RunReport, Status};
pub use run::{execute, rerun, Outcome, SYMMETRIC_HEADER, TWO_STATE_HEADER};
pub use spec::CommandSpec;
