//! Verification harness for `extlab-core`: workspace files, seeded random instances, named
//! suites checking the homological statements, and JSON reports.

pub mod cases;
pub mod error;
pub mod expr;
pub mod report;
pub mod sample;
pub mod serial;
pub mod stock;
pub mod suites;
pub mod workspace;

pub use cases::{evaluate, CaseParams, CaseSpec, Outcome};
pub use error::{HarnessError, Result};
pub use report::{emit_report, Report, Verdict, Witness};
pub use suites::{run_suite, SuiteConfig, SUITES};
pub use workspace::{parse_workspace, Workspace};
