//! Runner and wire formats for the verification suites.
//!
//! The numerical content lives in `mplane-core`; this crate owns everything
//! that touches the OS: suite orchestration and timing, the JSON report
//! schema, configuration files, and the `mplane` binary.

pub mod config;
pub mod report;
pub mod suites;

pub use config::SuiteConfig;
pub use report::{CheckJson, SuiteReportJson};
pub use suites::{run_suite, suite_ids, Outcome};
