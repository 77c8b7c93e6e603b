//! Batch verification driver: configuration, check suites and reports.

pub mod config;
pub mod report;
pub mod suites;

pub use config::{ConfigError, Format, RunConfig, Suite, Tolerances};
pub use report::{diff_reports, Record, Report, ReportDiff, Verdict};
pub use suites::run;
