//! Config-driven scenario runner over `extlab-core`.

pub mod config;
pub mod curve;
pub mod error;
pub mod report;
pub mod scenario;

pub use config::ScenarioConfig;
pub use error::{CliError, Result};
pub use report::{emit_report, Format, Record, ReportDocument, Verdict};
pub use scenario::run_scenario;
