//! Command-line harness around the hover-statistics library: config
//! parsing, figure-reproduction CSVs, a cross-validation report,
//! Monte Carlo helpers, and external trajectory ingestion.

pub mod config;
pub mod figures;
pub mod ingest;
pub mod mc;
pub mod output;
pub mod validate;
