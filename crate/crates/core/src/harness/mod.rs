//! Seeded invariant checking, model configuration and reports.

pub mod config;
pub mod finite_checks;
pub mod gen;
pub mod registry;
pub mod report;
pub mod suite;
pub mod symbolic_checks;

pub use config::{FamilyFile, ModelConfig};
pub use registry::Anchor;
pub use report::{CheckRecord, CheckStatus, Report};
pub use suite::{reproduce_report, run_suite, Samples, SuiteConfig};
