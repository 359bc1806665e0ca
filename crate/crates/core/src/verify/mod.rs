//! Verification suites, seeded sampling and report encoding.

pub mod params;
pub mod report;
pub mod rng;
pub mod suites;

pub use params::{ConfigError, Params};
pub use report::{Format, VerificationReport};
pub use suites::{plan, run_suite, suite_keys, RunOptions, SuiteRun, SUITES};
