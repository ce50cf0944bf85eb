// SPDX-License-Identifier: Apache-2.0

//! Experiment specs, runs, lifetimes, Q2C, suites and acceptance checks.

pub mod acceptance;
pub mod channel;
pub mod lifetime;
pub mod q2c;
pub mod run;
pub mod spec;
pub mod suite;

/// Version stamped into every CSV and JSON artifact.
pub const FORMAT_VERSION: u32 = 1;
pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub use lifetime::{estimate_lifetime, Lifetime};
pub use run::{persist, run, QmiSeries};
pub use spec::{Engine, Ensemble, ExperimentSpec};
pub use suite::{run_suite, run_suite_file, Manifest, SuiteConfig};
