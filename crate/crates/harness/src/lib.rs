//! Seeded, reproducible checks of commutation results for bundles of
//! finite groups and modules.
//!
//! [`gen_instance`] builds a payload from a theorem id, a seed and size
//! [`Bounds`]; [`check`] verifies the theorem on it and returns a [`Report`]
//! with an explicit witness; [`run_suite`] runs many seeded trials.

pub mod bounds;
pub mod check;
pub mod error;
pub mod instance;
pub mod probes;
pub mod report;
pub mod seed;
pub mod suite;
pub mod theorem;

pub use bounds::Bounds;
pub use check::{check, check_with, CheckOptions};
pub use error::{HarnessError, Result};
pub use instance::{gen_instance, CheckInstance, Payload};
pub use report::{Report, Verdict, Witness};
pub use suite::{run_suite, run_suite_with, SuiteReport};
pub use theorem::TheoremId;
