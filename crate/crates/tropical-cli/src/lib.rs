//! Verification harness behind the `tropical` binary: a memoizing session
//! wrapper around the core library plus named suites of checks, each
//! producing one pass/fail report per claim.

pub mod report;
pub mod session;
pub mod suites;

pub use report::{all_match, print_reports, Status, VerificationReport};
pub use session::Session;
pub use suites::{run_suite, Suite};
