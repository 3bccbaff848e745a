//! Pass/fail records for verification runs.

use std::fmt;
use std::time::Duration;

/// Outcome of a single verified claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Computed value equals the expected value.
    Match,
    /// Computed value differs from the expected value.
    Mismatch,
    /// Not computed: the target sits behind the `--long` capacity flag.
    SkippedCapacity,
}

/// One verified claim with the computed and expected values rendered as
/// strings, the wall time spent, and (on mismatch) a command that
/// reproduces the computation.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub claim: String,
    pub computed: String,
    pub expected: String,
    pub status: Status,
    pub wall: Duration,
    pub reproduce: Option<String>,
}

impl VerificationReport {
    /// Compares a computed value against an expectation.
    pub fn compare<T: PartialEq + fmt::Debug>(
        claim: impl Into<String>,
        computed: &T,
        expected: &T,
        wall: Duration,
        reproduce: impl Into<String>,
    ) -> Self {
        let status = if computed == expected { Status::Match } else { Status::Mismatch };
        Self {
            claim: claim.into(),
            computed: format!("{computed:?}"),
            expected: format!("{expected:?}"),
            status,
            wall,
            reproduce: (status == Status::Mismatch).then(|| reproduce.into()),
        }
    }

    /// Records a target that was deliberately not computed.
    pub fn skipped(claim: impl Into<String>, reproduce: impl Into<String>) -> Self {
        Self {
            claim: claim.into(),
            computed: "not computed".into(),
            expected: String::new(),
            status: Status::SkippedCapacity,
            wall: Duration::ZERO,
            reproduce: Some(reproduce.into()),
        }
    }

    pub fn is_mismatch(&self) -> bool {
        self.status == Status::Mismatch
    }

    /// One-line rendering, stable enough to grep in CI logs.
    pub fn line(&self) -> String {
        let ms = self.wall.as_millis();
        match self.status {
            Status::Match => format!("ok    {}  [{} ms]", self.claim, ms),
            Status::Mismatch => format!(
                "FAIL  {}: computed {}, expected {}{}",
                self.claim,
                self.computed,
                self.expected,
                self.reproduce
                    .as_deref()
                    .map(|r| format!("; reproduce: {r}"))
                    .unwrap_or_default()
            ),
            Status::SkippedCapacity => format!(
                "skip  {} (capacity; rerun with --long{})",
                self.claim,
                self.reproduce
                    .as_deref()
                    .map(|r| format!(": {r}"))
                    .unwrap_or_default()
            ),
        }
    }
}

/// True when no report is a mismatch. Skipped targets do not fail a run.
pub fn all_match(reports: &[VerificationReport]) -> bool {
    !reports.iter().any(VerificationReport::is_mismatch)
}

/// Prints every report line followed by a one-line summary, returning
/// whether the run passed.
pub fn print_reports(reports: &[VerificationReport]) -> bool {
    for report in reports {
        println!("{}", report.line());
    }
    let failed = reports.iter().filter(|r| r.is_mismatch()).count();
    let skipped =
        reports.iter().filter(|r| r.status == Status::SkippedCapacity).count();
    let passed = reports.len() - failed - skipped;
    println!(
        "{} checked: {passed} ok, {failed} failed, {skipped} skipped",
        reports.len()
    );
    failed == 0
}
