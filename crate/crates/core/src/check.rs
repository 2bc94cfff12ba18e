//! Pass/fail tallies for exhaustive identity sweeps.

use std::fmt;

use rayon::iter::ParallelIterator;
use serde::Serialize;

/// Outcome of checking one identity over a finite set of cases.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub cases: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<String>,
}

impl IdentityCheck {
    pub fn new(name: impl Into<String>) -> Self {
        IdentityCheck { name: name.into(), cases: 0, failures: 0, first_failure: None }
    }

    /// Record one case; `describe` is only called for the first failure.
    pub fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }

    /// Fold in the results of a batch of cases checked elsewhere.
    pub fn absorb(&mut self, cases: u64, failures: u64, first_failure: Option<String>) {
        self.cases += cases;
        self.failures += failures;
        if self.first_failure.is_none() {
            self.first_failure = first_failure;
        }
    }

    /// Tally a parallel sweep: `cases` yields `None` on success or a failure description.
    pub fn from_outcomes<I>(name: impl Into<String>, outcomes: I) -> Self
    where
        I: ParallelIterator<Item = Option<String>>,
    {
        let (cases, failures, first) = outcomes
            .map(|o| (1u64, u64::from(o.is_some()), o))
            .reduce(|| (0, 0, None), |a, b| (a.0 + b.0, a.1 + b.1, a.2.or(b.2)));
        IdentityCheck { name: name.into(), cases, failures, first_failure: first }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

impl fmt::Display for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} cases", self.name, self.cases)?;
        if self.failures > 0 {
            write!(f, ", {} failures", self.failures)?;
        }
        write!(f, ")")?;
        if let Some(first) = &self.first_failure {
            write!(f, " first failure: {first}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rayon::prelude::*;

    #[test]
    fn tallies() {
        let mut c = IdentityCheck::new("x");
        c.record(true, || unreachable!());
        c.record(false, || "a".into());
        c.record(false, || "b".into());
        assert_eq!((c.cases, c.failures, c.first_failure.as_deref()), (3, 2, Some("a")));
        assert!(!c.passed());
        let par = IdentityCheck::from_outcomes("y", (0..100).into_par_iter().map(|i| (i == 50).then(|| "50".to_string())));
        assert_eq!((par.cases, par.failures), (100, 1));
        assert!(par.to_string().starts_with("FAIL y (100 cases, 1 failures)"));
    }
}
