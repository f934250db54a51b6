//! Named pass/fail entries for identities and inequalities.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn eq(name: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Check {
            name: name.into(),
            passed: lhs == rhs,
            detail: format!("{lhs} = {rhs}"),
        }
    }

    pub fn le(name: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Check {
            name: name.into(),
            passed: lhs <= rhs,
            detail: format!("{lhs} <= {rhs}"),
        }
    }

    pub fn lt(name: impl Into<String>, lhs: i64, rhs: i64) -> Self {
        Check {
            name: name.into(),
            passed: lhs < rhs,
            detail: format!("{lhs} < {rhs}"),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "pass" } else { "FAIL" };
        write!(f, "{verdict} {}: {}", self.name, self.detail)
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}
