use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::fdiv_bounds::LambdaChoice;

/// Outcome of one verification suite.
///
/// `slack` is `bound - exact` for inequalities and `-|gap|` for equalities;
/// a check is a violation when its slack is below minus its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub trials: u64,
    pub checks: u64,
    pub violations: u64,
    /// Most negative slack observed, or zero when every slack is non-negative.
    pub max_violation: f64,
    /// Smallest slack observed; `None` when the suite made no checks.
    pub worst_slack: Option<f64>,
    pub tolerance: f64,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    /// `lambda` rule, for the f-divergence suite only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaChoice>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Running totals of checks within a trial or a whole suite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tally {
    pub checks: u64,
    pub violations: u64,
    pub min_slack: f64,
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            checks: 0,
            violations: 0,
            min_slack: f64::INFINITY,
        }
    }
}

impl Tally {
    pub fn record(&mut self, slack: f64, tolerance: f64) {
        self.checks += 1;
        // NaN slack is a failure, not a pass.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(slack >= -tolerance) {
            self.violations += 1;
        }
        self.min_slack = if slack.is_nan() {
            f64::NEG_INFINITY
        } else {
            self.min_slack.min(slack)
        };
    }

    /// `bound >= value` up to `tolerance`.
    pub fn at_most(&mut self, value: f64, bound: f64, tolerance: f64) {
        self.record(bound - value, tolerance);
    }

    /// `|a - b| <= tolerance`.
    pub fn close(&mut self, a: f64, b: f64, tolerance: f64) {
        let gap = if a == b { 0.0 } else { (a - b).abs() };
        self.record(-gap, tolerance);
    }

    pub fn merge(mut self, other: Tally) -> Tally {
        self.checks += other.checks;
        self.violations += other.violations;
        self.min_slack = self.min_slack.min(other.min_slack);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tally_counts_violations() {
        let mut t = Tally::default();
        t.at_most(0.5, 0.6, 1e-9);
        t.at_most(0.5, 0.5 - 1e-10, 1e-9);
        t.at_most(0.5, 0.4, 1e-9);
        t.close(1.0, 1.0 + 1e-3, 1e-6);
        t.record(f64::NAN, 1e-9);
        assert_eq!(t.checks, 5);
        assert_eq!(t.violations, 3);
        assert_eq!(t.min_slack, f64::NEG_INFINITY);
    }
}
