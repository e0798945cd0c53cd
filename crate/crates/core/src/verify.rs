//! Self-check of the pair tables against the state-vector oracle.
//!
//! The implementations under test are injected so a deliberately broken
//! table can be shown to fail under the right name.

use serde::Serialize;

use crate::born::singlet_pair_prob;
use crate::direction::{Direction, Spin};
use crate::error::{Error, Result};
use crate::sampling::{block_rng, uniform_on_sphere};
use crate::spin::{apply_property_i, local_pair_dist, qm_pair_dist, PairDist, Which};

pub const CHECK_TOLERANCE: f64 = 1e-12;

pub type PairTableFn = fn(&Direction, &Direction) -> PairDist;

#[derive(Clone, Copy)]
pub struct Implementations {
    pub qm_pair_dist: PairTableFn,
    pub local_pair_dist: PairTableFn,
}

impl Default for Implementations {
    fn default() -> Self {
        Self {
            qm_pair_dist,
            local_pair_dist,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: &'static str,
    /// Function whose output was found wrong.
    pub subject: &'static str,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }
}

struct Tracker {
    check: &'static str,
    subject: &'static str,
    max_error: f64,
}

impl Tracker {
    fn new(check: &'static str, subject: &'static str) -> Self {
        Self {
            check,
            subject,
            max_error: 0.0,
        }
    }

    fn record(&mut self, err: f64) {
        // NaN must fail the check
        if err.is_nan() {
            self.max_error = f64::INFINITY;
        } else {
            self.max_error = self.max_error.max(err);
        }
    }

    fn finish(self) -> CheckResult {
        CheckResult {
            check: self.check,
            subject: self.subject,
            passed: self.max_error <= CHECK_TOLERANCE,
            max_error: self.max_error,
            tolerance: CHECK_TOLERANCE,
        }
    }
}

/// Runs every check on the library's own tables.
pub fn run_checks(trials: u64, seed: u64) -> Result<VerifyReport> {
    run_checks_with(&Implementations::default(), trials, seed)
}

pub fn run_checks_with(imp: &Implementations, trials: u64, seed: u64) -> Result<VerifyReport> {
    if trials == 0 {
        return Err(Error::InvalidInput("trials must be at least 1".into()));
    }
    let mut oracle = Tracker::new("born-oracle", "qm_pair_dist");
    let mut qm_norm = Tracker::new("normalization", "qm_pair_dist");
    let mut local_norm = Tracker::new("normalization", "local_pair_dist");
    let mut qm_cov = Tracker::new("covariance", "qm_pair_dist");
    let mut local_cov = Tracker::new("covariance", "local_pair_dist");
    let mut forward = Tracker::new("sign-flip-local-to-singlet", "apply_property_i");
    let mut backward = Tracker::new("sign-flip-singlet-to-local", "apply_property_i");

    let mut rng = block_rng(seed, 0);
    for _ in 0..trials {
        let a = uniform_on_sphere(&mut rng);
        let b = uniform_on_sphere(&mut rng);
        let qm = (imp.qm_pair_dist)(&a, &b);
        let local = (imp.local_pair_dist)(&a, &b);
        for alpha in Spin::ALL {
            for beta in Spin::ALL {
                oracle
                    .record((qm.entry(alpha, beta) - singlet_pair_prob(&a, &b, alpha, beta)).abs());
            }
        }
        qm_norm.record((qm.probs().iter().sum::<f64>() - 1.0).abs());
        local_norm.record((local.probs().iter().sum::<f64>() - 1.0).abs());
        qm_cov.record((qm.covariance() + a.dot(&b)).abs());
        local_cov.record((local.covariance() - a.dot(&b)).abs());
        forward.record(apply_property_i(&local, Which::Second).max_abs_diff(&qm));
        backward.record(apply_property_i(&qm, Which::Second).max_abs_diff(&local));
    }

    let checks: Vec<CheckResult> = [
        oracle, qm_norm, local_norm, qm_cov, local_cov, forward, backward,
    ]
    .into_iter()
    .map(Tracker::finish)
    .collect();
    Ok(VerifyReport {
        seed,
        trials,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn negated_dot(a: &Direction, b: &Direction) -> PairDist {
        PairDist::singlet_from_dot(-a.dot(b))
    }

    #[test]
    fn default_run_passes() {
        let r = run_checks(1000, 7).unwrap();
        assert!(r.passed, "{:?}", r.first_failure());
        assert_eq!(r.checks.len(), 7);
        assert!(run_checks(1, 0).unwrap().passed);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(run_checks(0, 0).is_err());
    }

    #[test]
    fn corrupted_table_is_named() {
        let imp = Implementations {
            qm_pair_dist: negated_dot,
            ..Implementations::default()
        };
        let r = run_checks_with(&imp, 100, 3).unwrap();
        assert!(!r.passed);
        assert_eq!(r.first_failure().unwrap().subject, "qm_pair_dist");
    }
}
