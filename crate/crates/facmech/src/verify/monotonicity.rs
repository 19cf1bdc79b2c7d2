//! Sampled monotonicity audit for probability rules used by the
//! randomized multi-location mechanism: the low-endpoint probability must
//! not fall when the right-of-midpoint weight shrinks or the
//! left-of-midpoint weight grows.

use rand::distr::Uniform;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest per-side location count sampled by the audit.
pub const AUDIT_MAX_SUM: u64 = 100;

/// One failed comparison: nudging the named side's count by one moved the
/// probability the wrong way.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityViolation {
    pub sum_r: u64,
    pub sum_l: u64,
    /// "l+1" when p(sum_r, sum_l+1) < p(sum_r, sum_l); "r+1" when
    /// p(sum_r+1, sum_l) > p(sum_r, sum_l).
    pub probe: &'static str,
    pub p_base: f64,
    pub p_probed: f64,
}

/// Sample `(sum_r, sum_l)` pairs with both sides at most [`AUDIT_MAX_SUM`]
/// and check that `p_rule` is non-decreasing in the left count and
/// non-increasing in the right count.
///
/// The rule is never queried at `(0, 0)`; a draw of two zeros is bumped to
/// one left location.
pub fn monotonicity_audit_72(
    p_rule: &dyn Fn(u64, u64) -> f64,
    samples: u64,
    seed: u64,
) -> Result<Vec<MonotonicityViolation>> {
    if samples == 0 {
        return Err(Error::InvalidParameters {
            what: "monotonicity_audit_72".into(),
            reason: "need at least one sample".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = Uniform::new_inclusive(0, AUDIT_MAX_SUM).expect("constant bounds");
    let mut violations = Vec::new();
    for _ in 0..samples {
        let sum_r = side.sample(&mut rng);
        let mut sum_l = side.sample(&mut rng);
        if sum_r == 0 && sum_l == 0 {
            sum_l = 1;
        }
        let p_base = p_rule(sum_r, sum_l);
        let p_more_l = p_rule(sum_r, sum_l + 1);
        if p_more_l < p_base {
            violations.push(MonotonicityViolation {
                sum_r,
                sum_l,
                probe: "l+1",
                p_base,
                p_probed: p_more_l,
            });
        }
        let p_more_r = p_rule(sum_r + 1, sum_l);
        if p_more_r > p_base {
            violations.push(MonotonicityViolation {
                sum_r,
                sum_l,
                probe: "r+1",
                p_base,
                p_probed: p_more_r,
            });
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::canonical_p;

    #[test]
    fn canonical_rule_is_monotone() {
        let rule = |r: u64, l: u64| canonical_p(r, l).expect("audit avoids (0, 0)");
        let violations = monotonicity_audit_72(&rule, 2_000, 42).unwrap();
        assert!(violations.is_empty(), "found {violations:?}");
    }

    #[test]
    fn constant_rule_is_weakly_monotone() {
        let violations = monotonicity_audit_72(&|_, _| 0.5, 2_000, 42).unwrap();
        assert!(violations.is_empty());
    }

    #[test]
    fn right_leaning_rule_is_caught() {
        let rule = |r: u64, l: u64| r as f64 / (r + l) as f64;
        let violations = monotonicity_audit_72(&rule, 2_000, 42).unwrap();
        assert!(violations
            .iter()
            .any(|v| v.probe == "r+1" && v.p_probed > v.p_base));
        assert!(violations
            .iter()
            .any(|v| v.probe == "l+1" && v.p_probed < v.p_base));
    }

    #[test]
    fn audit_is_reproducible_and_validates() {
        let rule = |r: u64, l: u64| r as f64 / (r + l) as f64;
        let a = monotonicity_audit_72(&rule, 500, 9).unwrap();
        let b = monotonicity_audit_72(&rule, 500, 9).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            monotonicity_audit_72(&rule, 0, 9),
            Err(Error::InvalidParameters { .. })
        ));
    }
}
