//! Replayed lower-bound arguments evaluated against a concrete mechanism.
//!
//! The underlying impossibility statements quantify over all mechanisms,
//! so no finite run can prove them. What a certificate can do is instantiate
//! the argument's profiles, measure the mechanism's lotteries on them, and
//! verify the displayed inequalities with the measured values. Reports list
//! every scalar so the numbers can be recomputed from the lotteries.

use crate::error::{Error, Result};
use crate::instances::{gen_thm61, gen_thm62, thm61_a};
use crate::mechanisms::Mechanism;
use crate::model::{expected_social_benefit, Objective};
use crate::oracle;
use crate::verify::ratio::instance_ratio;
use crate::verify::sp::SP_TOLERANCE;

/// Slack applied to every certificate inequality.
const CERT_TOLERANCE: f64 = 1e-9;

/// One inequality of a replayed argument, with the instantiated numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Measurements and verdicts from replaying a lower-bound argument.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub name: &'static str,
    pub mechanism: String,
    pub measurements: Vec<(&'static str, f64)>,
    pub checks: Vec<CertificateCheck>,
    pub consistent: bool,
}

impl CertificateReport {
    pub fn measurement(&self, name: &str) -> Option<f64> {
        self.measurements
            .iter()
            .find(|(key, _)| *key == name)
            .map(|(_, value)| *value)
    }

    pub fn check(&self, name: &str) -> Option<&CertificateCheck> {
        self.checks.iter().find(|check| check.name == name)
    }
}

fn validate_claimed_c(what: &str, claimed_c: f64) -> Result<()> {
    if !claimed_c.is_finite() || claimed_c < 1.0 {
        return Err(Error::InvalidParameters {
            what: what.into(),
            reason: format!("claimed approximation ratio must be finite and at least 1, got {claimed_c}"),
        });
    }
    Ok(())
}

/// Replay the two-profile maxisum argument on the interval [0, 2].
///
/// The first agent sits at 1 − a and the second at 1 + a with
/// a = 2√3 − 3; the companion profile moves the first agent to 0. The
/// report measures both maxisum ratios, the first agent's expected
/// distance from its location 1 − a under both lotteries, and whether
/// that single misreport pays. The verdict is consistent unless the
/// mechanism beats the 2/√3 ratio threshold on both profiles while the
/// tested deviation is unprofitable — the pattern the argument rules out
/// for any mechanism whose facility mass does not all sit above the
/// second agent.
pub fn certificate_61(mechanism: &Mechanism, claimed_c: f64) -> Result<CertificateReport> {
    validate_claimed_c("certificate_61", claimed_c)?;
    let (x, y) = gen_thm61();
    let a = thm61_a();
    let truthful_location = 1.0 - a;
    let threshold = 2.0 / 3.0_f64.sqrt();

    let lottery_x = mechanism.apply(&x)?;
    let lottery_y = mechanism.apply(&y)?;
    let ratio_x = instance_ratio(mechanism, &x, Objective::Maxisum)?;
    let ratio_y = instance_ratio(mechanism, &y, Objective::Maxisum)?;
    let distance_truthful = lottery_x.expect(|facility| (facility - truthful_location).abs());
    let distance_misreport = lottery_y.expect(|facility| (facility - truthful_location).abs());
    let sp_gain = distance_misreport - distance_truthful;
    let sp_holds = sp_gain <= SP_TOLERANCE;

    let checks = vec![
        CertificateCheck {
            name: "deviation-to-zero-unprofitable",
            passed: sp_holds,
            detail: format!(
                "expected distance from {truthful_location}: truthful {distance_truthful}, \
                 after misreporting 0 {distance_misreport}, gain {sp_gain}"
            ),
        },
        CertificateCheck {
            name: "ratio-x-at-most-claimed",
            passed: ratio_x <= claimed_c + CERT_TOLERANCE,
            detail: format!("measured {ratio_x} vs claimed {claimed_c}"),
        },
        CertificateCheck {
            name: "ratio-y-at-most-claimed",
            passed: ratio_y <= claimed_c + CERT_TOLERANCE,
            detail: format!("measured {ratio_y} vs claimed {claimed_c}"),
        },
    ];
    let consistent = !(ratio_x < threshold && ratio_y < threshold && sp_holds);

    Ok(CertificateReport {
        name: "certificate_61",
        mechanism: mechanism.name().to_string(),
        measurements: vec![
            ("offset_a", a),
            ("ratio_threshold", threshold),
            ("claimed_c", claimed_c),
            ("ratio_x", ratio_x),
            ("ratio_y", ratio_y),
            ("distance_truthful", distance_truthful),
            ("distance_misreport", distance_misreport),
            ("sp_gain", sp_gain),
        ],
        checks,
        consistent,
    })
}

/// Replay the egalitarian relocation argument on the interval [0, M + 2].
///
/// Profile x packs an ε-net into (1, M+1) with clusters at the endpoints;
/// x′ spreads the low cluster over an ε-net of [0, 1). The report measures
/// the probability p of placing the facility in [1, M+1] on x, the
/// probability p′ of [0, M+1] on x′, the egalitarian ratios, and the
/// expected facility positions, then verifies the argument's inequalities:
/// the ε-net benefit ceilings, the p and p′ ceilings implied by a ratio at
/// most claimed_c, the strategyproofness consequence that relocating the
/// low cluster cannot raise the expected position, and — when at least
/// half of the off-net mass on x sits in [0, 1], the branch the argument
/// analyzes — the displayed distance chain
/// (3 − p)/2 + (1 + p)M/2 ≥ (1 − p′)M + 1 − p′.
pub fn certificate_62(
    mechanism: &Mechanism,
    m: f64,
    epsilon: f64,
    claimed_c: f64,
) -> Result<CertificateReport> {
    validate_claimed_c("certificate_62", claimed_c)?;
    let (x, x_prime) = gen_thm62(m, epsilon)?;
    let n = x.n();

    let lottery_x = mechanism.apply(&x)?;
    let lottery_x_prime = mechanism.apply(&x_prime)?;
    let p = lottery_x.probability_in(1.0, m + 1.0);
    let p_prime = lottery_x_prime.probability_in(0.0, m + 1.0);
    let p_bound = (0.5 * (1.0 - 1.0 / claimed_c)) / (0.5 - epsilon / 2.0);

    let opt_x = oracle::opt_egalitarian(&x)?.value;
    let opt_x_prime = oracle::opt_egalitarian(&x_prime)?.value;
    let benefit_x = expected_social_benefit(&x, &lottery_x, Objective::Egalitarian)?;
    let benefit_x_prime =
        expected_social_benefit(&x_prime, &lottery_x_prime, Objective::Egalitarian)?;
    let ratio_x = instance_ratio(mechanism, &x, Objective::Egalitarian)?;
    let ratio_x_prime = instance_ratio(mechanism, &x_prime, Objective::Egalitarian)?;
    let position_x = lottery_x.mean();
    let position_x_prime = lottery_x_prime.mean();
    let mass_left = lottery_x.probability_in(0.0, 1.0);

    let ceiling_x = 0.5 * epsilon * p + 0.5 * (1.0 - p);
    let ceiling_x_prime = 0.5 * epsilon * p_prime + 0.5 * (1.0 - p_prime);
    let chain_lhs = 0.5 * (3.0 - p) + 0.5 * (1.0 + p) * m;
    let chain_rhs = (1.0 - p_prime) * m + 1.0 - p_prime;
    let left_branch = mass_left >= 0.5 * (1.0 - p) - CERT_TOLERANCE;

    let checks = vec![
        CertificateCheck {
            name: "net-benefit-ceiling-x",
            passed: benefit_x <= ceiling_x + CERT_TOLERANCE,
            detail: format!("measured {benefit_x} vs ceiling {ceiling_x}"),
        },
        CertificateCheck {
            name: "net-benefit-ceiling-x-prime",
            passed: benefit_x_prime <= ceiling_x_prime + CERT_TOLERANCE,
            detail: format!("measured {benefit_x_prime} vs ceiling {ceiling_x_prime}"),
        },
        CertificateCheck {
            name: "ratio-implies-p-ceiling",
            passed: ratio_x > claimed_c + CERT_TOLERANCE || p <= p_bound + CERT_TOLERANCE,
            detail: format!("ratio {ratio_x}, p {p}, ceiling {p_bound}"),
        },
        CertificateCheck {
            name: "ratio-implies-p-prime-ceiling",
            passed: ratio_x_prime > claimed_c + CERT_TOLERANCE
                || p_prime <= p_bound + CERT_TOLERANCE,
            detail: format!("ratio {ratio_x_prime}, p' {p_prime}, ceiling {p_bound}"),
        },
        CertificateCheck {
            name: "relocation-cannot-raise-position",
            passed: position_x >= position_x_prime - CERT_TOLERANCE,
            detail: format!("expected position {position_x} before, {position_x_prime} after"),
        },
        CertificateCheck {
            name: "distance-chain-left-branch",
            passed: !left_branch || chain_lhs >= chain_rhs - CERT_TOLERANCE,
            detail: format!(
                "left mass {mass_left} vs (1-p)/2 = {}; chain {chain_lhs} >= {chain_rhs}",
                0.5 * (1.0 - p)
            ),
        },
    ];
    let consistent = checks.iter().all(|check| check.passed);

    Ok(CertificateReport {
        name: "certificate_62",
        mechanism: mechanism.name().to_string(),
        measurements: vec![
            ("m", m),
            ("epsilon", epsilon),
            ("claimed_c", claimed_c),
            ("n", n as f64),
            ("p", p),
            ("p_prime", p_prime),
            ("p_bound", p_bound),
            ("opt_egalitarian_x", opt_x),
            ("opt_egalitarian_x_prime", opt_x_prime),
            ("mechanism_egalitarian_x", benefit_x),
            ("mechanism_egalitarian_x_prime", benefit_x_prime),
            ("ratio_x", ratio_x),
            ("ratio_x_prime", ratio_x_prime),
            ("expected_position_x", position_x),
            ("expected_position_x_prime", position_x_prime),
            ("mass_left_of_one_x", mass_left),
            ("chain_lhs", chain_lhs),
            ("chain_rhs", chain_rhs),
        ],
        checks,
        consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{constant_mechanism, rand_hybrid};
    use crate::oracle::opt_mechanism;

    #[test]
    fn pair_certificate_on_the_randomized_mechanism() {
        let report = certificate_61(&rand_hybrid(), 23.0 / 13.0).unwrap();
        assert!(report.consistent);
        assert!(report.checks.iter().all(|check| check.passed));

        let a = report.measurement("offset_a").unwrap();
        assert!((a - (2.0 * 3.0_f64.sqrt() - 3.0)).abs() <= 1e-12);

        // Both profiles split one agent per side of 1, so the lotteries
        // coincide and the tested deviation gains exactly nothing.
        assert_eq!(report.measurement("sp_gain").unwrap(), 0.0);

        let ratio_x = report.measurement("ratio_x").unwrap();
        let ratio_y = report.measurement("ratio_y").unwrap();
        let threshold = report.measurement("ratio_threshold").unwrap();
        assert!((ratio_x - 46.0 / (40.0 + 6.0 * a)).abs() <= 1e-12);
        assert!((ratio_y - 23.0 * (3.0 - a) / (47.0 - a)).abs() <= 1e-12);
        assert!(ratio_x < threshold && threshold < ratio_y);
        assert!(ratio_x <= 23.0 / 13.0 + 1e-9 && ratio_y <= 23.0 / 13.0 + 1e-9);
    }

    #[test]
    fn pair_certificate_on_the_oracle_mechanism() {
        let report = certificate_61(&opt_mechanism(Objective::Maxisum), 1.0).unwrap();
        assert!(report.consistent);
        let sp = report.check("deviation-to-zero-unprofitable").unwrap();
        assert!(!sp.passed, "ratio-1 play must make the deviation pay");
        let a = report.measurement("offset_a").unwrap();
        let gain = report.measurement("sp_gain").unwrap();
        assert!((gain - 2.0 * a).abs() <= 1e-9);
        assert_eq!(report.measurement("ratio_x").unwrap(), 1.0);
        assert_eq!(report.measurement("ratio_y").unwrap(), 1.0);
    }

    #[test]
    fn pair_certificate_flags_the_ruled_out_pattern() {
        // Pinning the facility to 2 is strategyproof and achieves ratio 1
        // on both certificate profiles; all its mass sits above the second
        // agent, the one configuration the unmirrored argument cannot
        // reach, and the verdict reports that.
        let report = certificate_61(&constant_mechanism(2.0), 23.0 / 13.0).unwrap();
        assert_eq!(report.measurement("ratio_x").unwrap(), 1.0);
        assert_eq!(report.measurement("ratio_y").unwrap(), 1.0);
        assert!(report.check("deviation-to-zero-unprofitable").unwrap().passed);
        assert!(!report.consistent);
    }

    #[test]
    fn relocation_certificate_on_the_randomized_mechanism() {
        let report = certificate_62(&rand_hybrid(), 10.0, 0.1, 23.0 / 13.0).unwrap();
        assert!(report.consistent, "failed checks: {:?}", report.checks);

        assert_eq!(report.measurement("n").unwrap(), 224.0);
        assert!((report.measurement("opt_egalitarian_x").unwrap() - 0.5).abs() <= 1e-9);
        let expected_bound = (0.5 * (1.0 - 13.0 / 23.0)) / 0.45;
        assert!((report.measurement("p_bound").unwrap() - expected_bound).abs() <= 1e-9);

        // 113 of 224 locations fall at or below the midpoint 6, so the
        // lottery is (12: 12/23, 0: 8/23, 6: 3/23).
        assert!((report.measurement("p").unwrap() - 3.0 / 23.0).abs() <= 1e-12);
        assert!((report.measurement("p_prime").unwrap() - 11.0 / 23.0).abs() <= 1e-12);
        assert!((report.measurement("chain_lhs").unwrap() - 163.0 / 23.0).abs() <= 1e-9);
        assert!((report.measurement("chain_rhs").unwrap() - 132.0 / 23.0).abs() <= 1e-9);
        assert!(report.measurement("ratio_x").unwrap().is_infinite());
    }

    #[test]
    fn relocation_certificate_on_an_endpoint_mechanism() {
        let report = certificate_62(&constant_mechanism(0.0), 10.0, 0.1, 1.1).unwrap();
        assert_eq!(report.measurement("p").unwrap(), 0.0);
        assert!(report.consistent, "failed checks: {:?}", report.checks);
    }

    #[test]
    fn certificates_validate_parameters() {
        assert!(matches!(
            certificate_61(&rand_hybrid(), 0.5),
            Err(Error::InvalidParameters { .. })
        ));
        assert!(matches!(
            certificate_61(&rand_hybrid(), f64::NAN),
            Err(Error::InvalidParameters { .. })
        ));
        assert!(certificate_62(&rand_hybrid(), 0.0, 0.1, 1.5).is_err());
        assert!(certificate_62(&rand_hybrid(), 10.0, 1.5, 1.5).is_err());
    }
}
