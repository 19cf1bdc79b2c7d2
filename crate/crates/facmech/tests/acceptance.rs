//! Full-scale acceptance run: each test executes one named suite check at
//! its default sample counts and prints a single pass/fail line.

use facmech::suite::{self, CheckOutcome, SuiteConfig};
use facmech::Result;

fn run(criterion: usize, check: fn(&SuiteConfig) -> Result<CheckOutcome>) {
    let outcome = check(&SuiteConfig::default()).expect("suite check should run to completion");
    let status = if outcome.passed { "PASS" } else { "FAIL" };
    println!("criterion {criterion} ({}): {status}", outcome.name);
    assert!(
        outcome.passed,
        "criterion {criterion} ({}) failed:\n{}",
        outcome.name,
        outcome.details.join("\n")
    );
}

#[test]
fn criterion_1_tightness_instance() {
    run(1, suite::check_tightness_instance);
}

#[test]
fn criterion_2_det_hybrid_ratio_bound() {
    run(2, suite::check_det_hybrid_ratio_bound);
}

#[test]
fn criterion_3_rand_hybrid_ratio_bound() {
    run(3, suite::check_rand_hybrid_ratio_bound);
}

#[test]
fn criterion_4_sp_random_sweeps() {
    run(4, suite::check_sp_random_sweeps);
}

#[test]
fn criterion_5_characterization_grid() {
    run(5, suite::check_characterization_grid);
}

#[test]
fn criterion_6_egalitarian_unboundedness() {
    run(6, suite::check_egalitarian_unboundedness);
}

#[test]
fn criterion_7_multi_location_bounds() {
    run(7, suite::check_multi_location_bounds);
}

#[test]
fn criterion_8_impossibility_certificates() {
    run(8, suite::check_impossibility_certificates);
}

#[test]
fn criterion_9_oracle_cross_validation() {
    run(9, suite::check_oracle_cross_validation);
}
