//! The bundled verification suite: nine named checks covering the worked
//! tightness instance, sampled ratio bounds, strategyproofness sweeps, the
//! grid-scale characterization, the egalitarian unboundedness demo,
//! multi-location bounds, the impossibility certificates, and oracle
//! cross-validation.
//!
//! Every check is deterministic given a [`SuiteConfig`], independent of
//! worker-thread count: instances derive from `(seed, stream)` pairs and
//! parallel reductions are order-independent.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instances::{gen_thm51, gen_thm52, gen_thm62, gen_tightness_32, RandomProfileSpec};
use crate::mechanisms::{
    canonical_p, det_hybrid_mutant, det_multi, mechanism_by_name, rand_multi_canonical,
    DomainConstraint, Mechanism,
};
use crate::model::{
    expected_social_benefit, AgentReport, AgentType, Interval, Objective, Profile,
};
use crate::oracle::{self, grid_oracle, opt_egalitarian, opt_mechanism};
use crate::verify::{
    certificate_61, certificate_62, default_deviation_sets, instance_ratio,
    midpoint_property_check, monotonicity_audit_72, ratio_search, reflection_form_check,
    sp_check, uniform_grid, DeviationWitness, ReflectionForm, SP_TOLERANCE,
};

/// Configuration shared by all suite checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// When set, replaces every check's default sample count; the full-size
    /// defaults are 10^5 for ratio sweeps, 10^4 for strategyproofness and
    /// multi-location sweeps, and 10^3 for oracle cross-validation.
    pub iterations: Option<u64>,
    /// Name of a shipped mechanism to replace with its built-in sabotaged
    /// variant, to demonstrate that the suite catches a broken rule.
    pub mutate: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> SuiteConfig {
        SuiteConfig {
            seed: 42,
            iterations: None,
            mutate: None,
        }
    }
}

impl SuiteConfig {
    fn count(&self, default: u64) -> u64 {
        self.iterations.unwrap_or(default)
    }
}

/// Result of one named suite check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// One line per assertion, prefixed "ok:" or "FAIL:"; failures carry
    /// the offending numbers or witnesses.
    pub details: Vec<String>,
}

/// Aggregated outcome of the whole suite, checks sorted by name.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

struct Check {
    name: &'static str,
    passed: bool,
    details: Vec<String>,
}

impl Check {
    fn new(name: &'static str) -> Check {
        Check {
            name,
            passed: true,
            details: Vec::new(),
        }
    }

    fn require(&mut self, label: &str, ok: bool, detail: String) {
        let status = if ok { "ok" } else { "FAIL" };
        self.details.push(format!("{status}: {label} ({detail})"));
        self.passed &= ok;
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            passed: self.passed,
            details: self.details,
        }
    }
}

fn close(a: f64, b: f64, tolerance: f64) -> bool {
    (a - b).abs() <= tolerance
}

fn unit_interval() -> Interval {
    Interval::new(0.0, 2.0).expect("constant bounds")
}

/// Resolve a mechanism by registry name, honoring the mutate override.
fn suite_mechanism(config: &SuiteConfig, name: &str) -> Result<Mechanism> {
    if config.mutate.as_deref() == Some(name) {
        return sabotaged_variant(name);
    }
    mechanism_by_name(name)
}

fn sabotaged_variant(name: &str) -> Result<Mechanism> {
    match name {
        "det-hybrid" => Ok(det_hybrid_mutant()),
        other => Err(Error::InvalidParameters {
            what: "verification suite".into(),
            reason: format!("no built-in mutant for mechanism '{other}' (available: det-hybrid)"),
        }),
    }
}

fn describe_witness(witness: &DeviationWitness) -> String {
    format!(
        "agent {} ({:?} at {:?}) gains {} by reporting {:?} at {:?}",
        witness.agent_index,
        witness.true_report.agent_type(),
        witness.true_report.locations(),
        witness.gain,
        witness.misreport.agent_type(),
        witness.misreport.locations(),
    )
}

/// Count deviation witnesses over seeded random profiles, keeping the
/// lowest-stream example for reporting.
fn sweep_witnesses(
    mechanism: &Mechanism,
    sampler: &RandomProfileSpec,
    domain: DomainConstraint,
    iterations: u64,
    seed: u64,
) -> Result<(u64, Option<(u64, DeviationWitness)>)> {
    (0..iterations)
        .into_par_iter()
        .map(|stream| -> Result<(u64, Option<(u64, DeviationWitness)>)> {
            let profile = sampler.sample(seed, stream);
            let sets = default_deviation_sets(&profile, domain)?;
            let witnesses = sp_check(mechanism, &profile, &sets, SP_TOLERANCE)?;
            let example = witnesses.first().map(|w| (stream, w.clone()));
            Ok((witnesses.len() as u64, example))
        })
        .try_reduce(
            || (0, None),
            |a, b| {
                let example = match (a.1, b.1) {
                    (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                    (x, y) => x.or(y),
                };
                Ok((a.0 + b.0, example))
            },
        )
}

/// Exhaustive strategyproofness over a grid: every profile of `n` single
/// far-preferring agents on `grid`, every agent, every grid misreport.
fn grid_sp_witnesses(
    mechanism: &Mechanism,
    interval: &Interval,
    grid: &[f64],
) -> Result<(u64, Option<DeviationWitness>)> {
    let misreports: Vec<AgentReport> = grid
        .iter()
        .map(|&x| AgentReport::single(AgentType::Type1, x))
        .collect::<Result<_>>()?;
    let mut count = 0;
    let mut example = None;
    for &a in grid {
        for &b in grid {
            let profile = Profile::new(
                *interval,
                vec![
                    AgentReport::single(AgentType::Type1, a)?,
                    AgentReport::single(AgentType::Type1, b)?,
                ],
            )?;
            let sets = vec![misreports.clone(), misreports.clone()];
            let witnesses = sp_check(mechanism, &profile, &sets, SP_TOLERANCE)?;
            count += witnesses.len() as u64;
            if example.is_none() {
                example = witnesses.into_iter().next();
            }
        }
    }
    Ok((count, example))
}

/// Worked randomized-tightness instance: expected maxisum, exact optimum,
/// and their ratio.
pub fn check_tightness_instance(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("tightness-instance");
    let mechanism = suite_mechanism(config, "rand-hybrid")?;
    let profile = gen_tightness_32();
    let lottery = mechanism.apply(&profile)?;
    let mech_value = expected_social_benefit(&profile, &lottery, Objective::Maxisum)?;
    check.require(
        "expected maxisum equals 39/23",
        close(mech_value, 39.0 / 23.0, 1e-12),
        format!("measured {mech_value}"),
    );
    let opt = oracle::opt(&profile, Objective::Maxisum)?;
    check.require(
        "optimum equals 3 exactly",
        opt.value == 3.0,
        format!("measured {} at {}", opt.value, opt.location),
    );
    let ratio = instance_ratio(&mechanism, &profile, Objective::Maxisum)?;
    check.require(
        "ratio equals 23/13",
        close(ratio, 23.0 / 13.0, 1e-12),
        format!("measured {ratio}"),
    );
    Ok(check.finish())
}

/// Sampled worst-case ratio of the deterministic hybrid mechanism, plus
/// the two-cluster family instance that approaches the bound.
pub fn check_det_hybrid_ratio_bound(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("det-hybrid-ratio-bound");
    let mechanism = suite_mechanism(config, "det-hybrid")?;
    let sampler = RandomProfileSpec::new(10, 0.5, 1, unit_interval())?;
    let iterations = config.count(100_000);
    let search = ratio_search(
        &mechanism,
        Objective::Maxisum,
        &sampler,
        iterations,
        config.seed,
        &[],
    )?;
    check.require(
        "worst sampled ratio at most 3",
        search.worst_ratio <= 3.0 + 1e-9,
        format!(
            "worst {} at pool index {} over {} instances",
            search.worst_ratio, search.worst_index, search.evaluated
        ),
    );
    let epsilon = 1e-3;
    let (_cluster_x, cluster_y) = gen_thm51(10, epsilon, 0.0, 2.0)?;
    let family_ratio = instance_ratio(&mechanism, &cluster_y, Objective::Maxisum)?;
    check.require(
        "two-cluster family ratio at least 2.99",
        family_ratio >= 2.99,
        format!("measured {family_ratio}"),
    );
    let closed_form = (3.0 - epsilon) / (1.0 + epsilon);
    check.require(
        "two-cluster family ratio matches closed form",
        close(family_ratio, closed_form, 1e-12),
        format!("measured {family_ratio}, closed form {closed_form}"),
    );
    Ok(check.finish())
}

/// Sampled worst-case ratio of the randomized hybrid mechanism, with
/// equality on the tightness instance.
pub fn check_rand_hybrid_ratio_bound(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("rand-hybrid-ratio-bound");
    let mechanism = suite_mechanism(config, "rand-hybrid")?;
    let sampler = RandomProfileSpec::new(10, 0.5, 1, unit_interval())?;
    let iterations = config.count(100_000);
    let search = ratio_search(
        &mechanism,
        Objective::Maxisum,
        &sampler,
        iterations,
        config.seed,
        &[],
    )?;
    let bound = 23.0 / 13.0;
    check.require(
        "worst sampled ratio at most 23/13",
        search.worst_ratio <= bound + 1e-9,
        format!(
            "worst {} at pool index {} over {} instances",
            search.worst_ratio, search.worst_index, search.evaluated
        ),
    );
    let tight_ratio = instance_ratio(&mechanism, &gen_tightness_32(), Objective::Maxisum)?;
    check.require(
        "bound attained on the tightness instance",
        close(tight_ratio, bound, 1e-12),
        format!("measured {tight_ratio}"),
    );
    Ok(check.finish())
}

/// Deviation sweeps: shipped mechanisms admit no profitable misreport from
/// the default candidate sets, while the oracle played as a mechanism does.
pub fn check_sp_random_sweeps(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("sp-random-sweeps");
    let iterations = config.count(10_000);
    let hybrid = RandomProfileSpec::new(10, 0.5, 1, unit_interval())?;
    let multi = RandomProfileSpec::new(6, 0.0, 4, unit_interval())?;
    let targets = [
        ("det-hybrid", &hybrid, DomainConstraint::HybridTypes),
        ("rand-hybrid", &hybrid, DomainConstraint::HybridTypes),
        ("det-multi", &multi, DomainConstraint::Type1Only),
        ("rand-multi-canonical", &multi, DomainConstraint::Type1Only),
    ];
    for (name, sampler, domain) in targets {
        let mechanism = suite_mechanism(config, name)?;
        let (count, example) =
            sweep_witnesses(&mechanism, sampler, domain, iterations, config.seed)?;
        let detail = match example {
            Some((stream, witness)) => format!(
                "{count} witnesses over {iterations} profiles; first at stream {stream}: {}",
                describe_witness(&witness)
            ),
            None => format!("0 witnesses over {iterations} profiles"),
        };
        check.require(&format!("{name} admits no profitable deviation"), count == 0, detail);
    }

    let profile = Profile::new(
        unit_interval(),
        vec![
            AgentReport::single(AgentType::Type1, 2.0 / 3.0)?,
            AgentReport::single(AgentType::Type1, 1.5)?,
        ],
    )?;
    let sets = vec![
        vec![AgentReport::single(AgentType::Type1, 1.0 / 3.0)?],
        vec![AgentReport::single(AgentType::Type1, 1.5)?],
    ];
    let witnesses = sp_check(&opt_mechanism(Objective::Maxisum), &profile, &sets, SP_TOLERANCE)?;
    check.require(
        "oracle played as a mechanism is manipulable",
        witnesses.len() == 1 && witnesses[0].gain > 0.0,
        match witnesses.first() {
            Some(witness) => describe_witness(witness),
            None => "no witness found".into(),
        },
    );
    Ok(check.finish())
}

/// Grid-scale characterization: the midpoint property, exhaustive grid
/// strategyproofness, the sabotaged variant failing both, and reflection
/// sweeps stepping only at the interval midpoint.
pub fn check_characterization_grid(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("characterization-grid");
    let grid = [0.0, 0.5, 1.0, 1.5, 2.0];
    let interval = unit_interval();
    let subject = suite_mechanism(config, "det-hybrid")?;

    let report = midpoint_property_check(&subject, &interval, 2, &grid, false)?;
    check.require(
        "subject satisfies the midpoint property",
        report.passed,
        match &report.violating_pair {
            Some((x, y)) => format!(
                "range {:?}, violating pair x={:?}, y={:?}",
                report.range_points,
                x.agents().iter().map(|a| a.locations()[0]).collect::<Vec<_>>(),
                y.agents().iter().map(|a| a.locations()[0]).collect::<Vec<_>>(),
            ),
            None => format!("range {:?}", report.range_points),
        },
    );

    let (sp_count, sp_example) = grid_sp_witnesses(&subject, &interval, &grid)?;
    check.require(
        "subject is strategyproof over the full grid",
        sp_count == 0,
        match sp_example {
            Some(witness) => format!("{sp_count} witnesses; first: {}", describe_witness(&witness)),
            None => "0 witnesses".into(),
        },
    );

    let mutant = det_hybrid_mutant();
    let mutant_report = midpoint_property_check(&mutant, &interval, 2, &grid, false)?;
    check.require(
        "sabotaged variant violates the midpoint property",
        !mutant_report.passed && mutant_report.violating_pair.is_some(),
        format!("passed={}", mutant_report.passed),
    );
    let (mutant_count, _) = grid_sp_witnesses(&mutant, &interval, &grid)?;
    check.require(
        "sabotaged variant admits a grid deviation",
        mutant_count >= 1,
        format!("{mutant_count} witnesses"),
    );

    let sweep = uniform_grid(&interval, 0.01)?;
    let mut steps = 0;
    let mut problems: Vec<String> = Vec::new();
    for &other_location in &grid {
        let profile = Profile::new(
            interval,
            vec![
                AgentReport::single(AgentType::Type1, 0.0)?,
                AgentReport::single(AgentType::Type1, other_location)?,
            ],
        )?;
        match reflection_form_check(&subject, &profile, 0, &sweep)? {
            ReflectionForm::Constant { .. } => {}
            ReflectionForm::Step {
                alpha,
                beta,
                reflection_point,
            } if alpha == 0.0 && beta == 2.0 && reflection_point == 1.0 => steps += 1,
            other => problems.push(format!("partner at {other_location}: {other:?}")),
        }
    }
    check.require(
        "pivotal sweeps step exactly at the midpoint",
        problems.is_empty() && steps >= 1,
        if problems.is_empty() {
            format!("{steps} pivotal partials among {}", grid.len())
        } else {
            problems.join("; ")
        },
    );
    Ok(check.finish())
}

/// Two far-preferring agents pinned on the range points: the mechanism
/// earns zero egalitarian benefit while the optimum is positive.
pub fn check_egalitarian_unboundedness(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("egalitarian-unboundedness");
    let mechanism = suite_mechanism(config, "det-hybrid")?;
    let profile = gen_thm52(0.0, 2.0)?;
    let lottery = mechanism.apply(&profile)?;
    let mech_value = expected_social_benefit(&profile, &lottery, Objective::Egalitarian)?;
    check.require(
        "mechanism egalitarian benefit is zero",
        mech_value == 0.0,
        format!("measured {mech_value}"),
    );
    let opt = opt_egalitarian(&profile)?;
    check.require(
        "optimum egalitarian benefit is one",
        opt.value == 1.0,
        format!("measured {} at {}", opt.value, opt.location),
    );
    let ratio = instance_ratio(&mechanism, &profile, Objective::Egalitarian)?;
    check.require(
        "reported ratio is +infinity",
        ratio == f64::INFINITY,
        format!("measured {ratio}"),
    );
    Ok(check.finish())
}

/// Multi-location sweeps, the probability-rule audit, and the worked
/// two-agent bundle instance.
pub fn check_multi_location_bounds(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("multi-location-bounds");
    let iterations = config.count(10_000);
    let sampler = RandomProfileSpec::new(6, 0.0, 4, unit_interval())?;

    let det = suite_mechanism(config, "det-multi")?;
    let det_search = ratio_search(&det, Objective::Maxisum, &sampler, iterations, config.seed, &[])?;
    check.require(
        "det-multi worst sampled ratio at most 3",
        det_search.worst_ratio <= 3.0 + 1e-9,
        format!("worst {} over {} instances", det_search.worst_ratio, det_search.evaluated),
    );

    let rand = suite_mechanism(config, "rand-multi-canonical")?;
    let rand_search =
        ratio_search(&rand, Objective::Maxisum, &sampler, iterations, config.seed, &[])?;
    check.require(
        "rand-multi-canonical worst sampled ratio at most 1.5",
        rand_search.worst_ratio <= 1.5 + 1e-9,
        format!("worst {} over {} instances", rand_search.worst_ratio, rand_search.evaluated),
    );

    let audit = monotonicity_audit_72(
        &|r, l| canonical_p(r, l).expect("audit never queries (0, 0)"),
        iterations,
        config.seed,
    )?;
    check.require(
        "canonical probability rule is monotone",
        audit.is_empty(),
        format!("{} violations over {iterations} sampled pairs", audit.len()),
    );

    let worked = Profile::new(
        unit_interval(),
        vec![
            AgentReport::new(AgentType::Type1, vec![0.0, 2.0])?,
            AgentReport::new(AgentType::Type1, vec![1.5])?,
        ],
    )?;
    let det_ratio = instance_ratio(&det_multi(), &worked, Objective::Maxisum)?;
    check.require(
        "worked bundle instance: deterministic ratio 1.4",
        close(det_ratio, 1.4, 1e-9),
        format!("measured {det_ratio}"),
    );
    let rand_ratio = instance_ratio(&rand_multi_canonical(), &worked, Objective::Maxisum)?;
    let rand_closed = 3.5 / (8.5 / 3.0);
    check.require(
        "worked bundle instance: randomized ratio 21/17",
        close(rand_ratio, rand_closed, 1e-9),
        format!("measured {rand_ratio}, closed form {rand_closed}"),
    );
    Ok(check.finish())
}

/// Replayed lower-bound arguments against the randomized hybrid mechanism.
pub fn check_impossibility_certificates(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("impossibility-certificates");
    let mechanism = suite_mechanism(config, "rand-hybrid")?;
    let claimed = 23.0 / 13.0;

    let pair = certificate_61(&mechanism, claimed)?;
    let sp = pair
        .check("deviation-to-zero-unprofitable")
        .expect("check always present");
    check.require(
        "pair certificate: tested deviation is unprofitable",
        sp.passed,
        sp.detail.clone(),
    );
    check.require(
        "pair certificate verdict is consistent",
        pair.consistent,
        format!(
            "ratio_x {}, ratio_y {}, threshold {}",
            pair.measurement("ratio_x").unwrap_or(f64::NAN),
            pair.measurement("ratio_y").unwrap_or(f64::NAN),
            pair.measurement("ratio_threshold").unwrap_or(f64::NAN),
        ),
    );

    let (x, _x_prime) = gen_thm62(10.0, 0.1)?;
    check.require(
        "relocation profile has 224 agents",
        x.n() == 224,
        format!("measured {}", x.n()),
    );
    let opt_x = opt_egalitarian(&x)?;
    check.require(
        "optimal egalitarian benefit is one half",
        close(opt_x.value, 0.5, 1e-9),
        format!("measured {} at {}", opt_x.value, opt_x.location),
    );

    let relocation = certificate_62(&mechanism, 10.0, 0.1, claimed)?;
    let p_bound = relocation.measurement("p_bound").expect("always reported");
    let closed_form = (0.5 * (1.0 - 13.0 / 23.0)) / 0.45;
    check.require(
        "probability ceiling matches the closed form",
        close(p_bound, closed_form, 1e-9),
        format!("measured {p_bound}, closed form {closed_form}"),
    );
    check.require(
        "relocation certificate verdict is consistent",
        relocation.consistent,
        format!(
            "p {}, p' {}",
            relocation.measurement("p").unwrap_or(f64::NAN),
            relocation.measurement("p_prime").unwrap_or(f64::NAN),
        ),
    );
    Ok(check.finish())
}

/// Exact oracles against the brute-force grid on random instances: the
/// exact value always dominates and never exceeds the grid by more than
/// one Lipschitz step.
pub fn check_oracle_cross_validation(config: &SuiteConfig) -> Result<CheckOutcome> {
    let mut check = Check::new("oracle-cross-validation");
    let iterations = config.count(1_000);
    let resolution = 1e-4;
    // Each agent's social-benefit contribution is 1-Lipschitz and n stays
    // at most 4, so the exact maximum sits within 2e-4 of the best point
    // on a 1e-4 grid for both objectives.
    let sampler = RandomProfileSpec::new(4, 0.5, 1, unit_interval())?;

    let (domination_failures, gap_failures, worst_gap) = (0..iterations)
        .into_par_iter()
        .map(|stream| -> Result<(u64, u64, f64)> {
            let profile = sampler.sample(config.seed, stream);
            let mut dominated = 0;
            let mut gapped = 0;
            let mut gap_max: f64 = 0.0;
            for objective in [Objective::Maxisum, Objective::Egalitarian] {
                let exact = oracle::opt(&profile, objective)?;
                let grid = grid_oracle(&profile, objective, resolution)?;
                if exact.value < grid.value {
                    dominated += 1;
                }
                let gap = exact.value - grid.value;
                if gap > 2e-4 {
                    gapped += 1;
                }
                gap_max = gap_max.max(gap);
            }
            Ok((dominated, gapped, gap_max))
        })
        .try_reduce(
            || (0, 0, 0.0),
            |a, b| Ok((a.0 + b.0, a.1 + b.1, a.2.max(b.2))),
        )?;

    check.require(
        "exact value dominates the grid value everywhere",
        domination_failures == 0,
        format!("{domination_failures} violations over {iterations} instances"),
    );
    check.require(
        "exact value within 2e-4 of the grid value",
        gap_failures == 0,
        format!("largest gap {worst_gap} over {iterations} instances"),
    );
    Ok(check.finish())
}

/// Run all nine checks and assemble the report, sorted by check name.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteReport> {
    if let Some(name) = &config.mutate {
        // Fail fast on unknown mutation targets.
        sabotaged_variant(name)?;
    }
    let mut checks = vec![
        check_tightness_instance(config)?,
        check_det_hybrid_ratio_bound(config)?,
        check_rand_hybrid_ratio_bound(config)?,
        check_sp_random_sweeps(config)?,
        check_characterization_grid(config)?,
        check_egalitarian_unboundedness(config)?,
        check_multi_location_bounds(config)?,
        check_impossibility_certificates(config)?,
        check_oracle_cross_validation(config)?,
    ];
    checks.sort_by(|a, b| a.name.cmp(b.name));
    let passed = checks.iter().all(|check| check.passed);
    Ok(SuiteReport {
        seed: config.seed,
        checks,
        passed,
    })
}
