//! The mechanisms: deterministic and randomized endpoint rules for hybrid
//! profiles, their multi-location generalizations, and a constructive
//! score-threshold family of midpoint mechanisms.
//!
//! Every rule here partitions agents by which side of the interval midpoint
//! they (effectively) report, then maps the partition's balance to a facility
//! lottery over the endpoints (plus the midpoint, for the randomized hybrid
//! rule). Ties always send the facility to the right endpoint.

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{AgentType, Lottery, Profile};

/// Which profiles a mechanism accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DomainConstraint {
    /// Both agent types allowed.
    HybridTypes,
    /// Type-1 agents only (the obnoxious model).
    Type1Only,
}

/// A named rule mapping profiles to facility lotteries.
///
/// [`apply`](Mechanism::apply) enforces the declared domain before running
/// the rule, so every construction site states its constraints once.
pub struct Mechanism {
    name: String,
    domain_constraint: DomainConstraint,
    multi_location_capable: bool,
    rule: Box<dyn Fn(&Profile) -> Result<Lottery> + Send + Sync>,
}

impl fmt::Debug for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Mechanism")
            .field("name", &self.name)
            .field("domain_constraint", &self.domain_constraint)
            .field("multi_location_capable", &self.multi_location_capable)
            .finish_non_exhaustive()
    }
}

impl Mechanism {
    pub fn new(
        name: impl Into<String>,
        domain_constraint: DomainConstraint,
        multi_location_capable: bool,
        rule: impl Fn(&Profile) -> Result<Lottery> + Send + Sync + 'static,
    ) -> Mechanism {
        Mechanism {
            name: name.into(),
            domain_constraint,
            multi_location_capable,
            rule: Box::new(rule),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain_constraint(&self) -> DomainConstraint {
        self.domain_constraint
    }

    pub fn multi_location_capable(&self) -> bool {
        self.multi_location_capable
    }

    /// Run the mechanism on a profile, enforcing the domain constraint and
    /// the single-location restriction first.
    pub fn apply(&self, profile: &Profile) -> Result<Lottery> {
        if self.domain_constraint == DomainConstraint::Type1Only {
            if let Some(agent) = profile
                .agents()
                .iter()
                .position(|a| a.agent_type() == AgentType::Type2)
            {
                return Err(Error::Type1Only {
                    mechanism: self.name.clone(),
                    agent,
                });
            }
        }
        if !self.multi_location_capable {
            if let Some((agent, report)) = profile
                .agents()
                .iter()
                .enumerate()
                .find(|(_, a)| a.k() != 1)
            {
                return Err(Error::SingleLocationOnly {
                    what: self.name.clone(),
                    agent,
                    k: report.k(),
                });
            }
        }
        (self.rule)(profile)
    }
}

/// Index partition of single-location agents by side of the interval
/// midpoint, refined by type.
///
/// R holds type-1 agents weakly left of the midpoint and type-2 agents
/// weakly right of it — the agents that prefer the facility at the right
/// endpoint. L is the complement.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RlPartition {
    pub r1: Vec<usize>,
    pub r2: Vec<usize>,
    pub l1: Vec<usize>,
    pub l2: Vec<usize>,
}

impl RlPartition {
    /// All of R, in agent order.
    pub fn r(&self) -> Vec<usize> {
        let mut all = [self.r1.as_slice(), self.r2.as_slice()].concat();
        all.sort_unstable();
        all
    }

    /// All of L, in agent order.
    pub fn l(&self) -> Vec<usize> {
        let mut all = [self.l1.as_slice(), self.l2.as_slice()].concat();
        all.sort_unstable();
        all
    }

    pub fn r_len(&self) -> usize {
        self.r1.len() + self.r2.len()
    }

    pub fn l_len(&self) -> usize {
        self.l1.len() + self.l2.len()
    }
}

/// Partition a k = 1 profile into R and L around the interval midpoint.
///
/// A type-1 agent joins R iff its location is ≤ the midpoint (equality
/// included); a type-2 agent joins R iff its location is ≥ the midpoint.
pub fn partition_rl(profile: &Profile) -> Result<RlPartition> {
    let mid = profile.interval().midpoint();
    let mut p = RlPartition::default();
    for (i, agent) in profile.agents().iter().enumerate() {
        let Some(x) = agent.location() else {
            return Err(Error::SingleLocationOnly {
                what: "partition_rl".into(),
                agent: i,
                k: agent.k(),
            });
        };
        match agent.agent_type() {
            AgentType::Type1 => {
                if x <= mid {
                    p.r1.push(i);
                } else {
                    p.l1.push(i);
                }
            }
            AgentType::Type2 => {
                if x >= mid {
                    p.r2.push(i);
                } else {
                    p.l2.push(i);
                }
            }
        }
    }
    Ok(p)
}

/// Deterministic hybrid rule: facility at the right endpoint iff |R| ≥ |L|.
pub fn det_hybrid_lottery(profile: &Profile) -> Result<Lottery> {
    let p = partition_rl(profile)?;
    let interval = profile.interval();
    let y = if p.r_len() >= p.l_len() {
        interval.hi()
    } else {
        interval.lo()
    };
    Lottery::point_mass(y)
}

/// Randomized hybrid rule: 12/23 on the endpoint the R/L balance prefers,
/// 8/23 on the other endpoint, 3/23 on the midpoint.
pub fn rand_hybrid_lottery(profile: &Profile) -> Result<Lottery> {
    let p = partition_rl(profile)?;
    let interval = profile.interval();
    let (preferred, other) = if p.r_len() >= p.l_len() {
        (interval.hi(), interval.lo())
    } else {
        (interval.lo(), interval.hi())
    };
    Lottery::new(vec![
        (preferred, 12.0 / 23.0),
        (other, 8.0 / 23.0),
        (interval.midpoint(), 3.0 / 23.0),
    ])
}

/// Location-count sums (ΣR, ΣL) for the multi-location rules: an agent's
/// whole bundle counts toward R iff its mean reported location is ≤ the
/// interval midpoint.
pub fn multi_sums(profile: &Profile) -> (u64, u64) {
    let mid = profile.interval().midpoint();
    let mut sum_r = 0u64;
    let mut sum_l = 0u64;
    for agent in profile.agents() {
        if agent.mean_location() <= mid {
            sum_r += agent.k() as u64;
        } else {
            sum_l += agent.k() as u64;
        }
    }
    (sum_r, sum_l)
}

fn require_type1(profile: &Profile, mechanism: &str) -> Result<()> {
    match profile
        .agents()
        .iter()
        .position(|a| a.agent_type() == AgentType::Type2)
    {
        Some(agent) => Err(Error::Type1Only {
            mechanism: mechanism.into(),
            agent,
        }),
        None => Ok(()),
    }
}

/// Deterministic multi-location rule for type-1 agents: facility at the
/// right endpoint iff ΣR ≥ ΣL (location counts, not agent counts).
pub fn det_multi_lottery(profile: &Profile) -> Result<Lottery> {
    require_type1(profile, "det-multi")?;
    let (sum_r, sum_l) = multi_sums(profile);
    let interval = profile.interval();
    let y = if sum_r >= sum_l {
        interval.hi()
    } else {
        interval.lo()
    };
    Lottery::point_mass(y)
}

/// The probability bounds a left-endpoint weight must satisfy for the
/// randomized multi-location rule on a profile with sums (ΣR, ΣL):
/// `2/3 − ΣR/(6·ΣL) ≤ p ≤ 1/3 + ΣL/(6·ΣR)`, with a vacuous bound (±∞)
/// whenever its denominator sum is zero.
///
/// Shared verbatim between [`canonical_p`] and the [`rand_multi_lottery`]
/// validator so that the canonical rule sits inside its own feasible region
/// bitwise, with no tolerance.
pub fn probability_bounds(sum_r: u64, sum_l: u64) -> (f64, f64) {
    let lower = if sum_l == 0 {
        f64::NEG_INFINITY
    } else {
        2.0 / 3.0 - sum_r as f64 / (6.0 * sum_l as f64)
    };
    let upper = if sum_r == 0 {
        f64::INFINITY
    } else {
        1.0 / 3.0 + sum_l as f64 / (6.0 * sum_r as f64)
    };
    (lower, upper)
}

/// The canonical left-endpoint probability: 0 when ΣL = 0, otherwise
/// max{2/3 − ΣR/(6·ΣL), 0}. Always in [0, 2/3].
pub fn canonical_p(sum_r: u64, sum_l: u64) -> Result<f64> {
    if sum_r + sum_l == 0 {
        return Err(Error::InvalidParameters {
            what: "canonical_p".into(),
            reason: "sum_r + sum_l must be at least 1".into(),
        });
    }
    if sum_l == 0 {
        return Ok(0.0);
    }
    let (lower, _) = probability_bounds(sum_r, sum_l);
    Ok(lower.max(0.0))
}

/// Randomized multi-location rule: facility at the left endpoint with
/// probability `p_rule(ΣR, ΣL)` and at the right endpoint otherwise.
///
/// The chosen probability is validated against [`probability_bounds`] for
/// this profile; an out-of-range value is rejected naming the violated side.
pub fn rand_multi_lottery(profile: &Profile, p_rule: &dyn Fn(u64, u64) -> f64) -> Result<Lottery> {
    require_type1(profile, "rand-multi")?;
    let (sum_r, sum_l) = multi_sums(profile);
    let p = p_rule(sum_r, sum_l);
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::BadProbability { probability: p });
    }
    let (lower, upper) = probability_bounds(sum_r, sum_l);
    if p < lower {
        return Err(Error::ProbabilityBoundViolated {
            p,
            bound: lower,
            which: "lower",
            sum_r,
            sum_l,
        });
    }
    if p > upper {
        return Err(Error::ProbabilityBoundViolated {
            p,
            bound: upper,
            which: "upper",
            sum_r,
            sum_l,
        });
    }
    let interval = profile.interval();
    Lottery::new(vec![(interval.lo(), p), (interval.hi(), 1.0 - p)])
}

/// Parameters of the score-threshold midpoint family.
///
/// The induced mechanism places the facility at `beta` iff
/// `w_l·|L| + w_m·|M| ≥ tau`, else at `alpha`, where L and M collect the
/// agents strictly left of and exactly at m = (alpha+beta)/2. The weight
/// ordering `w_l ≥ w_m ≥ 0` makes the score monotone in midpoint crossings,
/// which is what puts the rule inside the strategyproof two-point class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidpointFamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub w_l: f64,
    pub w_m: f64,
    pub tau: f64,
}

impl MidpointFamilyParams {
    pub fn new(alpha: f64, beta: f64, w_l: f64, w_m: f64, tau: f64) -> Result<MidpointFamilyParams> {
        let invalid = |reason: String| Error::InvalidParameters {
            what: "midpoint family".into(),
            reason,
        };
        for (name, v) in [
            ("alpha", alpha),
            ("beta", beta),
            ("w_l", w_l),
            ("w_m", w_m),
            ("tau", tau),
        ] {
            if !v.is_finite() {
                return Err(invalid(format!("{name} = {v} is not finite")));
            }
        }
        if !(alpha <= beta) {
            return Err(invalid(format!("need alpha <= beta, got {alpha} > {beta}")));
        }
        if !(w_l >= w_m && w_m >= 0.0) {
            return Err(invalid(format!(
                "need w_l >= w_m >= 0, got w_l = {w_l}, w_m = {w_m}"
            )));
        }
        Ok(MidpointFamilyParams {
            alpha,
            beta,
            w_l,
            w_m,
            tau,
        })
    }

    /// The candidate switch point (alpha+beta)/2.
    pub fn midpoint(&self) -> f64 {
        (self.alpha + self.beta) / 2.0
    }
}

/// Build the score-threshold midpoint mechanism for the given parameters.
/// Type-1, single-location profiles only; `alpha`/`beta` are checked against
/// the profile's interval at application time.
pub fn midpoint_score_mechanism(params: MidpointFamilyParams) -> Mechanism {
    let name = format!(
        "midpoint({},{},{},{},{})",
        params.alpha, params.beta, params.w_l, params.w_m, params.tau
    );
    Mechanism::new(
        name,
        DomainConstraint::Type1Only,
        false,
        move |profile: &Profile| {
            let interval = profile.interval();
            for (name, v) in [("alpha", params.alpha), ("beta", params.beta)] {
                if !interval.contains(v) {
                    return Err(Error::InvalidParameters {
                        what: "midpoint family".into(),
                        reason: format!(
                            "{name} = {v} outside interval [{}, {}]",
                            interval.lo(),
                            interval.hi()
                        ),
                    });
                }
            }
            if params.alpha == params.beta {
                return Lottery::point_mass(params.alpha);
            }
            let m = params.midpoint();
            let mut left = 0u64;
            let mut at_mid = 0u64;
            for agent in profile.agents() {
                // Domain enforcement in apply() guarantees k = 1 here.
                let x = agent.locations()[0];
                if x < m {
                    left += 1;
                } else if x == m {
                    at_mid += 1;
                }
            }
            let score = params.w_l * left as f64 + params.w_m * at_mid as f64;
            let y = if score >= params.tau {
                params.beta
            } else {
                params.alpha
            };
            Lottery::point_mass(y)
        },
    )
}

/// Deterministic hybrid mechanism (k = 1, both types).
pub fn det_hybrid() -> Mechanism {
    Mechanism::new(
        "det-hybrid",
        DomainConstraint::HybridTypes,
        false,
        det_hybrid_lottery,
    )
}

/// Randomized hybrid mechanism (k = 1, both types).
pub fn rand_hybrid() -> Mechanism {
    Mechanism::new(
        "rand-hybrid",
        DomainConstraint::HybridTypes,
        false,
        rand_hybrid_lottery,
    )
}

/// Deterministic multi-location mechanism (type-1 only, any k).
pub fn det_multi() -> Mechanism {
    Mechanism::new(
        "det-multi",
        DomainConstraint::Type1Only,
        true,
        det_multi_lottery,
    )
}

/// Randomized multi-location mechanism with the canonical probability rule.
pub fn rand_multi_canonical() -> Mechanism {
    Mechanism::new(
        "rand-multi-canonical",
        DomainConstraint::Type1Only,
        true,
        |profile: &Profile| {
            rand_multi_lottery(profile, &|sum_r, sum_l| {
                canonical_p(sum_r, sum_l).expect("nonempty profile has sum_r + sum_l >= 1")
            })
        },
    )
}

/// Deliberately broken variant of [`det_hybrid`]: identical everywhere
/// except on the single profile of two type-1 agents both at the left
/// endpoint, where the output is flipped to the left endpoint. Exists so the
/// verification checks have a known-bad rule to catch.
pub fn det_hybrid_mutant() -> Mechanism {
    Mechanism::new(
        "det-hybrid-mutant",
        DomainConstraint::HybridTypes,
        false,
        |profile: &Profile| {
            let interval = profile.interval();
            let flipped = profile.n() == 2
                && profile.agents().iter().all(|a| {
                    a.agent_type() == AgentType::Type1 && a.location() == Some(interval.lo())
                });
            if flipped {
                Lottery::point_mass(interval.lo())
            } else {
                det_hybrid_lottery(profile)
            }
        },
    )
}

/// Mechanism ignoring all reports: point mass at `y` (validated against the
/// profile's interval when applied).
pub fn constant_mechanism(y: f64) -> Mechanism {
    Mechanism::new(
        format!("constant({y})"),
        DomainConstraint::HybridTypes,
        true,
        move |profile: &Profile| {
            let interval = profile.interval();
            if !interval.contains(y) {
                return Err(Error::OutsideInterval {
                    location: y,
                    lo: interval.lo(),
                    hi: interval.hi(),
                });
            }
            Lottery::point_mass(y)
        },
    )
}

/// Names accepted by [`mechanism_by_name`], parameterized families shown
/// with their argument slots.
pub const KNOWN_MECHANISMS: &[&str] = &[
    "det-hybrid",
    "rand-hybrid",
    "det-multi",
    "rand-multi-canonical",
    "det-hybrid-mutant",
    "midpoint(alpha,beta,wL,wM,tau)",
    "constant(y)",
];

fn parse_args(spec: &str, inner: &str, arity: usize) -> Result<Vec<f64>> {
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != arity {
        return Err(Error::BadMechanismSpec {
            spec: spec.into(),
            reason: format!("expected {arity} comma-separated numbers, got {}", parts.len()),
        });
    }
    parts
        .iter()
        .map(|part| {
            part.trim().parse::<f64>().map_err(|e| Error::BadMechanismSpec {
                spec: spec.into(),
                reason: format!("bad number {:?}: {e}", part.trim()),
            })
        })
        .collect()
}

/// Look up a mechanism by registry name.
///
/// Fixed names: `det-hybrid`, `rand-hybrid`, `det-multi`,
/// `rand-multi-canonical`, `det-hybrid-mutant`. Parameterized:
/// `midpoint(alpha,beta,wL,wM,tau)` and `constant(y)`.
pub fn mechanism_by_name(name: &str) -> Result<Mechanism> {
    let trimmed = name.trim();
    match trimmed {
        "det-hybrid" => return Ok(det_hybrid()),
        "rand-hybrid" => return Ok(rand_hybrid()),
        "det-multi" => return Ok(det_multi()),
        "rand-multi-canonical" => return Ok(rand_multi_canonical()),
        "det-hybrid-mutant" => return Ok(det_hybrid_mutant()),
        _ => {}
    }
    if let Some(inner) = trimmed
        .strip_prefix("midpoint(")
        .and_then(|rest| rest.strip_suffix(')'))
    {
        let a = parse_args(trimmed, inner, 5)?;
        let params = MidpointFamilyParams::new(a[0], a[1], a[2], a[3], a[4]).map_err(|e| {
            Error::BadMechanismSpec {
                spec: trimmed.into(),
                reason: e.to_string(),
            }
        })?;
        return Ok(midpoint_score_mechanism(params));
    }
    if let Some(inner) = trimmed
        .strip_prefix("constant(")
        .and_then(|rest| rest.strip_suffix(')'))
    {
        let a = parse_args(trimmed, inner, 1)?;
        return Ok(constant_mechanism(a[0]));
    }
    Err(Error::UnknownMechanism {
        name: trimmed.into(),
        known: KNOWN_MECHANISMS.join(", "),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentReport, Interval};

    fn interval() -> Interval {
        Interval::new(0.0, 2.0).unwrap()
    }

    fn hybrid(agents: &[(AgentType, f64)]) -> Profile {
        Profile::new(
            interval(),
            agents
                .iter()
                .map(|&(t, x)| AgentReport::single(t, x).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn multi(agents: &[&[f64]]) -> Profile {
        Profile::new(
            interval(),
            agents
                .iter()
                .map(|locs| AgentReport::new(AgentType::Type1, locs.to_vec()).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn partition_respects_types_and_ties() {
        let p = partition_rl(&hybrid(&[(AgentType::Type1, 1.0), (AgentType::Type2, 0.0)])).unwrap();
        assert_eq!(p.r(), vec![0]);
        assert_eq!(p.l(), vec![1]);

        let p = partition_rl(&hybrid(&[(AgentType::Type1, 0.5), (AgentType::Type1, 0.5)])).unwrap();
        assert_eq!(p.r(), vec![0, 1]);
        assert!(p.l().is_empty());

        // Type-2 agents exactly at the midpoint belong to R.
        let p = partition_rl(&hybrid(&[(AgentType::Type2, 1.0), (AgentType::Type2, 1.0)])).unwrap();
        assert_eq!(p.r(), vec![0, 1]);
        assert!(p.l().is_empty());
    }

    #[test]
    fn det_hybrid_tie_goes_right() {
        let m = det_hybrid();
        let tied = hybrid(&[(AgentType::Type1, 1.0), (AgentType::Type2, 0.0)]);
        assert_eq!(m.apply(&tied).unwrap().as_point_mass(), Some(2.0));
        let left = hybrid(&[(AgentType::Type1, 1.5), (AgentType::Type1, 1.5)]);
        assert_eq!(m.apply(&left).unwrap().as_point_mass(), Some(0.0));
        let single = hybrid(&[(AgentType::Type2, 2.0)]);
        assert_eq!(m.apply(&single).unwrap().as_point_mass(), Some(2.0));
    }

    #[test]
    fn single_location_rules_reject_bundles() {
        let bundle = multi(&[&[0.0, 2.0]]);
        assert!(det_hybrid().apply(&bundle).is_err());
        assert!(rand_hybrid().apply(&bundle).is_err());
    }

    #[test]
    fn rand_hybrid_probabilities() {
        let m = rand_hybrid();
        let tied = hybrid(&[(AgentType::Type1, 1.0), (AgentType::Type2, 0.0)]);
        let lot = m.apply(&tied).unwrap();
        assert_eq!(
            lot.support(),
            &[(0.0, 8.0 / 23.0), (1.0, 3.0 / 23.0), (2.0, 12.0 / 23.0)]
        );

        let left_heavy = hybrid(&[(AgentType::Type1, 1.5)]);
        let lot = m.apply(&left_heavy).unwrap();
        assert_eq!(
            lot.support(),
            &[(0.0, 12.0 / 23.0), (1.0, 3.0 / 23.0), (2.0, 8.0 / 23.0)]
        );
    }

    #[test]
    fn rand_hybrid_support_is_always_lo_mid_hi() {
        for locs in [[0.0, 0.0], [0.3, 1.9], [2.0, 2.0], [1.0, 1.0]] {
            for t in [AgentType::Type1, AgentType::Type2] {
                let p = hybrid(&[(t, locs[0]), (t, locs[1])]);
                let lot = rand_hybrid().apply(&p).unwrap();
                let points: Vec<f64> = lot.support().iter().map(|&(y, _)| y).collect();
                assert_eq!(points, vec![0.0, 1.0, 2.0]);
                let total: f64 = lot.support().iter().map(|&(_, p)| p).sum();
                assert!((total - 1.0).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn same_side_misreports_cannot_move_det_hybrid() {
        let truthful = hybrid(&[(AgentType::Type1, 0.25), (AgentType::Type2, 0.25)]);
        let base = det_hybrid().apply(&truthful).unwrap();
        // Agent 0 is in R; any type-1 report ≤ 1 keeps it there.
        for x in [0.0, 0.5, 1.0] {
            let moved = truthful
                .with_report(0, AgentReport::single(AgentType::Type1, x).unwrap())
                .unwrap();
            assert_eq!(det_hybrid().apply(&moved).unwrap(), base);
        }
    }

    #[test]
    fn det_multi_counts_locations_not_agents() {
        let m = det_multi();
        let p = multi(&[&[0.0, 2.0], &[1.5]]);
        assert_eq!(m.apply(&p).unwrap().as_point_mass(), Some(2.0));
        let p = multi(&[&[2.0, 2.0, 2.0]]);
        assert_eq!(m.apply(&p).unwrap().as_point_mass(), Some(0.0));
        let with_t2 = hybrid(&[(AgentType::Type2, 0.5)]);
        assert!(matches!(
            m.apply(&with_t2),
            Err(Error::Type1Only { .. })
        ));
    }

    #[test]
    fn det_multi_reduces_to_det_hybrid_on_singletons() {
        let grid = [0.0, 0.5, 1.0, 1.5, 2.0];
        for &a in &grid {
            for &b in &grid {
                let p = hybrid(&[(AgentType::Type1, a), (AgentType::Type1, b)]);
                assert_eq!(
                    det_multi().apply(&p).unwrap(),
                    det_hybrid().apply(&p).unwrap(),
                    "diverged at ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn canonical_p_values() {
        assert!((canonical_p(2, 1).unwrap() - 1.0 / 3.0).abs() <= 1e-15);
        assert_eq!(canonical_p(0, 5).unwrap(), 2.0 / 3.0);
        assert_eq!(canonical_p(5, 1).unwrap(), 0.0);
        assert_eq!(canonical_p(7, 0).unwrap(), 0.0);
        assert!(canonical_p(0, 0).is_err());
    }

    #[test]
    fn canonical_p_always_in_own_bounds() {
        for sum_r in 0..=40u64 {
            for sum_l in 0..=40u64 {
                if sum_r + sum_l == 0 {
                    continue;
                }
                let p = canonical_p(sum_r, sum_l).unwrap();
                assert!((0.0..=2.0 / 3.0).contains(&p));
                let (lower, upper) = probability_bounds(sum_r, sum_l);
                assert!(p >= lower, "({sum_r},{sum_l}): p={p} < lower={lower}");
                assert!(p <= upper, "({sum_r},{sum_l}): p={p} > upper={upper}");
            }
        }
    }

    #[test]
    fn rand_multi_canonical_worked_instance() {
        let p = multi(&[&[0.0, 2.0], &[1.5]]);
        let lot = rand_multi_canonical().apply(&p).unwrap();
        let support = lot.support();
        assert_eq!(support.len(), 2);
        assert_eq!(support[0].0, 0.0);
        assert_eq!(support[1].0, 2.0);
        assert!((support[0].1 - 1.0 / 3.0).abs() <= 1e-12);
        assert!((support[1].1 - 2.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn rand_multi_degenerates_when_l_is_empty() {
        let p = multi(&[&[0.0], &[1.0, 0.5]]);
        let lot = rand_multi_canonical().apply(&p).unwrap();
        assert_eq!(lot.as_point_mass(), Some(2.0));
    }

    #[test]
    fn rand_multi_rejects_out_of_bound_rules() {
        let p = multi(&[&[0.0, 0.0, 0.0, 0.0, 0.0], &[2.0]]);
        let err = rand_multi_lottery(&p, &|_, _| 1.0).unwrap_err();
        assert!(matches!(
            err,
            Error::ProbabilityBoundViolated { which: "upper", .. }
        ));
        let p = multi(&[&[0.0], &[2.0, 2.0, 2.0, 2.0, 2.0]]);
        let err = rand_multi_lottery(&p, &|_, _| 0.0).unwrap_err();
        assert!(matches!(
            err,
            Error::ProbabilityBoundViolated { which: "lower", .. }
        ));
        let err = rand_multi_lottery(&p, &|_, _| 1.5).unwrap_err();
        assert!(matches!(err, Error::BadProbability { .. }));
    }

    #[test]
    fn det_multi_gives_r_agents_half_length_per_location_at_hi() {
        use crate::model::multi_benefit;
        let profiles = [
            multi(&[&[0.0, 2.0], &[1.5]]),
            multi(&[&[0.3], &[0.9, 0.1], &[1.0, 1.0, 0.2]]),
            multi(&[&[0.0], &[0.5, 0.5]]),
        ];
        for p in profiles {
            let lot = det_multi().apply(&p).unwrap();
            if lot.as_point_mass() != Some(2.0) {
                continue;
            }
            let mid = p.interval().midpoint();
            for agent in p.agents() {
                if agent.mean_location() <= mid {
                    let b = multi_benefit(agent, 2.0, &p.interval()).unwrap();
                    assert!(b >= agent.k() as f64 * p.interval().length() / 2.0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn midpoint_family_validation() {
        assert!(MidpointFamilyParams::new(0.0, 2.0, 2.0, 2.0, 2.0).is_ok());
        assert!(MidpointFamilyParams::new(2.0, 0.0, 1.0, 0.0, 0.0).is_err());
        assert!(MidpointFamilyParams::new(0.0, 2.0, 1.0, 2.0, 0.0).is_err());
        assert!(MidpointFamilyParams::new(0.0, 2.0, 1.0, -0.5, 0.0).is_err());
        assert!(MidpointFamilyParams::new(0.0, f64::NAN, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn midpoint_family_matches_det_hybrid_on_type1_grid() {
        let params = MidpointFamilyParams::new(0.0, 2.0, 2.0, 2.0, 2.0).unwrap();
        let family = midpoint_score_mechanism(params);
        let reference = det_hybrid();
        let grid = [0.0, 0.5, 1.0, 1.5, 2.0];
        for &a in &grid {
            for &b in &grid {
                let p = hybrid(&[(AgentType::Type1, a), (AgentType::Type1, b)]);
                assert_eq!(
                    family.apply(&p).unwrap(),
                    reference.apply(&p).unwrap(),
                    "diverged at ({a}, {b})"
                );
            }
        }
    }

    #[test]
    fn midpoint_family_degenerate_is_constant() {
        let params = MidpointFamilyParams::new(1.0, 1.0, 1.0, 0.0, 5.0).unwrap();
        let m = midpoint_score_mechanism(params);
        for x in [0.0, 0.7, 2.0] {
            let p = hybrid(&[(AgentType::Type1, x)]);
            assert_eq!(m.apply(&p).unwrap().as_point_mass(), Some(1.0));
        }
    }

    #[test]
    fn midpoint_family_rejects_params_outside_interval() {
        let params = MidpointFamilyParams::new(-1.0, 2.0, 1.0, 0.0, 1.0).unwrap();
        let m = midpoint_score_mechanism(params);
        let p = hybrid(&[(AgentType::Type1, 0.5)]);
        assert!(matches!(m.apply(&p), Err(Error::InvalidParameters { .. })));
    }

    #[test]
    fn mutant_differs_only_on_the_flipped_profile() {
        let grid = [0.0, 0.5, 1.0, 1.5, 2.0];
        let mutant = det_hybrid_mutant();
        let reference = det_hybrid();
        let mut diffs = 0;
        for &a in &grid {
            for &b in &grid {
                let p = hybrid(&[(AgentType::Type1, a), (AgentType::Type1, b)]);
                if mutant.apply(&p).unwrap() != reference.apply(&p).unwrap() {
                    diffs += 1;
                    assert_eq!((a, b), (0.0, 0.0));
                }
            }
        }
        assert_eq!(diffs, 1);
    }

    #[test]
    fn constant_mechanism_ignores_reports() {
        let m = constant_mechanism(0.0);
        for p in [
            hybrid(&[(AgentType::Type1, 2.0)]),
            hybrid(&[(AgentType::Type2, 1.0), (AgentType::Type1, 0.0)]),
        ] {
            assert_eq!(m.apply(&p).unwrap().as_point_mass(), Some(0.0));
        }
        let out = constant_mechanism(5.0);
        assert!(out.apply(&hybrid(&[(AgentType::Type1, 1.0)])).is_err());
    }

    #[test]
    fn registry_resolves_and_rejects() {
        for name in [
            "det-hybrid",
            "rand-hybrid",
            "det-multi",
            "rand-multi-canonical",
            "det-hybrid-mutant",
        ] {
            assert_eq!(mechanism_by_name(name).unwrap().name(), name);
        }
        let m = mechanism_by_name("midpoint(0, 2, 2, 2, 2)").unwrap();
        let p = hybrid(&[(AgentType::Type1, 0.0), (AgentType::Type1, 0.0)]);
        assert_eq!(m.apply(&p).unwrap().as_point_mass(), Some(2.0));
        assert!(mechanism_by_name("constant(1.0)").is_ok());

        assert!(matches!(
            mechanism_by_name("nope"),
            Err(Error::UnknownMechanism { .. })
        ));
        assert!(matches!(
            mechanism_by_name("midpoint(1,2)"),
            Err(Error::BadMechanismSpec { .. })
        ));
        assert!(matches!(
            mechanism_by_name("midpoint(0,2,1,2,0)"),
            Err(Error::BadMechanismSpec { .. })
        ));
        assert!(matches!(
            mechanism_by_name("midpoint(0,2,a,0,0)"),
            Err(Error::BadMechanismSpec { .. })
        ));
    }
}
