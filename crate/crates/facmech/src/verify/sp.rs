//! Strategyproofness checking by deviation search.
//!
//! The comparison is always in true benefit: an agent's expected benefit
//! under its true report is measured against what that same true report
//! earns when the mechanism sees a misreport instead. Anything above
//! tolerance is returned as a witness.

use crate::error::{Error, Result};
use crate::mechanisms::{DomainConstraint, Mechanism};
use crate::model::{expected_benefit, AgentReport, AgentType, Profile};

/// Gains at or below this tolerance do not count as deviations. Large
/// enough to absorb float noise in expected-benefit sums, small enough to
/// catch every structural violation exercised by the suite.
pub const SP_TOLERANCE: f64 = 1e-9;

/// A profitable misreport found by [`sp_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationWitness {
    pub agent_index: usize,
    pub true_report: AgentReport,
    pub misreport: AgentReport,
    pub truthful_benefit: f64,
    pub deviating_benefit: f64,
    pub gain: f64,
}

/// Search for profitable deviations, one candidate set per agent.
///
/// For each agent and each candidate misreport (type and/or location
/// changes), apply the mechanism to the deviated profile and compare the
/// agent's true expected benefit with the truthful outcome. Returns every
/// witness whose gain exceeds `tolerance`.
pub fn sp_check(
    mechanism: &Mechanism,
    profile: &Profile,
    deviation_sets: &[Vec<AgentReport>],
    tolerance: f64,
) -> Result<Vec<DeviationWitness>> {
    if deviation_sets.len() != profile.n() {
        return Err(Error::DeviationSetCount {
            n: profile.n(),
            got: deviation_sets.len(),
        });
    }
    let interval = profile.interval();
    let truthful_lottery = mechanism.apply(profile)?;
    let mut witnesses = Vec::new();
    for (agent_index, candidates) in deviation_sets.iter().enumerate() {
        if candidates.is_empty() {
            return Err(Error::EmptyDeviationSet { agent: agent_index });
        }
        let true_report = profile.agent(agent_index).expect("index < n").clone();
        let truthful_benefit = expected_benefit(&true_report, &truthful_lottery, &interval)?;
        for misreport in candidates {
            if *misreport == true_report {
                continue;
            }
            let deviated = profile.with_report(agent_index, misreport.clone())?;
            let deviated_lottery = mechanism.apply(&deviated)?;
            let deviating_benefit = expected_benefit(&true_report, &deviated_lottery, &interval)?;
            let gain = deviating_benefit - truthful_benefit;
            if gain > tolerance {
                witnesses.push(DeviationWitness {
                    agent_index,
                    true_report: true_report.clone(),
                    misreport: misreport.clone(),
                    truthful_benefit,
                    deviating_benefit,
                    gain,
                });
            }
        }
    }
    Ok(witnesses)
}

/// Standard candidate misreports for one agent.
///
/// Single-location agents try every allowed type at the interval endpoints,
/// the midpoint, the midpoint ± 1e−6, and every truthful location in the
/// profile. For the endpoint-partition mechanisms here this is
/// outcome-complete: any real-valued misreport reaches an outcome some set
/// member also reaches, because those rules see only the side of the
/// midpoint and the type. For black-box mechanisms the set is a heuristic.
///
/// Multi-location agents keep their type and location count and try the
/// all-lo vector, the all-hi vector, and every single-coordinate move to
/// {lo, mid, hi}.
pub fn default_deviation_set(
    profile: &Profile,
    agent_index: usize,
    domain: DomainConstraint,
) -> Result<Vec<AgentReport>> {
    let agent = profile
        .agent(agent_index)
        .ok_or(Error::AgentIndexOutOfRange {
            index: agent_index,
            n: profile.n(),
        })?;
    let interval = profile.interval();
    let (lo, mid, hi) = (interval.lo(), interval.midpoint(), interval.hi());

    if agent.k() == 1 {
        let mut locations = vec![lo, mid, hi, mid - 1e-6, mid + 1e-6];
        for other in profile.agents() {
            locations.extend_from_slice(other.locations());
        }
        locations.retain(|y| interval.contains(*y));
        locations.sort_by(|a, b| a.partial_cmp(b).expect("finite locations"));
        locations.dedup();
        let types: &[AgentType] = match domain {
            DomainConstraint::HybridTypes => &[AgentType::Type1, AgentType::Type2],
            DomainConstraint::Type1Only => &[AgentType::Type1],
        };
        let mut out = Vec::with_capacity(types.len() * locations.len());
        for &t in types {
            for &x in &locations {
                out.push(AgentReport::single(t, x)?);
            }
        }
        Ok(out)
    } else {
        let t = agent.agent_type();
        let k = agent.k();
        let mut out = vec![
            AgentReport::new(t, vec![lo; k])?,
            AgentReport::new(t, vec![hi; k])?,
        ];
        for coordinate in 0..k {
            for v in [lo, mid, hi] {
                let mut locations = agent.locations().to_vec();
                locations[coordinate] = v;
                let report = AgentReport::new(t, locations)?;
                if !out.contains(&report) {
                    out.push(report);
                }
            }
        }
        Ok(out)
    }
}

/// [`default_deviation_set`] for every agent at once, in the shape
/// [`sp_check`] expects.
pub fn default_deviation_sets(
    profile: &Profile,
    domain: DomainConstraint,
) -> Result<Vec<Vec<AgentReport>>> {
    (0..profile.n())
        .map(|i| default_deviation_set(profile, i, domain))
        .collect()
}
