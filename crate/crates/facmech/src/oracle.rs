//! Exact optimum oracles.
//!
//! Both objectives are piecewise linear in the facility location, so the
//! optimum is found by evaluating a finite candidate set exactly rather than
//! by grid search: for maxisum the breakpoints are the reported locations;
//! for egalitarian the pointwise minimum additionally bends where two agents'
//! benefit lines cross. A brute-force [`grid_oracle`] exists purely to
//! cross-check the exact ones.

use crate::error::{Error, Result};
use crate::mechanisms::{DomainConstraint, Mechanism};
use crate::model::{social_benefit, AgentType, Lottery, Objective, Profile};
use crate::numeric::fuzzy_ceil;

/// An optimal facility location with its objective value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptResult {
    pub location: f64,
    pub value: f64,
    /// How many candidate locations were evaluated.
    pub candidate_count: usize,
}

/// Evaluate each candidate and keep the best, breaking value ties toward the
/// smallest location. Candidates must come sorted ascending.
fn argmax_over(profile: &Profile, objective: Objective, candidates: &[f64]) -> Result<OptResult> {
    let mut best: Option<(f64, f64)> = None;
    for &y in candidates {
        let value = social_benefit(profile, y, objective)?;
        match best {
            Some((_, v)) if value <= v => {}
            _ => best = Some((y, value)),
        }
    }
    let (location, value) = best.expect("candidate set is nonempty");
    Ok(OptResult {
        location,
        value,
        candidate_count: candidates.len(),
    })
}

fn maxisum_candidates(profile: &Profile) -> Vec<f64> {
    let interval = profile.interval();
    let mut candidates = Vec::with_capacity(profile.total_locations() + 2);
    candidates.push(interval.lo());
    candidates.push(interval.hi());
    for agent in profile.agents() {
        candidates.extend_from_slice(agent.locations());
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite locations"));
    candidates.dedup();
    candidates
}

/// Exact maxisum optimum. The objective is piecewise linear with breakpoints
/// only at reported locations, so `{lo, hi} ∪ {reported locations}` is an
/// exhaustive candidate set.
pub fn opt_maxisum(profile: &Profile) -> Result<OptResult> {
    argmax_over(profile, Objective::Maxisum, &maxisum_candidates(profile))
}

/// Exact maxisum optimum for multi-location profiles — the same candidate
/// enumeration as [`opt_maxisum`], which already sums over every reported
/// location. For type-1-only profiles the maximizer is additionally checked
/// to be an interval endpoint (the objective is convex there).
pub fn opt_multi_maxisum(profile: &Profile) -> Result<OptResult> {
    let result = opt_maxisum(profile)?;
    if profile.type1_only() {
        let interval = profile.interval();
        debug_assert!(
            result.location == interval.lo() || result.location == interval.hi(),
            "type-1-only maxisum maximizer {} is not an endpoint",
            result.location
        );
    }
    Ok(result)
}

/// Exact egalitarian optimum for single-location profiles.
///
/// Each agent's benefit is a two-piece line with slopes ±1; the pointwise
/// minimum can bend only at reported locations or where two such lines
/// cross, so those crossings complete the candidate set. Near-duplicate
/// candidates (within 1e−12) are deduplicated before evaluation.
pub fn opt_egalitarian(profile: &Profile) -> Result<OptResult> {
    let interval = profile.interval();
    let len = interval.length();
    // Each agent contributes two lines b = slope·y + intercept.
    let mut lines: Vec<(f64, f64)> = Vec::with_capacity(2 * profile.n());
    for (i, agent) in profile.agents().iter().enumerate() {
        let Some(x) = agent.location() else {
            return Err(Error::SingleLocationOnly {
                what: "opt_egalitarian".into(),
                agent: i,
                k: agent.k(),
            });
        };
        match agent.agent_type() {
            AgentType::Type1 => {
                lines.push((-1.0, x));
                lines.push((1.0, -x));
            }
            AgentType::Type2 => {
                lines.push((1.0, len - x));
                lines.push((-1.0, len + x));
            }
        }
    }

    let mut candidates = Vec::with_capacity(2 + profile.n() + lines.len() * lines.len() / 2);
    candidates.push(interval.lo());
    candidates.push(interval.hi());
    for agent in profile.agents() {
        candidates.extend_from_slice(agent.locations());
    }
    for (i, &(s1, c1)) in lines.iter().enumerate() {
        for &(s2, c2) in &lines[i + 1..] {
            if s1 == s2 {
                continue;
            }
            let y = (c2 - c1) / (s1 - s2);
            if interval.contains(y) {
                candidates.push(y);
            }
        }
    }
    candidates.sort_by(|a, b| a.partial_cmp(b).expect("finite candidates"));
    candidates.dedup_by(|next, kept| *next - *kept <= 1e-12);
    argmax_over(profile, Objective::Egalitarian, &candidates)
}

/// Exact optimum for the given objective, dispatching on it.
pub fn opt(profile: &Profile, objective: Objective) -> Result<OptResult> {
    match objective {
        Objective::Maxisum => opt_multi_maxisum(profile),
        Objective::Egalitarian => opt_egalitarian(profile),
    }
}

/// Brute-force optimum over a uniform grid of the given resolution. Slower
/// and only grid-accurate; exists to cross-validate the exact oracles.
pub fn grid_oracle(profile: &Profile, objective: Objective, resolution: f64) -> Result<OptResult> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::InvalidParameters {
            what: "grid_oracle".into(),
            reason: format!("resolution must be positive and finite, got {resolution}"),
        });
    }
    let interval = profile.interval();
    let cells = fuzzy_ceil(interval.length() / resolution);
    let mut best: Option<(f64, f64)> = None;
    for j in 0..=cells {
        let y = if j == cells {
            interval.hi()
        } else {
            interval.lo() + j as f64 * resolution
        };
        let value = social_benefit(profile, y, objective)?;
        match best {
            Some((_, v)) if value <= v => {}
            _ => best = Some((y, value)),
        }
    }
    let (location, value) = best.expect("grid has at least two points");
    Ok(OptResult {
        location,
        value,
        candidate_count: cells as usize + 1,
    })
}

/// The optimum oracle wrapped as a (non-strategyproof) mechanism: a point
/// mass at an optimal location. The baseline that deviation checks are
/// expected to catch.
pub fn opt_mechanism(objective: Objective) -> Mechanism {
    let name = match objective {
        Objective::Maxisum => "opt-maxisum",
        Objective::Egalitarian => "opt-egalitarian",
    };
    Mechanism::new(
        name,
        DomainConstraint::HybridTypes,
        matches!(objective, Objective::Maxisum),
        move |profile: &Profile| {
            let result = opt(profile, objective)?;
            Lottery::point_mass(result.location)
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AgentReport, Interval};
    use proptest::prelude::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn interval() -> Interval {
        Interval::new(0.0, 2.0).unwrap()
    }

    fn type1(locations: &[f64]) -> Profile {
        Profile::new(
            interval(),
            locations
                .iter()
                .map(|&x| AgentReport::single(AgentType::Type1, x).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn maxisum_picks_the_better_endpoint() {
        let left = opt_maxisum(&type1(&[2.0 / 3.0, 1.5])).unwrap();
        assert_eq!(left.location, 0.0);
        let right = opt_maxisum(&type1(&[1.0 / 3.0, 1.5])).unwrap();
        assert_eq!(right.location, 2.0);
    }

    #[test]
    fn maxisum_hybrid_worked_value() {
        let p = Profile::new(
            interval(),
            vec![
                AgentReport::single(AgentType::Type1, 1.0).unwrap(),
                AgentReport::single(AgentType::Type2, 0.0).unwrap(),
            ],
        )
        .unwrap();
        let opt = opt_maxisum(&p).unwrap();
        assert_eq!(opt.location, 0.0);
        assert_eq!(opt.value, 3.0);
    }

    #[test]
    fn result_value_is_recomputable_and_dominates_endpoints() {
        let p = type1(&[0.3, 0.9, 1.4]);
        let opt = opt_maxisum(&p).unwrap();
        let recomputed = social_benefit(&p, opt.location, Objective::Maxisum).unwrap();
        assert_eq!(opt.value.to_bits(), recomputed.to_bits());
        for y in [0.0, 2.0] {
            assert!(opt.value >= social_benefit(&p, y, Objective::Maxisum).unwrap());
        }
    }

    #[test]
    fn egalitarian_symmetric_pair() {
        let opt = opt_egalitarian(&type1(&[0.0, 2.0])).unwrap();
        assert_eq!(opt.location, 1.0);
        assert_eq!(opt.value, 1.0);
    }

    #[test]
    fn egalitarian_three_agents_ties_break_left() {
        let opt = opt_egalitarian(&type1(&[0.0, 2.0, 1.0])).unwrap();
        assert!((opt.value - 0.5).abs() <= 1e-12);
        assert!((opt.location - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn egalitarian_rejects_bundles() {
        let p = Profile::new(
            interval(),
            vec![AgentReport::new(AgentType::Type1, vec![0.0, 2.0]).unwrap()],
        )
        .unwrap();
        assert!(matches!(
            opt_egalitarian(&p),
            Err(Error::SingleLocationOnly { .. })
        ));
    }

    #[test]
    fn egalitarian_capped_when_endpoints_are_occupied() {
        // Two type-1 agents pinned at the endpoints force min benefit ≤ 1.
        for extra in [vec![], vec![0.5], vec![0.5, 1.9]] {
            let mut locs = vec![0.0, 2.0];
            locs.extend(extra);
            let opt = opt_egalitarian(&type1(&locs)).unwrap();
            assert!(opt.value <= interval().length() / 2.0 + 1e-12);
        }
    }

    #[test]
    fn multi_maxisum_worked_instance() {
        let p = Profile::new(
            interval(),
            vec![
                AgentReport::new(AgentType::Type1, vec![0.0, 2.0]).unwrap(),
                AgentReport::new(AgentType::Type1, vec![1.5]).unwrap(),
            ],
        )
        .unwrap();
        let opt = opt_multi_maxisum(&p).unwrap();
        assert_eq!(opt.location, 0.0);
        assert_eq!(opt.value, 3.5);
    }

    #[test]
    fn multi_maxisum_single_agent_symmetry() {
        let p = Profile::new(
            interval(),
            vec![AgentReport::new(AgentType::Type1, vec![1.0]).unwrap()],
        )
        .unwrap();
        let opt = opt_multi_maxisum(&p).unwrap();
        assert_eq!(opt.value, 1.0);
        assert_eq!(opt.location, 0.0);
    }

    #[test]
    fn grid_oracle_validates_resolution() {
        let p = type1(&[1.0]);
        assert!(grid_oracle(&p, Objective::Maxisum, 0.0).is_err());
        assert!(grid_oracle(&p, Objective::Maxisum, -0.5).is_err());
    }

    #[test]
    fn exact_dominates_grid_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.random_range(1..=4);
            let locs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=2.0)).collect();
            let p = type1(&locs);
            for objective in [Objective::Maxisum, Objective::Egalitarian] {
                let exact = opt(&p, objective).unwrap();
                let grid = grid_oracle(&p, objective, 1e-3).unwrap();
                assert!(exact.value >= grid.value, "grid beat exact on {locs:?}");
                assert!(
                    exact.value - grid.value <= 2.0 * 1e-3,
                    "grid too far from exact on {locs:?}"
                );
            }
        }
    }

    #[test]
    fn opt_mechanism_returns_point_mass_at_optimum() {
        let p = type1(&[2.0 / 3.0, 1.5]);
        let m = opt_mechanism(Objective::Maxisum);
        assert_eq!(m.name(), "opt-maxisum");
        let lot = m.apply(&p).unwrap();
        assert_eq!(lot.as_point_mass(), Some(0.0));
    }

    proptest! {
        #[test]
        fn type1_maxisum_optimum_is_an_endpoint(
            locs in proptest::collection::vec(0.0f64..=2.0, 1..6)
        ) {
            let opt = opt_maxisum(&type1(&locs)).unwrap();
            prop_assert!(opt.location == 0.0 || opt.location == 2.0);
        }

        #[test]
        fn egalitarian_optimum_beats_random_points(
            locs in proptest::collection::vec(0.0f64..=2.0, 1..5),
            probe in 0.0f64..=2.0,
        ) {
            let p = type1(&locs);
            let opt = opt_egalitarian(&p).unwrap();
            let probed = social_benefit(&p, probe, Objective::Egalitarian).unwrap();
            prop_assert!(opt.value >= probed - 1e-12);
        }
    }
}
