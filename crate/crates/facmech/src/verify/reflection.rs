//! Single-agent sweep classification for deterministic mechanisms.
//!
//! Holding every other report fixed, a strategyproof deterministic rule on
//! Type1 agents can respond to one agent's location in only two shapes:
//! constant, or a two-valued step from the larger facility location β down
//! to the smaller α with the switch at (α+β)/2. The sweep check classifies
//! a mechanism's observed response and reports the offending grid pair
//! otherwise.

use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{AgentReport, Interval, Profile};
use crate::numeric::fuzzy_ceil;

/// Classification of a mechanism's response to one swept report.
#[derive(Debug, Clone, PartialEq)]
pub enum ReflectionForm {
    /// The facility never moves.
    Constant { value: f64 },
    /// Exactly two facility locations β > α, β on the left of the switch,
    /// and the switch brackets the reflection point (α+β)/2 within one
    /// grid cell.
    Step {
        alpha: f64,
        beta: f64,
        reflection_point: f64,
    },
    /// Anything else, with a pair of adjacent grid points exhibiting the
    /// problem.
    Violation {
        alpha: f64,
        beta: f64,
        violating_pair: (f64, f64),
        reason: String,
    },
}

/// Equally spaced sweep locations covering both interval endpoints.
pub fn uniform_grid(interval: &Interval, step: f64) -> Result<Vec<f64>> {
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::BadSweepGrid {
            reason: format!("step must be finite and positive, got {step}"),
        });
    }
    let cells = fuzzy_ceil(interval.length() / step).max(1);
    Ok((0..=cells)
        .map(|j| {
            if j == cells {
                interval.hi()
            } else {
                interval.lo() + j as f64 * step
            }
        })
        .collect())
}

fn validate_grid(grid: &[f64], interval: &Interval) -> Result<()> {
    if grid.len() < 2 {
        return Err(Error::BadSweepGrid {
            reason: format!("need at least two grid points, got {}", grid.len()),
        });
    }
    if grid.iter().any(|g| !g.is_finite()) {
        return Err(Error::BadSweepGrid {
            reason: "grid contains a non-finite point".into(),
        });
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadSweepGrid {
            reason: "grid must be strictly increasing".into(),
        });
    }
    if grid[0] != interval.lo() || grid[grid.len() - 1] != interval.hi() {
        return Err(Error::BadSweepGrid {
            reason: format!(
                "grid must cover both endpoints: spans [{}, {}], interval is [{}, {}]",
                grid[0],
                grid[grid.len() - 1],
                interval.lo(),
                interval.hi()
            ),
        });
    }
    Ok(())
}

/// Sweep one agent's reported location over `sweep_grid`, holding the other
/// reports (and the swept agent's type) fixed, and classify the induced
/// location-to-facility function.
///
/// The mechanism must be deterministic: any non-point-mass lottery along
/// the sweep is an error. The swept agent must report a single location.
pub fn reflection_form_check(
    mechanism: &Mechanism,
    profile: &Profile,
    agent_index: usize,
    sweep_grid: &[f64],
) -> Result<ReflectionForm> {
    let interval = profile.interval();
    validate_grid(sweep_grid, &interval)?;
    let agent = profile
        .agent(agent_index)
        .ok_or(Error::AgentIndexOutOfRange {
            index: agent_index,
            n: profile.n(),
        })?;
    if agent.k() != 1 {
        return Err(Error::SingleLocationOnly {
            what: "reflection_form_check".into(),
            agent: agent_index,
            k: agent.k(),
        });
    }
    let swept_type = agent.agent_type();

    let mut outputs = Vec::with_capacity(sweep_grid.len());
    for &a in sweep_grid {
        let deviated = profile.with_report(agent_index, AgentReport::single(swept_type, a)?)?;
        let lottery = mechanism.apply(&deviated)?;
        let y = lottery
            .as_point_mass()
            .ok_or_else(|| Error::RandomizedUnsupported {
                what: "reflection_form_check",
                mechanism: mechanism.name().to_string(),
            })?;
        outputs.push(y);
    }

    let mut distinct: Vec<f64> = Vec::new();
    for &y in &outputs {
        if !distinct.contains(&y) {
            distinct.push(y);
        }
    }
    if distinct.len() == 1 {
        return Ok(ReflectionForm::Constant { value: distinct[0] });
    }

    let alpha = distinct.iter().copied().fold(f64::INFINITY, f64::min);
    let beta = distinct.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let switch = outputs
        .windows(2)
        .position(|w| w[0] != w[1])
        .expect("at least two distinct outputs");
    let pair = (sweep_grid[switch], sweep_grid[switch + 1]);

    if let Some(extra) = outputs[switch + 1..].windows(2).position(|w| w[0] != w[1]) {
        let j = switch + 1 + extra;
        return Ok(ReflectionForm::Violation {
            alpha,
            beta,
            violating_pair: (sweep_grid[j], sweep_grid[j + 1]),
            reason: format!(
                "facility switches more than once along the sweep ({} values observed)",
                distinct.len()
            ),
        });
    }
    if outputs[0] < outputs[outputs.len() - 1] {
        return Ok(ReflectionForm::Violation {
            alpha,
            beta,
            violating_pair: pair,
            reason: "facility steps upward: the larger location must be taken left of the switch"
                .into(),
        });
    }
    let reflection_point = 0.5 * (alpha + beta);
    if reflection_point < pair.0 - 1e-12 || reflection_point > pair.1 + 1e-12 {
        return Ok(ReflectionForm::Violation {
            alpha,
            beta,
            violating_pair: pair,
            reason: format!(
                "switch between {} and {} misses the reflection point {}",
                pair.0, pair.1, reflection_point
            ),
        });
    }
    Ok(ReflectionForm::Step {
        alpha,
        beta,
        reflection_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{constant_mechanism, det_hybrid, rand_hybrid, DomainConstraint};
    use crate::model::{AgentType, Lottery};

    fn two_agents(other: AgentReport) -> Profile {
        let swept = AgentReport::single(AgentType::Type1, 0.0).unwrap();
        Profile::new(Interval::new(0.0, 2.0).unwrap(), vec![swept, other]).unwrap()
    }

    fn grid_001() -> Vec<f64> {
        uniform_grid(&Interval::new(0.0, 2.0).unwrap(), 0.01).unwrap()
    }

    #[test]
    fn uniform_grid_covers_endpoints() {
        let grid = grid_001();
        assert_eq!(grid.len(), 201);
        assert_eq!(grid[0], 0.0);
        assert_eq!(grid[200], 2.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn pivotal_sweep_steps_at_the_midpoint() {
        let profile = two_agents(AgentReport::single(AgentType::Type2, 0.3).unwrap());
        let form = reflection_form_check(&det_hybrid(), &profile, 0, &grid_001()).unwrap();
        assert_eq!(
            form,
            ReflectionForm::Step {
                alpha: 0.0,
                beta: 2.0,
                reflection_point: 1.0
            }
        );
    }

    #[test]
    fn non_pivotal_sweep_is_constant() {
        // A far-preferring agent at 0.3 already outvotes the swept agent on
        // ties, so the sweep never moves the facility.
        let profile = two_agents(AgentReport::single(AgentType::Type1, 0.3).unwrap());
        let form = reflection_form_check(&det_hybrid(), &profile, 0, &grid_001()).unwrap();
        assert_eq!(form, ReflectionForm::Constant { value: 2.0 });
    }

    #[test]
    fn constant_rule_is_constant() {
        let profile = two_agents(AgentReport::single(AgentType::Type1, 1.7).unwrap());
        let form = reflection_form_check(&constant_mechanism(0.7), &profile, 0, &grid_001()).unwrap();
        assert_eq!(form, ReflectionForm::Constant { value: 0.7 });
    }

    #[test]
    fn off_center_switch_is_a_violation() {
        let broken = Mechanism::new(
            "broken-early-switch",
            DomainConstraint::HybridTypes,
            false,
            |profile: &Profile| {
                let report = profile.agent(0).expect("nonempty").location().expect("k=1");
                let interval = profile.interval();
                Lottery::point_mass(if report < 0.5 {
                    interval.hi()
                } else {
                    interval.lo()
                })
            },
        );
        let profile = two_agents(AgentReport::single(AgentType::Type1, 1.7).unwrap());
        match reflection_form_check(&broken, &profile, 0, &grid_001()).unwrap() {
            ReflectionForm::Violation {
                alpha,
                beta,
                violating_pair,
                ..
            } => {
                assert_eq!((alpha, beta), (0.0, 2.0));
                assert!((violating_pair.0 - 0.49).abs() <= 1e-9);
                assert!((violating_pair.1 - 0.50).abs() <= 1e-9);
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn upward_step_is_a_violation() {
        let chasing = Mechanism::new(
            "follows-the-report",
            DomainConstraint::HybridTypes,
            false,
            |profile: &Profile| {
                let report = profile.agent(0).expect("nonempty").location().expect("k=1");
                let interval = profile.interval();
                Lottery::point_mass(if report < interval.midpoint() {
                    interval.lo()
                } else {
                    interval.hi()
                })
            },
        );
        let profile = two_agents(AgentReport::single(AgentType::Type1, 1.7).unwrap());
        match reflection_form_check(&chasing, &profile, 0, &grid_001()).unwrap() {
            ReflectionForm::Violation { reason, .. } => {
                assert!(reason.contains("upward"), "unexpected reason: {reason}");
            }
            other => panic!("expected a violation, got {other:?}"),
        }
    }

    #[test]
    fn randomized_mechanisms_are_rejected() {
        let profile = two_agents(AgentReport::single(AgentType::Type2, 0.3).unwrap());
        assert!(matches!(
            reflection_form_check(&rand_hybrid(), &profile, 0, &grid_001()),
            Err(Error::RandomizedUnsupported { .. })
        ));
    }

    #[test]
    fn bad_grids_are_rejected() {
        let profile = two_agents(AgentReport::single(AgentType::Type1, 0.3).unwrap());
        let cases: Vec<Vec<f64>> = vec![
            vec![],
            vec![0.0],
            vec![0.0, 1.0, 1.0, 2.0],
            vec![0.0, 1.0],
            vec![0.5, 2.0],
        ];
        for grid in cases {
            assert!(
                matches!(
                    reflection_form_check(&det_hybrid(), &profile, 0, &grid),
                    Err(Error::BadSweepGrid { .. })
                ),
                "grid {grid:?} should be rejected"
            );
        }
        assert!(matches!(
            uniform_grid(&profile.interval(), 0.0),
            Err(Error::BadSweepGrid { .. })
        ));
    }

    #[test]
    fn bundled_reports_cannot_be_swept() {
        let profile = Profile::new(
            Interval::new(0.0, 2.0).unwrap(),
            vec![
                AgentReport::new(AgentType::Type1, vec![0.2, 0.4]).unwrap(),
                AgentReport::single(AgentType::Type1, 1.0).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            reflection_form_check(&det_hybrid(), &profile, 0, &grid_001()),
            Err(Error::SingleLocationOnly { .. })
        ));
        assert!(matches!(
            reflection_form_check(&det_hybrid(), &profile, 5, &grid_001()),
            Err(Error::AgentIndexOutOfRange { .. })
        ));
    }
}
