//! Exhaustive grid check of the two-point-range property that
//! characterizes strategyproof deterministic rules for far-preferring
//! agents.
//!
//! A rule with range {α, β}, α < β, m = (α+β)/2 passes if for every
//! ordered profile pair (x, y) with f(x) = β and f(y) = α some agent
//! moves rightward across m: strictly left of m in x and at or right of m
//! in y, or exactly at m in x and strictly right of m in y.

use crate::error::{Error, Result};
use crate::mechanisms::Mechanism;
use crate::model::{AgentReport, AgentType, Interval, Profile};

/// Default ceiling on the number of ordered profile pairs scanned;
/// 625 corresponds to two agents on a five-point grid.
pub const DEFAULT_PAIR_CAP: u128 = 625;

/// Outcome of [`midpoint_property_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct MidpointCheckReport {
    /// Distinct facility locations observed over the whole grid, ascending.
    pub range_points: Vec<f64>,
    /// First ordered pair (high-output profile, low-output profile) with no
    /// agent crossing the range midpoint, when the check fails that way.
    pub violating_pair: Option<(Profile, Profile)>,
    pub passed: bool,
}

fn crosses_midpoint(x: &Profile, y: &Profile, m: f64) -> bool {
    (0..x.n()).any(|i| {
        let xi = x.agent(i).expect("same n").location().expect("k = 1");
        let yi = y.agent(i).expect("same n").location().expect("k = 1");
        (xi < m && yi >= m) || (xi == m && yi > m)
    })
}

/// Enumerate every profile of `n` far-preferring agents over `grid`,
/// apply the deterministic `mechanism`, and verify the two-point-range
/// midpoint property.
///
/// A range with more than two points fails the check outright. The scan
/// covers `|grid|^(2n)` ordered pairs in the worst case and refuses to run
/// past [`DEFAULT_PAIR_CAP`] unless `allow_large` is set.
pub fn midpoint_property_check(
    mechanism: &Mechanism,
    interval: &Interval,
    n: usize,
    grid: &[f64],
    allow_large: bool,
) -> Result<MidpointCheckReport> {
    if n == 0 {
        return Err(Error::InvalidParameters {
            what: "midpoint_property_check".into(),
            reason: "need at least one agent".into(),
        });
    }
    if grid.is_empty() {
        return Err(Error::BadSweepGrid {
            reason: "grid must be nonempty".into(),
        });
    }
    if grid.iter().any(|g| !interval.contains(*g)) {
        return Err(Error::BadSweepGrid {
            reason: "grid point outside the interval".into(),
        });
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadSweepGrid {
            reason: "grid must be strictly increasing".into(),
        });
    }
    let profiles_total = (grid.len() as u128).checked_pow(n as u32).ok_or(
        Error::GridTooLarge {
            pairs: u128::MAX,
            cap: DEFAULT_PAIR_CAP,
        },
    )?;
    let pairs = profiles_total.saturating_mul(profiles_total);
    if pairs > DEFAULT_PAIR_CAP && !allow_large {
        return Err(Error::GridTooLarge {
            pairs,
            cap: DEFAULT_PAIR_CAP,
        });
    }

    // Odometer enumeration of grid^n, applying the mechanism to each profile.
    let mut profiles = Vec::with_capacity(profiles_total as usize);
    let mut outputs = Vec::with_capacity(profiles_total as usize);
    let mut digits = vec![0usize; n];
    loop {
        let agents = digits
            .iter()
            .map(|&d| AgentReport::single(AgentType::Type1, grid[d]))
            .collect::<Result<Vec<_>>>()?;
        let profile = Profile::new(*interval, agents)?;
        let lottery = mechanism.apply(&profile)?;
        let y = lottery
            .as_point_mass()
            .ok_or_else(|| Error::RandomizedUnsupported {
                what: "midpoint_property_check",
                mechanism: mechanism.name().to_string(),
            })?;
        profiles.push(profile);
        outputs.push(y);

        let mut carry = 0;
        loop {
            digits[carry] += 1;
            if digits[carry] < grid.len() {
                break;
            }
            digits[carry] = 0;
            carry += 1;
            if carry == n {
                break;
            }
        }
        if carry == n {
            break;
        }
    }

    let mut range_points: Vec<f64> = Vec::new();
    for &y in &outputs {
        if !range_points.contains(&y) {
            range_points.push(y);
        }
    }
    range_points.sort_by(|a, b| a.partial_cmp(b).expect("facility locations are finite"));

    if range_points.len() > 2 {
        return Ok(MidpointCheckReport {
            range_points,
            violating_pair: None,
            passed: false,
        });
    }
    if range_points.len() < 2 {
        return Ok(MidpointCheckReport {
            range_points,
            violating_pair: None,
            passed: true,
        });
    }

    let (alpha, beta) = (range_points[0], range_points[1]);
    let m = 0.5 * (alpha + beta);
    let high: Vec<usize> = (0..profiles.len()).filter(|&i| outputs[i] == beta).collect();
    let low: Vec<usize> = (0..profiles.len()).filter(|&i| outputs[i] == alpha).collect();
    for &ix in &high {
        for &iy in &low {
            if !crosses_midpoint(&profiles[ix], &profiles[iy], m) {
                return Ok(MidpointCheckReport {
                    range_points,
                    violating_pair: Some((profiles[ix].clone(), profiles[iy].clone())),
                    passed: false,
                });
            }
        }
    }
    Ok(MidpointCheckReport {
        range_points,
        violating_pair: None,
        passed: true,
    })
}
