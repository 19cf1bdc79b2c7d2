//! Core model: the interval, agent reports, profiles, lotteries, and the two
//! social objectives.
//!
//! Agents live on a closed interval. A type-1 agent wants the facility far
//! away (benefit = distance), a type-2 agent wants it close (benefit =
//! interval length minus distance). An agent may control several locations;
//! its benefit is then the sum over them. Everything downstream — mechanisms,
//! oracles, verifiers — is built from the handful of evaluation functions
//! here.

use crate::error::{Error, Result};

/// Probability mass in a lottery must sum to 1 within this tolerance.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

/// Preference direction of an agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentType {
    /// Wants the facility far away; benefit is the distance to it.
    Type1,
    /// Wants the facility close; benefit is interval length minus distance.
    Type2,
}

impl AgentType {
    /// Numeric code used in the instance file format.
    pub fn code(self) -> u8 {
        match self {
            AgentType::Type1 => 1,
            AgentType::Type2 => 2,
        }
    }

    /// Inverse of [`code`](Self::code).
    pub fn from_code(code: u8) -> Option<AgentType> {
        match code {
            1 => Some(AgentType::Type1),
            2 => Some(AgentType::Type2),
            _ => None,
        }
    }
}

/// Closed interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Interval> {
        if !lo.is_finite() || !hi.is_finite() || !(lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Interval { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    /// Interval length; also the constant in the type-2 benefit.
    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    /// Midpoint, the pivot of every partition-based mechanism here.
    pub fn midpoint(&self) -> f64 {
        (self.lo + self.hi) / 2.0
    }

    pub fn contains(&self, y: f64) -> bool {
        self.lo <= y && y <= self.hi
    }

    fn check_contains(&self, y: f64) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::OutsideInterval {
                location: y,
                lo: self.lo,
                hi: self.hi,
            })
        }
    }
}

/// What one agent reports: its type and the locations it controls.
///
/// `k = 1` is the base model; multi-location agents (k ≥ 2) appear in the
/// obnoxious multi-location setting. One representation covers both so
/// mechanisms need no duplicated plumbing.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentReport {
    agent_type: AgentType,
    locations: Vec<f64>,
}

impl AgentReport {
    pub fn new(agent_type: AgentType, locations: Vec<f64>) -> Result<AgentReport> {
        if locations.is_empty() {
            return Err(Error::EmptyReport);
        }
        for &x in &locations {
            if !x.is_finite() {
                return Err(Error::NonFiniteLocation { location: x });
            }
        }
        Ok(AgentReport {
            agent_type,
            locations,
        })
    }

    /// Single-location report, the common case.
    pub fn single(agent_type: AgentType, location: f64) -> Result<AgentReport> {
        AgentReport::new(agent_type, vec![location])
    }

    pub fn agent_type(&self) -> AgentType {
        self.agent_type
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    /// Number of controlled locations.
    pub fn k(&self) -> usize {
        self.locations.len()
    }

    /// The location of a single-location report.
    pub fn location(&self) -> Option<f64> {
        match self.locations[..] {
            [x] => Some(x),
            _ => None,
        }
    }

    /// Arithmetic mean of the reported locations.
    pub fn mean_location(&self) -> f64 {
        let sum: f64 = self.locations.iter().sum();
        sum / self.locations.len() as f64
    }
}

/// A full instance: the interval plus every agent's report.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    interval: Interval,
    agents: Vec<AgentReport>,
}

impl Profile {
    pub fn new(interval: Interval, agents: Vec<AgentReport>) -> Result<Profile> {
        if agents.is_empty() {
            return Err(Error::EmptyProfile);
        }
        for (i, agent) in agents.iter().enumerate() {
            for &x in agent.locations() {
                if !interval.contains(x) {
                    return Err(Error::AgentOutsideInterval {
                        agent: i,
                        location: x,
                        lo: interval.lo(),
                        hi: interval.hi(),
                    });
                }
            }
        }
        Ok(Profile { interval, agents })
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn agents(&self) -> &[AgentReport] {
        &self.agents
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn agent(&self, index: usize) -> Option<&AgentReport> {
        self.agents.get(index)
    }

    /// True when every agent is type 1 (the obnoxious model).
    pub fn type1_only(&self) -> bool {
        self.agents
            .iter()
            .all(|a| a.agent_type() == AgentType::Type1)
    }

    /// True when every agent reports exactly one location.
    pub fn all_single(&self) -> bool {
        self.agents.iter().all(|a| a.k() == 1)
    }

    /// Total number of reported locations across all agents.
    pub fn total_locations(&self) -> usize {
        self.agents.iter().map(|a| a.k()).sum()
    }

    /// Copy of the profile with agent `index`'s report replaced — the basic
    /// move of every deviation test. The replacement is validated against the
    /// interval.
    pub fn with_report(&self, index: usize, report: AgentReport) -> Result<Profile> {
        if index >= self.agents.len() {
            return Err(Error::AgentIndexOutOfRange {
                index,
                n: self.agents.len(),
            });
        }
        for &x in report.locations() {
            if !self.interval.contains(x) {
                return Err(Error::AgentOutsideInterval {
                    agent: index,
                    location: x,
                    lo: self.interval.lo(),
                    hi: self.interval.hi(),
                });
            }
        }
        let mut agents = self.agents.clone();
        agents[index] = report;
        Ok(Profile {
            interval: self.interval,
            agents,
        })
    }
}

/// Finite-support probability distribution over facility locations.
///
/// Construction sorts the support by location, merges duplicate locations,
/// and drops zero-probability points, so two lotteries describing the same
/// distribution compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    support: Vec<(f64, f64)>,
}

impl Lottery {
    pub fn new(support: Vec<(f64, f64)>) -> Result<Lottery> {
        let mut sum = 0.0;
        for &(y, p) in &support {
            if !y.is_finite() {
                return Err(Error::NonFiniteLocation { location: y });
            }
            if !p.is_finite() || p < 0.0 {
                return Err(Error::BadProbability { probability: p });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
            return Err(Error::LotteryNotNormalized {
                sum,
                tolerance: PROBABILITY_SUM_TOLERANCE,
            });
        }
        let mut points = support;
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite locations"));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(points.len());
        for (y, p) in points {
            match merged.last_mut() {
                Some(last) if last.0 == y => last.1 += p,
                _ => merged.push((y, p)),
            }
        }
        merged.retain(|&(_, p)| p > 0.0);
        if merged.is_empty() {
            return Err(Error::EmptyLottery);
        }
        Ok(Lottery { support: merged })
    }

    /// Deterministic outcome: all mass on one location.
    pub fn point_mass(y: f64) -> Result<Lottery> {
        Lottery::new(vec![(y, 1.0)])
    }

    /// Support points, ascending by location, probabilities positive.
    pub fn support(&self) -> &[(f64, f64)] {
        &self.support
    }

    /// `Some(y)` iff the lottery is a point mass at `y`.
    pub fn as_point_mass(&self) -> Option<f64> {
        match self.support[..] {
            [(y, _)] => Some(y),
            _ => None,
        }
    }

    /// Probability assigned to locations in `[a, b]`.
    pub fn probability_in(&self, a: f64, b: f64) -> f64 {
        self.support
            .iter()
            .filter(|&&(y, _)| a <= y && y <= b)
            .map(|&(_, p)| p)
            .sum()
    }

    /// Expectation of `f` under the lottery.
    ///
    /// A point mass reproduces `f(y)` bitwise: the accumulation is
    /// `0 + 1.0 * f(y)`, which IEEE arithmetic leaves untouched.
    pub fn expect(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for &(y, p) in &self.support {
            acc += p * f(y);
        }
        acc
    }

    /// Expected facility location.
    pub fn mean(&self) -> f64 {
        self.expect(|y| y)
    }
}

/// The two social objectives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    /// Sum of agent benefits.
    Maxisum,
    /// Minimum agent benefit; for lotteries, the expectation of the minimum.
    Egalitarian,
}

impl Objective {
    pub fn name(self) -> &'static str {
        match self {
            Objective::Maxisum => "maxisum",
            Objective::Egalitarian => "egalitarian",
        }
    }
}

fn point_benefit(agent_type: AgentType, x: f64, y: f64, length: f64) -> f64 {
    let d = (x - y).abs();
    match agent_type {
        AgentType::Type1 => d,
        AgentType::Type2 => length - d,
    }
}

/// Benefit of a single-location report at facility `y`.
///
/// Type 1: `|x − y|`. Type 2: `length − |x − y|`. Errors if the report has
/// k ≠ 1 or either location falls outside the interval.
pub fn benefit(report: &AgentReport, y: f64, interval: &Interval) -> Result<f64> {
    let Some(x) = report.location() else {
        return Err(Error::SingleLocationOnly {
            what: "benefit".into(),
            agent: 0,
            k: report.k(),
        });
    };
    interval.check_contains(x)?;
    interval.check_contains(y)?;
    Ok(point_benefit(report.agent_type(), x, y, interval.length()))
}

/// Benefit of an arbitrary report: the sum of per-location benefits.
/// Reduces to [`benefit`] when k = 1.
pub fn multi_benefit(report: &AgentReport, y: f64, interval: &Interval) -> Result<f64> {
    interval.check_contains(y)?;
    let mut total = 0.0;
    for &x in report.locations() {
        interval.check_contains(x)?;
        total += point_benefit(report.agent_type(), x, y, interval.length());
    }
    Ok(total)
}

/// Expected true benefit of a report under a facility lottery.
pub fn expected_benefit(report: &AgentReport, lottery: &Lottery, interval: &Interval) -> Result<f64> {
    let mut acc = 0.0;
    for &(y, p) in lottery.support() {
        acc += p * multi_benefit(report, y, interval)?;
    }
    Ok(acc)
}

/// Social benefit of locating the facility at `y`.
pub fn social_benefit(profile: &Profile, y: f64, objective: Objective) -> Result<f64> {
    let interval = profile.interval();
    interval.check_contains(y)?;
    match objective {
        Objective::Maxisum => Ok(MaxisumCurve::new(profile).eval(y)),
        Objective::Egalitarian => {
            let mut min = f64::INFINITY;
            for agent in profile.agents() {
                let b = multi_benefit(agent, y, &interval)?;
                if b < min {
                    min = b;
                }
            }
            Ok(min)
        }
    }
}

/// Expected social benefit under a lottery: the probability-weighted sum of
/// [`social_benefit`] over the support. For the egalitarian objective this is
/// E[min], not min of expectations.
pub fn expected_social_benefit(
    profile: &Profile,
    lottery: &Lottery,
    objective: Objective,
) -> Result<f64> {
    let mut acc = 0.0;
    for &(y, p) in lottery.support() {
        acc += p * social_benefit(profile, y, objective)?;
    }
    Ok(acc)
}

/// Maxisum social benefit as an explicit piecewise-linear curve in `y`.
///
/// The curve has breakpoints exactly at the reported locations; the slope is
/// an integer (each location contributes ±1). Values are accumulated
/// cumulatively — each anchor is the previous anchor plus slope times gap —
/// which makes the float evaluation exactly continuous at breakpoints and
/// monotone within each piece. The exact oracle depends on both properties:
/// they guarantee its candidate maximum dominates every grid evaluation, with
/// no tolerance, plateaus included.
pub(crate) struct MaxisumCurve {
    /// `interval.lo` followed by the reported locations, ascending.
    nodes: Vec<f64>,
    /// Curve value at each node.
    anchors: Vec<f64>,
    /// Slope of the piece to the right of each node.
    slopes: Vec<f64>,
}

impl MaxisumCurve {
    pub(crate) fn new(profile: &Profile) -> MaxisumCurve {
        let interval = profile.interval();
        let lo = interval.lo();
        let mut pts: Vec<(f64, i64)> = Vec::with_capacity(profile.total_locations());
        let mut type2_points: u64 = 0;
        for agent in profile.agents() {
            let sign = match agent.agent_type() {
                AgentType::Type1 => 1,
                AgentType::Type2 => {
                    type2_points += agent.k() as u64;
                    -1
                }
            };
            for &x in agent.locations() {
                pts.push((x, sign));
            }
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite locations"));

        // Value at lo: every reported point lies to the right of it.
        let mut v = 0.0;
        for &(x, sign) in &pts {
            v += sign as f64 * (x - lo);
        }
        v += type2_points as f64 * interval.length();

        let total: i64 = pts.iter().map(|&(_, s)| s).sum();
        let mut nodes = Vec::with_capacity(pts.len() + 1);
        let mut anchors = Vec::with_capacity(pts.len() + 1);
        let mut slopes = Vec::with_capacity(pts.len() + 1);
        nodes.push(lo);
        anchors.push(v);
        let mut passed: i64 = 0;
        slopes.push((2 * passed - total) as f64);
        for &(x, sign) in &pts {
            let last = nodes.len() - 1;
            let anchor = anchors[last] + slopes[last] * (x - nodes[last]);
            passed += sign;
            nodes.push(x);
            anchors.push(anchor);
            slopes.push((2 * passed - total) as f64);
        }
        MaxisumCurve {
            nodes,
            anchors,
            slopes,
        }
    }

    /// Value at `y`; the caller guarantees `y` lies inside the interval.
    pub(crate) fn eval(&self, y: f64) -> f64 {
        let idx = self.nodes.partition_point(|&p| p <= y) - 1;
        self.anchors[idx] + self.slopes[idx] * (y - self.nodes[idx])
    }
}
