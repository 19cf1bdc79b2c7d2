//! Named instance generators, seeded random samplers, and instance files.
//!
//! The generators build the worked instances and worst-case families that the
//! verification suite replays: the tightness pair for the randomized hybrid
//! rule, the two-cluster ratio family, the egalitarian zero-benefit pair, and
//! the two lower-bound constructions. Random sampling is deterministic per
//! (seed, stream) so searches are reproducible regardless of worker count.

use std::path::Path;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AgentReport, AgentType, Interval, Profile};
use crate::numeric::fuzzy_ceil;

fn invalid(what: &str, reason: String) -> Error {
    Error::InvalidParameters {
        what: what.into(),
        reason,
    }
}

/// The two-agent instance on [0, 2] with the type-1 agent at 1 and the
/// type-2 agent at 0 — the profile on which the randomized hybrid rule's
/// approximation ratio is tight.
pub fn gen_tightness_32() -> Profile {
    let interval = Interval::new(0.0, 2.0).expect("static interval");
    Profile::new(
        interval,
        vec![
            AgentReport::single(AgentType::Type1, 1.0).expect("static report"),
            AgentReport::single(AgentType::Type2, 0.0).expect("static report"),
        ],
    )
    .expect("static profile")
}

/// Two-cluster family on [alpha, beta] driving any two-point-range
/// deterministic rule to ratio (3−ε′)/(1+ε′) with ε′ = 2ε/(beta−alpha).
///
/// Profile x puts n/2 type-1 agents at `alpha` and n/2 at `beta`; profile y
/// moves the alpha-half to just left of the midpoint, (alpha+beta)/2 − ε.
pub fn gen_thm51(n: usize, epsilon: f64, alpha: f64, beta: f64) -> Result<(Profile, Profile)> {
    if n < 2 || n % 2 != 0 {
        return Err(invalid(
            "two-cluster family",
            format!("n must be even and at least 2, got {n}"),
        ));
    }
    if !alpha.is_finite() || !beta.is_finite() || !(alpha < beta) {
        return Err(invalid(
            "two-cluster family",
            format!("need finite alpha < beta, got {alpha}, {beta}"),
        ));
    }
    if !(epsilon > 0.0) || !(epsilon < (beta - alpha) / 2.0) {
        return Err(invalid(
            "two-cluster family",
            format!(
                "epsilon must lie in (0, {}), got {epsilon}",
                (beta - alpha) / 2.0
            ),
        ));
    }
    let interval = Interval::new(alpha, beta)?;
    let mid = interval.midpoint();
    let half = n / 2;
    let build = |left: f64| -> Result<Profile> {
        let mut agents = Vec::with_capacity(n);
        for _ in 0..half {
            agents.push(AgentReport::single(AgentType::Type1, left)?);
        }
        for _ in 0..half {
            agents.push(AgentReport::single(AgentType::Type1, beta)?);
        }
        Profile::new(interval, agents)
    };
    Ok((build(alpha)?, build(mid - epsilon)?))
}

/// Two type-1 agents, one at each of the two given points; the interval
/// spans exactly those points. Pins any mechanism with that range to an
/// egalitarian benefit of zero.
pub fn gen_thm52(a: f64, b: f64) -> Result<Profile> {
    if !a.is_finite() || !b.is_finite() || a == b {
        return Err(invalid(
            "zero-benefit pair",
            format!("need two distinct finite locations, got {a}, {b}"),
        ));
    }
    let interval = Interval::new(a.min(b), a.max(b))?;
    Profile::new(
        interval,
        vec![
            AgentReport::single(AgentType::Type1, a)?,
            AgentReport::single(AgentType::Type1, b)?,
        ],
    )
}

/// The constant of the deterministic lower-bound pair: 2√3 − 3.
pub fn thm61_a() -> f64 {
    2.0 * 3.0_f64.sqrt() - 3.0
}

/// Lower-bound pair on [0, 2] with a = 2√3−3: profile x has type-1 agents at
/// (1−a, 1+a); profile y moves agent 1 to 0. The two differ only in agent
/// 1's location, so the pair doubles as a single-deviation test.
pub fn gen_thm61() -> (Profile, Profile) {
    let a = thm61_a();
    let interval = Interval::new(0.0, 2.0).expect("static interval");
    let build = |first: f64| {
        Profile::new(
            interval,
            vec![
                AgentReport::single(AgentType::Type1, first).expect("location in [0,2]"),
                AgentReport::single(AgentType::Type1, 1.0 + a).expect("location in [0,2]"),
            ],
        )
        .expect("valid profile")
    };
    (build(1.0 - a), build(0.0))
}

/// Randomized lower-bound construction on [0, M+2] with
/// n = 2⌈(M+1)/ε⌉ + 4 type-1 agents.
///
/// Profile x: one agent at 1 and at M+1, one at each 1+aε strictly inside
/// (1, M+1), the remainder split evenly between the endpoints, and — if the
/// remainder is odd — one agent at (M+2)/2. Profile x′ relocates the agents
/// clustered at 0 so that every point aε ∈ [0, 1) carries one.
pub fn gen_thm62(m: f64, epsilon: f64) -> Result<(Profile, Profile)> {
    if !m.is_finite() || !(m > 0.0) {
        return Err(invalid(
            "randomized lower-bound family",
            format!("M must be positive, got {m}"),
        ));
    }
    if !epsilon.is_finite() || !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(invalid(
            "randomized lower-bound family",
            format!("epsilon must lie in (0, 1), got {epsilon}"),
        ));
    }
    let interval = Interval::new(0.0, m + 2.0)?;
    let n = 2 * fuzzy_ceil((m + 1.0) / epsilon) as usize + 4;

    let mut core = vec![1.0, m + 1.0];
    let mut a = 1u64;
    loop {
        let point = 1.0 + a as f64 * epsilon;
        if point >= m + 1.0 {
            break;
        }
        core.push(point);
        a += 1;
    }
    if core.len() > n {
        return Err(invalid(
            "randomized lower-bound family",
            format!("interior net of {} points exceeds n = {n}", core.len()),
        ));
    }
    let remainder = n - core.len();
    let cluster = remainder / 2;

    // The [0,1) relocation net for x′.
    let mut net = Vec::new();
    let mut a = 0u64;
    loop {
        let point = a as f64 * epsilon;
        if point >= 1.0 {
            break;
        }
        net.push(point);
        a += 1;
    }
    if cluster < net.len() {
        return Err(invalid(
            "randomized lower-bound family",
            format!(
                "endpoint cluster of {cluster} agents cannot cover the {}-point [0,1) net",
                net.len()
            ),
        ));
    }

    let mut locations_x = core;
    let zero_start = locations_x.len();
    for _ in 0..cluster {
        locations_x.push(0.0);
    }
    for _ in 0..cluster {
        locations_x.push(m + 2.0);
    }
    if remainder % 2 == 1 {
        locations_x.push((m + 2.0) / 2.0);
    }
    debug_assert_eq!(locations_x.len(), n);

    let mut locations_prime = locations_x.clone();
    for j in 0..cluster {
        locations_prime[zero_start + j] = net[j % net.len()];
    }

    let build = |locations: &[f64]| -> Result<Profile> {
        let agents = locations
            .iter()
            .map(|&x| AgentReport::single(AgentType::Type1, x))
            .collect::<Result<Vec<_>>>()?;
        Profile::new(interval, agents)
    };
    Ok((build(&locations_x)?, build(&locations_prime)?))
}

/// Distribution over random profiles: agent count uniform on 1..=n_max,
/// types independently type-2 with probability `type2_probability`, location
/// counts uniform on 1..=k_max, locations uniform on the interval.
#[derive(Debug, Clone, Copy)]
pub struct RandomProfileSpec {
    pub n_max: usize,
    pub type2_probability: f64,
    pub k_max: usize,
    pub interval: Interval,
}

impl RandomProfileSpec {
    pub fn new(
        n_max: usize,
        type2_probability: f64,
        k_max: usize,
        interval: Interval,
    ) -> Result<RandomProfileSpec> {
        if n_max < 1 {
            return Err(invalid("random profiles", "n_max must be at least 1".into()));
        }
        if k_max < 1 {
            return Err(invalid("random profiles", "k_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&type2_probability) {
            return Err(invalid(
                "random profiles",
                format!("type2_probability must lie in [0,1], got {type2_probability}"),
            ));
        }
        Ok(RandomProfileSpec {
            n_max,
            type2_probability,
            k_max,
            interval,
        })
    }

    /// Draw the profile for (seed, stream). The stream selects an
    /// independent substream of the generator, so a search over streams
    /// 0..iterations is reproducible no matter how it is parallelized.
    pub fn sample(&self, seed: u64, stream: u64) -> Profile {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let n = rng.random_range(1..=self.n_max);
        let agents = (0..n)
            .map(|_| {
                let agent_type = if rng.random_bool(self.type2_probability) {
                    AgentType::Type2
                } else {
                    AgentType::Type1
                };
                let k = rng.random_range(1..=self.k_max);
                let locations = (0..k)
                    .map(|_| rng.random_range(self.interval.lo()..=self.interval.hi()))
                    .collect();
                AgentReport::new(agent_type, locations).expect("nonempty finite locations")
            })
            .collect();
        Profile::new(self.interval, agents).expect("agents drawn inside the interval")
    }
}

/// One random profile with exactly `n` agents; see [`RandomProfileSpec`] for
/// the distribution of everything else.
pub fn random_profile(
    n: usize,
    type2_probability: f64,
    k_max: usize,
    interval: Interval,
    seed: u64,
) -> Result<Profile> {
    if n < 1 {
        return Err(invalid("random profiles", "n must be at least 1".into()));
    }
    let spec = RandomProfileSpec::new(n, type2_probability, k_max, interval)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let agents = (0..n)
        .map(|_| {
            let agent_type = if rng.random_bool(type2_probability) {
                AgentType::Type2
            } else {
                AgentType::Type1
            };
            let k = rng.random_range(1..=spec.k_max);
            let locations = (0..k)
                .map(|_| rng.random_range(interval.lo()..=interval.hi()))
                .collect();
            AgentReport::new(agent_type, locations).expect("nonempty finite locations")
        })
        .collect();
    Profile::new(interval, agents)
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    interval: [f64; 2],
    agents: Vec<AgentFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentFile {
    #[serde(rename = "type")]
    agent_type: u8,
    locations: Vec<f64>,
}

fn to_file(profile: &Profile) -> InstanceFile {
    InstanceFile {
        interval: [profile.interval().lo(), profile.interval().hi()],
        agents: profile
            .agents()
            .iter()
            .map(|a| AgentFile {
                agent_type: a.agent_type().code(),
                locations: a.locations().to_vec(),
            })
            .collect(),
    }
}

fn from_file(file: InstanceFile) -> Result<Profile> {
    let interval = Interval::new(file.interval[0], file.interval[1])?;
    let agents = file
        .agents
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let agent_type = AgentType::from_code(a.agent_type).ok_or_else(|| {
                Error::InvalidInstance {
                    reason: format!("agent {i}: type must be 1 or 2, got {}", a.agent_type),
                }
            })?;
            AgentReport::new(agent_type, a.locations.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Profile::new(interval, agents)
}

/// Serialize a profile to the instance JSON schema. Locations use shortest
/// round-trip-exact decimal form, so parsing the output reproduces every
/// float bit for bit.
pub fn profile_to_json(profile: &Profile) -> String {
    serde_json::to_string_pretty(&to_file(profile)).expect("instance schema serializes")
}

/// Parse a profile from instance JSON; all profile invariants are enforced.
pub fn profile_from_json(text: &str) -> Result<Profile> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::ParseInstance {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    from_file(file)
}

/// Write a profile to `path` in the instance JSON schema.
pub fn save_instance(profile: &Profile, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = profile_to_json(profile);
    text.push('\n');
    std::fs::write(path, text).map_err(|source| Error::WriteInstance {
        path: path.display().to_string(),
        source,
    })
}

/// Read a profile from an instance JSON file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Profile> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::ReadInstance {
        path: path.display().to_string(),
        source,
    })?;
    profile_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mechanisms::{det_hybrid, rand_hybrid};
    use crate::model::{expected_social_benefit, social_benefit, Objective};
    use crate::oracle::{opt_egalitarian, opt_maxisum};

    #[test]
    fn tightness_instance_shape_and_values() {
        let p = gen_tightness_32();
        assert_eq!(p.n(), 2);
        assert_eq!(p.agent(0).unwrap().agent_type(), AgentType::Type1);
        assert_eq!(p.agent(0).unwrap().location(), Some(1.0));
        assert_eq!(p.agent(1).unwrap().agent_type(), AgentType::Type2);
        assert_eq!(p.agent(1).unwrap().location(), Some(0.0));

        assert_eq!(opt_maxisum(&p).unwrap().value, 3.0);
        let lot = rand_hybrid().apply(&p).unwrap();
        let expected = expected_social_benefit(&p, &lot, Objective::Maxisum).unwrap();
        assert!((expected - 39.0 / 23.0).abs() <= 1e-12);
    }

    #[test]
    fn two_cluster_family_shape() {
        let (x, y) = gen_thm51(10, 1e-3, 0.0, 2.0).unwrap();
        assert_eq!(x.n(), 10);
        assert!(x.agents()[..5].iter().all(|a| a.location() == Some(0.0)));
        assert!(x.agents()[5..].iter().all(|a| a.location() == Some(2.0)));
        assert!(y.agents()[..5]
            .iter()
            .all(|a| a.location() == Some(1.0 - 1e-3)));
        assert!(y.agents()[5..].iter().all(|a| a.location() == Some(2.0)));

        let (x, _) = gen_thm51(2, 0.5, 0.0, 2.0).unwrap();
        let locs: Vec<f64> = x.agents().iter().map(|a| a.location().unwrap()).collect();
        assert_eq!(locs, vec![0.0, 2.0]);
    }

    #[test]
    fn two_cluster_family_hits_closed_form_ratio() {
        let eps = 1e-3;
        let (_, y) = gen_thm51(10, eps, 0.0, 2.0).unwrap();
        let lot = det_hybrid().apply(&y).unwrap();
        assert_eq!(lot.as_point_mass(), Some(2.0));
        let mech = expected_social_benefit(&y, &lot, Objective::Maxisum).unwrap();
        let best = opt_maxisum(&y).unwrap().value;
        let ratio = best / mech;
        let closed_form = (3.0 - eps) / (1.0 + eps);
        assert!((ratio - closed_form).abs() <= 1e-12);
    }

    #[test]
    fn two_cluster_family_validation() {
        assert!(gen_thm51(9, 1e-3, 0.0, 2.0).is_err());
        assert!(gen_thm51(0, 1e-3, 0.0, 2.0).is_err());
        assert!(gen_thm51(10, 1.0, 0.0, 2.0).is_err());
        assert!(gen_thm51(10, 1e-3, 2.0, 0.0).is_err());
    }

    #[test]
    fn zero_benefit_pair() {
        let p = gen_thm52(0.0, 2.0).unwrap();
        let lot = det_hybrid().apply(&p).unwrap();
        let mech = expected_social_benefit(&p, &lot, Objective::Egalitarian).unwrap();
        assert_eq!(mech, 0.0);
        let opt = opt_egalitarian(&p).unwrap();
        assert_eq!(opt.value, 1.0);

        let inner = gen_thm52(0.5, 1.5).unwrap();
        assert_eq!(inner.interval().lo(), 0.5);
        assert_eq!(inner.interval().hi(), 1.5);

        assert!(gen_thm52(1.0, 1.0).is_err());
    }

    #[test]
    fn deterministic_lower_bound_pair() {
        let a = thm61_a();
        assert!((a - 0.464_101_615_137_754_6).abs() <= 1e-11);
        let (x, y) = gen_thm61();
        assert!((x.agent(0).unwrap().location().unwrap() - (1.0 - a)).abs() <= 1e-15);
        assert!((x.agent(1).unwrap().location().unwrap() - (1.0 + a)).abs() <= 1e-15);
        assert_eq!(y.agent(0).unwrap().location(), Some(0.0));
        // The pair differs only in agent 1's location.
        assert_eq!(x.agent(1).unwrap(), y.agent(1).unwrap());

        let opt_y = opt_maxisum(&y).unwrap();
        assert!((opt_y.value - (3.0 - a)).abs() <= 1e-12);
        assert_eq!(opt_y.location, 2.0);
    }

    #[test]
    fn randomized_lower_bound_construction() {
        let (x, xp) = gen_thm62(10.0, 0.1).unwrap();
        assert_eq!(x.n(), 224);
        assert_eq!(x.interval().lo(), 0.0);
        assert_eq!(x.interval().hi(), 12.0);

        let locs = |p: &Profile| -> Vec<f64> {
            p.agents().iter().map(|a| a.location().unwrap()).collect()
        };
        let lx = locs(&x);
        assert_eq!(lx.iter().filter(|&&v| v == 0.0).count(), 61);
        assert_eq!(lx.iter().filter(|&&v| v == 12.0).count(), 61);
        // Interval center: the interior net point 1 + 50ε plus the
        // odd-remainder agent.
        assert_eq!(lx.iter().filter(|&&v| v == 6.0).count(), 2);
        assert_eq!(lx.iter().filter(|&&v| v == 1.0).count(), 1);
        assert_eq!(lx.iter().filter(|&&v| v == 11.0).count(), 1);

        // x′ differs from x only on agents that sat at 0, and covers the
        // [0,1) net.
        let lp = locs(&xp);
        for (a, b) in lx.iter().zip(&lp) {
            if a != b {
                assert_eq!(*a, 0.0);
                assert!(*b < 1.0);
            }
        }
        for a in 0..10 {
            let point = a as f64 * 0.1;
            assert!(
                lp.iter().any(|&v| (v - point).abs() <= 1e-12),
                "net point {point} uncovered"
            );
        }

        let opt = opt_egalitarian(&x).unwrap();
        assert!((opt.value - 0.5).abs() <= 1e-9);
        let at_proof_location = social_benefit(&x, 11.5, Objective::Egalitarian).unwrap();
        assert!((at_proof_location - 0.5).abs() <= 1e-9);
    }

    #[test]
    fn randomized_lower_bound_validation() {
        assert!(gen_thm62(0.0, 0.1).is_err());
        assert!(gen_thm62(-3.0, 0.1).is_err());
        assert!(gen_thm62(10.0, 0.0).is_err());
        assert!(gen_thm62(10.0, 1.0).is_err());
    }

    #[test]
    fn random_profiles_are_reproducible_and_in_domain() {
        let interval = Interval::new(0.0, 2.0).unwrap();
        let a = random_profile(5, 0.5, 3, interval, 42).unwrap();
        let b = random_profile(5, 0.5, 3, interval, 42).unwrap();
        assert_eq!(a, b);
        let c = random_profile(5, 0.5, 3, interval, 43).unwrap();
        assert_ne!(a, c);

        let obnoxious = random_profile(8, 0.0, 1, interval, 7).unwrap();
        assert!(obnoxious.type1_only());
        assert!(obnoxious.all_single());

        let spec = RandomProfileSpec::new(6, 0.3, 4, interval).unwrap();
        for stream in 0..200 {
            let p = spec.sample(42, stream);
            assert!(p.n() >= 1 && p.n() <= 6);
            assert!(p.agents().iter().all(|a| a.k() <= 4));
            assert_eq!(p, spec.sample(42, stream));
        }
    }

    #[test]
    fn instance_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let p = gen_tightness_32();
        save_instance(&p, &path).unwrap();
        assert_eq!(load_instance(&path).unwrap(), p);

        let interval = Interval::new(0.0, 2.0).unwrap();
        let multi = Profile::new(
            interval,
            vec![
                AgentReport::new(AgentType::Type1, vec![0.0, 2.0]).unwrap(),
                AgentReport::new(AgentType::Type1, vec![1.0 / 3.0]).unwrap(),
            ],
        )
        .unwrap();
        let path = dir.path().join("m.json");
        save_instance(&multi, &path).unwrap();
        let loaded = load_instance(&path).unwrap();
        assert_eq!(loaded, multi);
        assert_eq!(loaded.agent(0).unwrap().k(), 2);
    }

    #[test]
    fn instance_parsing_rejects_bad_files() {
        let out_of_interval =
            r#"{"interval": [0.0, 2.0], "agents": [{"type": 1, "locations": [2.5]}]}"#;
        assert!(matches!(
            profile_from_json(out_of_interval),
            Err(Error::AgentOutsideInterval { .. })
        ));

        let bad_type = r#"{"interval": [0.0, 2.0], "agents": [{"type": 3, "locations": [1.0]}]}"#;
        assert!(matches!(
            profile_from_json(bad_type),
            Err(Error::InvalidInstance { .. })
        ));

        let err = profile_from_json("{\n  \"interval\": [0, 2,\n").unwrap_err();
        match err {
            Error::ParseInstance { line, .. } => assert!(line >= 2),
            other => panic!("expected parse error, got {other:?}"),
        }

        let unknown_field =
            r#"{"interval": [0.0, 2.0], "agents": [], "extra": 1}"#;
        assert!(matches!(
            profile_from_json(unknown_field),
            Err(Error::ParseInstance { .. })
        ));

        let missing = load_instance("/nonexistent/nope.json");
        assert!(matches!(missing, Err(Error::ReadInstance { .. })));
    }

    #[test]
    fn json_preserves_full_float_precision() {
        let interval = Interval::new(0.0, 2.0).unwrap();
        let awkward = vec![1.0 / 3.0, 2.0_f64.sqrt() / 2.0, 0.1 + 0.2];
        let p = Profile::new(
            interval,
            awkward
                .iter()
                .map(|&x| AgentReport::single(AgentType::Type1, x).unwrap())
                .collect(),
        )
        .unwrap();
        let reparsed = profile_from_json(&profile_to_json(&p)).unwrap();
        for (orig, back) in p.agents().iter().zip(reparsed.agents()) {
            assert_eq!(
                orig.location().unwrap().to_bits(),
                back.location().unwrap().to_bits()
            );
        }
    }
}
