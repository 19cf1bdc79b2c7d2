//! Property test: instance JSON serialization round-trips bit-exactly for
//! arbitrary valid profiles.

use facmech::instances::{profile_from_json, profile_to_json};
use facmech::{AgentReport, AgentType, Interval, Profile};
use proptest::prelude::*;

fn arb_profile() -> impl Strategy<Value = Profile> {
    (-1e3..1e3f64, 1e-3..1e3f64).prop_flat_map(|(lo, width)| {
        proptest::collection::vec(
            (
                any::<bool>(),
                proptest::collection::vec(0.0..=1.0f64, 1..4),
            ),
            1..8,
        )
        .prop_map(move |agents| {
            let interval = Interval::new(lo, lo + width).expect("positive width");
            let reports = agents
                .into_iter()
                .map(|(near, fractions)| {
                    let agent_type = if near { AgentType::Type2 } else { AgentType::Type1 };
                    // Monotone rounding keeps lo + f * width inside the
                    // interval for every f in [0, 1].
                    let locations = fractions.iter().map(|f| lo + f * width).collect();
                    AgentReport::new(agent_type, locations).expect("in-interval locations")
                })
                .collect();
            Profile::new(interval, reports).expect("valid profile")
        })
    })
}

proptest! {
    #[test]
    fn json_round_trip_is_exact(profile in arb_profile()) {
        let json = profile_to_json(&profile);
        let back = profile_from_json(&json).unwrap();
        prop_assert_eq!(&back, &profile);
        // A second pass through the encoder is byte-stable.
        prop_assert_eq!(profile_to_json(&back), json);
    }
}
