//! Fuzz the encode/decode cycle: any instance the parser accepts must
//! serialize to JSON that reparses to the identical profile.

#![no_main]

use facmech::instances::{profile_from_json, profile_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(profile) = profile_from_json(text) else {
        return;
    };
    let json = profile_to_json(&profile);
    let back = profile_from_json(&json).expect("serialized instance must reparse");
    assert_eq!(back, profile, "round trip must reproduce every bit");
    assert_eq!(profile_to_json(&back), json, "encoder must be stable");
});
