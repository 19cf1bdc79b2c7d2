//! Fuzz the instance JSON parser: arbitrary bytes must never panic, only
//! parse or return an error.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = facmech::instances::profile_from_json(text);
    }
});
