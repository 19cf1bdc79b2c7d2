//! Fuzz the mechanism-name parser, including the parameterized
//! midpoint(...) and constant(...) forms.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(mechanism) = facmech::mechanisms::mechanism_by_name(text) {
            let _ = mechanism.name();
        }
    }
});
