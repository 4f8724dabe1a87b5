#![no_main]

use libfuzzer_sys::fuzz_target;
use ni_core::parse_composition_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_composition_spec(text) else { return };
    assert_eq!(parse_composition_spec(&spec.to_string()).expect("formatted spec reparses"), spec);
});
