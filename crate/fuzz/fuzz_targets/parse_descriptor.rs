#![no_main]

use libfuzzer_sys::fuzz_target;
use ni_core::{parse_descriptor, pattern_from_descriptor};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(d) = parse_descriptor(text) else { return };
    assert_eq!(parse_descriptor(&d.to_string()).expect("formatted descriptor reparses"), d);
    let _ = pattern_from_descriptor(&d);
});
