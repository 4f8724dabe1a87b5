#![no_main]

use libfuzzer_sys::fuzz_target;
use ni_core::{decode_identity, encode_identity, parse_identity};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(id) = parse_identity(text) else { return };
    let again = parse_identity(&id.to_string()).expect("formatted identity reparses");
    assert_eq!(again, id);
    // anything starting with A fits the positional encoding
    if let Ok(e) = encode_identity(&id, id.dice_count().max(1)) {
        assert_eq!(decode_identity(&e), id);
    }
});
