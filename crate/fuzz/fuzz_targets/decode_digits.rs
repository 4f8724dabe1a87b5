#![no_main]

use libfuzzer_sys::fuzz_target;
use ni_core::encode_identity;
use ni_core::encoding::decode_digits;

fuzz_target!(|data: &[u8]| {
    let Some((&k, digits)) = data.split_first() else { return };
    let k = usize::from(k % 26) + 1;
    let Ok(id) = decode_digits(digits, k) else { return };
    let e = encode_identity(&id, k).expect("decoded identity encodes");
    assert_eq!(e.digits(), digits);
});
