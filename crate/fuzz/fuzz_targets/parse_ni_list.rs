#![no_main]

use libfuzzer_sys::fuzz_target;
use ni_core::{parse_ni_list, write_ni_list};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(list) = parse_ni_list(text) else { return };
    if let Some((d, mode)) = &list.header {
        let written = write_ni_list(d, *mode, list.identities.clone());
        assert_eq!(parse_ni_list(&written).expect("written list reparses"), list);
    }
});
