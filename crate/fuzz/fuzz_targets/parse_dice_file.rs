#![no_main]

use libfuzzer_sys::fuzz_target;
use ni_core::{parse_dice_file, win_matrix};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(ds) = parse_dice_file(text) else { return };
    let again = parse_dice_file(&ds.to_string()).expect("formatted dice reparse");
    for d in 0..ds.dice() {
        assert_eq!(again.sorted_faces(d), ds.sorted_faces(d));
    }
    if ds.dice() * ds.sides() <= 512 {
        let _ = win_matrix(&ds);
    }
});
