#![no_main]

use libfuzzer_sys::fuzz_target;
use thurston_core::format::{emit_presentation, parse_unvalidated};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok((f, comments)) = parse_unvalidated(text) else { return };
    let _ = f.validate();
    let again = parse_unvalidated(&emit_presentation(&f, &comments)).expect("emitted document parses");
    assert_eq!(f, again.0);
});
