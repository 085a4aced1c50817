#![no_main]

use libfuzzer_sys::fuzz_target;
use thurston_core::format::parse_word;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(w) = parse_word(text, 4) {
        assert_eq!(parse_word(&w.to_string(), 4).unwrap(), w);
    }
});
