#![no_main]

use libfuzzer_sys::fuzz_target;
use thurston_core::perm::Perm;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = Perm::parse_cycles(text, 6) {
        assert_eq!(Perm::parse_cycles(&p.to_string(), 6).unwrap(), p);
    }
});
