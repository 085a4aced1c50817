#![no_main]

use libfuzzer_sys::fuzz_target;
use thurston_core::format::parse_multicurve;
use thurston_core::sphere::PuncturedSphere;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let s = PuncturedSphere::new(5).unwrap();
    let _ = parse_multicurve(&s, text);
});
