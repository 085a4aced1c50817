#![no_main]

use libfuzzer_sys::fuzz_target;
use thurston_core::pipeline::Alphabet;
use thurston_core::sphere::PuncturedSphere;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let alpha = Alphabet::new(&PuncturedSphere::new(5).unwrap()).unwrap();
    if let Some(w) = alpha.parse(text) {
        assert_eq!(alpha.parse(&alpha.format(&w)), Some(w));
    }
});
