#![no_main]

use libfuzzer_sys::fuzz_target;
use thurston_core::format::parse_oracle_response;
use thurston_core::pipeline::OracleAnswer;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(OracleAnswer::Token(t)) = parse_oracle_response(text) {
        assert_eq!(parse_oracle_response(&format!("token:{t}")), Ok(OracleAnswer::Token(t)));
    }
});
