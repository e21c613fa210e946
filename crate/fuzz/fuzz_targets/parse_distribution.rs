#![no_main]

use libfuzzer_sys::fuzz_target;

// The distribution JSON parser is the one surface that consumes untrusted
// input. Parsing must never panic; anything it accepts must satisfy the type
// invariants and survive a serialize/parse round trip unchanged.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(dist) = unibound::parse_distribution(text) {
        let json = unibound::report::to_json_string(&dist);
        let back = unibound::parse_distribution(&json).expect("round trip re-parses");
        assert_eq!(dist, back);
    }
});
