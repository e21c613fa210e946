#![no_main]

use libfuzzer_sys::fuzz_target;
use unibound::TrialConfig;

// Every distribution the parser accepts must audit without panicking,
// whatever its shape or magnitudes (overflow to infinity included).
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(dist) = unibound::parse_distribution(text) else { return };
    if dist.size() > 4096 {
        return;
    }
    let report = unibound::audit(&dist, &TrialConfig::default());
    let _ = unibound::report::to_json_string(&report);
});
