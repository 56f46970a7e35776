#![no_main]

use hbt_cli::config::parse_real;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    for angle in [false, true] {
        if let Ok(v) = parse_real("fuzz", text, angle) {
            assert!(v.is_finite());
        }
    }
});
