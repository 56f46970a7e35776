#![no_main]

use hbt_cli::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = RunConfig::parse(text) {
        // Anything the parser accepts has already been validated.
        config.validate().unwrap();
        assert!(config.sweep.phi34_grid().len() >= 2);
    }
});
