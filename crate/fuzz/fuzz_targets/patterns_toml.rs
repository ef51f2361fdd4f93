#![no_main]
use libfuzzer_sys::fuzz_target;

use plenum::patterns::{PatternConfig, PatternSet};

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(config) = PatternConfig::from_toml_str(text) {
            // compiling user-supplied patterns must fail cleanly, never panic
            let _ = PatternSet::compile(&config);
        }
    }
});
