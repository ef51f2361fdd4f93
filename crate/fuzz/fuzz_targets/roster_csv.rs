#![no_main]
use std::path::Path;

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = plenum::metadata::Roster::parse(data, Path::new("fuzz"));
});
