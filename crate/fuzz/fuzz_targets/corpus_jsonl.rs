#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(records) = plenum::corpus::read_corpus(text) {
            // whatever parses must re-serialize canonically
            let mut buf = Vec::new();
            plenum::corpus::write_records(&records, &mut buf).expect("rewrite");
            let again = plenum::corpus::read_corpus(std::str::from_utf8(&buf).unwrap())
                .expect("canonical corpus must parse");
            assert_eq!(again, records);
        }
    }
});
