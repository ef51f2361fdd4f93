#![no_main]
use libfuzzer_sys::fuzz_target;

// The PGM decoder must reject arbitrary bytes without panicking or
// allocating for dimensions the raster cannot back.
fuzz_target!(|data: &[u8]| {
    if let Ok(bitmap) = plenum::pgm::read_pgm(data) {
        // decoded images re-encode and decode to the same pixels
        let encoded = plenum::pgm::write_pgm(&bitmap);
        let again = plenum::pgm::read_pgm(&encoded).expect("canonical encoding must decode");
        assert_eq!(again, bitmap);
    }
});
