#![no_main]

use libfuzzer_sys::fuzz_target;
use wavediff::render::parse_pgm;

fuzz_target!(|data: &[u8]| {
    if let Ok(pgm) = parse_pgm(data) {
        assert_eq!(pgm.samples.len(), pgm.width * pgm.height);
        assert!(pgm.samples.iter().all(|&s| s <= pgm.maxval));
    }
});
