#![no_main]

use libfuzzer_sys::fuzz_target;
use wavediff::formats::{measure_to_json, parse_measure};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(mu) = parse_measure(text) else { return };
    let again = parse_measure(&measure_to_json(&mu)).expect("serialised measure parses");
    assert!(again.approx_eq(&mu, 0.0));
    let (rc, rd) = mu.radial_decompose();
    assert!(rc.add(&rd).expect("same dimension").approx_eq(&mu, 1e-12 * mu.total_mass().max(1.0)));
});
