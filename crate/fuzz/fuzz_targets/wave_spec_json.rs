#![no_main]

use libfuzzer_sys::fuzz_target;
use wavediff::closed_form::{autocorrelation, diffraction};
use wavediff::formats::{parse_wave_spec, wave_spec_to_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = parse_wave_spec(text) else { return };
    let again = parse_wave_spec(&wave_spec_to_json(&spec)).expect("serialised spec parses");
    assert_eq!(again, spec);
    if spec.dimension() <= 8 {
        let _ = autocorrelation(&spec);
        let _ = diffraction(&spec);
    }
});
