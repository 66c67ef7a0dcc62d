#![no_main]

use libfuzzer_sys::fuzz_target;
use wavediff::formats::{parse_points, parse_radii, parse_window};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(radii) = parse_radii(text) {
        assert!(radii.windows(2).all(|w| w[0] < w[1]));
        assert!(radii.iter().all(|r| r.is_finite() && *r > 0.0));
    }
    for d in 1..=3 {
        if let Ok(points) = parse_points(text, d) {
            assert!(points.iter().all(|p| p.len() == d));
        }
    }
    let _ = parse_window(text);
});
