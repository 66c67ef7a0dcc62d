#![no_main]

use libfuzzer_sys::fuzz_target;
use wavediff::formats::ReportDocument;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(report) = ReportDocument::from_json(text) else { return };
    let _ = ReportDocument::from_json(&report.to_json());
});
