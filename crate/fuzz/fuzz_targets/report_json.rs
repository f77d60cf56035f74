#![no_main]
//! Saved reports are untrusted input to `verify`.

use libfuzzer_sys::fuzz_target;
use nalab_core::report::Report;
use nalab_core::verify::verify_report;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(report) = Report::from_json(text) {
        let v = verify_report(&report);
        let _ = v.to_text();
        let _ = report.to_text();
        assert!(Report::from_json(&report.to_json()).is_ok());
    }
});
