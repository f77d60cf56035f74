#![no_main]
use libfuzzer_sys::fuzz_target;
use nalab_core::series::HahnSeries;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(s) = HahnSeries::from_json_str(text) {
        let again = HahnSeries::from_json_str(&s.to_json().to_string()).expect("own output decodes");
        assert_eq!(again, s);
        let _ = s.valuation();
    }
});
