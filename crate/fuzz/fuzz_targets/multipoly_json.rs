#![no_main]
use libfuzzer_sys::fuzz_target;
use nalab_core::gauss::MultiPoly;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = MultiPoly::from_json_str(text) {
        let json = serde_json::to_string(&p.to_repr()).unwrap();
        assert_eq!(MultiPoly::from_json_str(&json).expect("own output decodes"), p);
        let _ = p.gauss_norm();
    }
});
