#![no_main]
//! Decoded chains go through the nested check and classification; both
//! must return errors rather than panic on arbitrary discs.

use libfuzzer_sys::fuzz_target;
use nalab_core::berkovich::{classify_report, DiscChain};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(chain) = DiscChain::from_json_str(text) {
        let again = DiscChain::from_json_str(&chain.to_json()).expect("own output decodes");
        assert_eq!(again.to_json(), chain.to_json());
        let _ = classify_report(&chain);
    }
});
