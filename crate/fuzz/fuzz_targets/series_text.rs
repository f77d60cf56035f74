#![no_main]
//! First byte picks the coefficient field, the rest is series text.
//! Anything that parses must print and re-parse to the same series.

use libfuzzer_sys::fuzz_target;
use nalab_core::field::Field;
use nalab_core::series::parse_series;

fuzz_target!(|data: &[u8]| {
    let Some((&tag, rest)) = data.split_first() else { return };
    let Ok(text) = std::str::from_utf8(rest) else { return };
    let field = match tag % 5 {
        0 => Field::rationals(),
        1 => Field::prime(5).unwrap(),
        2 => Field::prime(2).unwrap(),
        3 => Field::prime(3).unwrap(),
        _ => Field::galois(2, 2).unwrap(),
    };
    if let Ok(s) = parse_series(text, &field) {
        let again = parse_series(&s.to_string(), &field).expect("display output parses");
        assert_eq!(again, s);
    }
});
