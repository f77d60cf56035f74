use super::*;
use crate::numerics::rat;
use proptest::prelude::*;

fn gf(p: u64) -> Field {
    Field::prime(p).unwrap()
}

fn s(text: &str, f: &Field) -> HahnSeries {
    parse_series(text, f).unwrap()
}

#[test]
fn normalize_examples() {
    let q = Field::rationals();
    let c = q.from_int(5);
    let cancelled =
        HahnSeries::from_terms(&q, vec![(rat(1, 1), c.clone()), (rat(1, 1), c.neg())], ExtRational::Infinity)
            .unwrap();
    assert!(cancelled.is_exact_zero());

    let sorted =
        HahnSeries::from_terms(&q, vec![(rat(3, 2), q.one()), (rat(1, 1), q.one())], ExtRational::Infinity)
            .unwrap();
    let exps: Vec<_> = sorted.terms().iter().map(|t| t.exp.clone()).collect();
    assert_eq!(exps, vec![rat(1, 1), rat(3, 2)]);

    let truncated = HahnSeries::from_terms(&q, vec![(rat(2, 1), q.one())], ExtRational::int(2)).unwrap();
    assert!(truncated.terms().is_empty());
    assert_eq!(truncated.tail(), &ExtRational::int(2));
}

#[test]
fn ring_examples() {
    let f2 = gf(2);
    let a = s("t + t^(3/2)", &f2);
    assert_eq!(&a * &a, s("t^2 + t^3", &f2));
    assert_eq!(&a + &HahnSeries::zero(&f2), a);

    let f3 = gf(3);
    let lhs = &s("t^(1/2) + t", &f3) * &s("t^(1/2) + 2*t", &f3);
    assert_eq!(lhs, s("t + 2*t^2", &f3));
}

#[test]
fn mul_tail_rule() {
    let q = Field::rationals();
    // (t + O(t^3)) * (t^2 + O(t^5)) = t^3 + O(t^5)
    let f = s("t + O(t^3)", &q);
    let g = s("t^2 + O(t^5)", &q);
    let prod = &f * &g;
    assert_eq!(prod, s("t^3 + O(t^5)", &q));
    // exact operand imposes nothing of its own
    let h = s("1 + t", &q);
    assert_eq!(&f * &h, s("t + t^2 + O(t^3)", &q));
    // an invisible valuation makes the product indeterminate
    let o = HahnSeries::big_o(&q, rat(2, 1));
    assert!(matches!(f.checked_mul(&o), Err(Error::IndeterminatePrecision(_))));
    assert!(HahnSeries::zero(&q).checked_mul(&o).unwrap().is_exact_zero());
}

#[test]
fn invert_examples() {
    let f2 = gf(2);
    let t = HahnSeries::t(&f2);
    assert_eq!(t.invert(&ExtRational::int(10)).unwrap(), s("t^(-1)", &f2));

    let g = s("1 + t", &f2).invert(&ExtRational::int(4)).unwrap();
    assert_eq!(g, s("1 + t + t^2 + t^3 + O(t^4)", &f2));

    let zero_ish = HahnSeries::big_o(&f2, rat(3, 1));
    assert!(zero_ish.invert(&ExtRational::int(4)).is_err());
    assert_eq!(HahnSeries::zero(&f2).invert(&ExtRational::int(4)), Err(Error::DivisionByZero));
}

#[test]
fn invert_product_is_one_to_precision() {
    let q = Field::rationals();
    let f = s("2*t^(-1) + 3 - t^(1/2) + 5*t^2", &q);
    let g = f.invert(&ExtRational::int(6)).unwrap();
    let prod = &f * &g;
    assert!(prod.agrees_with(&HahnSeries::one(&q)).unwrap());
    assert_eq!(prod.tail(), &ExtRational::int(6));
}

#[test]
fn frobenius_examples() {
    let f2 = gf(2);
    let fwd = s("t^(3/2)", &f2).frobenius(FrobeniusDirection::Forward).unwrap();
    assert_eq!(fwd, s("t^3", &f2));
    let alpha1 = s("t + t^(3/2)", &f2);
    assert_eq!(alpha1.frobenius_iter(2).unwrap(), s("t^4 + t^6", &f2));
    assert!(s("t", &Field::rationals()).frobenius(FrobeniusDirection::Forward).is_err());
}

#[test]
fn valuation_and_distance_examples() {
    let f2 = gf(2);
    assert_eq!(s("t^(3/2) + t^2", &f2).valuation().unwrap(), LogNorm::from_val(rat(3, 2)));
    assert_eq!(HahnSeries::zero(&f2).valuation().unwrap(), LogNorm::zero());
    assert!(HahnSeries::big_o(&f2, rat(1, 1)).valuation().is_err());

    let a0 = s("t", &f2);
    let a1 = s("t + t^(3/2)", &f2);
    let a2 = s("t + t^(3/2) + t^(9/4)", &f2);
    let a3 = s("t + t^(3/2) + t^(9/4) + t^(23/8)", &f2);
    assert_eq!(a1.distance(&a1).unwrap(), LogNorm::zero());
    assert_eq!(a1.distance(&a0).unwrap(), LogNorm::from_val(rat(3, 2)));
    assert_eq!(a2.checked_sub(&a1).unwrap().valuation().unwrap(), LogNorm::from_val(rat(9, 4)));
    assert_eq!(a3.distance(&a2).unwrap(), LogNorm::from_val(rat(23, 8)));
}

#[test]
fn derivative_examples() {
    let q = Field::rationals();
    assert_eq!(s("t^2", &q).derivative().unwrap(), s("2*t", &q));
    let half = s("t^(1/2)", &q);
    let d = half.derivative().unwrap();
    assert_eq!(d, s("1/2*t^(-1/2)", &q));
    assert_eq!(d.valuation().unwrap(), LogNorm::from_val(rat(-1, 2)));

    let f = s("t^(1/3) + t", &q);
    assert_eq!(f.derivative().unwrap().valuation().unwrap(), LogNorm::from_val(rat(-2, 3)));
    assert!(f.derivative_bound_holds().unwrap());

    assert!(s("t^(1/2)", &gf(2)).derivative().is_err());
    assert_eq!(s("t^3 + t^2", &gf(2)).derivative().unwrap(), s("t^2", &gf(2)));
    assert_eq!(s("t + O(t^3)", &q).derivative().unwrap(), s("1 + O(t^2)", &q));
}

#[test]
fn parser_accepts_the_documented_forms() {
    let f2 = gf(2);
    let a = s("t + t^(3/2) + O(t^4)", &f2);
    assert_eq!(a.terms().len(), 2);
    assert_eq!(a.tail(), &ExtRational::int(4));
    let q = Field::rationals();
    assert_eq!(s("-t^-1 + 3/4 t^(-1/2)", &q), s("- t^(-1) + 3/4*t^(-1/2)", &q));
    assert_eq!(s("0", &q), HahnSeries::zero(&q));
    assert_eq!(s("O(1)", &q), HahnSeries::big_o(&q, rat(0, 1)));
    let gf4 = Field::galois(2, 2).unwrap();
    assert_eq!(s("g*t", &gf4), s("[0,1]*t", &gf4));
    assert_eq!(s("g^2", &gf4), s("[1,1]", &gf4));
    assert_eq!(s("t*t^2", &q), s("t^3", &q));
}

#[test]
fn parser_rejects_garbage() {
    let q = Field::rationals();
    for bad in ["", "t +", "t^", "t^(1/0)", "O(t", "g*t", "[1]*t", "t ++ t", "x", "3/0", "*t", "t**t"] {
        assert!(matches!(parse_series(bad, &q), Err(Error::Parse { .. })), "{bad:?} should fail");
    }
    assert!(parse_series("1/2", &gf(2)).is_err());
    assert!(parse_series("[1,0,1]", &Field::galois(2, 2).unwrap()).is_err());
}

#[test]
fn json_shape() {
    let f2 = gf(2);
    let a = s("t + t^(3/2) + O(t^4)", &f2);
    let v = a.to_json();
    let expected = serde_json::json!({
        "field": {"characteristic": 2, "degree": 1, "modulus": [0, 1]},
        "terms": [
            {"exp": {"num": "1", "den_pow": 0}, "coeff": [1]},
            {"exp": {"num": "3", "den_pow": 1}, "coeff": [1]}
        ],
        "tail": {"num": "4", "den": "1"}
    });
    assert_eq!(v, expected);
    assert_eq!(HahnSeries::from_json_str(&v.to_string()).unwrap(), a);

    let q = Field::rationals();
    let b = s("1/2*t^(1/3)", &q);
    let v = b.to_json();
    assert_eq!(v["terms"][0]["exp"], serde_json::json!({"num": "1", "den": "3"}));
    assert_eq!(HahnSeries::from_json_str(&v.to_string()).unwrap(), b);

    let gf3 = gf(3);
    let c = s("t^(1/2)", &gf3);
    assert_eq!(c.to_json()["terms"][0]["exp"], serde_json::json!({"num": "1", "den": "2"}));
    assert_eq!(HahnSeries::from_json_str(&c.to_json().to_string()).unwrap(), c);
}

#[test]
fn json_rejects_noncanonical_input() {
    let bad = [
        r#"{"field":{"characteristic":4},"terms":[],"tail":"inf"}"#,
        r#"{"field":{"characteristic":2},"terms":[{"exp":{"num":"1","den_pow":0},"coeff":[2]}],"tail":"inf"}"#,
        r#"{"field":{"characteristic":2,"degree":2,"modulus":[1,0,1]},"terms":[],"tail":"inf"}"#,
        r#"{"field":{"characteristic":0},"terms":[{"exp":{"num":"1","den_pow":0},"coeff":{"num":"1","den":"1"}}],"tail":"inf"}"#,
        r#"{"field":{"characteristic":2},"terms":[],"tail":"forever"}"#,
        r#"{"field":{"characteristic":2},"terms":[],"tail":"inf","extra":1}"#,
    ];
    for b in bad {
        assert!(HahnSeries::from_json_str(b).is_err(), "{b}");
    }
}

fn arb_series(p: u64, max_terms: usize) -> impl Strategy<Value = HahnSeries> {
    let den = if p == 0 { 6 } else { p as i64 * p as i64 };
    let coeff_range = if p == 0 { 7 } else { p as i64 };
    (
        prop::collection::vec((-8i64..24, 1i64..coeff_range.max(2)), 0..max_terms),
        prop::option::of(0i64..30),
    )
        .prop_map(move |(raw, tail)| {
            let f = if p == 0 { Field::rationals() } else { Field::prime(p).unwrap() };
            let terms = raw.into_iter().map(|(e, c)| (rat(e, den), f.from_int(c - 3 * (p == 0) as i64)));
            let tail = tail.map_or(ExtRational::Infinity, |b| ExtRational::Finite(rat(b, den)));
            HahnSeries::from_terms(&f, terms, tail).unwrap()
        })
}

proptest! {
    #[test]
    fn display_parse_round_trip(f in prop::sample::select(vec![0u64, 2, 3, 5]).prop_flat_map(|p| arb_series(p, 6))) {
        let text = f.to_string();
        let back = parse_series(&text, f.field()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn json_round_trip(f in prop::sample::select(vec![0u64, 2, 3]).prop_flat_map(|p| arb_series(p, 6))) {
        let back = HahnSeries::from_json_str(&f.to_json().to_string()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn frobenius_is_a_ring_homomorphism(
        (f, g) in prop::sample::select(vec![2u64, 3, 5]).prop_flat_map(|p| (arb_series(p, 5), arb_series(p, 5)))
    ) {
        let fr = |x: &HahnSeries| x.frobenius(FrobeniusDirection::Forward).unwrap();
        prop_assert_eq!(fr(&(&f + &g)), &fr(&f) + &fr(&g));
        prop_assert_eq!(fr(&(&f - &g)), &fr(&f) - &fr(&g));
        if let Ok(prod) = f.checked_mul(&g) {
            prop_assert_eq!(fr(&prod), fr(&f).checked_mul(&fr(&g)).unwrap());
        }
        prop_assert_eq!(fr(&f).frobenius(FrobeniusDirection::Inverse).unwrap(), f.clone());
        let p = rat_int(f.field().characteristic());
        if let Ok(d) = f.distance(&g) {
            let scaled = d.pow(&p);
            prop_assert_eq!(fr(&f).distance(&fr(&g)).unwrap(), scaled);
        }
    }

    #[test]
    fn valuation_is_additive_and_ultrametric(
        (f, g) in prop::sample::select(vec![0u64, 2, 3]).prop_flat_map(|p| (arb_series(p, 5), arb_series(p, 5)))
    ) {
        if let (Ok(vf), Ok(vg)) = (f.valuation(), g.valuation()) {
            if let Ok(prod) = f.checked_mul(&g) {
                if f.leading_term().is_some() && g.leading_term().is_some() {
                    prop_assert_eq!(prod.valuation().unwrap(), vf.mul(&vg));
                }
            }
            if let Ok(vs) = (&f + &g).valuation() {
                prop_assert!(vs.norm_le(&vf.ultrametric_add(&vg)));
                if vf != vg {
                    prop_assert_eq!(vs, vf.ultrametric_add(&vg));
                }
            }
        }
    }
}
