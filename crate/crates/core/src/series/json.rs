use serde::{Deserialize, Serialize};

use super::HahnSeries;
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::numerics::{p_power_of_denominator, ExtRational, PAdicRational, PAdicRepr, RationalRepr};

/// `{"characteristic": p, "degree": m, "modulus": [..]}`, or
/// `{"characteristic": 0}` for the rationals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRepr {
    pub characteristic: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
}

impl FieldRepr {
    pub fn from_field(f: &Field) -> Self {
        match f.characteristic() {
            0 => FieldRepr { characteristic: 0, degree: None, modulus: None },
            p => FieldRepr {
                characteristic: p,
                degree: Some(f.degree()),
                modulus: f.modulus().map(<[u64]>::to_vec),
            },
        }
    }

    pub fn to_field(&self) -> Result<Field> {
        match self.characteristic {
            0 => {
                if self.modulus.is_some() || self.degree.is_some_and(|d| d != 1) {
                    return Err(Error::Json("the rationals take no degree or modulus".into()));
                }
                Ok(Field::rationals())
            }
            p => {
                let m = self.degree.unwrap_or(1);
                match &self.modulus {
                    Some(modulus) => Field::galois_with_modulus(p, m, modulus),
                    None => Field::galois(p, m),
                }
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExpRepr {
    PAdic(PAdicRepr),
    Rational(RationalRepr),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CoeffRepr {
    Coords(Vec<u64>),
    Rational(RationalRepr),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRepr {
    pub exp: ExpRepr,
    pub coeff: CoeffRepr,
}

/// JSON form of a [`HahnSeries`].
///
/// Exponents use `{"num", "den_pow"}` whenever the denominator is a power of
/// the characteristic and `{"num", "den"}` otherwise; coefficients are
/// coordinate vectors in `[0, p)` or rationals in characteristic 0.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRepr {
    pub field: FieldRepr,
    pub terms: Vec<TermRepr>,
    pub tail: ExtRational,
}

impl HahnSeries {
    pub fn to_repr(&self) -> SeriesRepr {
        let p = self.field.characteristic();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let exp = match p_power_of_denominator(&t.exp, p.max(2)) {
                    Some(_) if p != 0 => ExpRepr::PAdic(PAdicRepr::from_padic(
                        &PAdicRational::from_rational(&t.exp, p).expect("p-power denominator"),
                    )),
                    _ => ExpRepr::Rational(RationalRepr::from_rational(&t.exp)),
                };
                let coeff = match (t.coeff.coords(), t.coeff.as_rational()) {
                    (Some(c), _) => CoeffRepr::Coords(c.to_vec()),
                    (None, Some(q)) => CoeffRepr::Rational(RationalRepr::from_rational(q)),
                    (None, None) => unreachable!("every element has a representation"),
                };
                TermRepr { exp, coeff }
            })
            .collect();
        SeriesRepr { field: FieldRepr::from_field(&self.field), terms, tail: self.tail.clone() }
    }

    pub fn from_repr(repr: &SeriesRepr) -> Result<Self> {
        let field = repr.field.to_field()?;
        Self::build(repr, &field)
    }

    /// Like [`HahnSeries::from_repr`], reusing an already-built field.
    pub fn from_repr_in(repr: &SeriesRepr, field: &Field) -> Result<Self> {
        if repr.field.to_field()? != *field {
            return Err(Error::Json("series field does not match the expected field".into()));
        }
        Self::build(repr, field)
    }

    fn build(repr: &SeriesRepr, field: &Field) -> Result<Self> {
        let p = field.characteristic();
        let mut raw = Vec::with_capacity(repr.terms.len());
        for t in &repr.terms {
            let exp = match &t.exp {
                ExpRepr::PAdic(e) if p != 0 => e.to_padic(p)?.to_rational(),
                ExpRepr::PAdic(_) => {
                    return Err(Error::Json("den_pow exponents need a positive characteristic".into()))
                }
                ExpRepr::Rational(r) => r.to_rational()?,
            };
            raw.push((exp, coeff_from_repr(&t.coeff, field)?));
        }
        HahnSeries::from_terms(field, raw, repr.tail.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_repr()).expect("series serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let repr: SeriesRepr = serde_json::from_str(s)?;
        Self::from_repr(&repr)
    }
}

fn coeff_from_repr(c: &CoeffRepr, field: &Field) -> Result<FieldElement> {
    match (c, field.characteristic()) {
        (CoeffRepr::Coords(v), p) if p != 0 => {
            if v.len() != field.degree() as usize || v.iter().any(|&x| x >= p) {
                return Err(Error::Json(format!(
                    "coordinates {v:?} are not a canonical vector for {field}"
                )));
            }
            field.from_coords(v)
        }
        (CoeffRepr::Rational(r), 0) => field.from_rational(&r.to_rational()?),
        (CoeffRepr::Rational(_), _) => Err(Error::Json("expected a coordinate vector".into())),
        (CoeffRepr::Coords(_), _) => Err(Error::Json("the rationals take rational coefficients".into())),
    }
}
