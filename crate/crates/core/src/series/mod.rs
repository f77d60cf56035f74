//! Truncated generalized power series in one variable `t`.
//!
//! A [`HahnSeries`] is a finite list of terms `c·t^q` with rational exponents
//! plus a tail bound `β`: the series is known modulo terms of exponent `≥ β`.
//! `β = +∞` means the series is exact.

mod json;
mod text;

pub use json::{FieldRepr, SeriesRepr};
pub use text::parse_series;

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement, FrobeniusDirection};
use crate::numerics::{p_power_of_denominator, rat_int, ExtRational, LogNorm, PAdicRational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub exp: BigRational,
    pub coeff: FieldElement,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HahnSeries {
    field: Field,
    terms: Vec<Term>,
    tail: ExtRational,
}

impl HahnSeries {
    /// Builds a series from arbitrary terms: duplicates are merged, zero
    /// coefficients and terms at or beyond `tail` are dropped.
    pub fn from_terms(
        field: &Field,
        raw: impl IntoIterator<Item = (BigRational, FieldElement)>,
        tail: ExtRational,
    ) -> Result<Self> {
        let mut acc: BTreeMap<BigRational, FieldElement> = BTreeMap::new();
        for (exp, coeff) in raw {
            if coeff.field() != field {
                return Err(Error::MixedFields(field.to_string(), coeff.field().to_string()));
            }
            match acc.get_mut(&exp) {
                Some(c) => *c = c.add(&coeff),
                None => {
                    acc.insert(exp, coeff);
                }
            }
        }
        Ok(Self::from_sorted_map(field, acc, tail))
    }

    fn from_sorted_map(field: &Field, acc: BTreeMap<BigRational, FieldElement>, tail: ExtRational) -> Self {
        let terms = acc
            .into_iter()
            .filter(|(e, c)| !c.is_zero() && ExtRational::Finite(e.clone()) < tail)
            .map(|(exp, coeff)| Term { exp, coeff })
            .collect();
        HahnSeries { field: field.clone(), terms, tail }
    }

    pub fn zero(field: &Field) -> Self {
        HahnSeries { field: field.clone(), terms: Vec::new(), tail: ExtRational::Infinity }
    }

    pub fn one(field: &Field) -> Self {
        Self::monomial(field.one(), rat_int(0))
    }

    /// The variable `t`.
    pub fn t(field: &Field) -> Self {
        Self::monomial(field.one(), rat_int(1))
    }

    /// `O(t^tail)`: nothing known below `tail`.
    pub fn big_o(field: &Field, tail: BigRational) -> Self {
        HahnSeries { field: field.clone(), terms: Vec::new(), tail: ExtRational::Finite(tail) }
    }

    pub fn monomial(coeff: FieldElement, exp: BigRational) -> Self {
        let field = coeff.field().clone();
        let terms = if coeff.is_zero() { Vec::new() } else { vec![Term { exp, coeff }] };
        HahnSeries { field, terms, tail: ExtRational::Infinity }
    }

    pub fn constant(coeff: FieldElement) -> Self {
        Self::monomial(coeff, rat_int(0))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn tail(&self) -> &ExtRational {
        &self.tail
    }

    pub fn is_exact(&self) -> bool {
        self.tail.is_infinite()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.is_exact()
    }

    pub fn leading_term(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn coeff_of(&self, exp: &BigRational) -> Option<&FieldElement> {
        self.terms
            .binary_search_by(|t| t.exp.cmp(exp))
            .ok()
            .map(|i| &self.terms[i].coeff)
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.terms.iter().all(|t| t.exp.is_integer())
            && self.tail.finite().is_none_or(|b| b.is_integer())
    }

    /// Exponents as elements of `Z[1/p]`; fails if one has another denominator.
    pub fn padic_exponents(&self, p: u64) -> Result<Vec<PAdicRational>> {
        self.terms.iter().map(|t| PAdicRational::from_rational(&t.exp, p)).collect()
    }

    pub fn exponents_in_z_one_over(&self, p: u64) -> bool {
        self.terms.iter().all(|t| p_power_of_denominator(&t.exp, p).is_some())
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields(self.field.to_string(), other.field.to_string()))
        }
    }

    /// Drops everything at or beyond `beta` and lowers the tail accordingly.
    pub fn truncate(&self, beta: &ExtRational) -> Self {
        if *beta >= self.tail {
            return self.clone();
        }
        let terms = self
            .terms
            .iter()
            .take_while(|t| ExtRational::Finite(t.exp.clone()) < *beta)
            .cloned()
            .collect();
        HahnSeries { field: self.field.clone(), terms, tail: beta.clone() }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        let tail = self.tail.clone().min(other.tail.clone());
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let next = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => match a.exp.cmp(&b.exp) {
                    std::cmp::Ordering::Less => {
                        i += 1;
                        a.clone()
                    }
                    std::cmp::Ordering::Greater => {
                        j += 1;
                        b.clone()
                    }
                    std::cmp::Ordering::Equal => {
                        i += 1;
                        j += 1;
                        Term { exp: a.exp.clone(), coeff: a.coeff.add(&b.coeff) }
                    }
                },
                (Some(a), None) => {
                    i += 1;
                    a.clone()
                }
                (None, Some(b)) => {
                    j += 1;
                    b.clone()
                }
                (None, None) => unreachable!(),
            };
            if ExtRational::Finite(next.exp.clone()) >= tail {
                break;
            }
            if !next.coeff.is_zero() {
                terms.push(next);
            }
        }
        Ok(HahnSeries { field: self.field.clone(), terms, tail })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { exp: t.exp.clone(), coeff: t.coeff.neg() })
            .collect();
        HahnSeries { field: self.field.clone(), terms, tail: self.tail.clone() }
    }

    /// Multiplication with the tail rule `β = min(β_f + val g, β_g + val f)`.
    /// An exact operand contributes no constraint; an operand whose
    /// valuation is needed but not visible makes the product indeterminate.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zero(&self.field));
        }
        let bound = |tail: &ExtRational, partner: &HahnSeries| -> Result<ExtRational> {
            if tail.is_infinite() {
                return Ok(ExtRational::Infinity);
            }
            match partner.leading_term() {
                Some(lead) => Ok(tail.add_rational(&lead.exp)),
                None => Err(Error::indeterminate(format!(
                    "product needs the valuation of a series known only up to O(t^{})",
                    partner.tail
                ))),
            }
        };
        let tail = bound(&self.tail, other)?.min(bound(&other.tail, self)?);
        let mut acc: BTreeMap<BigRational, FieldElement> = BTreeMap::new();
        for a in &self.terms {
            for b in &other.terms {
                let e = &a.exp + &b.exp;
                if ExtRational::Finite(e.clone()) >= tail {
                    // terms are sorted, so the rest of this row is out of range too
                    break;
                }
                let c = a.coeff.mul(&b.coeff);
                match acc.get_mut(&e) {
                    Some(x) => *x = x.add(&c),
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        Ok(Self::from_sorted_map(&self.field, acc, tail))
    }

    pub fn scale(&self, c: &FieldElement) -> Self {
        if c.is_zero() && self.is_exact() {
            return Self::zero(&self.field);
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term { exp: t.exp.clone(), coeff: t.coeff.mul(c) })
            .filter(|t| !t.coeff.is_zero())
            .collect();
        HahnSeries { field: self.field.clone(), terms, tail: self.tail.clone() }
    }

    /// Multiplication by `t^e`.
    pub fn shift(&self, e: &BigRational) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { exp: &t.exp + e, coeff: t.coeff.clone() })
            .collect();
        HahnSeries { field: self.field.clone(), terms, tail: self.tail.add_rational(e) }
    }

    pub fn pow(&self, mut k: u64) -> Result<Self> {
        let mut result = Self::one(&self.field);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(result)
    }

    /// `pow`, truncating every intermediate product at `beta`.
    pub fn pow_truncated(&self, mut k: u64, beta: &ExtRational) -> Result<Self> {
        let mut result = Self::one(&self.field).truncate(beta);
        let mut base = self.truncate(beta);
        while k > 0 {
            if k & 1 == 1 {
                result = result.checked_mul(&base)?.truncate(beta);
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?.truncate(beta);
            }
        }
        Ok(result)
    }

    /// Multiplicative inverse with `f·g − 1 = O(t^target)`, by expanding
    /// `c⁻¹ t^{-v} Σ (−h)^k` where `f = c t^v (1 + h)`.
    ///
    /// A monomial with exact tail inverts exactly. A series with a finite
    /// tail cannot be inverted beyond its own relative precision.
    pub fn invert(&self, target: &ExtRational) -> Result<Self> {
        let lead = match self.leading_term() {
            Some(l) => l.clone(),
            None if self.is_exact() => return Err(Error::DivisionByZero),
            None => {
                return Err(Error::indeterminate(format!(
                    "no visible leading term in O(t^{})",
                    self.tail
                )))
            }
        };
        let c_inv = lead.coeff.inv()?;
        let neg_v = -lead.exp.clone();
        if self.terms.len() == 1 && self.is_exact() {
            return Ok(Self::monomial(c_inv, neg_v));
        }
        // h = f / (c t^v) - 1, with strictly positive exponents
        let unit = self.shift(&neg_v).scale(&c_inv);
        let h = unit.checked_sub(&Self::one(&self.field))?;
        let rel = target.clone().min(h.tail.clone());
        if rel.is_infinite() {
            return Err(Error::invalid("inverting a non-monomial needs a finite target precision"));
        }
        let neg_h = h.neg();
        let mut sum = Self::one(&self.field).truncate(&rel);
        let mut power = sum.clone();
        while !power.terms.is_empty() && !neg_h.terms.is_empty() {
            power = power.checked_mul(&neg_h)?.truncate(&rel);
            sum = sum.checked_add(&power)?;
        }
        Ok(sum.scale(&c_inv).shift(&neg_v))
    }

    /// Termwise `p`-th power (forward) or `p`-th root (inverse).
    pub fn frobenius(&self, direction: FrobeniusDirection) -> Result<Self> {
        let p = self.field.characteristic();
        if p == 0 {
            return Err(Error::CharacteristicZero("Frobenius"));
        }
        let factor = match direction {
            FrobeniusDirection::Forward => rat_int(p),
            FrobeniusDirection::Inverse => BigRational::new(BigInt::one(), BigInt::from(p)),
        };
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(Term { exp: &t.exp * &factor, coeff: t.coeff.frobenius(direction)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(HahnSeries { field: self.field.clone(), terms, tail: self.tail.scale_positive(&factor) })
    }

    /// Forward Frobenius applied `k` times.
    pub fn frobenius_iter(&self, k: u32) -> Result<Self> {
        (0..k).try_fold(self.clone(), |f, _| f.frobenius(FrobeniusDirection::Forward))
    }

    /// The leading exponent, `+∞` for exact zero.
    pub fn valuation(&self) -> Result<LogNorm> {
        match self.leading_term() {
            Some(t) => Ok(LogNorm::from_val(t.exp.clone())),
            None if self.is_exact() => Ok(LogNorm::zero()),
            None => Err(Error::indeterminate(format!(
                "valuation of O(t^{}) is not determined",
                self.tail
            ))),
        }
    }

    /// `|self − other|`.
    pub fn distance(&self, other: &Self) -> Result<LogNorm> {
        self.checked_sub(other)?.valuation()
    }

    /// Termwise `d/dt`. In characteristic `p` every exponent must be an integer.
    pub fn derivative(&self) -> Result<Self> {
        let p = self.field.characteristic();
        if p != 0 && !self.has_integer_exponents() {
            return Err(Error::CharacteristicP(
                "termwise derivative needs integer exponents in characteristic p".into(),
            ));
        }
        let one = rat_int(1);
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.exp.is_zero() {
                continue;
            }
            let q = self.field.from_rational(&t.exp)?;
            let coeff = t.coeff.mul(&q);
            if !coeff.is_zero() {
                terms.push(Term { exp: &t.exp - &one, coeff });
            }
        }
        let tail = match &self.tail {
            ExtRational::Finite(b) => ExtRational::Finite(b - &one),
            ExtRational::Infinity => ExtRational::Infinity,
        };
        Ok(HahnSeries { field: self.field.clone(), terms, tail })
    }

    /// Whether `|f'| ≤ |t|^{-1} |f|`, i.e. `val(f') ≥ val(f) − 1`.
    pub fn derivative_bound_holds(&self) -> Result<bool> {
        let v = self.valuation()?;
        let dv = self.derivative()?.valuation()?;
        Ok(*dv.val() >= v.val().add_rational(&rat_int(-1)))
    }

    /// Equality of the two series modulo the smaller of their tails.
    pub fn agrees_with(&self, other: &Self) -> Result<bool> {
        let beta = self.tail.clone().min(other.tail.clone());
        let diff = self.truncate(&beta).checked_sub(&other.truncate(&beta))?;
        Ok(diff.terms.is_empty())
    }
}

impl Neg for &HahnSeries {
    type Output = HahnSeries;

    fn neg(self) -> HahnSeries {
        HahnSeries::neg(self)
    }
}

/// Panics when the coefficient fields differ.
impl Add for &HahnSeries {
    type Output = HahnSeries;

    fn add(self, rhs: &HahnSeries) -> HahnSeries {
        self.checked_add(rhs).expect("series over the same field")
    }
}

impl Sub for &HahnSeries {
    type Output = HahnSeries;

    fn sub(self, rhs: &HahnSeries) -> HahnSeries {
        self.checked_sub(rhs).expect("series over the same field")
    }
}

/// Panics when the fields differ or the product's precision is
/// indeterminate; see [`HahnSeries::checked_mul`].
impl Mul for &HahnSeries {
    type Output = HahnSeries;

    fn mul(self, rhs: &HahnSeries) -> HahnSeries {
        self.checked_mul(rhs).expect("determinate product")
    }
}

#[cfg(test)]
mod tests;
