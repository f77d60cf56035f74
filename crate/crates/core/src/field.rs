//! Coefficient fields: the rationals, and finite fields `GF(p^m)` in a
//! polynomial basis.
//!
//! A finite field is `GF(p)[x] / (f)` where `f` is the smallest monic
//! irreducible polynomial of degree `m`, with polynomials compared by their
//! coefficient vectors read from `x^{m-1}` down to the constant term. The
//! choice is deterministic, so serialized elements mean the same thing in
//! every run.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::{check_prime, fmt_rational};

/// Dense polynomials over `GF(p)`, coefficients low to high, no trailing zeros.
pub(crate) mod gfpoly {
    pub type Poly = Vec<u64>;

    pub fn trim(mut a: Poly) -> Poly {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    fn mulmod(a: u64, b: u64, p: u64) -> u64 {
        ((a as u128 * b as u128) % p as u128) as u64
    }

    pub fn inv_mod(a: u64, p: u64) -> u64 {
        pow_mod(a, p - 2, p)
    }

    pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
        let mut r = 1 % p;
        a %= p;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a, p);
            }
            a = mulmod(a, a, p);
            e >>= 1;
        }
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                ((x as u128 + p as u128 - y as u128) % p as u128) as u64
            })
            .collect();
        trim(out)
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = ((out[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
            }
        }
        trim(out)
    }

    /// Remainder of `a` modulo a nonzero `b`.
    pub fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
        let mut r = trim(a.to_vec());
        let db = b.len() - 1;
        let lead_inv = inv_mod(b[db], p);
        while r.len() > db {
            let dr = r.len() - 1;
            let c = mulmod(r[dr], lead_inv, p);
            let shift = dr - db;
            for (i, &bi) in b.iter().enumerate() {
                let t = mulmod(c, bi, p);
                r[shift + i] = ((r[shift + i] as u128 + p as u128 - t as u128) % p as u128) as u64;
            }
            r = trim(r);
        }
        r
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    pub fn pow_rem(base: &[u64], mut e: u64, modulus: &[u64], p: u64) -> Poly {
        let mut result = rem(&[1], modulus, p);
        let mut b = rem(base, modulus, p);
        while e > 0 {
            if e & 1 == 1 {
                result = rem(&mul(&result, &b, p), modulus, p);
            }
            b = rem(&mul(&b, &b, p), modulus, p);
            e >>= 1;
        }
        result
    }

    /// Rabin's test for a monic `f` of degree `m >= 1`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let m = f.len() - 1;
        if m == 1 {
            return true;
        }
        let x = vec![0, 1];
        // x^(p^k) mod f for k = 0..=m
        let mut frob = Vec::with_capacity(m + 1);
        let mut cur = rem(&x, f, p);
        frob.push(cur.clone());
        for _ in 0..m {
            cur = pow_rem(&cur, p, f, p);
            frob.push(cur.clone());
        }
        if sub(&frob[m], &x, p) != Vec::<u64>::new() {
            return false;
        }
        let mut n = m;
        let mut q = 2;
        let mut prime_factors = Vec::new();
        while q * q <= n {
            if n.is_multiple_of(q) {
                prime_factors.push(q);
                while n.is_multiple_of(q) {
                    n /= q;
                }
            }
            q += 1;
        }
        if n > 1 {
            prime_factors.push(n);
        }
        prime_factors.into_iter().all(|q| {
            let h = sub(&frob[m / q], &x, p);
            gcd(&h, f, p).len() == 1
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Kind {
    Rationals,
    Finite { p: u64, m: u32, modulus: Vec<u64>, order: u64 },
}

/// Description of a coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    kind: Kind,
}

/// Shared handle on a [`FieldDescriptor`]; cheap to clone.
#[derive(Clone, Debug, Eq)]
pub struct Field(Arc<FieldDescriptor>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl std::hash::Hash for Field {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl Field {
    /// The field of rational numbers (characteristic 0, trivially valued).
    pub fn rationals() -> Self {
        Field(Arc::new(FieldDescriptor { kind: Kind::Rationals }))
    }

    pub fn prime(p: u64) -> Result<Self> {
        Self::galois(p, 1)
    }

    /// `GF(p^m)` with the deterministic modulus described in the module docs.
    pub fn galois(p: u64, m: u32) -> Result<Self> {
        check_prime(p)?;
        if m == 0 {
            return Err(Error::invalid("extension degree must be at least 1"));
        }
        let order = (p as u128)
            .checked_pow(m)
            .filter(|&q| q <= u64::MAX as u128)
            .ok_or(Error::FieldTooLarge { p, m })? as u64;
        let modulus = smallest_irreducible(p, m);
        Ok(Field(Arc::new(FieldDescriptor { kind: Kind::Finite { p, m, modulus, order } })))
    }

    /// Like [`Field::galois`] but with a caller-supplied modulus, which must
    /// be the canonical one.
    pub fn galois_with_modulus(p: u64, m: u32, modulus: &[u64]) -> Result<Self> {
        let f = Self::galois(p, m)?;
        if f.modulus() != Some(modulus) {
            return Err(Error::invalid(format!(
                "modulus {modulus:?} is not the canonical modulus {:?} for GF({p}^{m})",
                f.modulus().unwrap_or_default()
            )));
        }
        Ok(f)
    }

    /// `0` for the rationals, `p` otherwise.
    pub fn characteristic(&self) -> u64 {
        match &self.0.kind {
            Kind::Rationals => 0,
            Kind::Finite { p, .. } => *p,
        }
    }

    pub fn degree(&self) -> u32 {
        match &self.0.kind {
            Kind::Rationals => 1,
            Kind::Finite { m, .. } => *m,
        }
    }

    /// Monic modulus, coefficients from constant term up.
    pub fn modulus(&self) -> Option<&[u64]> {
        match &self.0.kind {
            Kind::Rationals => None,
            Kind::Finite { modulus, .. } => Some(modulus),
        }
    }

    pub fn order(&self) -> Option<u64> {
        match &self.0.kind {
            Kind::Rationals => None,
            Kind::Finite { order, .. } => Some(*order),
        }
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0
    }

    pub fn zero(&self) -> FieldElement {
        self.from_int(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> FieldElement {
        match &self.0.kind {
            Kind::Rationals => self.element(Repr::Rational(BigRational::from_integer(n.clone()))),
            Kind::Finite { p, m, .. } => {
                let r = n.mod_floor(&BigInt::from(*p)).to_u64().expect("reduced below p");
                let mut coords = vec![0; *m as usize];
                coords[0] = r;
                self.element(Repr::Coords(coords))
            }
        }
    }

    /// Embeds a rational; in characteristic `p` the denominator must be a unit.
    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElement> {
        match &self.0.kind {
            Kind::Rationals => Ok(self.element(Repr::Rational(q.clone()))),
            Kind::Finite { .. } => {
                let num = self.from_bigint(q.numer());
                let den = self.from_bigint(q.denom());
                Ok(num.mul(&den.inv()?))
            }
        }
    }

    /// Element with the given polynomial-basis coordinates; entries are
    /// reduced mod `p` and missing high coordinates are zero.
    pub fn from_coords(&self, coords: &[u64]) -> Result<FieldElement> {
        match &self.0.kind {
            Kind::Rationals => Err(Error::invalid("the rationals have no coordinate vectors")),
            Kind::Finite { p, m, .. } => {
                if coords.len() > *m as usize {
                    return Err(Error::invalid(format!(
                        "{} coordinates given for a degree-{m} field",
                        coords.len()
                    )));
                }
                let mut v: Vec<u64> = coords.iter().map(|c| c % p).collect();
                v.resize(*m as usize, 0);
                Ok(self.element(Repr::Coords(v)))
            }
        }
    }

    /// The class of `x` when `m >= 2`; for a prime field, the least primitive root.
    pub fn generator(&self) -> Result<FieldElement> {
        match &self.0.kind {
            Kind::Rationals => Err(Error::CharacteristicZero("a field generator")),
            Kind::Finite { p, m, .. } if *m == 1 => {
                let root = least_primitive_root(*p);
                Ok(self.from_int(root as i64))
            }
            Kind::Finite { .. } => self.from_coords(&[0, 1]),
        }
    }

    /// Every element of a finite field, in coordinate order. `None` for the
    /// rationals or when the field has more than `limit` elements.
    pub fn elements(&self, limit: u64) -> Option<Vec<FieldElement>> {
        let (p, m, order) = match &self.0.kind {
            Kind::Finite { p, m, order, .. } => (*p, *m, *order),
            Kind::Rationals => return None,
        };
        if order > limit {
            return None;
        }
        let out = (0..order)
            .map(|mut n| {
                let coords: Vec<u64> = (0..m)
                    .map(|_| {
                        let c = n % p;
                        n /= p;
                        c
                    })
                    .collect();
                self.element(Repr::Coords(coords))
            })
            .collect();
        Some(out)
    }

    fn element(&self, repr: Repr) -> FieldElement {
        FieldElement { field: self.clone(), repr }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Rationals => f.write_str("Q"),
            Kind::Finite { p, m: 1, .. } => write!(f, "GF({p})"),
            Kind::Finite { p, m, .. } => write!(f, "GF({p}^{m})"),
        }
    }
}

fn smallest_irreducible(p: u64, m: u32) -> Vec<u64> {
    let m = m as usize;
    // Enumerate the lower coefficients as a base-p counter whose most
    // significant digit is the x^{m-1} coefficient.
    let mut lower = vec![0u64; m];
    loop {
        let mut f = lower.clone();
        f.push(1);
        if gfpoly::is_irreducible(&f, p) {
            return f;
        }
        let mut i = 0;
        loop {
            lower[i] += 1;
            if lower[i] < p {
                break;
            }
            lower[i] = 0;
            i += 1;
            assert!(i < m, "an irreducible polynomial of every degree exists");
        }
    }
}

fn least_primitive_root(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let mut n = p - 1;
    let mut factors = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n.is_multiple_of(q) {
            factors.push(q);
            while n.is_multiple_of(q) {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    (2..p)
        .find(|&g| factors.iter().all(|&q| gfpoly::pow_mod(g, (p - 1) / q, p) != 1))
        .expect("every prime field has a primitive root")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Rational(BigRational),
    Coords(Vec<u64>),
}

/// An element of a [`Field`], always in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Field,
    repr: Repr,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrobeniusDirection {
    Forward,
    Inverse,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Rational(q) => Some(q),
            Repr::Coords(_) => None,
        }
    }

    pub fn coords(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Coords(c) => Some(c),
            Repr::Rational(_) => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rational(q) => q.is_zero(),
            Repr::Coords(c) => c.iter().all(|&x| x == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rational(q) => q.is_one(),
            Repr::Coords(c) => c[0] == 1 && c[1..].iter().all(|&x| x == 0),
        }
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(Error::MixedFields(self.field.to_string(), other.field.to_string()))
        }
    }

    fn with(&self, repr: Repr) -> Self {
        FieldElement { field: self.field.clone(), repr }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => self.with(Repr::Rational(a + b)),
            (Repr::Coords(a), Repr::Coords(b)) => {
                let p = self.field.characteristic() as u128;
                let c = a
                    .iter()
                    .zip(b)
                    .map(|(&x, &y)| ((x as u128 + y as u128) % p) as u64)
                    .collect();
                self.with(Repr::Coords(c))
            }
            _ => unreachable!("representation follows the field"),
        })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.neg())
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => self.with(Repr::Rational(a * b)),
            (Repr::Coords(a), Repr::Coords(b)) => {
                let p = self.field.characteristic();
                let modulus = self.field.modulus().expect("finite field");
                let mut c = gfpoly::rem(&gfpoly::mul(a, b, p), modulus, p);
                c.resize(a.len(), 0);
                self.with(Repr::Coords(c))
            }
            _ => unreachable!("representation follows the field"),
        })
    }

    /// Panics if the fields differ; use [`FieldElement::checked_add`] otherwise.
    pub fn add(&self, other: &Self) -> Self {
        self.checked_add(other).expect("coefficient fields must match")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.checked_sub(other).expect("coefficient fields must match")
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.checked_mul(other).expect("coefficient fields must match")
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Rational(q) => self.with(Repr::Rational(-q)),
            Repr::Coords(c) => {
                let p = self.field.characteristic();
                self.with(Repr::Coords(c.iter().map(|&x| (p - x) % p).collect()))
            }
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut result = self.field.one();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        result
    }

    /// Power by a possibly negative integer exponent.
    pub fn pow_signed(&self, e: &BigInt) -> Result<Self> {
        let base = if e.is_negative() { self.inv()? } else { self.clone() };
        let mag = e.magnitude();
        match self.field.order() {
            Some(q) => {
                if base.is_zero() {
                    return Ok(if mag.is_zero() { self.field.one() } else { base });
                }
                let reduced = (mag % BigUint::from(q - 1)).to_u64().expect("below q");
                Ok(base.pow(reduced))
            }
            None => {
                let k = mag
                    .to_u64()
                    .ok_or_else(|| Error::invalid("exponent too large for a rational power"))?;
                Ok(base.pow(k))
            }
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.repr {
            Repr::Rational(q) => self.with(Repr::Rational(q.recip())),
            Repr::Coords(_) => {
                let q = self.field.order().expect("finite field");
                self.pow(q - 2)
            }
        })
    }

    /// `a^p` forward, the unique `p`-th root inverse.
    pub fn frobenius(&self, direction: FrobeniusDirection) -> Result<Self> {
        let p = self.field.characteristic();
        if p == 0 {
            return Err(Error::CharacteristicZero("Frobenius"));
        }
        Ok(match direction {
            FrobeniusDirection::Forward => self.pow(p),
            // On GF(p^m) the inverse of a -> a^p is a -> a^(p^(m-1)).
            FrobeniusDirection::Inverse => {
                let m = self.field.degree();
                let mut out = self.clone();
                for _ in 1..m {
                    out = out.pow(p);
                }
                out
            }
        })
    }

    /// `n · self` for an integer `n`.
    pub fn scale_int(&self, n: &BigInt) -> Self {
        self.mul(&self.field.from_bigint(n))
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rational(q) => f.write_str(&fmt_rational(q)),
            Repr::Coords(c) if c[1..].iter().all(|&x| x == 0) => write!(f, "{}", c[0]),
            Repr::Coords(c) => {
                let parts: Vec<String> = c.iter().map(u64::to_string).collect();
                write!(f, "[{}]", parts.join(","))
            }
        }
    }
}
