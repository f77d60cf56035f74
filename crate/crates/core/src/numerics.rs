//! Exact numbers used for exponents and norms.
//!
//! Norms are never evaluated as reals. An absolute value `|x|` is stored as
//! the exponent `v` in `|x| = ρ^v`, where `ρ = |t|` is a fixed number in
//! `(0, 1)`. Larger exponents mean smaller norms, and the zero element has
//! exponent `+∞`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for &a in &BASES {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Shorthand for building a rational from two machine integers.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn pow_big(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

/// Formats a rational as `n` or `n/d`.
pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `n` or `n/d` (optionally signed).
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::DivisionByZero);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(rat_int(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// If the denominator of `q` is `p^k`, returns `k`.
pub fn p_power_of_denominator(q: &BigRational, p: u64) -> Option<u32> {
    let mut d = q.denom().clone();
    let pb = BigInt::from(p);
    let mut k = 0;
    while !d.is_one() {
        let (quot, rem) = d.div_rem(&pb);
        if !rem.is_zero() {
            return None;
        }
        d = quot;
        k += 1;
    }
    Some(k)
}

/// A rational number whose denominator is a power of a fixed prime, i.e. an
/// element of `Z[1/p]`.
///
/// The value is `num / p^den_pow`, kept in lowest terms: either `den_pow == 0`
/// or `p` does not divide `num`. Zero is always `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PAdicRational {
    num: BigInt,
    den_pow: u32,
    prime: u64,
}

impl PAdicRational {
    /// Normalizes `num / p^den_pow`.
    pub fn new(num: impl Into<BigInt>, den_pow: u32, prime: u64) -> Result<Self> {
        check_prime(prime)?;
        Ok(Self::normalized(num.into(), den_pow, prime))
    }

    pub fn from_integer(n: impl Into<BigInt>, prime: u64) -> Result<Self> {
        Self::new(n, 0, prime)
    }

    pub fn zero(prime: u64) -> Result<Self> {
        Self::new(0, 0, prime)
    }

    /// Converts a rational whose denominator is a power of `prime`.
    pub fn from_rational(q: &BigRational, prime: u64) -> Result<Self> {
        check_prime(prime)?;
        let k = p_power_of_denominator(q, prime)
            .ok_or_else(|| Error::NotPAdic(fmt_rational(q), prime))?;
        Ok(Self::normalized(q.numer().clone(), k, prime))
    }

    fn normalized(mut num: BigInt, mut den_pow: u32, prime: u64) -> Self {
        if num.is_zero() {
            return Self { num, den_pow: 0, prime };
        }
        let p = BigInt::from(prime);
        while den_pow > 0 {
            let (q, r) = num.div_rem(&p);
            if !r.is_zero() {
                break;
            }
            num = q;
            den_pow -= 1;
        }
        Self { num, den_pow, prime }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn den_pow(&self) -> u32 {
        self.den_pow
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn is_integer(&self) -> bool {
        self.den_pow == 0
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(self.num.clone(), pow_big(self.prime, self.den_pow))
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.prime == other.prime {
            Ok(())
        } else {
            Err(Error::MixedPrimes(self.prime, other.prime))
        }
    }

    /// Numerators of `self` and `other` brought to the common denominator `p^k`.
    fn aligned(&self, other: &Self) -> (BigInt, BigInt, u32) {
        let k = self.den_pow.max(other.den_pow);
        let a = &self.num * pow_big(self.prime, k - self.den_pow);
        let b = &other.num * pow_big(self.prime, k - other.den_pow);
        (a, b, k)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let (a, b, k) = self.aligned(other);
        Ok(Self::normalized(a + b, k, self.prime))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        let (a, b, k) = self.aligned(other);
        Ok(Self::normalized(a - b, k, self.prime))
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, ..self.clone() }
    }

    /// Multiplication by an integer.
    pub fn scale(&self, k: &BigInt) -> Self {
        Self::normalized(&self.num * k, self.den_pow, self.prime)
    }

    pub fn div_p(&self) -> Self {
        Self::normalized(self.num.clone(), self.den_pow + 1, self.prime)
    }

    pub fn mul_p(&self) -> Self {
        self.scale(&BigInt::from(self.prime))
    }

    pub fn compare(&self, other: &Self) -> Result<Ordering> {
        self.same_prime(other)?;
        let (a, b, _) = self.aligned(other);
        Ok(a.cmp(&b))
    }
}

impl fmt::Display for PAdicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_pow == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}^{}", self.num, self.prime, self.den_pow)
        }
    }
}

/// A rational number or `+∞`.
///
/// The derived order puts `Infinity` above every finite value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinity,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(BigRational::zero())
    }

    pub fn int(n: i64) -> Self {
        ExtRational::Finite(rat_int(n))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinity)
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::Infinity => None,
        }
    }

    /// `+∞` absorbs.
    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinity,
        }
    }

    pub fn add_rational(&self, q: &BigRational) -> Self {
        match self {
            ExtRational::Finite(a) => ExtRational::Finite(a + q),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }

    /// Multiplication by a positive rational; `+∞` stays `+∞`.
    pub fn scale_positive(&self, q: &BigRational) -> Self {
        debug_assert!(q.is_positive());
        match self {
            ExtRational::Finite(a) => ExtRational::Finite(a * q),
            ExtRational::Infinity => ExtRational::Infinity,
        }
    }
}

impl From<BigRational> for ExtRational {
    fn from(q: BigRational) -> Self {
        ExtRational::Finite(q)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => f.write_str(&fmt_rational(q)),
            ExtRational::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "∞" => Ok(ExtRational::Infinity),
            other => parse_rational(other).map(ExtRational::Finite),
        }
    }
}

/// JSON shape `{"num": "3", "den": "2"}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
}

impl RationalRepr {
    pub fn from_rational(q: &BigRational) -> Self {
        Self { num: q.numer().to_string(), den: q.denom().to_string() }
    }

    pub fn to_rational(&self) -> Result<BigRational> {
        let bad = || Error::Json(format!("bad rational {}/{}", self.num, self.den));
        let n = BigInt::from_str(&self.num).map_err(|_| bad())?;
        let d = BigInt::from_str(&self.den).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(BigRational::new(n, d))
    }
}

/// JSON shape `{"num": "9", "den_pow": 2}`; the prime comes from context.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PAdicRepr {
    pub num: String,
    pub den_pow: u32,
}

impl PAdicRepr {
    pub fn from_padic(q: &PAdicRational) -> Self {
        Self { num: q.numerator().to_string(), den_pow: q.den_pow() }
    }

    pub fn to_padic(&self, prime: u64) -> Result<PAdicRational> {
        let n = BigInt::from_str(&self.num)
            .map_err(|_| Error::Json(format!("bad integer {:?}", self.num)))?;
        PAdicRational::new(n, self.den_pow, prime)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ExtRationalRepr {
    Inf(String),
    Finite(RationalRepr),
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtRational::Infinity => ExtRationalRepr::Inf("inf".into()).serialize(s),
            ExtRational::Finite(q) => {
                ExtRationalRepr::Finite(RationalRepr::from_rational(q)).serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match ExtRationalRepr::deserialize(d)? {
            ExtRationalRepr::Inf(s) if s == "inf" => Ok(ExtRational::Infinity),
            ExtRationalRepr::Inf(s) => Err(D::Error::custom(format!("expected \"inf\", got {s:?}"))),
            ExtRationalRepr::Finite(r) => {
                r.to_rational().map(ExtRational::Finite).map_err(D::Error::custom)
            }
        }
    }
}

/// A norm `ρ^val` written additively.
///
/// Comparisons through [`LogNorm::norm_cmp`] order by size of the norm, which
/// is the reverse of the order on exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LogNorm(ExtRational);

impl LogNorm {
    pub fn from_val(val: impl Into<ExtRational>) -> Self {
        LogNorm(val.into())
    }

    /// `|0|`.
    pub fn zero() -> Self {
        LogNorm(ExtRational::Infinity)
    }

    /// `|1|`.
    pub fn one() -> Self {
        LogNorm(ExtRational::zero())
    }

    pub fn val(&self) -> &ExtRational {
        &self.0
    }

    pub fn finite_val(&self) -> Option<&BigRational> {
        self.0.finite()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_infinite()
    }

    /// `|x|·|y|`.
    pub fn mul(&self, other: &Self) -> Self {
        LogNorm(self.0.add(&other.0))
    }

    /// The ultrametric bound `max(|x|, |y|)` on `|x + y|`.
    pub fn ultrametric_add(&self, other: &Self) -> Self {
        LogNorm(self.0.clone().min(other.0.clone()))
    }

    /// `|x|^k` for a positive rational `k`.
    pub fn pow(&self, k: &BigRational) -> Self {
        LogNorm(self.0.scale_positive(k))
    }

    pub fn norm_cmp(&self, other: &Self) -> Ordering {
        other.0.cmp(&self.0)
    }

    pub fn norm_le(&self, other: &Self) -> bool {
        self.norm_cmp(other) != Ordering::Greater
    }

    pub fn norm_lt(&self, other: &Self) -> bool {
        self.norm_cmp(other) == Ordering::Less
    }
}

impl fmt::Display for LogNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rho^{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pr(n: i64, k: u32, p: u64) -> PAdicRational {
        PAdicRational::new(n, k, p).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let a = pr(6, 1, 2);
        assert_eq!((a.numerator().clone(), a.den_pow()), (BigInt::from(3), 0));
        let z = pr(0, 5, 3);
        assert_eq!((z.numerator().clone(), z.den_pow()), (BigInt::from(0), 0));
        let b = pr(9, 2, 2);
        assert_eq!((b.numerator().clone(), b.den_pow()), (BigInt::from(9), 2));
    }

    #[test]
    fn composite_prime_rejected() {
        assert_eq!(PAdicRational::new(1, 0, 4), Err(Error::NotPrime(4)));
        assert_eq!(PAdicRational::new(1, 0, 1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(pr(3, 1, 2).add(&pr(9, 2, 2)).unwrap(), pr(15, 2, 2));
        let nine = PAdicRational::from_integer(9, 2).unwrap();
        assert_eq!(nine.div_p().div_p(), pr(9, 2, 2));
        assert_eq!(pr(3, 1, 2).compare(&pr(9, 2, 2)).unwrap(), Ordering::Less);
        assert_eq!(pr(1, 1, 2).add(&pr(1, 1, 3)), Err(Error::MixedPrimes(2, 3)));
        assert_eq!(pr(3, 1, 2).mul_p(), PAdicRational::from_integer(3, 2).unwrap());
        assert_eq!(PAdicRational::from_integer(6, 2).unwrap().div_p(), pr(3, 0, 2));
    }

    #[test]
    fn from_rational_rejects_foreign_denominators() {
        assert!(PAdicRational::from_rational(&rat(1, 3), 2).is_err());
        assert_eq!(PAdicRational::from_rational(&rat(3, 4), 2).unwrap(), pr(3, 2, 2));
    }

    #[test]
    fn miller_rabin_agrees_with_trial_division() {
        let slow = |n: u64| n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..5000 {
            assert_eq!(is_prime(n), slow(n), "n = {n}");
        }
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(18446744073709551555));
    }

    #[test]
    fn lognorm_examples() {
        let a = LogNorm::from_val(rat(3, 2));
        let b = LogNorm::from_val(rat(9, 4));
        assert_eq!(a.mul(&b), LogNorm::from_val(rat(15, 4)));
        assert_eq!(LogNorm::from_val(rat_int(2)).ultrametric_add(&LogNorm::zero()), LogNorm::from_val(rat_int(2)));
        assert_eq!(a.norm_cmp(&b), Ordering::Greater);
        assert!(LogNorm::zero().norm_lt(&b));
        assert_eq!(LogNorm::zero().mul(&a), LogNorm::zero());
    }

    #[test]
    fn ext_rational_json() {
        let v = serde_json::to_string(&ExtRational::Finite(rat(-3, 2))).unwrap();
        assert_eq!(v, r#"{"num":"-3","den":"2"}"#);
        assert_eq!(serde_json::to_string(&ExtRational::Infinity).unwrap(), r#""inf""#);
        let back: ExtRational = serde_json::from_str(r#"{"num":"6","den":"4"}"#).unwrap();
        assert_eq!(back, ExtRational::Finite(rat(3, 2)));
        assert!(serde_json::from_str::<ExtRational>(r#""nan""#).is_err());
        assert!(serde_json::from_str::<ExtRational>(r#"{"num":"1","den":"0"}"#).is_err());
    }

    fn arb_padic(p: u64) -> impl Strategy<Value = PAdicRational> {
        (-500i64..500, 0u32..6).prop_map(move |(n, k)| PAdicRational::new(n, k, p).unwrap())
    }

    proptest! {
        #[test]
        fn padic_matches_rational_oracle(
            (a, b, c) in prop::sample::select(vec![2u64, 3, 5])
                .prop_flat_map(|p| (arb_padic(p), arb_padic(p), arb_padic(p)))
        ) {
            let (qa, qb) = (a.to_rational(), b.to_rational());
            let p = a.prime();
            prop_assert_eq!(a.add(&b).unwrap().to_rational(), &qa + &qb);
            prop_assert_eq!(a.sub(&b).unwrap().to_rational(), &qa - &qb);
            prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
            prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
            prop_assert_eq!(a.compare(&b).unwrap(), qa.cmp(&qb));
            prop_assert_eq!(a.div_p().to_rational(), &qa / rat_int(p as i64));
        }

        #[test]
        fn padic_ops_exact(n1 in -1000i64..1000, k1 in 0u32..8, n2 in -1000i64..1000, k2 in 0u32..8,
                           s in -20i64..20) {
            let p = 3;
            let a = pr(n1, k1, p);
            let b = pr(n2, k2, p);
            let qa = rat(n1, 3i64.pow(k1));
            let qb = rat(n2, 3i64.pow(k2));
            prop_assert_eq!(a.to_rational(), qa.clone());
            prop_assert_eq!(a.add(&b).unwrap().to_rational(), &qa + &qb);
            prop_assert_eq!(a.scale(&BigInt::from(s)).to_rational(), &qa * rat_int(s));
            // idempotent normalization
            let again = PAdicRational::new(a.numerator().clone(), a.den_pow(), p).unwrap();
            prop_assert_eq!(again, a);
        }

        #[test]
        fn lognorm_monoid(a in -50i64..50, b in -50i64..50, c in -50i64..50, inf in 0u8..4) {
            let mk = |v: i64, i: bool| if i { LogNorm::zero() } else { LogNorm::from_val(rat(v, 4)) };
            let (x, y, z) = (mk(a, inf == 1), mk(b, inf == 2), mk(c, inf == 3));
            prop_assert_eq!(x.mul(&y), y.mul(&x));
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
            prop_assert_eq!(x.mul(&LogNorm::one()), x.clone());
            prop_assert_eq!(x.mul(&LogNorm::zero()), LogNorm::zero());
            prop_assert_eq!(x.ultrametric_add(&y), y.ultrametric_add(&x));
        }
    }
}
