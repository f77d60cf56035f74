//! Polynomials in `t_1, t_2, …` over a valued ground field, the Gauss norm,
//! and the substitution endomorphism `τ: t_n ↦ t_n − x_n t_{n+1}`.
//!
//! The ground field is a field of [`HahnSeries`] over `k`; only the
//! valuations of the scalars `x_n` matter for the norm statements, so each
//! `x_n` is the monomial `t^{e_n}` with `e_n > 0`.
//!
//! `τ` does not reach `t_1`: `y'' = t_1 + x_1 t_2 + ⋯ + x_1⋯x_n t_{n+1}`
//! telescopes to `τ(y'') = t_1 − x_1⋯x_{n+1} t_{n+2}`, so the image misses
//! `t_1` by `|x_1⋯x_{n+1}|`, while any `y'` in fewer variables stays at
//! distance at least `|x_1⋯x_n|` from `y''`.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::numerics::{fmt_rational, rat, rat_int, LogNorm};
use crate::report::{Check, Report};
use crate::series::{FieldRepr, HahnSeries, SeriesRepr};

/// Scalars `x_i = t^{e_i}` with `e_i > 0` and every partial sum of the
/// `e_i` at most a declared bound, so `|x_1⋯x_n|` stays bounded away from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingSequence {
    exponents: Vec<BigRational>,
    bound: BigRational,
}

impl ScalingSequence {
    pub fn new(exponents: Vec<BigRational>, bound: BigRational) -> Result<Self> {
        let mut sum = BigRational::zero();
        for (i, e) in exponents.iter().enumerate() {
            if !e.is_positive() {
                return Err(Error::invalid(format!("x_{} needs |x| < 1, got exponent {}", i + 1, fmt_rational(e))));
            }
            sum += e;
            if sum > bound {
                return Err(Error::invalid(format!(
                    "partial sum {} of the scaling exponents exceeds the declared bound {}",
                    fmt_rational(&sum),
                    fmt_rational(&bound)
                )));
            }
        }
        Ok(ScalingSequence { exponents, bound })
    }

    /// `x_i = t^{2^{-i}}` for `i = 1..=len`, partial sums bounded by 1.
    pub fn dyadic(len: usize) -> Self {
        let exponents = (1..=len).map(|i| rat(1, 1i64 << i.min(62))).collect();
        ScalingSequence { exponents, bound: rat_int(1) }
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[BigRational] {
        &self.exponents
    }

    pub fn bound(&self) -> &BigRational {
        &self.bound
    }

    /// `e_i`, 1-based.
    pub fn exponent(&self, i: usize) -> Result<&BigRational> {
        self.exponents
            .get(i.wrapping_sub(1))
            .ok_or_else(|| Error::invalid(format!("scaling sequence has no x_{i} (length {})", self.len())))
    }

    pub fn x(&self, i: usize, ground: &Field) -> Result<HahnSeries> {
        Ok(HahnSeries::monomial(ground.one(), self.exponent(i)?.clone()))
    }

    /// Valuation of `x_1⋯x_n`.
    pub fn product_val(&self, n: usize) -> Result<BigRational> {
        if n > self.len() {
            return Err(Error::invalid(format!("scaling sequence has no x_{n}")));
        }
        Ok(self.exponents[..n].iter().fold(BigRational::zero(), |a, e| a + e))
    }

    /// Exponent of a scalar `λ` with `|λ| < |x_1⋯x_n|` for every `n`.
    pub fn lambda_val(&self) -> BigRational {
        &self.bound + rat_int(1)
    }
}

type Monomial = Vec<u32>;

/// A polynomial in `t_1..t_level` with [`HahnSeries`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    ground: Field,
    level: usize,
    terms: BTreeMap<Monomial, HahnSeries>,
}

impl MultiPoly {
    pub fn zero(ground: &Field, level: usize) -> Self {
        MultiPoly { ground: ground.clone(), level, terms: BTreeMap::new() }
    }

    pub fn constant(c: HahnSeries, level: usize) -> Self {
        let ground = c.field().clone();
        let mut p = Self::zero(&ground, level);
        p.insert(vec![0; level], c);
        p
    }

    /// `t_n` (1-based) inside a polynomial ring of at least `n` variables.
    pub fn var(ground: &Field, n: usize, level: usize) -> Result<Self> {
        if n == 0 || n > level {
            return Err(Error::invalid(format!("t_{n} does not exist at level {level}")));
        }
        let mut mono = vec![0; level];
        mono[n - 1] = 1;
        Ok(Self::monomial(mono, HahnSeries::one(ground)))
    }

    pub fn monomial(exps: Vec<u32>, c: HahnSeries) -> Self {
        let ground = c.field().clone();
        let mut p = Self::zero(&ground, exps.len());
        p.insert(exps, c);
        p
    }

    pub fn from_terms(ground: &Field, level: usize, terms: impl IntoIterator<Item = (Vec<u32>, HahnSeries)>) -> Result<Self> {
        let mut p = Self::zero(ground, level);
        for (mono, c) in terms {
            if mono.len() != level {
                return Err(Error::invalid(format!("monomial {mono:?} does not have {level} exponents")));
            }
            if c.field() != ground {
                return Err(Error::MixedFields(ground.to_string(), c.field().to_string()));
            }
            p.insert(mono, c);
        }
        Ok(p)
    }

    fn insert(&mut self, mono: Monomial, c: HahnSeries) {
        let merged = match self.terms.remove(&mono) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_exact_zero() {
            self.terms.insert(mono, merged);
        }
    }

    pub fn ground(&self) -> &Field {
        &self.ground
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &HahnSeries)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    pub fn coeff(&self, mono: &[u32]) -> Option<&HahnSeries> {
        self.terms.get(mono)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest `n` such that `t_n` actually occurs.
    pub fn effective_level(&self) -> usize {
        self.terms
            .keys()
            .filter_map(|m| m.iter().rposition(|&a| a > 0).map(|i| i + 1))
            .max()
            .unwrap_or(0)
    }

    pub fn with_level(&self, level: usize) -> Result<Self> {
        if level < self.effective_level() {
            return Err(Error::invalid(format!(
                "cannot drop to level {level}: t_{} occurs",
                self.effective_level()
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut m = m.clone();
                m.resize(level, 0);
                (m, c.clone())
            })
            .collect();
        Ok(MultiPoly { ground: self.ground.clone(), level, terms })
    }

    fn aligned(&self, other: &Self) -> Result<(Self, Self)> {
        if self.ground != other.ground {
            return Err(Error::MixedFields(self.ground.to_string(), other.ground.to_string()));
        }
        let level = self.level.max(other.level);
        Ok((self.with_level(level)?, other.with_level(level)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (mut a, b) = self.aligned(other)?;
        for (m, c) in b.terms {
            a.insert(m, c);
        }
        Ok(a)
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c.neg())).collect();
        MultiPoly { ground: self.ground.clone(), level: self.level, terms }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.aligned(other)?;
        let mut out = Self::zero(&a.ground, a.level);
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                out.insert(m, ca.checked_mul(cb)?);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &HahnSeries) -> Result<Self> {
        let mut out = Self::zero(&self.ground, self.level);
        for (m, x) in &self.terms {
            out.insert(m.clone(), x.checked_mul(c)?);
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut out = Self::constant(HahnSeries::one(&self.ground), self.level);
        for _ in 0..k {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Maximum coefficient norm, as the minimum coefficient valuation.
    pub fn gauss_norm(&self) -> Result<LogNorm> {
        self.terms
            .values()
            .map(HahnSeries::valuation)
            .try_fold(LogNorm::zero(), |acc, v| Ok(acc.ultrametric_add(&v?)))
    }

    /// `τ(t_n) = t_n − x_n t_{n+1}`, extended as a ring map fixing the
    /// ground field. The result lives one level higher.
    pub fn apply_tau(&self, xs: &ScalingSequence) -> Result<Self> {
        if self.level == 0 {
            return Ok(self.clone());
        }
        let out_level = self.level + 1;
        let images = (1..=self.level)
            .map(|n| {
                let tn = Self::var(&self.ground, n, out_level)?;
                let tn1 = Self::var(&self.ground, n + 1, out_level)?;
                tn.sub(&tn1.scale(&xs.x(n, &self.ground)?)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::zero(&self.ground, out_level);
        for (mono, c) in &self.terms {
            let mut img = Self::constant(c.clone(), out_level);
            for (n, &a) in mono.iter().enumerate() {
                if a > 0 {
                    img = img.mul(&images[n].pow(a)?)?;
                }
            }
            out = out.add(&img)?;
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &a)| a > 0)
                    .map(|(i, &a)| if a == 1 { format!("t_{}", i + 1) } else { format!("t_{}^{a}", i + 1) })
                    .collect();
                if vars.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", vars.join("*"))
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// JSON form: `{"field": .., "level": N, "terms": [[[a_1, .., a_N], series], ..]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyRepr {
    pub field: FieldRepr,
    pub level: usize,
    pub terms: Vec<(Vec<u32>, SeriesRepr)>,
}

impl MultiPoly {
    pub fn to_repr(&self) -> PolyRepr {
        PolyRepr {
            field: FieldRepr::from_field(&self.ground),
            level: self.level,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.to_repr())).collect(),
        }
    }

    pub fn from_repr(repr: &PolyRepr) -> Result<Self> {
        let field = repr.field.to_field()?;
        let terms = repr
            .terms
            .iter()
            .map(|(m, c)| Ok((m.clone(), HahnSeries::from_repr_in(c, &field)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(&field, repr.level, terms)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let repr: PolyRepr = serde_json::from_str(s)?;
        Self::from_repr(&repr)
    }
}

/// `y'' = t_1 + x_1 t_2 + ⋯ + x_1⋯x_n t_{n+1}`; `n = 0` gives `t_1`.
pub fn build_ydp(n: usize, ground: &Field, xs: &ScalingSequence) -> Result<MultiPoly> {
    let level = n + 1;
    let mut out = MultiPoly::zero(ground, level);
    for i in 0..=n {
        let coeff = HahnSeries::monomial(ground.one(), xs.product_val(i)?);
        out = out.add(&MultiPoly::var(ground, i + 1, level)?.scale(&coeff)?)?;
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct TauIdentity {
    pub n: usize,
    pub lhs: MultiPoly,
    pub rhs: MultiPoly,
    pub holds: bool,
    /// Gauss norm of `τ(y'') − t_1`.
    pub surviving_norm: LogNorm,
    /// `|x_1⋯x_{n+1}|`.
    pub expected_norm: LogNorm,
}

/// Computes `τ(y'')` and compares it with `t_1 − x_1⋯x_{n+1} t_{n+2}`.
pub fn tau_identity_check(n: usize, ground: &Field, xs: &ScalingSequence) -> Result<TauIdentity> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let ydp = build_ydp(n, ground, xs)?;
    let lhs = ydp.apply_tau(xs)?;
    let level = n + 2;
    let t1 = MultiPoly::var(ground, 1, level)?;
    let prod = HahnSeries::monomial(ground.one(), xs.product_val(n + 1)?);
    let rhs = t1.sub(&MultiPoly::var(ground, n + 2, level)?.scale(&prod)?)?;
    let lhs = lhs.with_level(level)?;
    let surviving_norm = lhs.sub(&t1)?.gauss_norm()?;
    let expected_norm = LogNorm::from_val(xs.product_val(n + 1)?);
    Ok(TauIdentity { n, holds: lhs == rhs, lhs, rhs, surviving_norm, expected_norm })
}

#[derive(Clone, Debug)]
pub struct GapCertificate {
    pub n: usize,
    /// `|y'' − y'|`.
    pub achieved: LogNorm,
    /// `|x_1⋯x_n|`.
    pub bound: LogNorm,
    /// `y'' − y'` still carries `x_1⋯x_n t_{n+1}` with its original coefficient.
    pub monomial_untouched: bool,
    pub holds: bool,
}

/// Certifies `|y'' − y'| ≥ |x_1⋯x_n|` for a `y'` in `t_1..t_n` only.
pub fn image_gap_certificate(yprime: &MultiPoly, n: usize, xs: &ScalingSequence) -> Result<GapCertificate> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if yprime.effective_level() > n {
        return Err(Error::invalid(format!(
            "y' uses t_{} but may only use t_1..t_{n}",
            yprime.effective_level()
        )));
    }
    let ground = yprime.ground().clone();
    let ydp = build_ydp(n, &ground, xs)?;
    let diff = ydp.sub(yprime)?;
    let mut mono = vec![0; diff.level()];
    mono[n] = 1;
    let prod = HahnSeries::monomial(ground.one(), xs.product_val(n)?);
    let monomial_untouched = diff.coeff(&mono) == Some(&prod);
    let achieved = diff.gauss_norm()?;
    let bound = LogNorm::from_val(xs.product_val(n)?);
    let holds = monomial_untouched && bound.norm_le(&achieved);
    Ok(GapCertificate { n, achieved, bound, monomial_untouched, holds })
}

#[derive(Clone, Debug)]
pub struct GaussParams {
    pub ground: Field,
    pub max_n: usize,
    pub scaling: ScalingSequence,
}

/// Identity, gap certificates, norm preservation and the contradiction
/// chain `|x_1⋯x_n| > |x_1⋯x_{n+1}| > |λ|` for `n = 1..=max_n`.
pub fn run(params: &GaussParams) -> Result<Report> {
    let GaussParams { ground, max_n, scaling: xs } = params;
    if *max_n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if xs.len() < max_n + 1 {
        return Err(Error::invalid(format!(
            "need x_1..x_{} for n = {max_n}, scaling sequence has {}",
            max_n + 1,
            xs.len()
        )));
    }
    let mut report = Report::new("gauss")
        .config("ground", ground)
        .config("n", max_n)
        .config("scaling", xs.exponents().iter().map(fmt_rational).collect::<Vec<_>>().join(","))
        .config("scaling_bound", fmt_rational(xs.bound()));
    let lambda = xs.lambda_val();
    for n in 1..=*max_n {
        let id = tau_identity_check(n, ground, xs)?;
        report.push(
            Check::new("tau_identity", format!("tau_identity[n={n}]"), "tau(t_1 + x_1 t_2 + ... + x_1...x_n t_{n+1}) = t_1 - x_1...x_{n+1} t_{n+2}")
                .with("n", n)
                .with("lhs", &id.lhs)
                .with("rhs", &id.rhs)
                .with("surviving_val", id.surviving_norm.val())
                .with("expected_val", id.expected_norm.val())
                .with_list("scaling", xs.exponents()[..=n].iter().map(fmt_rational))
                .passed_if(id.holds && id.surviving_norm == id.expected_norm),
        );

        let ydp = build_ydp(n, ground, xs)?;
        let candidates = [
            ("0", MultiPoly::zero(ground, n)),
            ("t_1", MultiPoly::var(ground, 1, n)?),
            ("y''_{n-1}", build_ydp(n - 1, ground, xs)?),
        ];
        for (label, yprime) in candidates {
            let cert = image_gap_certificate(&yprime, n, xs)?;
            report.push(
                Check::new("image_gap", format!("image_gap[n={n},y'={label}]"), "|y'' - y'| >= |x_1...x_n| for y' in k[t_1..t_n]")
                    .with("n", n)
                    .with("achieved_val", cert.achieved.val())
                    .with("bound_val", cert.bound.val())
                    .with("monomial_untouched", cert.monomial_untouched)
                    .passed_if(cert.holds),
            );
        }

        for (label, poly) in [("y''", ydp.clone()), ("y''^2", ydp.mul(&ydp)?)] {
            let before = poly.gauss_norm()?;
            let after = poly.apply_tau(xs)?.gauss_norm()?;
            report.push(
                Check::new("norm_preservation", format!("norm_preservation[n={n},{label}]"), "|tau(P)| = |P| (Gauss norm)")
                    .with("before_val", before.val())
                    .with("after_val", after.val())
                    .passed_if(before == after),
            );
        }

        let vals = [xs.product_val(n)?, xs.product_val(n + 1)?, lambda.clone()];
        report.push(
            Check::new("contradiction_skeleton", format!("contradiction[n={n}]"), "|x_1...x_n| > |x_1...x_{n+1}| > |lambda|")
                .with_list("vals", vals.iter().map(fmt_rational))
                .passed_if(vals[0] < vals[1] && vals[1] < vals[2]),
        );
    }
    report.derive("lambda_val", fmt_rational(&lambda));
    report.derive_list(
        "product_vals",
        (1..=max_n + 1).map(|n| xs.product_val(n).map(|v| fmt_rational(&v))).collect::<Result<Vec<_>>>()?,
    );
    Ok(report)
}
