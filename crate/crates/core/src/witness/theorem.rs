//! The type-4 point of the Berkovich line over `k((t))` built from
//! `α_n = Σ_{i≤n} c_i t^{d_i/p^i}` and the exponent bookkeeping showing that
//! the Kähler seminorm of `dt` collapses.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::berkovich::{
    classification_entry, declaration_entries, ef_table_entry, nested_check_entry, Classification, Disc,
    DiscChain, Intersection, LimitDeclaration, PointType,
};
use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::numerics::{check_prime, fmt_rational, pow_big, rat_int, ExtRational};
use crate::report::{Check, Report};
use crate::series::HahnSeries;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Formula,
    UserSupplied,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Formula => "formula",
            Provenance::UserSupplied => "user",
        })
    }
}

/// `d_0 = 1, d_1, …, d_N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DSequence {
    p: u64,
    d: Vec<BigInt>,
    provenance: Provenance,
}

/// `d_i = 1 + Σ_{j=1}^{i} p^j (i + 1 − j)`.
pub fn d_formula(p: u64, i: u32) -> BigInt {
    let mut out = BigInt::one();
    for j in 1..=i {
        out += pow_big(p, j) * BigInt::from(i + 1 - j);
    }
    out
}

impl DSequence {
    pub fn formula(p: u64, n: usize) -> Result<Self> {
        check_prime(p)?;
        if n == 0 {
            return Err(Error::invalid("need N >= 1"));
        }
        let d = (0..=n as u32).map(|i| d_formula(p, i)).collect();
        Ok(DSequence { p, d, provenance: Provenance::Formula })
    }

    /// `entries` are `d_1..d_N`; `d_0 = 1` is prepended. Only positivity is
    /// enforced here, the invariants are reported by [`DSequence::invariant_checks`].
    pub fn user(p: u64, entries: Vec<BigInt>) -> Result<Self> {
        check_prime(p)?;
        if entries.is_empty() {
            return Err(Error::invalid("need at least d_1"));
        }
        if let Some(i) = entries.iter().position(|x| !x.is_positive()) {
            return Err(Error::invalid(format!("d_{} must be a positive integer", i + 1)));
        }
        let mut d = vec![BigInt::one()];
        d.extend(entries);
        Ok(DSequence { p, d, provenance: Provenance::UserSupplied })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Largest index `N`.
    pub fn len(&self) -> usize {
        self.d.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn d(&self, i: usize) -> &BigInt {
        &self.d[i]
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.d
    }

    /// `p^{-i} d_i`.
    pub fn exponent(&self, i: usize) -> BigRational {
        BigRational::new(self.d[i].clone(), pow_big(self.p, i as u32))
    }

    /// `p²/(p−1)²`, the supremum of `p^{-i} d_i` for the formula sequence.
    pub fn bound(&self) -> BigRational {
        let p = BigInt::from(self.p);
        let pm1 = &p - 1;
        BigRational::new(&p * &p, &pm1 * &pm1)
    }

    /// `d_{i+1} − p·d_i`.
    pub fn increment(&self, i: usize) -> BigInt {
        &self.d[i + 1] - BigInt::from(self.p) * &self.d[i]
    }

    /// `p^{-i}[(i+1)p/(p−1) + p/(p−1)² − 1]`, which equals the gap
    /// `p²/(p−1)² − p^{-i} d_i` for the formula sequence.
    pub fn supremum_gap_closed_form(&self, i: usize) -> BigRational {
        let p = rat_int(self.p);
        let pm1 = &p - rat_int(1);
        let bracket = rat_int(i as u64 + 1) * &p / &pm1 + &p / (&pm1 * &pm1) - rat_int(1);
        bracket / rat_int(pow_big(self.p, i as u32))
    }

    /// Conditions (a)–(c), plus the closed forms when the sequence comes
    /// from the formula.
    pub fn invariant_checks(&self) -> Vec<Check> {
        let p = BigInt::from(self.p);
        let n = self.len();
        let mut out = Vec::new();

        let divisible = (1..=n).find(|&i| self.d[i].is_multiple_of(&p));
        let mut a = Check::new("d_sequence", "d_sequence[a]", "p does not divide d_i")
            .with("condition", "a")
            .with("p", self.p)
            .with_list("d", &self.d[1..]);
        if let Some(i) = divisible {
            a = a.with("first_violation", i);
        }
        out.push(a.passed_if(divisible.is_none()));

        let incs: Vec<BigInt> = (0..n).map(|i| self.increment(i)).collect();
        let b_ok = incs.iter().all(|x| x.is_positive()) && incs.windows(2).all(|w| w[0] <= w[1]);
        out.push(
            Check::new("d_sequence", "d_sequence[b]", "d_{i+1} - p d_i > 0 and nondecreasing (tends to infinity)")
                .with("condition", "b")
                .with("p", self.p)
                .with_list("d", &self.d)
                .with_list("increments", &incs)
                .passed_if(b_ok),
        );

        let exps: Vec<BigRational> = (0..=n).map(|i| self.exponent(i)).collect();
        let bound = self.bound();
        let c_ok = exps.windows(2).all(|w| w[0] < w[1]) && exps.iter().all(|e| e < &bound);
        out.push(
            Check::new("d_sequence", "d_sequence[c]", "p^{-i} d_i strictly increasing and bounded by p^2/(p-1)^2")
                .with("condition", "c")
                .with("p", self.p)
                .with_list("d", &self.d)
                .with_list("scaled", exps.iter().map(fmt_rational))
                .with("bound", fmt_rational(&bound))
                .passed_if(c_ok),
        );

        if self.provenance == Provenance::Formula {
            let closed: Vec<BigInt> = (0..n).map(|i| BigInt::from(1 + self.p * i as u64)).collect();
            out.push(
                Check::new("d_sequence", "d_sequence[closed_form]", "d_{i+1} - p d_i = 1 + p i")
                    .with("condition", "closed_form")
                    .with("p", self.p)
                    .with_list("d", &self.d)
                    .with_list("increments", &incs)
                    .passed_if(closed == incs),
            );
            let gaps: Vec<BigRational> = exps.iter().map(|e| &bound - e).collect();
            let closed_gaps: Vec<BigRational> = (0..=n).map(|i| self.supremum_gap_closed_form(i)).collect();
            let sup_ok = gaps == closed_gaps && gaps.iter().all(|g| g.is_positive());
            out.push(
                Check::new(
                    "d_sequence",
                    "d_sequence[supremum]",
                    "p^2/(p-1)^2 - p^{-i} d_i = p^{-i}((i+1)p/(p-1) + p/(p-1)^2 - 1) > 0, which tends to 0",
                )
                .with("condition", "supremum")
                .with("p", self.p)
                .with_list("d", &self.d)
                .with("bound", fmt_rational(&bound))
                .with_list("gaps", gaps.iter().map(fmt_rational))
                .passed_if(sup_ok),
            );
        }
        out
    }

    pub fn invariants_hold(&self) -> bool {
        self.invariant_checks().iter().all(|c| !c.is_failure())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoeffMode {
    /// `c_i = 1` in `GF(p)`.
    Ones,
    /// `c_i = g^i` in `GF(p^m)` with `g` the field generator.
    GeneratorPowers { degree: u32 },
}

impl CoeffMode {
    pub fn field(&self, p: u64) -> Result<Field> {
        match self {
            CoeffMode::Ones => Field::prime(p),
            CoeffMode::GeneratorPowers { degree } => Field::galois(p, *degree),
        }
    }

    pub fn coefficients(&self, field: &Field, count: usize) -> Result<Vec<FieldElement>> {
        match self {
            CoeffMode::Ones => Ok(vec![field.one(); count]),
            CoeffMode::GeneratorPowers { .. } => {
                let g = field.generator()?;
                let mut out = Vec::with_capacity(count);
                let mut c = field.one();
                for _ in 0..count {
                    out.push(c.clone());
                    c = c.mul(&g);
                }
                Ok(out)
            }
        }
    }
}

impl fmt::Display for CoeffMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffMode::Ones => f.write_str("ones"),
            CoeffMode::GeneratorPowers { degree } => write!(f, "generator-powers:{degree}"),
        }
    }
}

impl FromStr for CoeffMode {
    type Err = Error;

    /// `ones`, `generator-powers` (degree 2) or `generator-powers:m`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "ones" => Ok(CoeffMode::Ones),
            None if s == "generator-powers" => Ok(CoeffMode::GeneratorPowers { degree: 2 }),
            Some(("generator-powers", m)) => {
                let degree: u32 = m.parse().map_err(|_| Error::invalid(format!("bad degree {m:?}")))?;
                if degree == 0 {
                    return Err(Error::invalid("degree must be positive"));
                }
                Ok(CoeffMode::GeneratorPowers { degree })
            }
            _ => Err(Error::invalid(format!("unknown coefficient mode {s:?}"))),
        }
    }
}

/// `α_n = Σ_{i=0}^{n} c_i t^{d_i/p^i}`.
pub fn alpha(ds: &DSequence, n: usize, coeffs: &[FieldElement]) -> Result<HahnSeries> {
    if n > ds.len() {
        return Err(Error::invalid(format!("n = {n} exceeds N = {}", ds.len())));
    }
    let coeffs = coeffs
        .get(..=n)
        .ok_or_else(|| Error::invalid(format!("need coefficients c_0..c_{n}")))?;
    if let Some(i) = coeffs.iter().position(FieldElement::is_zero) {
        return Err(Error::invalid(format!("c_{i} is zero")));
    }
    let field = coeffs[0].field().clone();
    let terms = (0..=n).map(|i| (ds.exponent(i), coeffs[i].clone()));
    HahnSeries::from_terms(&field, terms, ExtRational::Infinity)
}

/// `α^{p^n}` by repeated multiplication, independent of the Frobenius code path.
pub fn ring_p_power(alpha: &HahnSeries, p: u64, n: u32) -> Result<HahnSeries> {
    let mut x = alpha.clone();
    for _ in 0..n {
        let base = x.clone();
        for _ in 1..p {
            x = x.checked_mul(&base)?;
        }
    }
    Ok(x)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub exponents: Vec<BigRational>,
    pub all_integer: bool,
    /// Exponents not divisible by `p`.
    pub prime_to_p: Vec<BigInt>,
    pub matches_frobenius: bool,
}

impl Decomposition {
    pub fn holds(&self, d_n: &BigInt) -> bool {
        self.all_integer && self.matches_frobenius && self.prime_to_p == [d_n.clone()]
    }
}

/// Splits `α_n^{p^n}` into `p`-th powers and the single remaining monomial.
pub fn pth_power_decomposition(alpha_n: &HahnSeries, p: u64, n: u32) -> Result<Decomposition> {
    let ring = ring_p_power(alpha_n, p, n)?;
    let frob = alpha_n.frobenius_iter(n)?;
    let exponents: Vec<BigRational> = ring.terms().iter().map(|t| t.exp.clone()).collect();
    let all_integer = exponents.iter().all(BigRational::is_integer);
    let pb = BigInt::from(p);
    let prime_to_p = exponents
        .iter()
        .filter(|e| e.is_integer() && !e.numer().is_multiple_of(&pb))
        .map(|e| e.numer().clone())
        .collect();
    Ok(Decomposition { exponents, all_integer, prime_to_p, matches_frobenius: ring == frob })
}

/// `e_n = d_{n+1}/p − d_n + 1`.
pub fn kahler_exponent(ds: &DSequence, n: usize) -> BigRational {
    BigRational::new(ds.d(n + 1).clone(), BigInt::from(ds.p())) - rat_int(ds.d(n).clone()) + rat_int(1)
}

/// `(1 + p n + p)/p`.
pub fn kahler_closed_form(p: u64, n: usize) -> BigRational {
    BigRational::new(BigInt::from(1 + p * n as u64 + p), BigInt::from(p))
}

#[derive(Clone, Debug)]
pub struct TheoremParams {
    pub p: u64,
    pub n: usize,
    pub mode: CoeffMode,
    /// `d_1..d_N`; the formula sequence when absent.
    pub user_d: Option<Vec<BigInt>>,
}

impl TheoremParams {
    pub fn new(p: u64, n: usize, mode: CoeffMode) -> Self {
        TheoremParams { p, n, mode, user_d: None }
    }
}

pub fn run(params: &TheoremParams) -> Result<Report> {
    let TheoremParams { p, n: big_n, mode, user_d } = params;
    let (p, big_n) = (*p, *big_n);
    check_prime(p)?;
    if big_n < 3 {
        return Err(Error::invalid("the theorem witness needs N >= 3"));
    }
    let ds = match user_d {
        Some(d) => {
            if d.len() != big_n {
                return Err(Error::invalid(format!("expected {big_n} user d values, got {}", d.len())));
            }
            DSequence::user(p, d.clone())?
        }
        None => DSequence::formula(p, big_n)?,
    };
    let field = mode.field(p)?;
    let mut report = Report::new("theorem")
        .config("p", p)
        .config("n", big_n)
        .config("coeffs", mode)
        .config("field", &field)
        .config("d_provenance", ds.provenance());
    report.derive_list("d", ds.entries());

    for c in ds.invariant_checks() {
        report.push(c);
    }
    if !report.passed() {
        return Ok(report);
    }

    let coeffs = mode.coefficients(&field, big_n + 1)?;
    let alphas = (0..=big_n).map(|i| alpha(&ds, i, &coeffs)).collect::<Result<Vec<_>>>()?;
    let bound = ds.bound();
    let pb = BigInt::from(p);

    // r_n = |α_{n+1} − α_n|
    let mut radii = Vec::with_capacity(big_n);
    for n in 0..big_n {
        let dist = alphas[n + 1].distance(&alphas[n])?;
        let expected = ds.exponent(n + 1);
        report.push(
            Check::new("radius_gap", format!("radius_gap[n={n}]"), "r_n = |alpha_{n+1} - alpha_n| = |t|^{p^{-n-1} d_{n+1}}")
                .with("n", n)
                .with("p", p)
                .with("d_next", ds.d(n + 1))
                .with("distance_val", dist.val())
                .with("expected_val", fmt_rational(&expected))
                .passed_if(dist.val() == &ExtRational::Finite(expected.clone())),
        );
        radii.push(expected);
    }
    let monotone = radii.windows(2).all(|w| w[0] < w[1]) && radii.iter().all(|r| r < &bound);
    report.push(
        Check::new("radii_monotone", "radii_monotone", "r_n strictly decreasing with limit at least |t|^{p^2/(p-1)^2} > 0")
            .with_list("radius_vals", radii.iter().map(fmt_rational))
            .with("bound", fmt_rational(&bound))
            .passed_if(monotone),
    );
    report.derive_list("radius_vals", radii.iter().map(fmt_rational));

    // |Frob^n α_m − Frob^n α_n| = r_n^{p^n} for n < m ≤ N.
    let mut frob_table: Vec<Vec<HahnSeries>> = Vec::with_capacity(big_n);
    for n in 0..big_n {
        let row = alphas.iter().map(|a| a.frobenius_iter(n as u32)).collect::<Result<Vec<_>>>()?;
        frob_table.push(row);
    }
    let mut tensor_achieved: Vec<Vec<ExtRational>> = vec![Vec::new(); big_n];
    for n in 0..big_n {
        let expected = BigRational::new(ds.d(n + 1).clone(), pb.clone());
        for m in n + 1..=big_n {
            let dist = frob_table[n][m].distance(&frob_table[n][n])?;
            tensor_achieved[n].push(dist.val().clone());
            report.push(
                Check::new(
                    "frobenius_gap",
                    format!("frobenius_gap[n={n},m={m}]"),
                    "|x^{p^n} - alpha_n^{p^n}| = r_n^{p^n}, with alpha_m standing in for x",
                )
                .with("n", n)
                .with("m", m)
                .with("p", p)
                .with("radius_val", fmt_rational(&radii[n]))
                .with("distance_val", dist.val())
                .with("expected_val", fmt_rational(&expected))
                .passed_if(dist.val() == &ExtRational::Finite(expected.clone())),
            );
        }
    }

    for (n, a) in alphas.iter().enumerate() {
        let dec = pth_power_decomposition(a, p, n as u32)?;
        report.push(
            Check::new(
                "pth_power_decomposition",
                format!("pth_power_decomposition[n={n}]"),
                "in alpha_n^{p^n} = sum c_i^{p^n} t^{p^{n-i} d_i} only t^{d_n} is not a p-th power",
            )
            .with("n", n)
            .with("p", p)
            .with("d_n", ds.d(n))
            .with_list("exponents", dec.exponents.iter().map(fmt_rational))
            .with_list("prime_to_p", &dec.prime_to_p)
            .with("matches_frobenius", dec.matches_frobenius)
            .passed_if(dec.holds(ds.d(n))),
        );
    }

    let mut kahler = Vec::with_capacity(big_n);
    for (n, r) in radii.iter().enumerate() {
        let e = kahler_exponent(&ds, n);
        let via_radius = rat_int(pow_big(p, n as u32)) * r + rat_int(1) - rat_int(ds.d(n).clone());
        let closed = kahler_closed_form(p, n);
        report.push(
            Check::new("kahler_bound", format!("kahler_bound[n={n}]"), "||d(t)|| <= r_n^{p^n} |t|^{1-d_n} = |t|^{d_{n+1}/p - d_n + 1}")
                .with("n", n)
                .with("p", p)
                .with("d_n", ds.d(n))
                .with("d_next", ds.d(n + 1))
                .with("exponent", fmt_rational(&e))
                .with("via_radius", fmt_rational(&via_radius))
                .with("closed_form", fmt_rational(&closed))
                .passed_if(e == via_radius && e == closed),
        );
        kahler.push(e);
    }
    let steps_one = kahler.windows(2).all(|w| &w[1] - &w[0] == rat_int(1));
    report.push(
        Check::new("kahler_divergence", "kahler_divergence", "e_{n+1} - e_n = 1, so the bound exponents diverge and ||d(t)|| = 0")
            .with_list("exponents", kahler.iter().map(fmt_rational))
            .passed_if(steps_one),
    );
    report.derive_list("kahler_exponents", kahler.iter().map(fmt_rational));

    let mut tensor_bounds = Vec::with_capacity(big_n);
    for (n, achieved) in tensor_achieved.iter().enumerate() {
        let bound_val = rat_int(pow_big(p, n as u32)) * &radii[n];
        let bound_ext = ExtRational::Finite(bound_val.clone());
        report.push(
            Check::new("tensor_bound", format!("tensor_bound[n={n}]"), "||1 (x) t^{p^n} - a_n|| <= r_n^{p^n}, a_n = alpha_n^{p^n}")
                .with("n", n)
                .with("bound_val", fmt_rational(&bound_val))
                .with_list("achieved_vals", achieved)
                .passed_if(achieved.iter().all(|a| a >= &bound_ext)),
        );
        tensor_bounds.push(bound_val);
    }
    let increments: Vec<BigRational> = tensor_bounds.windows(2).map(|w| &w[1] - &w[0]).collect();
    let diverges = increments.iter().all(|x| x.is_positive()) && increments.windows(2).all(|w| w[0] <= w[1]);
    report.push(
        Check::new(
            "tensor_bound_divergence",
            "tensor_bound_divergence",
            "p^n val(r_n) = d_{n+1}/p strictly increasing with nondecreasing steps, so ||T^{p^n}|| -> 0",
        )
        .with_list("bound_vals", tensor_bounds.iter().map(fmt_rational))
        .passed_if(diverges),
    );

    let chain = DiscChain::new(
        (0..big_n).map(|n| Disc::new(alphas[n].clone(), ExtRational::Finite(radii[n].clone()))).collect(),
        Some(LimitDeclaration {
            limit_val: ExtRational::Finite(bound.clone()),
            centers_stabilize: false,
            algebraic_intersection: Intersection::Empty,
        }),
    );
    let nested = chain.check_nested()?;
    let nested_ok = nested.holds();
    report.push(nested_check_entry(&chain, &nested, "E_n = closed disc of radius r_n about alpha_n; E_{n+1} inside E_n"));
    if nested_ok {
        let decl = chain.declared.as_ref().expect("declared above");
        for c in declaration_entries(decl) {
            report.push(c);
        }
        let class = chain.classify()?;
        report.push(classification_entry(&chain, class, Some(PointType::Four)));
        if let Classification::Type(t) = class {
            report.derive("type", t.number());
        }
    }
    report.push(ef_table_entry());
    Ok(report)
}
