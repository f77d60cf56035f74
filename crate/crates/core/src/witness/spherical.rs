//! Successive approximation of preimages under a continuous `k`-linear
//! endomorphism `τ` of `k((t))` determined by `τ(t)`.
//!
//! Each step kills the lowest term `b t^j` of the residual `x − τ(y)` by
//! adding `b u^{-j} t^j` to `y`, where `u` is the leading coefficient of
//! `τ(t)`. Since `val τ(t) = 1` the residual valuation goes up every step.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::numerics::{fmt_rational, rat_int, ExtRational};
use crate::report::{Check, Report};
use crate::series::HahnSeries;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesEndomorphism {
    image_of_t: HahnSeries,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Compatibility {
    pub val: Option<BigRational>,
    pub integer_exponents: bool,
    pub leading_coeff: Option<FieldElement>,
    /// `τ(c) = c` on the sampled constants.
    pub residue_identity: bool,
    pub samples: usize,
}

impl Compatibility {
    pub fn holds(&self) -> bool {
        self.val.as_ref() == Some(&rat_int(1)) && self.integer_exponents && self.residue_identity
    }
}

impl SeriesEndomorphism {
    pub fn new(image_of_t: HahnSeries) -> Self {
        SeriesEndomorphism { image_of_t }
    }

    pub fn identity(field: &Field) -> Self {
        Self::new(HahnSeries::t(field))
    }

    pub fn image_of_t(&self) -> &HahnSeries {
        &self.image_of_t
    }

    pub fn field(&self) -> &Field {
        self.image_of_t.field()
    }

    /// `val τ(t) = 1` and `τ` acts as the identity on residues.
    pub fn compat_check(&self) -> Compatibility {
        let lead = self.image_of_t.leading_term();
        let val = lead.map(|t| t.exp.clone());
        let integer_exponents = self.image_of_t.has_integer_exponents()
            && self.image_of_t.tail().finite().is_none_or(BigRational::is_integer);
        let samples = sample_constants(self.field());
        let residue_identity = samples.iter().all(|c| {
            let f = HahnSeries::constant(c.clone());
            self.apply(&f, 1).map(|img| img == f.truncate(&ExtRational::int(1))).unwrap_or(false)
        });
        Compatibility {
            val,
            integer_exponents,
            leading_coeff: lead.map(|t| t.coeff.clone()),
            residue_identity,
            samples: samples.len(),
        }
    }

    /// `τ(f) = Σ a_i τ(t)^i` modulo `t^precision`.
    pub fn apply(&self, f: &HahnSeries, precision: i64) -> Result<HahnSeries> {
        if f.field() != self.field() {
            return Err(Error::MixedFields(f.field().to_string(), self.field().to_string()));
        }
        let target = ExtRational::int(precision);
        if f.tail() < &target {
            return Err(Error::indeterminate(format!(
                "input known to O(t^{}), precision {precision} requested",
                f.tail()
            )));
        }
        if !f.has_integer_exponents() {
            return Err(Error::invalid("endomorphisms act on Laurent series; exponents must be integers"));
        }
        if self.image_of_t.leading_term().map(|t| &t.exp) != Some(&rat_int(1)) {
            return Err(Error::invalid("tau(t) must have valuation exactly 1"));
        }
        let mut out = HahnSeries::big_o(self.field(), rat_int(precision));
        for term in f.terms() {
            let i = term.exp.numer();
            if term.exp >= rat_int(precision) {
                break;
            }
            let power = self.tau_t_power(i, precision)?;
            out = out.checked_add(&power.scale(&term.coeff))?;
        }
        Ok(out.truncate(&target))
    }

    /// `τ(t)^i` modulo `t^precision`.
    fn tau_t_power(&self, i: &BigInt, precision: i64) -> Result<HahnSeries> {
        let target = ExtRational::int(precision);
        let k = u64::try_from(i.magnitude()).map_err(|_| Error::invalid("exponent too large"))?;
        if i >= &BigInt::from(0) {
            self.image_of_t.pow_truncated(k, &target)
        } else {
            let k_i64 = i64::try_from(k).map_err(|_| Error::invalid("exponent too large"))?;
            let inv = self.image_of_t.invert(&ExtRational::int(precision + k_i64))?;
            Ok(inv.pow(k)?.truncate(&target))
        }
    }
}

fn sample_constants(field: &Field) -> Vec<FieldElement> {
    match field.elements(64) {
        Some(all) => all,
        None => {
            let mut v: Vec<FieldElement> = (-3..=3).map(|n| field.from_int(n)).collect();
            if let Ok(g) = field.generator() {
                v.push(g);
            }
            if let Ok(half) = field.from_rational(&BigRational::new(1.into(), 2.into())) {
                v.push(half);
            }
            v
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyStep {
    pub step: usize,
    pub exponent: BigInt,
    pub digit: FieldElement,
    /// `val(x − τ(y))` after this step; a lower bound when `residual_exact`
    /// is false (only the error term is left).
    pub residual_val: ExtRational,
    pub residual_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GreedyTrace {
    pub steps: Vec<GreedyStep>,
    pub initial_val: ExtRational,
}

impl GreedyTrace {
    pub fn residual_vals(&self) -> Vec<ExtRational> {
        self.steps.iter().map(|s| s.residual_val.clone()).collect()
    }

    pub fn strictly_increasing(&self) -> bool {
        let mut prev = self.initial_val.clone();
        for s in &self.steps {
            if s.residual_val <= prev && !(s.residual_val.is_infinite() && prev.is_infinite()) {
                return false;
            }
            prev = s.residual_val.clone();
        }
        true
    }

    pub fn final_val(&self) -> &ExtRational {
        self.steps.last().map(|s| &s.residual_val).unwrap_or(&self.initial_val)
    }
}

/// Up to `steps` digits of a preimage of `x`.
///
/// With `precision = None` everything is computed exactly, which needs exact
/// inputs and non-negative digit exponents. Otherwise all series are kept
/// modulo `t^precision` and the loop stops once the residual is only an
/// error term.
pub fn greedy_preimage(
    tau: &SeriesEndomorphism,
    x: &HahnSeries,
    steps: usize,
    precision: Option<i64>,
) -> Result<(HahnSeries, GreedyTrace)> {
    let compat = tau.compat_check();
    if !compat.holds() {
        return Err(Error::invalid(format!(
            "tau is not compatible: val tau(t) = {}",
            compat.val.as_ref().map(fmt_rational).unwrap_or_else(|| "inf".into())
        )));
    }
    if !x.has_integer_exponents() {
        return Err(Error::invalid("x must be a Laurent series"));
    }
    let u = compat.leading_coeff.expect("compatible tau has a leading term");
    let field = tau.field().clone();
    let x = match precision {
        Some(p) => {
            if x.tail() < &ExtRational::int(p) {
                return Err(Error::indeterminate(format!("x is known to O(t^{}) only, below precision {p}", x.tail())));
            }
            x.truncate(&ExtRational::int(p))
        }
        None => {
            if !x.is_exact() || !tau.image_of_t().is_exact() {
                return Err(Error::invalid("exact mode needs exact tau(t) and x; pass a precision"));
            }
            x.clone()
        }
    };
    let mut y = HahnSeries::zero(&field);
    let mut residual = x.clone();
    let initial_val = lower_val(&residual);
    let mut trace = GreedyTrace { steps: Vec::new(), initial_val };
    for step in 1..=steps {
        let Some(lead) = residual.leading_term().cloned() else {
            break;
        };
        let j = lead.exp.numer().clone();
        let digit = lead.coeff.mul(&u.pow_signed(&-&j)?);
        let piece = HahnSeries::monomial(digit.clone(), lead.exp.clone());
        let image = match precision {
            Some(p) => tau.apply(&piece, p)?,
            None => {
                if j < BigInt::from(0) {
                    return Err(Error::invalid("exact mode cannot expand tau(t)^j for negative j; pass a precision"));
                }
                let k = u64::try_from(&j).map_err(|_| Error::invalid("exponent too large"))?;
                tau.image_of_t().pow(k)?.scale(&digit)
            }
        };
        y = y.checked_add(&piece)?;
        let prev = lower_val(&residual);
        residual = residual.checked_sub(&image)?;
        let val = lower_val(&residual);
        if val <= prev {
            return Err(Error::invalid(format!("greedy step {step} stalled at val {val}")));
        }
        trace.steps.push(GreedyStep {
            step,
            exponent: j,
            digit,
            residual_exact: residual.leading_term().is_some() || residual.is_exact(),
            residual_val: val,
        });
    }
    Ok((y, trace))
}

fn lower_val(s: &HahnSeries) -> ExtRational {
    match s.leading_term() {
        Some(t) => ExtRational::Finite(t.exp.clone()),
        None => s.tail().clone(),
    }
}

#[derive(Clone, Debug)]
pub struct SphericalParams {
    pub tau: SeriesEndomorphism,
    pub x: HahnSeries,
    pub steps: usize,
    pub precision: Option<i64>,
}

pub fn run(params: &SphericalParams) -> Result<Report> {
    let SphericalParams { tau, x, steps, precision } = params;
    let mut report = Report::new("spherical")
        .config("field", tau.field())
        .config("tau", tau.image_of_t())
        .config("x", x)
        .config("steps", steps)
        .config("precision", precision.map(|p| p.to_string()).unwrap_or_else(|| "exact".into()));
    let compat = tau.compat_check();
    report.push(
        Check::new("compatibility", "compatibility", "val tau(t) = 1 and tau induces the identity on residues")
            .with("val", compat.val.as_ref().map(fmt_rational).unwrap_or_else(|| "inf".into()))
            .with("integer_exponents", compat.integer_exponents)
            .with("residue_identity", compat.residue_identity)
            .with("samples", compat.samples)
            .passed_if(compat.holds()),
    );
    if !compat.holds() {
        return Ok(report);
    }
    let (y, trace) = greedy_preimage(tau, x, *steps, *precision)?;
    report.push(
        Check::new("greedy_trace", "greedy_trace", "each step removes the lowest term of x - tau(y), so residual vals strictly increase")
            .with("initial_val", &trace.initial_val)
            .with_list("exponents", trace.steps.iter().map(|s| &s.exponent))
            .with_list("digits", trace.steps.iter().map(|s| &s.digit))
            .with_list(
                "residual_vals",
                trace
                    .steps
                    .iter()
                    .map(|s| if s.residual_exact { s.residual_val.to_string() } else { format!(">={}", s.residual_val) }),
            )
            .passed_if(trace.strictly_increasing()),
    );
    let needed = trace.initial_val.add_rational(&rat_int(*steps as u64));
    let achieved = trace.final_val().clone();
    report.push(
        Check::new("greedy_bound", "greedy_bound", "val(x - tau(y_N)) >= val(x) + N")
            .with("initial_val", &trace.initial_val)
            .with("steps", steps)
            .with("steps_taken", trace.steps.len())
            .with("final_val", &achieved)
            .with("needed_val", &needed)
            .passed_if(achieved >= needed),
    );
    report.derive("y", &y);
    report.derive_list("residual_vals", trace.residual_vals());
    Ok(report)
}
