//! Re-validation of a saved [`Report`] from its recorded exact values.
//!
//! Nothing here rebuilds a series or a polynomial: every check is re-decided
//! from the numbers written into it, and the recomputed status must match
//! the recorded one.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::Signed;

use crate::berkovich::{ef_table, PointType};
use crate::error::{Error, Result};
use crate::numerics::{fmt_rational, parse_rational, pow_big, rat_int, ExtRational};
use crate::report::{Check, Report, Status, SCHEMA};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Confirmed,
    Mismatch(String),
    /// The recorded values are not enough to re-decide the check.
    Unverifiable,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Confirmed => f.write_str("confirmed"),
            Outcome::Mismatch(why) => write!(f, "mismatch: {why}"),
            Outcome::Unverifiable => f.write_str("unverifiable"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub outcome: Outcome,
}

#[derive(Clone, Debug)]
pub struct Verification {
    pub checks: Vec<CheckOutcome>,
    pub verdict_consistent: bool,
    pub schema_ok: bool,
}

impl Verification {
    pub fn ok(&self) -> bool {
        self.verdict_consistent && self.schema_ok && self.checks.iter().all(|c| !matches!(c.outcome, Outcome::Mismatch(_)))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{:<40} {}\n", c.name, c.outcome));
        }
        if !self.schema_ok {
            out.push_str("schema: unsupported\n");
        }
        out.push_str(&format!("verdict consistent: {}\n", self.verdict_consistent));
        out.push_str(&format!("verification: {}\n", if self.ok() { "OK" } else { "FAILED" }));
        out
    }
}

pub fn verify_report(report: &Report) -> Verification {
    let checks = report
        .checks
        .iter()
        .map(|c| CheckOutcome { name: c.name.clone(), outcome: verify_check(c) })
        .collect();
    Verification {
        checks,
        verdict_consistent: report.verdict == report.computed_verdict(),
        schema_ok: report.schema == SCHEMA,
    }
}

pub fn verify_check(check: &Check) -> Outcome {
    if check.kind == "assumption" {
        return if check.status == Status::Assumed {
            Outcome::Confirmed
        } else {
            Outcome::Mismatch("declarations must carry status assumed".into())
        };
    }
    if check.status == Status::Assumed {
        return Outcome::Mismatch(format!("only declarations may be assumed, not {}", check.kind));
    }
    let decided = match check.kind.as_str() {
        "d_sequence" => d_sequence(check),
        "radius_gap" => radius_gap(check),
        "radii_monotone" => radii_monotone(check),
        "frobenius_gap" => frobenius_gap(check),
        "pth_power_decomposition" => decomposition(check),
        "kahler_bound" => kahler_bound(check),
        "kahler_divergence" => steps_of_one(check),
        "tensor_bound" => tensor_bound(check),
        "tensor_bound_divergence" => tensor_divergence(check),
        "chain_nested" => chain_nested(check),
        "classification" => classification(check),
        "ef_table" => ef(check),
        "tau_identity" => tau_identity(check),
        "image_gap" => image_gap(check),
        "norm_preservation" => norm_preservation(check),
        "contradiction_skeleton" => rationals(check, "vals").map(|v| strictly_increasing(&v)),
        "compatibility" => compatibility(check),
        "greedy_trace" => greedy_trace(check),
        "greedy_bound" => greedy_bound(check),
        _ => return Outcome::Unverifiable,
    };
    match decided {
        Ok(pass) => {
            let recorded = check.status == Status::Pass;
            if pass == recorded {
                Outcome::Confirmed
            } else {
                Outcome::Mismatch(format!(
                    "recorded {} but the values imply {}",
                    check.status,
                    if pass { "PASS" } else { "FAIL" }
                ))
            }
        }
        Err(e) => Outcome::Mismatch(e.to_string()),
    }
}

fn one<'a>(check: &'a Check, key: &str) -> Result<&'a str> {
    check
        .get(key)
        .and_then(|v| v.as_one())
        .ok_or_else(|| Error::invalid(format!("missing value {key:?}")))
}

fn many<'a>(check: &'a Check, key: &str) -> Result<&'a [String]> {
    check
        .get(key)
        .and_then(|v| v.as_many())
        .ok_or_else(|| Error::invalid(format!("missing list {key:?}")))
}

fn rational(check: &Check, key: &str) -> Result<BigRational> {
    parse_rational(one(check, key)?)
}

fn ext(check: &Check, key: &str) -> Result<ExtRational> {
    one(check, key)?.parse()
}

fn integer(check: &Check, key: &str) -> Result<BigInt> {
    one(check, key)?.parse().map_err(|_| Error::invalid(format!("{key:?} is not an integer")))
}

fn small(check: &Check, key: &str) -> Result<u64> {
    one(check, key)?.parse().map_err(|_| Error::invalid(format!("{key:?} is not a small integer")))
}

fn flag(check: &Check, key: &str) -> Result<bool> {
    one(check, key)?.parse().map_err(|_| Error::invalid(format!("{key:?} is not a boolean")))
}

fn rationals(check: &Check, key: &str) -> Result<Vec<BigRational>> {
    many(check, key)?.iter().map(|s| parse_rational(s)).collect()
}

fn integers(check: &Check, key: &str) -> Result<Vec<BigInt>> {
    many(check, key)?
        .iter()
        .map(|s| s.parse().map_err(|_| Error::invalid(format!("{s:?} is not an integer"))))
        .collect()
}

/// `"3/2"`, `"inf"`, or `">=3/2"` for a lower bound.
fn bound_value(s: &str) -> Result<(ExtRational, bool)> {
    match s.strip_prefix(">=") {
        Some(rest) => Ok((rest.parse()?, false)),
        None => Ok((s.parse()?, true)),
    }
}

fn strictly_increasing<T: Ord>(v: &[T]) -> bool {
    v.windows(2).all(|w| w[0] < w[1])
}

fn prime_bound(p: u64) -> BigRational {
    let p = rat_int(p);
    let pm1 = &p - rat_int(1);
    &p * &p / (&pm1 * &pm1)
}

fn d_sequence(check: &Check) -> Result<bool> {
    let p = small(check, "p")?;
    let pb = BigInt::from(p);
    let d = integers(check, "d")?;
    match one(check, "condition")? {
        "a" => Ok(d.iter().all(|x| !x.is_multiple_of(&pb))),
        "b" | "closed_form" => {
            let incs: Vec<BigInt> = d.windows(2).map(|w| &w[1] - &pb * &w[0]).collect();
            if integers(check, "increments")? != incs {
                return Err(Error::invalid("recorded increments differ from d_{i+1} - p d_i"));
            }
            if one(check, "condition")? == "b" {
                Ok(incs.iter().all(|x| x.is_positive()) && incs.windows(2).all(|w| w[0] <= w[1]))
            } else {
                Ok(incs.iter().enumerate().all(|(i, x)| *x == BigInt::from(1 + p * i as u64)))
            }
        }
        "c" => {
            let scaled: Vec<BigRational> =
                d.iter().enumerate().map(|(i, x)| BigRational::new(x.clone(), pow_big(p, i as u32))).collect();
            if rationals(check, "scaled")? != scaled || rational(check, "bound")? != prime_bound(p) {
                return Err(Error::invalid("recorded p^{-i} d_i or bound differ"));
            }
            let bound = prime_bound(p);
            Ok(strictly_increasing(&scaled) && scaled.iter().all(|e| e < &bound))
        }
        "supremum" => {
            let bound = prime_bound(p);
            let gaps: Vec<BigRational> = d
                .iter()
                .enumerate()
                .map(|(i, x)| &bound - BigRational::new(x.clone(), pow_big(p, i as u32)))
                .collect();
            if rationals(check, "gaps")? != gaps {
                return Err(Error::invalid("recorded gaps differ from p^2/(p-1)^2 - p^{-i} d_i"));
            }
            let pr = rat_int(p);
            let pm1 = &pr - rat_int(1);
            let closed = (0..gaps.len()).map(|i| {
                (rat_int(i as u64 + 1) * &pr / &pm1 + &pr / (&pm1 * &pm1) - rat_int(1)) / rat_int(pow_big(p, i as u32))
            });
            Ok(gaps.iter().zip(closed).all(|(g, c)| *g == c && g.is_positive()))
        }
        other => Err(Error::invalid(format!("unknown d-sequence condition {other:?}"))),
    }
}

fn radius_gap(check: &Check) -> Result<bool> {
    let n = small(check, "n")? as u32;
    let p = small(check, "p")?;
    let expected = BigRational::new(integer(check, "d_next")?, pow_big(p, n + 1));
    if rational(check, "expected_val")? != expected {
        return Err(Error::invalid("expected_val is not d_{n+1}/p^{n+1}"));
    }
    Ok(ext(check, "distance_val")? == ExtRational::Finite(expected))
}

fn radii_monotone(check: &Check) -> Result<bool> {
    let radii = rationals(check, "radius_vals")?;
    let bound = rational(check, "bound")?;
    Ok(strictly_increasing(&radii) && radii.iter().all(|r| r < &bound))
}

fn frobenius_gap(check: &Check) -> Result<bool> {
    let n = small(check, "n")? as u32;
    let p = small(check, "p")?;
    let expected = rat_int(pow_big(p, n)) * rational(check, "radius_val")?;
    if rational(check, "expected_val")? != expected {
        return Err(Error::invalid("expected_val is not p^n times the radius val"));
    }
    Ok(ext(check, "distance_val")? == ExtRational::Finite(expected))
}

fn decomposition(check: &Check) -> Result<bool> {
    let p = BigInt::from(small(check, "p")?);
    let exps = rationals(check, "exponents")?;
    let recorded = integers(check, "prime_to_p")?;
    let prime_to_p: Vec<BigInt> = exps
        .iter()
        .filter(|e| e.is_integer() && !e.numer().is_multiple_of(&p))
        .map(|e| e.numer().clone())
        .collect();
    if recorded != prime_to_p {
        return Err(Error::invalid("prime_to_p does not match the recorded exponents"));
    }
    let all_integer = exps.iter().all(BigRational::is_integer);
    Ok(all_integer && flag(check, "matches_frobenius")? && prime_to_p == [integer(check, "d_n")?])
}

fn kahler_bound(check: &Check) -> Result<bool> {
    let n = small(check, "n")?;
    let p = small(check, "p")?;
    let e = BigRational::new(integer(check, "d_next")?, BigInt::from(p)) - rat_int(integer(check, "d_n")?) + rat_int(1);
    if rational(check, "exponent")? != e {
        return Err(Error::invalid("exponent is not d_{n+1}/p - d_n + 1"));
    }
    let closed = BigRational::new(BigInt::from(1 + p * n + p), BigInt::from(p));
    if rational(check, "closed_form")? != closed {
        return Err(Error::invalid("closed_form is not (1 + pn + p)/p"));
    }
    Ok(e == rational(check, "via_radius")? && e == closed)
}

fn steps_of_one(check: &Check) -> Result<bool> {
    let v = rationals(check, "exponents")?;
    Ok(v.windows(2).all(|w| &w[1] - &w[0] == rat_int(1)))
}

fn tensor_bound(check: &Check) -> Result<bool> {
    let bound = ExtRational::Finite(rational(check, "bound_val")?);
    let achieved = many(check, "achieved_vals")?
        .iter()
        .map(|s| s.parse::<ExtRational>())
        .collect::<Result<Vec<_>>>()?;
    Ok(achieved.iter().all(|a| a >= &bound))
}

fn tensor_divergence(check: &Check) -> Result<bool> {
    let v = rationals(check, "bound_vals")?;
    let inc: Vec<BigRational> = v.windows(2).map(|w| &w[1] - &w[0]).collect();
    Ok(inc.iter().all(|x| x.is_positive()) && inc.windows(2).all(|w| w[0] <= w[1]))
}

fn chain_nested(check: &Check) -> Result<bool> {
    let discs = small(check, "discs")? as usize;
    let radii = many(check, "radius_vals")?
        .iter()
        .map(|s| s.parse::<ExtRational>())
        .collect::<Result<Vec<_>>>()?;
    if radii.len() != discs {
        return Err(Error::invalid("radius_vals does not list every disc"));
    }
    let dists = many(check, "distance_vals")?.iter().map(|s| bound_value(s)).collect::<Result<Vec<_>>>()?;
    if dists.len() + 1 > discs {
        return Err(Error::invalid("more distances than consecutive pairs"));
    }
    let complete = dists.len() + 1 == discs;
    let nested = dists.iter().zip(&radii).all(|((d, _), r)| d >= r);
    Ok(complete && nested && strictly_increasing(&radii))
}

fn classification(check: &Check) -> Result<bool> {
    let recorded = one(check, "type")?;
    let computed = match check.get("limit_val") {
        None => "indeterminate".to_string(),
        Some(_) => {
            let limit = ext(check, "limit_val")?;
            let last = ext(check, "last_radius_val")?;
            if !limit.is_infinite() && limit <= last {
                return Err(Error::invalid("declared limit does not exceed the last radius"));
            }
            let stab = flag(check, "centers_stabilize")?;
            let inter = one(check, "algebraic_intersection")?;
            match (&limit, stab, inter) {
                (ExtRational::Infinity, _, _) => "type 1".into(),
                (ExtRational::Finite(v), true, _) if v.is_integer() => "type 2".into(),
                (ExtRational::Finite(_), true, _) => "type 3".into(),
                (ExtRational::Finite(_), false, "empty") => "type 4".into(),
                _ => "indeterminate".into(),
            }
        }
    };
    if computed != recorded {
        return Err(Error::invalid(format!("declaration implies {computed}, report says {recorded}")));
    }
    Ok(match check.get("expected").and_then(|v| v.as_one()) {
        Some(expected) => computed == expected,
        None => computed != "indeterminate",
    })
}

fn ef(check: &Check) -> Result<bool> {
    let table: Vec<String> = PointType::ALL
        .iter()
        .map(|&t| {
            let (e, f) = ef_table(t);
            format!("({e},{f})")
        })
        .collect();
    let types: Vec<String> = PointType::ALL.iter().map(|t| t.number().to_string()).collect();
    Ok(many(check, "ef")? == table.as_slice()
        && many(check, "types")? == types.as_slice()
        && PointType::ALL.iter().all(|&t| {
            let (e, f) = ef_table(t);
            e + f <= 1
        }))
}

fn tau_identity(check: &Check) -> Result<bool> {
    let n = small(check, "n")? as usize;
    let scaling = rationals(check, "scaling")?;
    if scaling.len() != n + 1 {
        return Err(Error::invalid("scaling must list x_1..x_{n+1}"));
    }
    let sum = scaling.iter().fold(rat_int(0), |a, e| a + e);
    if ext(check, "expected_val")? != ExtRational::Finite(sum.clone()) {
        return Err(Error::invalid(format!("expected_val is not the scaling sum {}", fmt_rational(&sum))));
    }
    Ok(one(check, "lhs")? == one(check, "rhs")? && ext(check, "surviving_val")? == ExtRational::Finite(sum))
}

fn image_gap(check: &Check) -> Result<bool> {
    Ok(flag(check, "monomial_untouched")? && ext(check, "achieved_val")? <= ext(check, "bound_val")?)
}

fn norm_preservation(check: &Check) -> Result<bool> {
    Ok(ext(check, "before_val")? == ext(check, "after_val")?)
}

fn compatibility(check: &Check) -> Result<bool> {
    Ok(ext(check, "val")? == ExtRational::int(1)
        && flag(check, "integer_exponents")?
        && flag(check, "residue_identity")?)
}

fn greedy_trace(check: &Check) -> Result<bool> {
    let mut prev = ext(check, "initial_val")?;
    for s in many(check, "residual_vals")? {
        let (v, _) = bound_value(s)?;
        if v <= prev {
            return Ok(false);
        }
        prev = v;
    }
    Ok(true)
}

fn greedy_bound(check: &Check) -> Result<bool> {
    let needed = ext(check, "initial_val")?.add_rational(&rat_int(small(check, "steps")?));
    if ext(check, "needed_val")? != needed {
        return Err(Error::invalid("needed_val is not val(x) + N"));
    }
    Ok(ext(check, "final_val")? >= needed)
}
