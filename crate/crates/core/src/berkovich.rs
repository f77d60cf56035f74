//! Points of the Berkovich affine line over `k((t))` given by nested chains
//! of closed discs, and their classification into types 1–4.
//!
//! A finite chain is only a prefix of an infinite one. Whether the
//! intersection contains an algebraic point cannot be decided from a prefix,
//! so classification relies on a declared [`LimitDeclaration`] and checks
//! the prefix for consistency with it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ExtRational, LogNorm};
use crate::report::{Check, Report};
use crate::series::{HahnSeries, SeriesRepr};

/// The closed disc `{x : |x − center| ≤ radius}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disc {
    pub center: HahnSeries,
    pub radius: LogNorm,
}

impl Disc {
    pub fn new(center: HahnSeries, radius_val: ExtRational) -> Self {
        Disc { center, radius: LogNorm::from_val(radius_val) }
    }

    pub fn radius_val(&self) -> &ExtRational {
        self.radius.val()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Intersection {
    Empty,
    Nonempty,
    Unknown,
}

impl fmt::Display for Intersection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Intersection::Empty => "empty",
            Intersection::Nonempty => "nonempty",
            Intersection::Unknown => "unknown",
        })
    }
}

/// What the caller asserts about the infinite chain beyond the prefix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitDeclaration {
    pub limit_val: ExtRational,
    pub centers_stabilize: bool,
    pub algebraic_intersection: Intersection,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscChain {
    pub discs: Vec<Disc>,
    pub declared: Option<LimitDeclaration>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PointType {
    One,
    Two,
    Three,
    Four,
}

impl PointType {
    pub const ALL: [PointType; 4] = [PointType::One, PointType::Two, PointType::Three, PointType::Four];

    pub fn number(self) -> u8 {
        match self {
            PointType::One => 1,
            PointType::Two => 2,
            PointType::Three => 3,
            PointType::Four => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        PointType::ALL.get(usize::from(n).wrapping_sub(1)).copied()
    }
}

impl fmt::Display for PointType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type {}", self.number())
    }
}

/// `(E, F)`: rational rank of the value-group quotient and transcendence
/// degree of the residue-field extension.
pub fn ef_table(ty: PointType) -> (u8, u8) {
    match ty {
        PointType::One => (0, 0),
        PointType::Two => (0, 1),
        PointType::Three => (1, 0),
        PointType::Four => (0, 0),
    }
}

/// Abhyankar's inequality `E + F ≤ 1`.
pub fn abhyankar_holds(ty: PointType) -> bool {
    let (e, f) = ef_table(ty);
    e + f <= 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    RadiiNotDecreasing { index: usize, prev: ExtRational, next: ExtRational },
    NotNested { index: usize, distance: ExtRational, radius: ExtRational },
    /// The centers differ only inside their error terms, below the radius.
    Undetermined { index: usize, tail: ExtRational, radius: ExtRational },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RadiiNotDecreasing { index, prev, next } => write!(
                f,
                "radius {} (val {next}) is not strictly smaller than radius {index} (val {prev})",
                index + 1
            ),
            Violation::NotNested { index, distance, radius } => write!(
                f,
                "center {} lies at val {distance} from center {index}, outside radius val {radius}",
                index + 1
            ),
            Violation::Undetermined { index, tail, radius } => write!(
                f,
                "centers {index} and {} are only known to O(t^{tail}), coarser than radius val {radius}",
                index + 1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestedCheck {
    pub radius_vals: Vec<ExtRational>,
    /// Lower bounds on `val(c_{n+1} − c_n)`; `exact[n]` says whether the bound
    /// is the actual valuation.
    pub distance_vals: Vec<ExtRational>,
    pub exact: Vec<bool>,
    pub violation: Option<Violation>,
}

impl NestedCheck {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

impl DiscChain {
    pub fn new(discs: Vec<Disc>, declared: Option<LimitDeclaration>) -> Self {
        DiscChain { discs, declared }
    }

    /// Drops the first `k` discs.
    pub fn tail_from(&self, k: usize) -> Self {
        DiscChain { discs: self.discs[k.min(self.discs.len())..].to_vec(), declared: self.declared.clone() }
    }

    /// Strict radius decrease and `|c_{n+1} − c_n| ≤ r_n` for every
    /// consecutive pair, stopping at the first violation.
    pub fn check_nested(&self) -> Result<NestedCheck> {
        if self.discs.len() < 2 {
            return Err(Error::invalid("a nested chain needs at least 2 discs"));
        }
        let radius_vals: Vec<ExtRational> = self.discs.iter().map(|d| d.radius_val().clone()).collect();
        let mut out = NestedCheck { radius_vals, distance_vals: Vec::new(), exact: Vec::new(), violation: None };
        for (i, w) in self.discs.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if b.radius_val() <= a.radius_val() {
                out.violation = Some(Violation::RadiiNotDecreasing {
                    index: i,
                    prev: a.radius_val().clone(),
                    next: b.radius_val().clone(),
                });
                return Ok(out);
            }
            let diff = b.center.checked_sub(&a.center)?;
            let r = a.radius_val().clone();
            match diff.leading_term() {
                Some(t) => {
                    let d = ExtRational::Finite(t.exp.clone());
                    out.distance_vals.push(d.clone());
                    out.exact.push(true);
                    if d < r {
                        out.violation = Some(Violation::NotNested { index: i, distance: d, radius: r });
                        return Ok(out);
                    }
                }
                None => {
                    out.distance_vals.push(diff.tail().clone());
                    out.exact.push(diff.is_exact());
                    if diff.tail() < &r {
                        out.violation =
                            Some(Violation::Undetermined { index: i, tail: diff.tail().clone(), radius: r });
                        return Ok(out);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Type of the limit point under the declared limit behaviour.
    ///
    /// A single disc is accepted; longer prefixes must pass
    /// [`DiscChain::check_nested`].
    pub fn classify(&self) -> Result<Classification> {
        let last = self.discs.last().ok_or_else(|| Error::invalid("empty disc chain"))?;
        if self.discs.len() >= 2 {
            let nested = self.check_nested()?;
            if let Some(v) = nested.violation {
                return Err(Error::invalid(format!("chain is not nested: {v}")));
            }
        }
        let decl = self
            .declared
            .as_ref()
            .ok_or_else(|| Error::invalid("classification needs a declared limit"))?;
        if let ExtRational::Finite(_) = &decl.limit_val {
            if &decl.limit_val <= last.radius_val() {
                return Err(Error::invalid(format!(
                    "declared limit val {} does not exceed the observed radius val {}",
                    decl.limit_val,
                    last.radius_val()
                )));
            }
        }
        Ok(match (&decl.limit_val, decl.centers_stabilize, decl.algebraic_intersection) {
            (ExtRational::Infinity, _, _) => Classification::Type(PointType::One),
            (ExtRational::Finite(v), true, _) => {
                Classification::Type(if v.is_integer() { PointType::Two } else { PointType::Three })
            }
            (ExtRational::Finite(_), false, Intersection::Empty) => Classification::Type(PointType::Four),
            _ => Classification::Indeterminate,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    Type(PointType),
    Indeterminate,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::Type(t) => t.fmt(f),
            Classification::Indeterminate => f.write_str("indeterminate"),
        }
    }
}

pub(crate) fn nested_check_entry(chain: &DiscChain, nested: &NestedCheck, anchor: &str) -> Check {
    let mut check = Check::new("chain_nested", "chain_nested", anchor)
        .with("discs", chain.discs.len())
        .with_list("radius_vals", &nested.radius_vals)
        .with_list(
            "distance_vals",
            nested
                .distance_vals
                .iter()
                .zip(&nested.exact)
                .map(|(d, &exact)| if exact { d.to_string() } else { format!(">={d}") }),
        );
    if let Some(v) = &nested.violation {
        check = check.with("violation", v);
    }
    check.passed_if(nested.holds())
}

pub(crate) fn ef_table_entry() -> Check {
    let ok = PointType::ALL.iter().all(|&t| abhyankar_holds(t));
    Check::new("ef_table", "ef_table", "(E,F): type 1 -> (0,0), 2 -> (0,1), 3 -> (1,0), 4 -> (0,0); E + F <= 1")
        .with_list("types", PointType::ALL.iter().map(|t| t.number()))
        .with_list(
            "ef",
            PointType::ALL.iter().map(|&t| {
                let (e, f) = ef_table(t);
                format!("({e},{f})")
            }),
        )
        .passed_if(ok)
}

pub(crate) fn declaration_entries(decl: &LimitDeclaration) -> Vec<Check> {
    let mut out = vec![Check::new(
        "assumption",
        "declared_centers_stabilize",
        "centers stabilize iff the limit lies over a finite extension",
    )
    .with("centers_stabilize", decl.centers_stabilize)
    .assumed()];
    out.push(
        Check::new(
            "assumption",
            "declared_algebraic_intersection",
            "the intersection of the discs contains no point algebraic over k(t)",
        )
        .with("algebraic_intersection", decl.algebraic_intersection)
        .assumed(),
    );
    out
}

pub(crate) fn classification_entry(chain: &DiscChain, class: Classification, expected: Option<PointType>) -> Check {
    let decl = chain.declared.as_ref();
    let last = chain.discs.last().map(|d| d.radius_val().to_string()).unwrap_or_default();
    let mut check = Check::new(
        "classification",
        "classification",
        "limit val inf -> type 1; finite with stable centers -> type 2 (integral) or 3; finite, moving centers, empty algebraic intersection -> type 4",
    )
    .with("type", class)
    .with("last_radius_val", last);
    if let Some(d) = decl {
        check = check.with("limit_val", &d.limit_val).with("centers_stabilize", d.centers_stabilize).with(
            "algebraic_intersection",
            d.algebraic_intersection,
        );
    }
    if let Some(t) = expected {
        check = check.with("expected", Classification::Type(t));
    }
    let ok = match expected {
        Some(t) => class == Classification::Type(t),
        None => class != Classification::Indeterminate,
    };
    check.passed_if(ok)
}

/// Report for a caller-supplied chain.
pub fn classify_report(chain: &DiscChain) -> Result<Report> {
    let mut report = Report::new("classify").config("discs", chain.discs.len());
    if chain.discs.len() >= 2 {
        let nested = chain.check_nested()?;
        let ok = nested.holds();
        report.push(nested_check_entry(chain, &nested, "|c_{n+1} - c_n| <= r_n and r_{n+1} < r_n"));
        if !ok {
            return Ok(report);
        }
    }
    let class = chain.classify()?;
    if let Some(d) = &chain.declared {
        report = report
            .config("limit_val", &d.limit_val)
            .config("centers_stabilize", d.centers_stabilize);
        for c in declaration_entries(d) {
            report.push(c);
        }
    }
    report.push(classification_entry(chain, class, None));
    if let Classification::Type(t) = class {
        let (e, f) = ef_table(t);
        report.derive("type", t.number());
        report.derive("ef", format!("({e},{f})"));
    }
    report.push(ef_table_entry());
    Ok(report)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscRepr {
    pub center: SeriesRepr,
    pub radius_val: ExtRational,
}

/// `{"discs": [{"center": series, "radius_val": ..}], "declared": {..}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainRepr {
    pub discs: Vec<DiscRepr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared: Option<LimitDeclaration>,
}

impl DiscChain {
    pub fn to_repr(&self) -> ChainRepr {
        ChainRepr {
            discs: self
                .discs
                .iter()
                .map(|d| DiscRepr { center: d.center.to_repr(), radius_val: d.radius_val().clone() })
                .collect(),
            declared: self.declared.clone(),
        }
    }

    pub fn from_repr(repr: &ChainRepr) -> Result<Self> {
        let mut discs = Vec::with_capacity(repr.discs.len());
        for d in &repr.discs {
            let center = match discs.first() {
                Some(Disc { center: first, .. }) => HahnSeries::from_repr_in(&d.center, first.field())?,
                None => HahnSeries::from_repr(&d.center)?,
            };
            discs.push(Disc::new(center, d.radius_val.clone()));
        }
        Ok(DiscChain { discs, declared: repr.declared.clone() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_repr()).expect("chain serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let repr: ChainRepr = serde_json::from_str(s)?;
        Self::from_repr(&repr)
    }
}
