//! Machine-readable witness reports.
//!
//! Every numeric payload is an exact string (`"3/2"`, `"inf"`), never a
//! binary float. JSON output is deterministic: struct fields serialize in
//! declaration order and all maps are `BTreeMap`s.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const SCHEMA: &str = "nalab.report/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// A declared hypothesis that the tool does not (and cannot) compute.
    Assumed,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Assumed => "ASSUMED",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExactValue {
    One(String),
    Many(Vec<String>),
}

impl ExactValue {
    pub fn as_one(&self) -> Option<&str> {
        match self {
            ExactValue::One(s) => Some(s),
            ExactValue::Many(_) => None,
        }
    }

    pub fn as_many(&self) -> Option<&[String]> {
        match self {
            ExactValue::Many(v) => Some(v),
            ExactValue::One(_) => None,
        }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactValue::One(s) => f.write_str(s),
            ExactValue::Many(v) => write!(f, "[{}]", v.join(", ")),
        }
    }
}

/// One verified statement.
///
/// `kind` selects how `verify` re-validates the recorded values; `anchor`
/// states in words and formulas what the check asserts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub kind: String,
    pub anchor: String,
    pub status: Status,
    pub values: BTreeMap<String, ExactValue>,
}

impl Check {
    pub fn new(kind: &str, name: impl Into<String>, anchor: &str) -> Self {
        Check {
            name: name.into(),
            kind: kind.into(),
            anchor: anchor.into(),
            status: Status::Fail,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.values.insert(key.into(), ExactValue::One(value.to_string()));
        self
    }

    pub fn with_list<T: ToString>(mut self, key: &str, values: impl IntoIterator<Item = T>) -> Self {
        let v = values.into_iter().map(|x| x.to_string()).collect();
        self.values.insert(key.into(), ExactValue::Many(v));
        self
    }

    pub fn passed_if(mut self, ok: bool) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }

    pub fn assumed(mut self) -> Self {
        self.status = Status::Assumed;
        self
    }

    pub fn is_failure(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn get(&self, key: &str) -> Option<&ExactValue> {
        self.values.get(key)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub tool_version: String,
    pub witness: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub derived: BTreeMap<String, ExactValue>,
    pub verdict: Verdict,
}

impl Report {
    pub fn new(witness: &str) -> Self {
        Report {
            schema: SCHEMA.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            witness: witness.into(),
            config: BTreeMap::new(),
            checks: Vec::new(),
            derived: BTreeMap::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn config(mut self, key: &str, value: impl ToString) -> Self {
        self.config.insert(key.into(), value.to_string());
        self
    }

    pub fn push(&mut self, check: Check) {
        if check.is_failure() {
            self.verdict = Verdict::Fail;
        }
        self.checks.push(check);
    }

    pub fn derive(&mut self, key: &str, value: impl ToString) {
        self.derived.insert(key.into(), ExactValue::One(value.to_string()));
    }

    pub fn derive_list<T: ToString>(&mut self, key: &str, values: impl IntoIterator<Item = T>) {
        let v = values.into_iter().map(|x| x.to_string()).collect();
        self.derived.insert(key.into(), ExactValue::Many(v));
    }

    /// Verdict implied by the check statuses: any failure fails the report.
    pub fn computed_verdict(&self) -> Verdict {
        if self.checks.iter().any(Check::is_failure) {
            Verdict::Fail
        } else {
            Verdict::Pass
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} witness ({} {})", self.witness, self.schema, self.tool_version);
        for (k, v) in &self.config {
            let _ = writeln!(out, "  config {k} = {v}");
        }
        for c in &self.checks {
            let vals: Vec<String> = c.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let _ = writeln!(out, "{:<8} {:<32} {}", c.status.to_string(), c.name, vals.join(" "));
        }
        for (k, v) in &self.derived {
            let _ = writeln!(out, "  {k} = {v}");
        }
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        let _ = writeln!(out, "verdict: {verdict}");
        out
    }
}
