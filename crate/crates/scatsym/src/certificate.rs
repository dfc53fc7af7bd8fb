//! Verdict objects and the deterministic grid scans that produce them.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::expr::ZeroVerdict;

/// Named coordinates of a point, in chart order.
pub type Witness = Vec<(String, f64)>;

pub fn witness(names: &[String], p: &[f64]) -> Witness {
    names.iter().cloned().zip(p.iter().copied()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Exact symbolic identity.
    Proven { detail: String },
    /// Bound checked at every grid point with the smallest margin found.
    NumericallyVerified { grid_points: usize, tolerance: f64, min_margin: f64 },
    Refuted { witness: Witness, value: f64, reason: String },
}

impl Certificate {
    pub fn passed(&self) -> bool {
        !matches!(self, Certificate::Refuted { .. })
    }

    pub fn margin(&self) -> Option<f64> {
        match self {
            Certificate::NumericallyVerified { min_margin, .. } => Some(*min_margin),
            _ => None,
        }
    }

    pub fn proven(detail: impl Into<String>) -> Certificate {
        Certificate::Proven { detail: detail.into() }
    }

    pub fn refuted(witness: Witness, value: f64, reason: impl Into<String>) -> Certificate {
        Certificate::Refuted { witness, value, reason: reason.into() }
    }

    /// Certificate form of a zero test, read as "this identity holds".
    pub fn from_zero(v: &ZeroVerdict, what: &str) -> Certificate {
        match v {
            ZeroVerdict::ProvenZero => Certificate::proven(format!("{what} vanishes identically")),
            ZeroVerdict::NumericallyZero { tolerance, samples, margin, .. } => Certificate::NumericallyVerified {
                grid_points: *samples,
                tolerance: *tolerance,
                min_margin: *margin,
            },
            ZeroVerdict::Nonzero { point, value } => {
                Certificate::refuted(point.clone(), *value, format!("{what} is nonzero"))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    pub certificate: Certificate,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Ordered list of named clauses; the verdict passes iff every clause does.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub subject: String,
    pub verdict: Verdict,
    pub clauses: Vec<Clause>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Report {
        Report { subject: subject.into(), verdict: Verdict::Pass, clauses: Vec::new(), notes: BTreeMap::new() }
    }

    pub fn push(&mut self, name: impl Into<String>, certificate: Certificate) {
        self.push_detail(name, certificate, String::new());
    }

    pub fn push_detail(&mut self, name: impl Into<String>, certificate: Certificate, detail: impl Into<String>) {
        let passed = certificate.passed();
        if !passed {
            self.verdict = Verdict::Fail;
        }
        self.clauses.push(Clause { name: name.into(), passed, certificate, detail: detail.into() });
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.notes.insert(key.into(), value.into());
    }

    /// Appends another report's clauses under a name prefix.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for c in other.clauses {
            self.push_detail(format!("{prefix}.{}", c.name), c.certificate, c.detail);
        }
        for (k, v) in other.notes {
            self.notes.insert(format!("{prefix}.{k}"), v);
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Smallest value of `f` over `points` and the lowest index attaining it.
/// A NaN value wins over every number, so domain errors surface as
/// witnesses. The result does not depend on thread scheduling.
pub fn scan_min<F>(points: &[Vec<f64>], f: F) -> Option<(usize, f64)>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    points
        .par_iter()
        .enumerate()
        .map(|(i, p)| (i, f(p)))
        .reduce_with(|a, b| {
            let better = match (a.1.is_nan(), b.1.is_nan()) {
                (true, true) => a.0 <= b.0,
                (true, false) => true,
                (false, true) => false,
                (false, false) => a.1 < b.1 || (a.1 == b.1 && a.0 <= b.0),
            };
            if better {
                a
            } else {
                b
            }
        })
}

/// Certifies `f > tolerance` at every point; the margin is the minimum of `f`.
pub fn certify_positive<F>(names: &[String], points: &[Vec<f64>], tolerance: f64, what: &str, f: F) -> Certificate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    match scan_min(points, f) {
        None => Certificate::refuted(vec![], f64::NAN, format!("{what}: empty grid")),
        Some((i, v)) if v.is_nan() => {
            Certificate::refuted(witness(names, &points[i]), v, format!("{what}: undefined value"))
        }
        Some((i, v)) if v <= tolerance => {
            Certificate::refuted(witness(names, &points[i]), v, format!("{what}: not above {tolerance:e}"))
        }
        Some((_, v)) => Certificate::NumericallyVerified { grid_points: points.len(), tolerance, min_margin: v },
    }
}

/// Certifies `|f| ≤ tolerance` at every point.
pub fn certify_small<F>(names: &[String], points: &[Vec<f64>], tolerance: f64, what: &str, f: F) -> Certificate
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    match scan_min(points, |p| {
        let v = f(p);
        if v.is_nan() {
            v
        } else {
            -v.abs()
        }
    }) {
        None => Certificate::refuted(vec![], f64::NAN, format!("{what}: empty grid")),
        Some((i, v)) if v.is_nan() || -v > tolerance => {
            Certificate::refuted(witness(names, &points[i]), -v, format!("{what}: exceeds {tolerance:e}"))
        }
        Some((_, v)) => Certificate::NumericallyVerified {
            grid_points: points.len(),
            tolerance,
            min_margin: tolerance + v,
        },
    }
}
