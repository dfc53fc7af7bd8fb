use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::expr::{BoxDomain, Compiled, Expr};

use super::GeometryError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Range {
    Interval { lo: f64, hi: f64 },
    /// Angle coordinate with period 2π.
    Circle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub name: String,
    pub range: Range,
}

/// Named coordinates with ranges and an optional Z-defining coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chart {
    pub name: String,
    pub coords: Vec<Coordinate>,
    /// Index of the coordinate whose zero set is the hypersurface.
    #[serde(default)]
    pub z: Option<usize>,
    /// Optional expression required to be positive at sample points.
    #[serde(default)]
    pub constraint: Option<Expr>,
}

pub fn interval(name: &str, lo: f64, hi: f64) -> Coordinate {
    Coordinate { name: name.to_string(), range: Range::Interval { lo, hi } }
}

pub fn circle(name: &str) -> Coordinate {
    Coordinate { name: name.to_string(), range: Range::Circle }
}

impl Chart {
    pub fn new(name: &str, coords: Vec<Coordinate>, z: Option<&str>) -> Result<Arc<Chart>, GeometryError> {
        let z = match z {
            Some(zn) => Some(
                coords.iter().position(|c| c.name == zn).ok_or_else(|| GeometryError::UnknownCoordinate(zn.to_string()))?,
            ),
            None => None,
        };
        let chart = Chart { name: name.to_string(), coords, z, constraint: None };
        chart.validate()?;
        Ok(Arc::new(chart))
    }

    pub fn with_constraint(self: &Arc<Chart>, constraint: Expr) -> Arc<Chart> {
        let mut c = (**self).clone();
        c.constraint = Some(constraint);
        Arc::new(c)
    }

    pub fn validate(&self) -> Result<(), GeometryError> {
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.coords {
            if !seen.insert(c.name.as_str()) {
                return Err(GeometryError::InvalidChart(format!("duplicate coordinate `{}`", c.name)));
            }
            if let Range::Interval { lo, hi } = c.range {
                if !(lo < hi) {
                    return Err(GeometryError::InvalidChart(format!("empty range for `{}`", c.name)));
                }
            }
        }
        if let Some(z) = self.z {
            if z >= self.coords.len() {
                return Err(GeometryError::InvalidChart("Z coordinate index out of range".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.coords.iter().map(|c| c.name.clone()).collect()
    }

    pub fn name_of(&self, i: usize) -> &str {
        &self.coords[i].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize, GeometryError> {
        self.coords.iter().position(|c| c.name == name).ok_or_else(|| GeometryError::UnknownCoordinate(name.to_string()))
    }

    pub fn x_name(&self) -> Option<&str> {
        self.z.map(|i| self.coords[i].name.as_str())
    }

    pub fn var(&self, name: &str) -> Result<Expr, GeometryError> {
        self.index_of(name)?;
        Ok(Expr::var(name))
    }

    /// Partial derivative with a check that `v` is a coordinate of the chart.
    pub fn differentiate(&self, e: &Expr, v: &str) -> Result<Expr, GeometryError> {
        self.index_of(v)?;
        Ok(e.diff(v))
    }

    /// Checks that every variable of `e` is a coordinate.
    pub fn check_expr(&self, e: &Expr) -> Result<(), GeometryError> {
        for v in e.free_vars() {
            self.index_of(&v)?;
        }
        Ok(())
    }

    /// The chart of the hypersurface: every coordinate except x.
    pub fn hypersurface(&self) -> Result<Arc<Chart>, GeometryError> {
        let z = self.z.ok_or(GeometryError::NoHypersurface)?;
        let coords = self.coords.iter().enumerate().filter(|(i, _)| *i != z).map(|(_, c)| c.clone()).collect();
        let constraint = self.constraint.as_ref().map(|c| c.subs(self.name_of(z), &Expr::zero()));
        Ok(Arc::new(Chart { name: format!("{}|Z", self.name), coords, z: None, constraint }))
    }

    fn axis_range(&self, i: usize) -> (f64, f64) {
        match self.coords[i].range {
            Range::Interval { lo, hi } => (lo, hi),
            Range::Circle => (0.0, 2.0 * PI),
        }
    }

    pub fn box_domain(&self) -> BoxDomain {
        BoxDomain::new((0..self.dim()).map(|i| {
            let (lo, hi) = self.axis_range(i);
            (self.coords[i].name.clone(), lo, hi)
        }).collect())
    }

    /// Sampling box with the Z coordinate pinned to `[lo, hi]`.
    pub fn box_domain_with(&self, name: &str, lo: f64, hi: f64) -> BoxDomain {
        let mut b = self.box_domain();
        for a in &mut b.axes {
            if a.0 == name {
                a.1 = lo;
                a.2 = hi;
            }
        }
        b
    }

    fn axis_points(&self, i: usize, n: usize) -> Vec<f64> {
        let n = n.max(2);
        match self.coords[i].range {
            Range::Circle => (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect(),
            Range::Interval { lo, hi } => {
                let mut pts: Vec<f64> = (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect();
                if self.z == Some(i) && lo <= 0.0 && 0.0 <= hi && !pts.contains(&0.0) {
                    let nearest = (0..n)
                        .min_by(|a, b| pts[*a].abs().partial_cmp(&pts[*b].abs()).unwrap())
                        .unwrap();
                    pts[nearest] = 0.0;
                }
                pts
            }
        }
    }

    /// Tensor grid with `per_axis` points per coordinate (the x = 0 slice is
    /// always included). When the full grid would exceed `budget` points the
    /// per-axis count is lowered uniformly, keeping it odd and at least 3.
    pub fn grid(&self, per_axis: usize, budget: usize) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut n = per_axis.max(2);
        while d > 0 && (n as f64).powi(d as i32) > budget as f64 && n > 3 {
            n -= 1;
            if n % 2 == 0 && n > 3 {
                n -= 1;
            }
        }
        let axes: Vec<Vec<f64>> = (0..d).map(|i| self.axis_points(i, n)).collect();
        let mut out: Vec<Vec<f64>> = vec![vec![]];
        for ax in &axes {
            let mut next = Vec::with_capacity(out.len() * ax.len());
            for p in &out {
                for v in ax {
                    let mut q = p.clone();
                    q.push(*v);
                    next.push(q);
                }
            }
            out = next;
        }
        self.filter_constraint(out)
    }

    pub fn filter_constraint(&self, pts: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
        match &self.constraint {
            None => pts,
            Some(c) => {
                let compiled = Compiled::new(c, &self.names()).expect("constraint uses chart coordinates");
                pts.into_iter().filter(|p| compiled.eval(p) > 0.0).collect()
            }
        }
    }

    /// Seeded quasi-random points in the chart box satisfying the constraint.
    pub fn samples(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let b = self.box_domain();
        let mut out = Vec::with_capacity(n);
        let mut batch = n;
        let mut offset = 0u64;
        while out.len() < n && offset < 64 {
            let pts = self.filter_constraint(b.samples(batch, seed.wrapping_add(offset)));
            out.extend(pts.into_iter().take(n - out.len()));
            batch *= 2;
            offset += 1;
        }
        out
    }

    pub fn point_map(&self, p: &[f64]) -> BTreeMap<String, f64> {
        self.names().into_iter().zip(p.iter().copied()).collect()
    }
}
