//! Charts and Laurent-graded exterior calculus.
//!
//! Every coefficient is stored as an expression times `x^{-k}`, where `x` is
//! the chart's Z-defining coordinate and `k` an exact integer kept outside
//! the expression. Integer powers of `x` appearing in coefficients are moved
//! into `k` on construction, so exponents can be compared directly.

mod chart;
mod form;
mod json;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::expr::{Compiled, Expr, ExprError, Node};

pub use chart::{circle, interval, Chart, Coordinate, Range};
pub use form::{sort_sign, Covector, Graded, Multivector, Side, SingularForm, TermKey, Vector};
pub use json::{FormFile, TermFile};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("chart mismatch: `{0}` vs `{1}`")]
    ChartMismatch(String, String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("chart has no hypersurface coordinate")]
    NoHypersurface,
    #[error("exponent {have} exceeds reference exponent {reference}")]
    ExponentTooHigh { have: i64, reference: i64 },
    #[error("singular: {0}")]
    Singular(String),
    #[error("unsupported expansion: {0}")]
    UnsupportedExpansion(String),
    #[error("map: {0}")]
    Map(String),
    #[error("evaluation: {0}")]
    Evaluation(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// A smooth map given by one expression (in source coordinates) per target
/// coordinate.
#[derive(Clone, Debug)]
pub struct CoordinateMap {
    pub source: Arc<Chart>,
    pub target: Arc<Chart>,
    pub images: Vec<Expr>,
}

impl CoordinateMap {
    pub fn new(source: &Arc<Chart>, target: &Arc<Chart>, images: Vec<Expr>) -> Result<CoordinateMap, GeometryError> {
        if images.len() != target.dim() {
            return Err(GeometryError::Map(format!(
                "{} images for a {}-dimensional target",
                images.len(),
                target.dim()
            )));
        }
        for e in &images {
            source.check_expr(e)?;
        }
        Ok(CoordinateMap { source: source.clone(), target: target.clone(), images })
    }

    pub fn identity(chart: &Arc<Chart>) -> CoordinateMap {
        let images = chart.names().iter().map(|n| Expr::var(n)).collect();
        CoordinateMap { source: chart.clone(), target: chart.clone(), images }
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn after(&self, first: &CoordinateMap) -> Result<CoordinateMap, GeometryError> {
        if first.target != self.source {
            return Err(GeometryError::ChartMismatch(first.target.name.clone(), self.source.name.clone()));
        }
        let subst: BTreeMap<String, Expr> = self.source.names().into_iter().zip(first.images.iter().cloned()).collect();
        let images = self.images.iter().map(|e| e.substitute(&subst)).collect();
        Ok(CoordinateMap { source: first.source.clone(), target: self.target.clone(), images })
    }

    fn substitution(&self) -> BTreeMap<String, Expr> {
        self.target.names().into_iter().zip(self.images.iter().cloned()).collect()
    }

    /// Pullback of a form on the target chart.
    pub fn pullback(&self, f: &SingularForm) -> Result<SingularForm, GeometryError> {
        if *f.chart() != self.target {
            return Err(GeometryError::ChartMismatch(f.chart().name.clone(), self.target.name.clone()));
        }
        let subst = self.substitution();
        let differentials = self
            .images
            .iter()
            .map(|e| SingularForm::differential(&self.source, e))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = SingularForm::zero(&self.source, f.degree());
        for ((idx, k), c) in f.terms() {
            let mut coeff = c.substitute(&subst);
            if *k != 0 {
                let xi = self.target.z.ok_or(GeometryError::NoHypersurface)?;
                coeff = coeff * self.images[xi].powi(-k);
            }
            let mut piece = SingularForm::scalar(&self.source, coeff);
            for i in idx {
                piece = piece.wedge(&differentials[*i])?;
            }
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    /// Checks the b-map condition: the pulled-back Z-defining function is a
    /// positive multiple of the source one, sampled on `points`.
    pub fn is_b_map(&self, points: &[Vec<f64>]) -> Result<bool, GeometryError> {
        let tz = self.target.z.ok_or(GeometryError::NoHypersurface)?;
        let sx = self.source.x_name().ok_or(GeometryError::NoHypersurface)?;
        let ratio = (&self.images[tz] * Expr::var(sx).recip()).expand();
        if ratio.terms().iter().any(|t| t.split_var_power(sx).0 < Zero::zero()) {
            return Ok(false);
        }
        let compiled = Compiled::new(&ratio, &self.source.names())?;
        Ok(points.iter().all(|p| compiled.eval(p) > 0.0))
    }
}

/// One graded piece `x^{-k} (dx ∧ a_k + b_k)` of a Laurent decomposition,
/// with `a_k`, `b_k` free of `dx` and of `x`.
#[derive(Clone, Debug)]
pub struct LaurentSlot {
    pub exponent: i64,
    pub dx_part: SingularForm,
    pub rest: SingularForm,
}

fn straddles(e: &Expr, x: &str) -> bool {
    match e.node() {
        Node::Const(_) | Node::Var(_) => false,
        Node::Sum(xs) | Node::Prod(xs) => xs.iter().any(|t| straddles(t, x)),
        Node::Pow(b, _) => straddles(b, x),
        Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => straddles(a, x),
        Node::Decay(d) => {
            if d.arg.depends_on(x) {
                let at = d.arg.subs(x, &Expr::zero());
                match at.as_const() {
                    Some(c) => match d.breaks.iter().position(|b| b == c) {
                        Some(i) => d.branches[i].as_const().is_none() && d.branches[i + 1].as_const().is_none(),
                        None => false,
                    },
                    None => true,
                }
            } else {
                d.branches.iter().any(|b| straddles(b, x))
            }
        }
    }
}

impl SingularForm {
    /// Taylor-expands every coefficient in `x` and groups the result by total
    /// Laurent exponent, separating `dx` components. Exponents below
    /// `-order` are truncated, so the remainder is `O(x^{order+1})`.
    pub fn laurent_decompose(&self, order: usize) -> Result<Vec<LaurentSlot>, GeometryError> {
        let x = self.chart().x_name().ok_or(GeometryError::NoHypersurface)?.to_string();
        let xi = self.chart().z.unwrap();
        let floor = -(order as i64);
        let mut slots: BTreeMap<i64, (SingularForm, SingularForm)> = BTreeMap::new();
        let chart = self.chart().clone();
        let p = self.degree();
        for ((idx, k), c) in self.terms() {
            if straddles(c, &x) {
                return Err(GeometryError::UnsupportedExpansion(format!(
                    "piecewise coefficient changes branch at {x} = 0"
                )));
            }
            if *k < floor {
                continue;
            }
            let depth = (*k - floor) as usize;
            let coeffs = c.taylor_coefficients(&x, depth);
            for (j, cj) in coeffs.into_iter().enumerate() {
                if cj.is_const_zero() {
                    continue;
                }
                let e = *k - j as i64;
                let slot = slots
                    .entry(e)
                    .or_insert_with(|| (SingularForm::zero(&chart, p.saturating_sub(1)), SingularForm::zero(&chart, p)));
                if let Some(pos) = idx.iter().position(|i| *i == xi) {
                    let rest: Vec<usize> = idx.iter().copied().filter(|i| *i != xi).collect();
                    let cj = if pos % 2 == 1 { -cj } else { cj };
                    slot.0.insert(rest, 0, cj);
                } else {
                    slot.1.insert(idx.clone(), 0, cj);
                }
            }
        }
        Ok(slots
            .into_iter()
            .rev()
            .filter(|(_, (a, b))| !a.is_zero() || !b.is_zero())
            .map(|(exponent, (dx_part, rest))| LaurentSlot { exponent, dx_part, rest })
            .collect())
    }

    /// Inverse of [`SingularForm::laurent_decompose`].
    pub fn reassemble(chart: &Arc<Chart>, slots: &[LaurentSlot], degree: usize) -> Result<SingularForm, GeometryError> {
        let mut out = SingularForm::zero(chart, degree);
        for s in slots {
            let piece = s.dx_part.dx_wedge()?.add(&s.rest)?.with_pole(s.exponent);
            out = out.add(&piece)?;
        }
        Ok(out)
    }
}
