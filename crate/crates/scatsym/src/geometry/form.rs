use std::collections::BTreeMap;
use std::marker::PhantomData;
use std::sync::Arc;

use num_traits::{ToPrimitive, Zero};

use crate::expr::{Compiled, Expr, Rational};

use super::{Chart, GeometryError};

/// Marker for the side of a graded object: covector indices (forms) or
/// vector indices (multivector fields).
pub trait Side: Clone + std::fmt::Debug + Send + Sync + 'static {
    const LABEL: &'static str;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Covector;

#[derive(Clone, Debug, PartialEq)]
pub struct Vector;

impl Side for Covector {
    const LABEL: &'static str = "form";
}

impl Side for Vector {
    const LABEL: &'static str = "multivector";
}

/// Key of one term: strictly increasing coordinate indices and the Laurent
/// exponent `k` of the factor `x^{-k}`.
pub type TermKey = (Vec<usize>, i64);

/// A graded exterior object whose coefficients are `Expr · x^{-k}`.
#[derive(Clone, Debug)]
pub struct Graded<S: Side> {
    chart: Arc<Chart>,
    degree: usize,
    terms: BTreeMap<TermKey, Expr>,
    side: PhantomData<S>,
}

pub type SingularForm = Graded<Covector>;
pub type Multivector = Graded<Vector>;

impl<S: Side> PartialEq for Graded<S> {
    fn eq(&self, other: &Self) -> bool {
        self.chart == other.chart && self.degree == other.degree && self.terms == other.terms
    }
}

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
pub fn sort_sign(idx: &[usize]) -> Option<(Vec<usize>, i64)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// Expands `c` and moves the integer power of `x` out of each monomial into
/// the Laurent exponent. Returns `(k, coefficient)` pairs.
pub(crate) fn absorb(x: Option<&str>, k: i64, c: &Expr) -> Vec<(i64, Expr)> {
    let expanded = c.expand();
    let Some(x) = x else {
        return vec![(k, expanded)];
    };
    if !expanded.depends_on(x) {
        return vec![(k, expanded)];
    }
    let mut groups: BTreeMap<i64, Vec<Expr>> = BTreeMap::new();
    for m in expanded.terms() {
        let (p, rest) = m.split_var_power(x);
        let whole = p.floor();
        let frac = &p - &whole;
        let shift = whole.to_integer().to_i64().expect("exponent fits in i64");
        let coeff = if frac.is_zero() { rest } else { rest * Expr::var(x).pow(frac) };
        groups.entry(k - shift).or_default().push(coeff);
    }
    groups.into_iter().map(|(k, v)| (k, Expr::sum(v))).collect()
}

impl<S: Side> Graded<S> {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Self {
        Graded { chart: chart.clone(), degree, terms: BTreeMap::new(), side: PhantomData }
    }

    /// A function, as a degree-0 object.
    pub fn scalar(chart: &Arc<Chart>, f: Expr) -> Self {
        let mut g = Self::zero(chart, 0);
        g.insert(vec![], 0, f);
        g
    }

    /// `x^{-k} · coeff · e_{i1} ∧ … ∧ e_{ip}` given coordinate names in any order.
    pub fn monomial(chart: &Arc<Chart>, k: i64, coeff: Expr, names: &[&str]) -> Result<Self, GeometryError> {
        let idx = names.iter().map(|n| chart.index_of(n)).collect::<Result<Vec<_>, _>>()?;
        chart.check_expr(&coeff)?;
        let mut g = Self::zero(chart, idx.len());
        if let Some((sorted, sign)) = sort_sign(&idx) {
            let c = if sign < 0 { -coeff } else { coeff };
            g.insert(sorted, k, c);
        }
        Ok(g)
    }

    /// The basis element for one coordinate (`dx_i` or `∂_i`).
    pub fn basis(chart: &Arc<Chart>, name: &str) -> Result<Self, GeometryError> {
        Self::monomial(chart, 0, Expr::one(), &[name])
    }

    pub fn from_terms(chart: &Arc<Chart>, degree: usize, terms: impl IntoIterator<Item = (TermKey, Expr)>) -> Self {
        let mut g = Self::zero(chart, degree);
        for ((idx, k), c) in terms {
            if let Some((sorted, sign)) = sort_sign(&idx) {
                let c = if sign < 0 { -c } else { c };
                g.insert(sorted, k, c);
            }
        }
        g
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &BTreeMap<TermKey, Expr> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().map(|(_, k)| *k).max()
    }

    /// Adds `x^{-k} c e_I` (with `I` already sorted), normalizing exponents.
    pub(crate) fn insert(&mut self, idx: Vec<usize>, k: i64, c: Expr) {
        debug_assert_eq!(idx.len(), self.degree);
        let x = self.chart.x_name().map(str::to_string);
        for (k2, c2) in absorb(x.as_deref(), k, &c) {
            let key = (idx.clone(), k2);
            let merged = match self.terms.remove(&key) {
                Some(old) => old + c2,
                None => c2,
            };
            if !merged.is_const_zero() {
                self.terms.insert(key, merged);
            }
        }
    }

    fn check_same_chart(&self, other_chart: &Arc<Chart>) -> Result<(), GeometryError> {
        if self.chart != *other_chart {
            return Err(GeometryError::ChartMismatch(self.chart.name.clone(), other_chart.name.clone()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, GeometryError> {
        self.check_same_chart(&other.chart)?;
        if self.degree != other.degree {
            return Err(GeometryError::DegreeMismatch(self.degree, other.degree));
        }
        let mut out = self.clone();
        for ((idx, k), c) in &other.terms {
            out.insert(idx.clone(), *k, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GeometryError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Expr::int(-1))
    }

    /// Multiplies every coefficient by a function.
    pub fn scale(&self, f: &Expr) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for ((idx, k), c) in &self.terms {
            out.insert(idx.clone(), *k, c * f);
        }
        out
    }

    /// Multiplies by `x^{-k}`.
    pub fn with_pole(&self, k: i64) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for ((idx, k0), c) in &self.terms {
            out.insert(idx.clone(), k0 + k, c.clone());
        }
        out
    }

    /// Exterior product; Laurent exponents add.
    pub fn wedge(&self, other: &Self) -> Result<Self, GeometryError> {
        self.check_same_chart(&other.chart)?;
        let mut out = Self::zero(&self.chart, self.degree + other.degree);
        for ((ia, ka), ca) in &self.terms {
            for ((ib, kb), cb) in &other.terms {
                let mut idx = ia.clone();
                idx.extend(ib.iter().copied());
                if let Some((sorted, sign)) = sort_sign(&idx) {
                    let c = if sign < 0 { -(ca * cb) } else { ca * cb };
                    out.insert(sorted, ka + kb, c);
                }
            }
        }
        Ok(out)
    }

    /// Coefficient of `e_I` with every Laurent exponent brought over the
    /// common factor `x^{-k}`: `Σ_j c_j x^{k - k_j}`. Requires `k` to be at
    /// least every exponent present on `I`.
    pub fn coefficient_over(&self, names: &[&str], k: i64) -> Result<Expr, GeometryError> {
        let idx = names.iter().map(|n| self.chart.index_of(n)).collect::<Result<Vec<_>, _>>()?;
        let Some((sorted, sign)) = sort_sign(&idx) else {
            return Ok(Expr::zero());
        };
        let c = self.collected(&sorted, k)?;
        Ok(if sign < 0 { -c } else { c })
    }

    pub(crate) fn collected(&self, idx: &[usize], k: i64) -> Result<Expr, GeometryError> {
        let mut parts = Vec::new();
        for ((i, kj), c) in &self.terms {
            if i.as_slice() != idx {
                continue;
            }
            if *kj > k {
                return Err(GeometryError::ExponentTooHigh { have: *kj, reference: k });
            }
            let shift = k - kj;
            if shift == 0 {
                parts.push(c.clone());
            } else {
                let x = self.chart.x_name().ok_or(GeometryError::NoHypersurface)?;
                parts.push(c * Expr::var(x).powi(shift));
            }
        }
        Ok(Expr::sum(parts))
    }

    /// Index sets carrying at least one term.
    pub fn indices(&self) -> Vec<Vec<usize>> {
        let mut v: Vec<Vec<usize>> = self.terms.keys().map(|(i, _)| i.clone()).collect();
        v.dedup();
        v
    }

    /// Collapses the Laurent grading into plain expressions on `M∖Z`.
    pub fn plain_coefficients(&self) -> BTreeMap<Vec<usize>, Expr> {
        let mut out: BTreeMap<Vec<usize>, Vec<Expr>> = BTreeMap::new();
        for ((idx, k), c) in &self.terms {
            let term = if *k == 0 {
                c.clone()
            } else {
                let x = self.chart.x_name().expect("nonzero exponent needs a hypersurface");
                c * Expr::var(x).powi(-k)
            };
            out.entry(idx.clone()).or_default().push(term);
        }
        out.into_iter().map(|(i, v)| (i, Expr::sum(v))).collect()
    }

    /// Numeric coefficients at a point of `M∖Z`, including the pole factors.
    pub fn evaluate_at(&self, p: &[f64]) -> Result<BTreeMap<Vec<usize>, f64>, GeometryError> {
        let names = self.chart.names();
        let mut out: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let xi = self.chart.z;
        for ((idx, k), c) in &self.terms {
            let compiled = Compiled::new(c, &names)?;
            let mut v = compiled.eval(p);
            if *k != 0 {
                let x = p[xi.ok_or(GeometryError::NoHypersurface)?];
                v *= x.powi(-(*k as i32));
            }
            if !v.is_finite() {
                return Err(GeometryError::Evaluation(format!(
                    "non-finite coefficient on {:?} at {:?}",
                    idx.iter().map(|i| self.chart.name_of(*i)).collect::<Vec<_>>(),
                    p
                )));
            }
            *out.entry(idx.clone()).or_insert(0.0) += v;
        }
        Ok(out)
    }

    /// Replaces every coefficient by its full expansion.
    pub fn expanded(&self) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for ((idx, k), c) in &self.terms {
            out.insert(idx.clone(), *k, c.expand());
        }
        out
    }

    pub fn map_coefficients(&self, f: impl Fn(&Expr) -> Expr) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for ((idx, k), c) in &self.terms {
            out.insert(idx.clone(), *k, f(c));
        }
        out
    }

    /// Same object viewed on another chart with identical coordinates.
    pub fn rechart(&self, chart: &Arc<Chart>) -> Result<Self, GeometryError> {
        if chart.names() != self.chart.names() {
            return Err(GeometryError::ChartMismatch(self.chart.name.clone(), chart.name.clone()));
        }
        let mut out = Self::zero(chart, self.degree);
        for ((idx, k), c) in &self.terms {
            out.insert(idx.clone(), *k, c.clone());
        }
        Ok(out)
    }

    /// Human-readable rendering, e.g. `x^-3 (var s) dx^dt`.
    pub fn describe(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let sep = if S::LABEL == "form" { "d" } else { "∂" };
        self.terms
            .iter()
            .map(|((idx, k), c)| {
                let basis: Vec<String> = idx.iter().map(|i| format!("{sep}{}", self.chart.name_of(*i))).collect();
                let pole = if *k == 0 { String::new() } else { format!("x^{} ", -k) };
                format!("{pole}{} {}", c, basis.join("^"))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl SingularForm {
    /// `d` of a coordinate function.
    pub fn d_coordinate(chart: &Arc<Chart>, name: &str) -> Result<SingularForm, GeometryError> {
        SingularForm::basis(chart, name)
    }

    /// `df` of a function.
    pub fn differential(chart: &Arc<Chart>, f: &Expr) -> Result<SingularForm, GeometryError> {
        SingularForm::scalar(chart, f.clone()).exterior_derivative()
    }

    /// `d(x^{-k} g dI) = -k x^{-k-1} dx ∧ g dI + x^{-k} dg ∧ dI`.
    pub fn exterior_derivative(&self) -> Result<SingularForm, GeometryError> {
        let mut out = SingularForm::zero(&self.chart, self.degree + 1);
        let names = self.chart.names();
        for ((idx, k), c) in &self.terms {
            if *k != 0 {
                let xi = self.chart.z.ok_or(GeometryError::NoHypersurface)?;
                let mut full = vec![xi];
                full.extend(idx.iter().copied());
                if let Some((sorted, sign)) = sort_sign(&full) {
                    let coeff = c.scale(&Rational::from_integer((-k * sign).into()));
                    out.insert(sorted, k + 1, coeff);
                }
            }
            for (j, name) in names.iter().enumerate() {
                let dc = c.diff(name);
                if dc.is_const_zero() {
                    continue;
                }
                let mut full = vec![j];
                full.extend(idx.iter().copied());
                if let Some((sorted, sign)) = sort_sign(&full) {
                    out.insert(sorted, *k, if sign < 0 { -dc } else { dc });
                }
            }
        }
        Ok(out)
    }

    /// `i_V f = f(V, ·)` for a multivector `V`; Laurent exponents add.
    pub fn interior(&self, v: &Multivector) -> Result<SingularForm, GeometryError> {
        self.check_same_chart(&v.chart)?;
        if v.degree > self.degree {
            return Err(GeometryError::DegreeMismatch(v.degree, self.degree));
        }
        let mut out = SingularForm::zero(&self.chart, self.degree - v.degree);
        for ((jv, kv), cv) in &v.terms {
            for ((i, kf), cf) in &self.terms {
                if !jv.iter().all(|j| i.contains(j)) {
                    continue;
                }
                let rest: Vec<usize> = i.iter().copied().filter(|a| !jv.contains(a)).collect();
                let mut order = jv.clone();
                order.extend(rest.iter().copied());
                let (_, sign) = sort_sign(&order).expect("distinct indices");
                let c = cv * cf;
                out.insert(rest, kv + kf, if sign < 0 { -c } else { c });
            }
        }
        Ok(out)
    }

    /// `L_V f = i_V df + d i_V f` for a vector field `V`.
    pub fn lie_derivative(&self, v: &Multivector) -> Result<SingularForm, GeometryError> {
        if v.degree != 1 {
            return Err(GeometryError::DegreeMismatch(v.degree, 1));
        }
        let a = self.exterior_derivative()?.interior(v)?;
        if self.degree == 0 {
            return Ok(a);
        }
        a.add(&self.interior(v)?.exterior_derivative()?)
    }

    /// `f ∧ … ∧ f` (n factors) for a 2-form.
    pub fn top_power(&self, n: usize) -> Result<SingularForm, GeometryError> {
        if self.degree != 2 {
            return Err(GeometryError::DegreeMismatch(self.degree, 2));
        }
        let mut acc = SingularForm::scalar(&self.chart, Expr::one());
        for _ in 0..n {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Restriction to Z: drop `dx` terms, set `x = 0`. Coefficients must be
    /// smooth (every exponent `≤ 0`).
    pub fn restrict_to_z(&self) -> Result<SingularForm, GeometryError> {
        let xi = self.chart.z.ok_or(GeometryError::NoHypersurface)?;
        let zchart = self.chart.hypersurface()?;
        let x = self.chart.name_of(xi).to_string();
        let mut out = SingularForm::zero(&zchart, self.degree);
        for ((idx, k), c) in &self.terms {
            if idx.contains(&xi) {
                continue;
            }
            if *k > 0 {
                return Err(GeometryError::Singular(format!("term with exponent {k} has no restriction to Z")));
            }
            if *k < 0 {
                continue;
            }
            let idx2: Vec<usize> = idx.iter().map(|i| if *i > xi { i - 1 } else { *i }).collect();
            out.insert(idx2, 0, c.subs(&x, &Expr::zero()));
        }
        Ok(out)
    }

    /// Splits off `dx`: returns `(a, b)` with `f = dx ∧ a + b`, no `dx` in `a`, `b`.
    pub fn split_dx(&self) -> Result<(SingularForm, SingularForm), GeometryError> {
        let xi = self.chart.z.ok_or(GeometryError::NoHypersurface)?;
        let mut a = SingularForm::zero(&self.chart, self.degree.saturating_sub(1));
        let mut b = SingularForm::zero(&self.chart, self.degree);
        for ((idx, k), c) in &self.terms {
            if let Some(pos) = idx.iter().position(|i| *i == xi) {
                let rest: Vec<usize> = idx.iter().copied().filter(|i| *i != xi).collect();
                let c = if pos % 2 == 1 { -c.clone() } else { c.clone() };
                a.insert(rest, *k, c);
            } else {
                b.insert(idx.clone(), *k, c.clone());
            }
        }
        Ok((a, b))
    }

    /// Lifts a form on the hypersurface chart back to the full chart.
    pub fn lift_from_z(chart: &Arc<Chart>, f: &SingularForm) -> Result<SingularForm, GeometryError> {
        let xi = chart.z.ok_or(GeometryError::NoHypersurface)?;
        if f.chart.names() != chart.hypersurface()?.names() {
            return Err(GeometryError::ChartMismatch(f.chart.name.clone(), chart.name.clone()));
        }
        let mut out = SingularForm::zero(chart, f.degree);
        for ((idx, k), c) in &f.terms {
            let idx2: Vec<usize> = idx.iter().map(|i| if *i >= xi { i + 1 } else { *i }).collect();
            out.insert(idx2, *k, c.clone());
        }
        Ok(out)
    }

    /// `dx ∧ a` where `dx` is the differential of the Z coordinate.
    pub fn dx_wedge(&self) -> Result<SingularForm, GeometryError> {
        let x = self.chart.x_name().ok_or(GeometryError::NoHypersurface)?.to_string();
        SingularForm::basis(&self.chart, &x)?.wedge(self)
    }
}

impl Multivector {
    /// Contraction of a form by this multivector.
    pub fn contract(&self, f: &SingularForm) -> Result<SingularForm, GeometryError> {
        f.interior(self)
    }

    /// Action of a vector field on a function.
    pub fn apply(&self, f: &Expr) -> Result<Expr, GeometryError> {
        if self.degree != 1 {
            return Err(GeometryError::DegreeMismatch(self.degree, 1));
        }
        let df = SingularForm::differential(&self.chart, f)?;
        let s = df.interior(self)?;
        Ok(Expr::sum(s.plain_coefficients().into_values()))
    }
}
