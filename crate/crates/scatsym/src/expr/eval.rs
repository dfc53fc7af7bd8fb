use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, ToPrimitive, Zero};

use super::{build, rational_to_f64, Expr, ExprError, Node, Rational};

/// A coordinate value: exact rational or binary64.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Real(f64),
}

impl Scalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => rational_to_f64(q),
            Scalar::Real(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_zero(),
            Scalar::Real(v) => *v == 0.0,
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Scalar {
        Scalar::Real(v)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Scalar {
        Scalar::Exact(q)
    }
}

pub type Point = BTreeMap<String, Scalar>;

fn domain(e: &Expr, reason: &str) -> ExprError {
    let mut subtree = e.to_sexpr();
    if subtree.len() > 200 {
        subtree.truncate(200);
        subtree.push_str("...");
    }
    ExprError::Domain { subtree, reason: reason.to_string() }
}

impl Expr {
    /// Evaluates at a point. The result is exact when every constant and
    /// input involved is rational and no transcendental function is reached.
    pub fn evaluate(&self, point: &Point) -> Result<Scalar, ExprError> {
        let v = self.eval_scalar(point)?;
        if let Scalar::Real(x) = v {
            if !x.is_finite() {
                return Err(domain(self, "non-finite value"));
            }
        }
        Ok(v)
    }

    pub fn eval_f64(&self, point: &Point) -> Result<f64, ExprError> {
        self.evaluate(point).map(|s| s.to_f64())
    }

    fn eval_scalar(&self, point: &Point) -> Result<Scalar, ExprError> {
        match self.node() {
            Node::Const(q) => Ok(Scalar::Exact(q.clone())),
            Node::Var(v) => point.get(&**v).cloned().ok_or_else(|| ExprError::UnboundVariable(v.to_string())),
            Node::Sum(ts) => {
                let mut exact = Some(Rational::zero());
                let mut real = 0.0;
                for t in ts {
                    match t.eval_scalar(point)? {
                        Scalar::Exact(q) => {
                            real += rational_to_f64(&q);
                            if let Some(e) = exact.as_mut() {
                                *e += q;
                            }
                        }
                        Scalar::Real(x) => {
                            real += x;
                            exact = None;
                        }
                    }
                }
                Ok(exact.map(Scalar::Exact).unwrap_or(Scalar::Real(real)))
            }
            Node::Prod(fs) => {
                let mut exact = Some(Rational::from_integer(1.into()));
                let mut real = 1.0;
                let mut saw_zero = false;
                for f in fs {
                    match f.eval_scalar(point)? {
                        Scalar::Exact(q) => {
                            saw_zero |= q.is_zero();
                            real *= rational_to_f64(&q);
                            if let Some(e) = exact.as_mut() {
                                *e *= q;
                            }
                        }
                        Scalar::Real(x) => {
                            saw_zero |= x == 0.0;
                            real *= x;
                            exact = None;
                        }
                    }
                }
                if saw_zero {
                    // Flat factors underflow to zero before their polar partners overflow.
                    return Ok(Scalar::Exact(Rational::zero()));
                }
                Ok(exact.map(Scalar::Exact).unwrap_or(Scalar::Real(real)))
            }
            Node::Pow(b, q) => {
                let base = b.eval_scalar(point)?;
                if base.is_zero() && q.is_negative() {
                    return Err(domain(self, "division by zero"));
                }
                match base {
                    Scalar::Exact(c) => {
                        if q.is_integer() || !c.is_negative() {
                            if let Some(v) = build::rational_power(&c, q) {
                                return Ok(Scalar::Exact(v));
                            }
                        }
                        real_pow(rational_to_f64(&c), q)
                            .map(Scalar::Real)
                            .ok_or_else(|| domain(self, "negative base with fractional exponent"))
                    }
                    Scalar::Real(x) => real_pow(x, q).map(Scalar::Real).ok_or_else(|| domain(self, "negative base with fractional exponent")),
                }
            }
            Node::Exp(a) => match a.eval_scalar(point)? {
                Scalar::Exact(q) if q.is_zero() => Ok(Scalar::Exact(Rational::from_integer(1.into()))),
                s => Ok(Scalar::Real(s.to_f64().exp())),
            },
            Node::Sin(a) => match a.eval_scalar(point)? {
                Scalar::Exact(q) if q.is_zero() => Ok(Scalar::Exact(Rational::zero())),
                s => Ok(Scalar::Real(s.to_f64().sin())),
            },
            Node::Cos(a) => match a.eval_scalar(point)? {
                Scalar::Exact(q) if q.is_zero() => Ok(Scalar::Exact(Rational::from_integer(1.into()))),
                s => Ok(Scalar::Real(s.to_f64().cos())),
            },
            Node::Decay(d) => {
                let at = d.arg.eval_scalar(point)?;
                let branch = match &at {
                    Scalar::Exact(c) => select_exact(&d.breaks, &d.branches, c),
                    Scalar::Real(x) => {
                        let breaks: Vec<f64> = d.breaks.iter().map(rational_to_f64).collect();
                        select_real(&breaks, &d.branches, *x)
                    }
                };
                branch.eval_scalar(point)
            }
        }
    }
}

fn real_pow(x: f64, q: &Rational) -> Option<f64> {
    if let Some(n) = q.to_i32().filter(|_| q.is_integer()) {
        return Some(x.powi(n));
    }
    if x < 0.0 {
        let den = q.denom().to_i64()?;
        if den % 2 == 1 {
            let v = (-x).powf(rational_to_f64(q));
            let num = q.numer().to_i64()?;
            return Some(if num % 2 == 0 { v } else { -v });
        }
        return None;
    }
    if *q == super::rat(1, 2) {
        return Some(x.sqrt());
    }
    Some(x.powf(rational_to_f64(q)))
}

/// Picks the branch for an argument value. At a breakpoint the adjacent
/// constant branch wins, giving the limit of a flat branch.
fn select_exact<'a>(breaks: &[Rational], branches: &'a [Expr], c: &Rational) -> &'a Expr {
    let i = breaks.iter().filter(|b| *b < c).count();
    if i < breaks.len() && breaks[i] == *c {
        return at_break(branches, i);
    }
    &branches[i]
}

fn select_real<'a>(breaks: &[f64], branches: &'a [Expr], x: f64) -> &'a Expr {
    let i = breaks.iter().filter(|b| **b < x).count();
    if i < breaks.len() && breaks[i] == x {
        return at_break(branches, i);
    }
    &branches[i]
}

fn at_break(branches: &[Expr], i: usize) -> &Expr {
    if branches[i].as_const().is_some() {
        &branches[i]
    } else if branches[i + 1].as_const().is_some() {
        &branches[i + 1]
    } else {
        &branches[i]
    }
}

/// An expression lowered to a straight-line program over variable slots,
/// with structurally equal subexpressions evaluated once. Domain errors
/// evaluate to NaN.
#[derive(Clone, Debug)]
pub struct Compiled {
    ops: Vec<Op>,
    vars: Vec<String>,
}

#[derive(Clone, Debug)]
enum Op {
    Const(f64),
    Var(usize),
    Sum(Vec<usize>),
    Prod(Vec<usize>),
    Powi(usize, i32),
    Sqrt(usize),
    Powf(usize, f64, Rational),
    Exp(usize),
    Sin(usize),
    Cos(usize),
    Decay { arg: usize, breaks: Vec<f64>, branches: Vec<usize>, constant: Vec<bool> },
}

impl Compiled {
    pub fn new(e: &Expr, vars: &[String]) -> Result<Compiled, ExprError> {
        let mut lowering = Lowering { ops: Vec::new(), seen: HashMap::new(), vars };
        lowering.lower(e)?;
        Ok(Compiled { ops: lowering.ops, vars: vars.to_vec() })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut vals = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = step(op, &vals, x);
            vals.push(v);
        }
        vals.last().copied().unwrap_or(f64::NAN)
    }

    /// Value together with a first-order bound on its accumulated rounding
    /// error (running error analysis, unit roundoff per operation).
    pub fn eval_with_error(&self, x: &[f64]) -> (f64, f64) {
        let mut vals = Vec::with_capacity(self.ops.len());
        let mut errs: Vec<f64> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let v = step(op, &vals, x);
            let e = rounding(op, v, &vals, &errs);
            vals.push(v);
            errs.push(e);
        }
        match (vals.last(), errs.last()) {
            (Some(v), Some(e)) => (*v, *e),
            _ => (f64::NAN, f64::NAN),
        }
    }
}

const UNIT_ROUNDOFF: f64 = f64::EPSILON / 2.0;

fn rounding(op: &Op, v: f64, vals: &[f64], errs: &[f64]) -> f64 {
    let u = UNIT_ROUNDOFF;
    match op {
        Op::Const(c) => c.abs() * u,
        Op::Var(_) => 0.0,
        Op::Sum(ts) => {
            let n = ts.len() as f64;
            ts.iter().map(|t| errs[*t] + n * u * vals[*t].abs()).sum()
        }
        Op::Prod(fs) => {
            let n = fs.len() as f64;
            let mut e = n * u * v.abs();
            for (j, f) in fs.iter().enumerate() {
                let others: f64 = fs.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, g)| vals[*g].abs()).product();
                e += errs[*f] * others;
            }
            e
        }
        Op::Powi(b, n) => {
            let bv = vals[*b];
            let slope = (*n as f64) * bv.powi(n - 1);
            slope.abs() * errs[*b] + (n.unsigned_abs() as f64).log2().ceil().max(1.0) * 2.0 * u * v.abs()
        }
        Op::Sqrt(b) => {
            if v > 0.0 {
                errs[*b] / (2.0 * v) + u * v
            } else {
                errs[*b].sqrt()
            }
        }
        Op::Powf(b, p, _) => {
            let bv = vals[*b];
            (p * bv.abs().powf(p - 1.0)).abs() * errs[*b] + 4.0 * u * v.abs()
        }
        Op::Exp(a) => v.abs() * (errs[*a] + 2.0 * u),
        Op::Sin(a) | Op::Cos(a) => errs[*a] + 2.0 * u,
        Op::Decay { arg, breaks, branches, .. } => {
            let t = vals[*arg];
            let i = breaks.iter().filter(|b| **b < t).count().min(branches.len() - 1);
            errs[branches[i]]
        }
    }
}

struct Lowering<'a> {
    ops: Vec<Op>,
    seen: HashMap<Expr, usize>,
    vars: &'a [String],
}

impl Lowering<'_> {
    fn lower(&mut self, e: &Expr) -> Result<usize, ExprError> {
        if let Some(&i) = self.seen.get(e) {
            return Ok(i);
        }
        let op = match e.node() {
            Node::Const(q) => Op::Const(rational_to_f64(q)),
            Node::Var(v) => Op::Var(
                self.vars.iter().position(|w| w == &**v).ok_or_else(|| ExprError::UnboundVariable(v.to_string()))?,
            ),
            Node::Sum(ts) => Op::Sum(ts.iter().map(|t| self.lower(t)).collect::<Result<_, _>>()?),
            Node::Prod(fs) => Op::Prod(fs.iter().map(|t| self.lower(t)).collect::<Result<_, _>>()?),
            Node::Pow(b, q) => {
                let b = self.lower(b)?;
                if q.is_integer() && q.to_i32().is_some() {
                    Op::Powi(b, q.to_i32().unwrap())
                } else if *q == super::rat(1, 2) {
                    Op::Sqrt(b)
                } else {
                    Op::Powf(b, rational_to_f64(q), q.clone())
                }
            }
            Node::Exp(a) => Op::Exp(self.lower(a)?),
            Node::Sin(a) => Op::Sin(self.lower(a)?),
            Node::Cos(a) => Op::Cos(self.lower(a)?),
            Node::Decay(d) => Op::Decay {
                arg: self.lower(&d.arg)?,
                breaks: d.breaks.iter().map(rational_to_f64).collect(),
                branches: d.branches.iter().map(|b| self.lower(b)).collect::<Result<_, _>>()?,
                constant: d.branches.iter().map(|b| b.as_const().is_some()).collect(),
            },
        };
        self.ops.push(op);
        let i = self.ops.len() - 1;
        self.seen.insert(e.clone(), i);
        Ok(i)
    }
}

fn step(op: &Op, vals: &[f64], x: &[f64]) -> f64 {
    match op {
        Op::Const(c) => *c,
        Op::Var(i) => x[*i],
        Op::Sum(ts) => ts.iter().map(|t| vals[*t]).sum(),
        Op::Prod(fs) => {
            let mut acc = 1.0;
            let mut zero = false;
            let mut nan = false;
            for f in fs {
                let v = vals[*f];
                zero |= v == 0.0;
                nan |= v.is_nan();
                acc *= v;
            }
            if nan {
                f64::NAN
            } else if zero {
                0.0
            } else {
                acc
            }
        }
        Op::Powi(b, n) => {
            let v = vals[*b];
            if v == 0.0 && *n < 0 {
                f64::NAN
            } else {
                v.powi(*n)
            }
        }
        Op::Sqrt(b) => {
            let v = vals[*b];
            if v < 0.0 {
                f64::NAN
            } else {
                v.sqrt()
            }
        }
        Op::Powf(b, p, q) => {
            let v = vals[*b];
            if v == 0.0 && *p < 0.0 {
                return f64::NAN;
            }
            real_pow(v, q).unwrap_or(f64::NAN)
        }
        Op::Exp(a) => vals[*a].exp(),
        Op::Sin(a) => vals[*a].sin(),
        Op::Cos(a) => vals[*a].cos(),
        Op::Decay { arg, breaks, branches, constant } => {
            let t = vals[*arg];
            if t.is_nan() {
                return f64::NAN;
            }
            let i = breaks.iter().filter(|b| **b < t).count();
            if i < breaks.len() && breaks[i] == t {
                let j = if constant[i] {
                    i
                } else if constant[i + 1] {
                    i + 1
                } else {
                    i
                };
                return vals[branches[j]];
            }
            vals[branches[i]]
        }
    }
}
