//! Symbolic scalar expressions with exact rational constants.
//!
//! Expressions are immutable, reference-counted trees kept in a light
//! canonical form by the smart constructors (flattened sums and products,
//! like terms and like powers merged, operands sorted). Full distribution of
//! products over sums is available through [`Expr::expand`].

mod build;
mod calculus;
mod eval;
mod sexpr;
mod zero;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use eval::{Compiled, Point, Scalar};
pub use zero::{BoxDomain, ZeroVerdict, DEFAULT_SEED};

pub type Rational = BigRational;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("domain error in `{subtree}`: {reason}")]
    Domain { subtree: String, reason: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty domain: {0}")]
    EmptyDomain(String),
    #[error("unsupported expansion: {0}")]
    UnsupportedExpansion(String),
}

/// A shared, immutable expression node.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Expr(Arc<Node>);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Const(Rational),
    Var(Arc<str>),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Expr, Rational),
    Exp(Expr),
    Sin(Expr),
    Cos(Expr),
    Decay(Decay),
}

/// A piecewise function of one argument whose pieces are separated by exact
/// rational breakpoints. Non-constant branches are expected to be flat at the
/// breakpoints (built from `exp(-1/(r-a))` style factors), so every
/// derivative is continuous across them.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decay {
    pub arg: Expr,
    pub breaks: Vec<Rational>,
    pub branches: Vec<Expr>,
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl Expr {
    pub(crate) fn from_node(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(q: Rational) -> Expr {
        Expr::from_node(Node::Const(q))
    }

    pub fn int(n: i64) -> Expr {
        Expr::constant(int(n))
    }

    pub fn rat(n: i64, d: i64) -> Expr {
        Expr::constant(rat(n, d))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(name: &str) -> Expr {
        Expr::from_node(Node::Var(Arc::from(name)))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self.node() {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }

    pub fn is_const_zero(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_zero())
    }

    pub fn is_const_one(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_one())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.node() {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    pub fn sum<I: IntoIterator<Item = Expr>>(terms: I) -> Expr {
        build::sum(terms.into_iter().collect())
    }

    pub fn product<I: IntoIterator<Item = Expr>>(factors: I) -> Expr {
        build::product(factors.into_iter().collect())
    }

    pub fn pow(&self, q: Rational) -> Expr {
        build::pow(self.clone(), q)
    }

    pub fn powi(&self, n: i64) -> Expr {
        self.pow(int(n))
    }

    pub fn recip(&self) -> Expr {
        self.powi(-1)
    }

    pub fn sqrt(&self) -> Expr {
        self.pow(rat(1, 2))
    }

    pub fn exp(&self) -> Expr {
        build::exp(self.clone())
    }

    pub fn sin(&self) -> Expr {
        build::sin(self.clone())
    }

    pub fn cos(&self) -> Expr {
        build::cos(self.clone())
    }

    pub fn scale(&self, q: &Rational) -> Expr {
        build::product(vec![Expr::constant(q.clone()), self.clone()])
    }

    /// Piecewise function of `arg`: `branches[i]` applies between
    /// `breaks[i-1]` and `breaks[i]`.
    pub fn decay(arg: Expr, breaks: Vec<Rational>, branches: Vec<Expr>) -> Expr {
        build::decay(arg, breaks, branches)
    }

    /// Splits a term into its rational coefficient and the remaining factor.
    pub fn split_coeff(&self) -> (Rational, Expr) {
        build::split_coeff(self)
    }

    /// Summands of a sum, or the expression itself.
    pub fn terms(&self) -> Vec<Expr> {
        match self.node() {
            Node::Sum(ts) => ts.clone(),
            _ if self.is_const_zero() => vec![],
            _ => vec![self.clone()],
        }
    }

    /// Factors of a product, or the expression itself.
    pub fn factors(&self) -> Vec<Expr> {
        match self.node() {
            Node::Prod(fs) => fs.clone(),
            _ => vec![self.clone()],
        }
    }

    pub fn free_vars(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut std::collections::BTreeSet<String>) {
        match self.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Sum(xs) | Node::Prod(xs) => xs.iter().for_each(|x| x.collect_vars(out)),
            Node::Pow(b, _) => b.collect_vars(out),
            Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => a.collect_vars(out),
            Node::Decay(d) => {
                d.arg.collect_vars(out);
                d.branches.iter().for_each(|x| x.collect_vars(out));
            }
        }
    }

    pub fn depends_on(&self, v: &str) -> bool {
        match self.node() {
            Node::Const(_) => false,
            Node::Var(w) => &**w == v,
            Node::Sum(xs) | Node::Prod(xs) => xs.iter().any(|x| x.depends_on(v)),
            Node::Pow(b, _) => b.depends_on(v),
            Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => a.depends_on(v),
            Node::Decay(d) => d.arg.depends_on(v) || d.branches.iter().any(|x| x.depends_on(v)),
        }
    }

    /// Number of nodes in the tree, counting shared subtrees repeatedly.
    pub fn size(&self) -> usize {
        1 + match self.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Sum(xs) | Node::Prod(xs) => xs.iter().map(Expr::size).sum(),
            Node::Pow(b, _) => b.size(),
            Node::Exp(a) | Node::Sin(a) | Node::Cos(a) => a.size(),
            Node::Decay(d) => d.arg.size() + d.branches.iter().map(Expr::size).sum::<usize>(),
        }
    }

    /// Power of the variable `v` appearing as a bare factor, with the rest.
    /// For `3·x^2·y` and `v = x` this returns `(2, 3·y)`.
    pub fn split_var_power(&self, v: &str) -> (Rational, Expr) {
        let mut power = Rational::zero();
        let mut rest = Vec::new();
        for f in self.factors() {
            match f.node() {
                Node::Var(w) if &**w == v => power += Rational::one(),
                Node::Pow(b, q) if b.as_var() == Some(v) => power += q.clone(),
                _ => rest.push(f),
            }
        }
        (power, Expr::product(rest))
    }

    /// True when structurally equal after full expansion.
    pub fn same_as(&self, other: &Expr) -> bool {
        (self - other).expand().is_const_zero()
    }
}

pub(crate) fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => q.to_f64().unwrap_or(f64::NAN),
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sexpr())
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Expr {
        Expr::int(n)
    }
}

impl From<Rational> for Expr {
    fn from(q: Rational) -> Expr {
        Expr::constant(q)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self, rhs.clone())
            }
        }
        impl $tr<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs)
            }
        }
        impl $tr<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                let f: fn(Expr, Expr) -> Expr = $body;
                f(self.clone(), rhs.clone())
            }
        }
    };
}

binop!(Add, add, |a, b| build::sum(vec![a, b]));
binop!(Sub, sub, |a, b| build::sum(vec![a, build::negate(b)]));
binop!(Mul, mul, |a, b| build::product(vec![a, b]));
binop!(Div, div, |a, b| build::product(vec![a, build::pow(b, int(-1))]));

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        build::negate(self)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        build::negate(self.clone())
    }
}

macro_rules! scalar_op {
    ($tr:ident, $method:ident) => {
        impl $tr<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $tr::$method(self, Expr::int(rhs))
            }
        }
        impl $tr<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $tr::$method(self, Expr::int(rhs))
            }
        }
    };
}

scalar_op!(Add, add);
scalar_op!(Sub, sub);
scalar_op!(Mul, mul);
scalar_op!(Div, div);
