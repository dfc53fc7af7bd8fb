use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive};

use super::{build, Expr, Node, Rational};

/// Term-count ceiling for [`Expr::expand`]; larger expansions keep the
/// factored form.
pub const EXPAND_LIMIT: usize = 20_000;

impl Expr {
    /// Exact partial derivative. Piecewise nodes are differentiated branchwise.
    pub fn diff(&self, v: &str) -> Expr {
        if !self.depends_on(v) {
            return Expr::zero();
        }
        match self.node() {
            Node::Const(_) => Expr::zero(),
            Node::Var(w) => {
                if &**w == v {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Node::Sum(ts) => Expr::sum(ts.iter().map(|t| t.diff(v))),
            Node::Prod(fs) => {
                let mut terms = Vec::new();
                for (i, f) in fs.iter().enumerate() {
                    let df = f.diff(v);
                    if df.is_const_zero() {
                        continue;
                    }
                    let mut parts: Vec<Expr> = Vec::with_capacity(fs.len());
                    parts.push(df);
                    parts.extend(fs.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, g)| g.clone()));
                    terms.push(Expr::product(parts));
                }
                Expr::sum(terms)
            }
            Node::Pow(b, q) => {
                let db = b.diff(v);
                Expr::product(vec![Expr::constant(q.clone()), b.pow(q - Rational::one()), db])
            }
            Node::Exp(a) => self * a.diff(v),
            Node::Sin(a) => a.cos() * a.diff(v),
            Node::Cos(a) => -(a.sin() * a.diff(v)),
            Node::Decay(d) => Expr::decay(
                d.arg.clone(),
                d.breaks.clone(),
                d.branches.iter().map(|b| b.diff(v)).collect(),
            ),
        }
    }

    /// Replaces variables by expressions, rebuilding through the smart
    /// constructors.
    pub fn substitute(&self, map: &BTreeMap<String, Expr>) -> Expr {
        match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(w) => map.get(&**w).cloned().unwrap_or_else(|| self.clone()),
            Node::Sum(ts) => Expr::sum(ts.iter().map(|t| t.substitute(map))),
            Node::Prod(fs) => Expr::product(fs.iter().map(|t| t.substitute(map))),
            Node::Pow(b, q) => b.substitute(map).pow(q.clone()),
            Node::Exp(a) => a.substitute(map).exp(),
            Node::Sin(a) => a.substitute(map).sin(),
            Node::Cos(a) => a.substitute(map).cos(),
            Node::Decay(d) => Expr::decay(
                d.arg.substitute(map),
                d.breaks.clone(),
                d.branches.iter().map(|b| b.substitute(map)).collect(),
            ),
        }
    }

    pub fn subs(&self, v: &str, value: &Expr) -> Expr {
        let mut map = BTreeMap::new();
        map.insert(v.to_string(), value.clone());
        self.substitute(&map)
    }

    /// Fully distributes products over sums and expands positive integer
    /// powers of sums, recursively inside function arguments. Falls back to
    /// the input when the result would exceed [`EXPAND_LIMIT`] terms.
    pub fn expand(&self) -> Expr {
        self.expand_within(EXPAND_LIMIT).unwrap_or_else(|| self.clone())
    }

    pub fn expand_within(&self, limit: usize) -> Option<Expr> {
        match self.node() {
            Node::Const(_) | Node::Var(_) => Some(self.clone()),
            Node::Sum(ts) => {
                let mut out = Vec::with_capacity(ts.len());
                for t in ts {
                    out.push(t.expand_within(limit)?);
                }
                let s = Expr::sum(out);
                (s.terms().len() <= limit).then_some(s)
            }
            Node::Prod(fs) => {
                let mut acc: Vec<Expr> = vec![Expr::one()];
                for f in fs {
                    let fe = f.expand_within(limit)?;
                    let ft = fe.terms();
                    if ft.len() * acc.len() > limit * 4 {
                        return None;
                    }
                    let mut next = Vec::with_capacity(ft.len() * acc.len());
                    for a in &acc {
                        for t in &ft {
                            next.push(build::product(vec![a.clone(), t.clone()]));
                        }
                    }
                    let s = Expr::sum(next);
                    acc = s.terms();
                    if acc.len() > limit {
                        return None;
                    }
                    if acc.is_empty() {
                        return Some(Expr::zero());
                    }
                }
                Some(Expr::sum(acc))
            }
            Node::Pow(b, q) => {
                let be = b.expand_within(limit)?;
                if q.is_integer() && q.is_positive() && matches!(be.node(), Node::Sum(_)) {
                    let n = q.to_usize()?;
                    if n > 16 {
                        return Some(be.pow(q.clone()));
                    }
                    let bt = be.terms();
                    let mut acc: Vec<Expr> = vec![Expr::one()];
                    for _ in 0..n {
                        if acc.len() * bt.len() > limit * 4 {
                            return None;
                        }
                        let mut next = Vec::with_capacity(acc.len() * bt.len());
                        for a in &acc {
                            for t in &bt {
                                next.push(build::product(vec![a.clone(), t.clone()]));
                            }
                        }
                        acc = Expr::sum(next).terms();
                        if acc.len() > limit {
                            return None;
                        }
                    }
                    return Some(Expr::sum(acc));
                }
                Some(be.pow(q.clone()))
            }
            Node::Exp(a) => {
                let ae = a.expand_within(limit)?;
                Some(ae.exp())
            }
            Node::Sin(a) => Some(a.expand_within(limit)?.sin()),
            Node::Cos(a) => Some(a.expand_within(limit)?.cos()),
            Node::Decay(d) => {
                let mut branches = Vec::with_capacity(d.branches.len());
                for b in &d.branches {
                    branches.push(b.expand_within(limit)?);
                }
                Some(Expr::decay(d.arg.expand_within(limit)?, d.breaks.clone(), branches))
            }
        }
    }

    /// Taylor coefficient `(1/j!) ∂_v^j e |_{v=0}` for `j = 0..=order`.
    pub fn taylor_coefficients(&self, v: &str, order: usize) -> Vec<Expr> {
        let zero = Expr::zero();
        let mut out = Vec::with_capacity(order + 1);
        let mut current = self.clone();
        let mut factorial = Rational::one();
        for j in 0..=order {
            if j > 0 {
                current = current.diff(v);
                factorial *= Rational::from_integer(j.into());
            }
            let c = current.subs(v, &zero).expand();
            out.push(c.scale(&factorial.recip()));
        }
        out
    }
}
