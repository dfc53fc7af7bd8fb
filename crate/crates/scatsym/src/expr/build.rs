use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Decay, Expr, Node, Rational};

pub(super) fn negate(e: Expr) -> Expr {
    product(vec![Expr::int(-1), e])
}

pub(super) fn split_coeff(e: &Expr) -> (Rational, Expr) {
    match e.node() {
        Node::Const(q) => (q.clone(), Expr::one()),
        Node::Prod(fs) => match fs[0].node() {
            Node::Const(q) => {
                let rest: Vec<Expr> = fs[1..].to_vec();
                let rest = if rest.len() == 1 {
                    rest.into_iter().next().unwrap()
                } else {
                    Expr::from_node(Node::Prod(rest))
                };
                (q.clone(), rest)
            }
            _ => (Rational::one(), e.clone()),
        },
        _ => (Rational::one(), e.clone()),
    }
}

fn with_coeff(q: Rational, rest: Expr) -> Expr {
    if q.is_zero() {
        return Expr::zero();
    }
    if q.is_one() {
        return rest;
    }
    match rest.node() {
        Node::Const(r) => Expr::constant(q * r),
        Node::Prod(fs) => {
            let mut v = Vec::with_capacity(fs.len() + 1);
            v.push(Expr::constant(q));
            v.extend(fs.iter().cloned());
            Expr::from_node(Node::Prod(v))
        }
        _ => Expr::from_node(Node::Prod(vec![Expr::constant(q), rest])),
    }
}

fn push_term(t: &Expr, scale: &Rational, constant: &mut Rational, like: &mut BTreeMap<Expr, Rational>) {
    match t.node() {
        Node::Const(q) => *constant += q * scale,
        Node::Sum(inner) => inner.iter().for_each(|u| push_term(u, scale, constant, like)),
        _ => {
            let (q, rest) = split_coeff(t);
            let q = q * scale;
            if let Node::Sum(inner) = rest.node() {
                inner.iter().for_each(|u| push_term(u, &q, constant, like));
            } else {
                *like.entry(rest).or_insert_with(Rational::zero) += q;
            }
        }
    }
}

pub(super) fn sum(terms: Vec<Expr>) -> Expr {
    let mut constant = Rational::zero();
    let mut like: BTreeMap<Expr, Rational> = BTreeMap::new();
    let one = Rational::one();
    for t in &terms {
        push_term(t, &one, &mut constant, &mut like);
    }
    let mut out = Vec::with_capacity(like.len() + 1);
    if !constant.is_zero() {
        out.push(Expr::constant(constant));
    }
    for (rest, q) in like {
        if !q.is_zero() {
            out.push(with_coeff(q, rest));
        }
    }
    match out.len() {
        0 => Expr::zero(),
        1 => out.pop().unwrap(),
        _ => Expr::from_node(Node::Sum(out)),
    }
}

/// Splits a factor into base and exponent, so that like bases merge.
fn base_exponent(f: &Expr) -> (Expr, Rational) {
    match f.node() {
        Node::Pow(b, q) => (b.clone(), q.clone()),
        _ => (f.clone(), Rational::one()),
    }
}

pub(super) fn product(factors: Vec<Expr>) -> Expr {
    let mut coeff = Rational::one();
    let mut bases: BTreeMap<Expr, Rational> = BTreeMap::new();
    let mut exps: Vec<Expr> = Vec::new();
    let mut stack: Vec<Expr> = factors;
    while let Some(f) = stack.pop() {
        match f.node() {
            Node::Const(q) => {
                if q.is_zero() {
                    return Expr::zero();
                }
                coeff *= q;
            }
            Node::Prod(inner) => stack.extend(inner.iter().cloned()),
            Node::Exp(a) => exps.push(a.clone()),
            _ => {
                let (b, q) = base_exponent(&f);
                *bases.entry(b).or_insert_with(Rational::zero) += q;
            }
        }
    }
    let mut out: Vec<Expr> = Vec::with_capacity(bases.len() + 1);
    for (b, q) in bases {
        if q.is_zero() {
            continue;
        }
        let p = pow(b, q);
        match p.node() {
            Node::Const(c) => coeff *= c,
            Node::Prod(_) | Node::Exp(_) => {
                // Integer powers of products (or exponentials) re-enter the merge.
                let (c, rest) = split_coeff(&p);
                coeff *= c;
                for g in rest.factors() {
                    match g.node() {
                        Node::Exp(a) => exps.push(a.clone()),
                        _ => out.push(g),
                    }
                }
            }
            _ => out.push(p),
        }
    }
    if !exps.is_empty() {
        let arg = sum(exps);
        if !arg.is_const_zero() {
            out.push(Expr::from_node(Node::Exp(arg)));
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    // A second pass is needed only if the expansion above produced repeated bases.
    out.sort();
    let distinct: std::collections::BTreeSet<Expr> = out.iter().map(|f| base_exponent(f).0).collect();
    let repeated = distinct.len() < out.len();
    if repeated {
        out.insert(0, Expr::constant(coeff));
        return product(out);
    }
    if out.is_empty() {
        return Expr::constant(coeff);
    }
    if coeff.is_one() && out.len() == 1 {
        return out.pop().unwrap();
    }
    if !coeff.is_one() {
        out.insert(0, Expr::constant(coeff));
    }
    Expr::from_node(Node::Prod(out))
}

fn exact_root(n: &BigInt, r: u32) -> Option<BigInt> {
    if n.is_negative() {
        if r % 2 == 0 {
            return None;
        }
        return exact_root(&-n, r).map(|x| -x);
    }
    let x = n.nth_root(r);
    if num_traits::pow(x.clone(), r as usize) == *n {
        Some(x)
    } else {
        None
    }
}

/// Exact value of `c^q` when it is rational.
pub(super) fn rational_power(c: &Rational, q: &Rational) -> Option<Rational> {
    let r = q.denom().to_u32()?;
    let p = q.numer().to_i32()?;
    if c.is_zero() {
        return if p > 0 { Some(Rational::zero()) } else { None };
    }
    if r > 1 && c.is_negative() {
        return None;
    }
    let num = exact_root(c.numer(), r)?;
    let den = exact_root(c.denom(), r)?;
    let base = Rational::new(num, den);
    if p.unsigned_abs() > 4096 {
        return None;
    }
    Some(num_traits::pow::Pow::pow(base, p))
}

pub(super) fn pow(b: Expr, q: Rational) -> Expr {
    if q.is_zero() {
        return Expr::one();
    }
    if q.is_one() {
        return b;
    }
    match b.node() {
        Node::Const(c) => {
            if c.is_one() {
                return Expr::one();
            }
            match rational_power(c, &q) {
                Some(v) => Expr::constant(v),
                None => Expr::from_node(Node::Pow(b.clone(), q)),
            }
        }
        Node::Pow(inner, q2) if q.is_integer() => pow(inner.clone(), q2 * &q),
        Node::Prod(fs) if q.is_integer() => product(fs.iter().map(|f| pow(f.clone(), q.clone())).collect()),
        Node::Prod(_) => {
            // Pull a positive rational coefficient out of a fractional power.
            let (c, rest) = split_coeff(&b);
            if c.is_positive() && !c.is_one() {
                if let Some(cq) = rational_power(&c, &q) {
                    return product(vec![Expr::constant(cq), pow(rest, q)]);
                }
            }
            Expr::from_node(Node::Pow(b.clone(), q))
        }
        Node::Exp(a) => exp(product(vec![Expr::constant(q), a.clone()])),
        _ => Expr::from_node(Node::Pow(b.clone(), q)),
    }
}

pub(super) fn exp(a: Expr) -> Expr {
    if a.is_const_zero() {
        return Expr::one();
    }
    Expr::from_node(Node::Exp(a))
}

/// True when the expression has a negative leading rational coefficient.
fn negative_leading(a: &Expr) -> bool {
    match a.node() {
        Node::Const(q) => q.is_negative(),
        Node::Prod(_) => split_coeff(a).0.is_negative(),
        _ => false,
    }
}

pub(super) fn sin(a: Expr) -> Expr {
    if a.is_const_zero() {
        return Expr::zero();
    }
    if negative_leading(&a) {
        return negate(Expr::from_node(Node::Sin(negate(a))));
    }
    Expr::from_node(Node::Sin(a))
}

pub(super) fn cos(a: Expr) -> Expr {
    if a.is_const_zero() {
        return Expr::one();
    }
    if negative_leading(&a) {
        return Expr::from_node(Node::Cos(negate(a)));
    }
    Expr::from_node(Node::Cos(a))
}

pub(super) fn decay(arg: Expr, breaks: Vec<Rational>, branches: Vec<Expr>) -> Expr {
    assert_eq!(breaks.len() + 1, branches.len(), "piecewise needs one more branch than breakpoints");
    assert!(breaks.windows(2).all(|w| w[0] < w[1]), "breakpoints must increase");
    if branches.iter().all(|b| *b == branches[0]) {
        return branches[0].clone();
    }
    let negative = |b: &Expr| match b.node() {
        Node::Sum(ts) => ts.iter().all(negative_leading),
        _ => negative_leading(b),
    };
    if branches.iter().all(|b| b.is_const_zero() || negative(b)) && !branches.iter().all(Expr::is_const_zero) {
        let flipped: Vec<Expr> = branches
            .iter()
            .map(|b| match b.node() {
                Node::Sum(ts) => sum(ts.iter().cloned().map(negate).collect()),
                _ => negate(b.clone()),
            })
            .collect();
        if !flipped.iter().all(|b| b.is_const_zero() || negative(b)) {
            return negate(decay(arg, breaks, flipped));
        }
    }
    if let Node::Const(c) = arg.node() {
        let i = breaks.iter().filter(|b| *b < c).count();
        let at_break = breaks.iter().any(|b| b == c);
        if !at_break {
            return branches[i].clone();
        }
        // Non-constant branches are flat at their breakpoints, so a constant
        // neighbour determines every derivative there.
        for j in [i, i + 1] {
            if branches[j].as_const().is_some() {
                return branches[j].clone();
            }
        }
    }
    Expr::from_node(Node::Decay(Decay { arg, breaks, branches }))
}
