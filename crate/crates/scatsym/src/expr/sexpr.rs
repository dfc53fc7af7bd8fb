use std::fmt::Write;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{Expr, ExprError, Node, Rational};

fn write_rational(out: &mut String, q: &Rational) {
    if q.is_integer() {
        write!(out, "{}", q.numer()).unwrap();
    } else {
        write!(out, "{}/{}", q.numer(), q.denom()).unwrap();
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    let list = |out: &mut String, head: &str, items: &[Expr]| {
        out.push('(');
        out.push_str(head);
        for i in items {
            out.push(' ');
            write_expr(out, i);
        }
        out.push(')');
    };
    match e.node() {
        Node::Const(q) => write_rational(out, q),
        Node::Var(v) => write!(out, "(var {v})").unwrap(),
        Node::Sum(ts) => list(out, "add", ts),
        Node::Prod(fs) => list(out, "mul", fs),
        Node::Pow(b, q) => {
            out.push_str("(pow ");
            write_expr(out, b);
            out.push(' ');
            write_rational(out, q);
            out.push(')');
        }
        Node::Exp(a) => list(out, "exp", std::slice::from_ref(a)),
        Node::Sin(a) => list(out, "sin", std::slice::from_ref(a)),
        Node::Cos(a) => list(out, "cos", std::slice::from_ref(a)),
        Node::Decay(d) => {
            out.push_str("(piecewise ");
            write_expr(out, &d.arg);
            out.push_str(" (");
            for (i, b) in d.breaks.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_rational(out, b);
            }
            out.push(')');
            for b in &d.branches {
                out.push(' ');
                write_expr(out, b);
            }
            out.push(')');
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(s: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let flush = |cur: &mut String, out: &mut Vec<Tok>| {
        if !cur.is_empty() {
            out.push(Tok::Atom(std::mem::take(cur)));
        }
    };
    for c in s.chars() {
        match c {
            '(' => {
                flush(&mut cur, &mut out);
                out.push(Tok::Open);
            }
            ')' => {
                flush(&mut cur, &mut out);
                out.push(Tok::Close);
            }
            c if c.is_whitespace() => flush(&mut cur, &mut out),
            c => cur.push(c),
        }
    }
    flush(&mut cur, &mut out);
    out
}

#[derive(Debug, Clone)]
enum Tree {
    Atom(String),
    List(Vec<Tree>),
}

fn read_tree(toks: &[Tok], pos: &mut usize) -> Result<Tree, ExprError> {
    match toks.get(*pos) {
        None => Err(ExprError::Parse("unexpected end of input".into())),
        Some(Tok::Close) => Err(ExprError::Parse("unexpected `)`".into())),
        Some(Tok::Atom(a)) => {
            *pos += 1;
            Ok(Tree::Atom(a.clone()))
        }
        Some(Tok::Open) => {
            *pos += 1;
            let mut items = Vec::new();
            loop {
                match toks.get(*pos) {
                    None => return Err(ExprError::Parse("unclosed `(`".into())),
                    Some(Tok::Close) => {
                        *pos += 1;
                        return Ok(Tree::List(items));
                    }
                    _ => items.push(read_tree(toks, pos)?),
                }
            }
        }
    }
}

/// Parses `3`, `-7/8`, or a decimal such as `0.25` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ExprError> {
    let bad = || ExprError::Parse(format!("not a rational literal: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(ExprError::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((i, f)) = s.split_once('.') {
        if f.is_empty() || !f.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = i.starts_with('-');
        let digits = format!("{}{}", i.trim_start_matches(['-', '+']), f);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = num_traits::pow(BigInt::from(10), f.len());
        let q = Rational::new(n, d);
        return Ok(if neg { -q } else { q });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

fn build(t: &Tree) -> Result<Expr, ExprError> {
    match t {
        Tree::Atom(a) => Ok(Expr::constant(parse_rational(a)?)),
        Tree::List(items) => {
            let head = match items.first() {
                Some(Tree::Atom(h)) => h.as_str(),
                _ => return Err(ExprError::Parse("list must start with an operator".into())),
            };
            let args = &items[1..];
            let arity = |n: usize| {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(ExprError::Parse(format!("`{head}` expects {n} argument(s), got {}", args.len())))
                }
            };
            let sub = |i: usize| build(&args[i]);
            match head {
                "var" => {
                    arity(1)?;
                    match &args[0] {
                        Tree::Atom(name) if is_identifier(name) => Ok(Expr::var(name)),
                        _ => Err(ExprError::Parse("`var` expects an identifier".into())),
                    }
                }
                "const" => {
                    arity(1)?;
                    sub(0)
                }
                "add" => Ok(Expr::sum(args.iter().map(build).collect::<Result<Vec<_>, _>>()?)),
                "mul" => Ok(Expr::product(args.iter().map(build).collect::<Result<Vec<_>, _>>()?)),
                "sub" => {
                    if args.is_empty() {
                        return Err(ExprError::Parse("`sub` needs arguments".into()));
                    }
                    let first = sub(0)?;
                    if args.len() == 1 {
                        return Ok(-first);
                    }
                    let rest = args[1..].iter().map(build).collect::<Result<Vec<_>, _>>()?;
                    Ok(first - Expr::sum(rest))
                }
                "neg" => {
                    arity(1)?;
                    Ok(-sub(0)?)
                }
                "div" => {
                    arity(2)?;
                    Ok(sub(0)? / sub(1)?)
                }
                "pow" => {
                    arity(2)?;
                    match &args[1] {
                        Tree::Atom(q) => Ok(sub(0)?.pow(parse_rational(q)?)),
                        _ => Err(ExprError::Parse("`pow` exponent must be a rational literal".into())),
                    }
                }
                "exp" => {
                    arity(1)?;
                    Ok(sub(0)?.exp())
                }
                "sin" => {
                    arity(1)?;
                    Ok(sub(0)?.sin())
                }
                "cos" => {
                    arity(1)?;
                    Ok(sub(0)?.cos())
                }
                "sqrt" => {
                    arity(1)?;
                    Ok(sub(0)?.sqrt())
                }
                "piecewise" => {
                    if args.len() < 3 {
                        return Err(ExprError::Parse("`piecewise` needs an argument, breakpoints and branches".into()));
                    }
                    let arg = sub(0)?;
                    let breaks = match &args[1] {
                        Tree::List(bs) => bs
                            .iter()
                            .map(|b| match b {
                                Tree::Atom(a) => parse_rational(a),
                                _ => Err(ExprError::Parse("breakpoints must be rational literals".into())),
                            })
                            .collect::<Result<Vec<_>, _>>()?,
                        _ => return Err(ExprError::Parse("`piecewise` breakpoints must be a list".into())),
                    };
                    let branches = args[2..].iter().map(build).collect::<Result<Vec<_>, _>>()?;
                    if branches.len() != breaks.len() + 1 {
                        return Err(ExprError::Parse("`piecewise` needs one more branch than breakpoints".into()));
                    }
                    if !breaks.windows(2).all(|w| w[0] < w[1]) {
                        return Err(ExprError::Parse("`piecewise` breakpoints must increase".into()));
                    }
                    Ok(Expr::decay(arg, breaks, branches))
                }
                other => Err(ExprError::Parse(format!("unknown operator `{other}`"))),
            }
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '_' || c == '\'')
}

impl Expr {
    /// Canonical S-expression text.
    pub fn to_sexpr(&self) -> String {
        let mut out = String::new();
        write_expr(&mut out, self);
        out
    }

    pub fn parse(s: &str) -> Result<Expr, ExprError> {
        let toks = tokenize(s);
        let mut pos = 0;
        let tree = read_tree(&toks, &mut pos)?;
        if pos != toks.len() {
            return Err(ExprError::Parse("trailing input after expression".into()));
        }
        build(&tree)
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Expr, ExprError> {
        Expr::parse(s)
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_sexpr())
    }
}

impl<'de> serde::Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Expr, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse(&s).map_err(serde::de::Error::custom)
    }
}
