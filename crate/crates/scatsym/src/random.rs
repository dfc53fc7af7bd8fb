//! Seeded random polynomial data for generic-input checks.

use std::sync::Arc;

use rand::Rng;

use crate::expr::Expr;
use crate::geometry::{Chart, SingularForm};

/// A polynomial in `vars` with `terms` monomials of total degree at most
/// `degree` and small nonzero integer coefficients.
pub fn polynomial<R: Rng>(rng: &mut R, vars: &[String], degree: u32, terms: usize) -> Expr {
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut c: i64 = rng.gen_range(-4..=4);
        if c == 0 {
            c = 1;
        }
        let mut factors = vec![Expr::int(c)];
        if !vars.is_empty() {
            let d = rng.gen_range(0..=degree);
            for _ in 0..d {
                factors.push(Expr::var(&vars[rng.gen_range(0..vars.len())]));
            }
        }
        out.push(Expr::product(factors));
    }
    Expr::sum(out)
}

/// A `degree`-form on `chart` with polynomial coefficients in `vars`
/// (defaults to every coordinate) on every basis element.
pub fn form<R: Rng>(rng: &mut R, chart: &Arc<Chart>, degree: usize, vars: Option<&[String]>, poly_degree: u32) -> SingularForm {
    let names = chart.names();
    let vars: Vec<String> = vars.map(<[String]>::to_vec).unwrap_or_else(|| names.clone());
    let mut out = SingularForm::zero(chart, degree);
    for idx in subsets(names.len(), degree) {
        let c = polynomial(rng, &vars, poly_degree, 2);
        out = out.add(&SingularForm::from_terms(chart, degree, [((idx, 0), c)])).expect("same chart");
    }
    out
}

/// Strictly increasing index lists of length `k` from `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}
