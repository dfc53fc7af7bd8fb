//! Small dense matrices over expressions and over `f64`.

use nalgebra::DMatrix;

use crate::expr::Expr;

pub type ExprMatrix = Vec<Vec<Expr>>;

/// Determinant by cofactor expansion along the sparsest row, skipping zeros.
pub fn det(m: &ExprMatrix) -> Expr {
    let rows: Vec<usize> = (0..m.len()).collect();
    let cols: Vec<usize> = (0..m.len()).collect();
    det_minor(m, &rows, &cols)
}

fn det_minor(m: &ExprMatrix, rows: &[usize], cols: &[usize]) -> Expr {
    match rows.len() {
        0 => Expr::one(),
        1 => m[rows[0]][cols[0]].clone(),
        _ => {
            let (ri, _) = rows
                .iter()
                .enumerate()
                .max_by_key(|(_, r)| cols.iter().filter(|c| m[**r][**c].is_const_zero()).count())
                .unwrap();
            let r = rows[ri];
            let sub_rows: Vec<usize> = rows.iter().copied().filter(|x| *x != r).collect();
            let mut terms = Vec::new();
            for (ci, c) in cols.iter().enumerate() {
                let a = &m[r][*c];
                if a.is_const_zero() {
                    continue;
                }
                let sub_cols: Vec<usize> = cols.iter().copied().filter(|x| x != c).collect();
                let minor = det_minor(m, &sub_rows, &sub_cols);
                let sign = if (ri + ci) % 2 == 0 { 1 } else { -1 };
                terms.push(a * minor * sign);
            }
            Expr::sum(terms)
        }
    }
}

/// Adjugate matrix: `adj(M)_{ij} = (-1)^{i+j} det(M without row j, column i)`.
pub fn adjugate(m: &ExprMatrix) -> ExprMatrix {
    let n = m.len();
    let all: Vec<usize> = (0..n).collect();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let rows: Vec<usize> = all.iter().copied().filter(|r| *r != j).collect();
                    let cols: Vec<usize> = all.iter().copied().filter(|c| *c != i).collect();
                    let minor = det_minor(m, &rows, &cols);
                    if (i + j) % 2 == 0 {
                        minor
                    } else {
                        -minor
                    }
                })
                .collect()
        })
        .collect()
}

/// Symbolic inverse `adj(M) / det(M)`; the determinant is returned too.
pub fn inverse(m: &ExprMatrix) -> (ExprMatrix, Expr) {
    let d = det(m).expand();
    let inv_d = d.recip();
    let adj = adjugate(m);
    let inv = adj.into_iter().map(|row| row.into_iter().map(|a| (a * &inv_d).expand()).collect()).collect();
    (inv, d)
}

/// Pfaffian of an antisymmetric matrix, expanded along the first row.
pub fn pfaffian(m: &ExprMatrix) -> Expr {
    let idx: Vec<usize> = (0..m.len()).collect();
    pf_minor(m, &idx)
}

fn pf_minor(m: &ExprMatrix, idx: &[usize]) -> Expr {
    if idx.is_empty() {
        return Expr::one();
    }
    if idx.len() % 2 == 1 {
        return Expr::zero();
    }
    let i = idx[0];
    let mut terms = Vec::new();
    for (pos, j) in idx.iter().enumerate().skip(1) {
        let a = &m[i][*j];
        if a.is_const_zero() {
            continue;
        }
        let rest: Vec<usize> = idx.iter().copied().filter(|t| *t != i && t != j).collect();
        let sign = if pos % 2 == 1 { 1 } else { -1 };
        terms.push(a * pf_minor(m, &rest) * sign);
    }
    Expr::sum(terms)
}

/// Inverse of an antisymmetric matrix through Pfaffians of its minors:
/// `(M^{-1})_{ij} = (-1)^{i+j+[i>j]} Pf(M without i, j) / Pf(M)`.
/// This is the adjugate formula with `det = Pf²` cancelled once.
pub fn antisymmetric_inverse(m: &ExprMatrix) -> (ExprMatrix, Expr) {
    let n = m.len();
    let pf = pfaffian(m).expand();
    let inv_pf = pf.recip();
    let mut out = vec![vec![Expr::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let rest: Vec<usize> = (0..n).filter(|t| *t != i && *t != j).collect();
            let minor = pf_minor(m, &rest);
            let sign = if (i + j + usize::from(i > j)) % 2 == 0 { 1 } else { -1 };
            out[i][j] = (minor * &inv_pf * sign).expand();
        }
    }
    (out, pf)
}

/// Numeric inverse through an LU factorization; `None` when singular.
pub fn inverse_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let inv = to_dmatrix(m).try_inverse()?;
    Some((0..m.len()).map(|i| (0..m.len()).map(|j| inv[(i, j)]).collect()).collect())
}

pub fn det_f64(m: &[Vec<f64>]) -> f64 {
    to_dmatrix(m).determinant()
}

fn to_dmatrix(m: &[Vec<f64>]) -> DMatrix<f64> {
    let n = m.len();
    DMatrix::from_fn(n, n, |i, j| m[i][j])
}
