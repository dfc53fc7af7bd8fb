//! Verifiers for scattering-symplectic forms and the structures they induce
//! on the hypersurface: contact and cosymplectic data, Reeb fields, dual
//! bivectors, normal forms, filling criteria and folded forms.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebroids::{coframe, AlgebroidError, AlgebroidFrame, Flavor};
use crate::certificate::{certify_positive, certify_small, Certificate, Report};
use crate::expr::{Compiled, Expr, ZeroVerdict};
use crate::geometry::{Chart, GeometryError, Multivector, SingularForm};
use crate::linalg::{self, ExprMatrix};
use crate::random::subsets;
use crate::settings::Settings;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum StructureError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("decomposition: {0}")]
    Decomposition(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<crate::expr::ExprError> for StructureError {
    fn from(e: crate::expr::ExprError) -> StructureError {
        StructureError::Geometry(e.into())
    }
}

type Result<T> = std::result::Result<T, StructureError>;

/// Certifies that every coefficient of `f` vanishes on the chart box.
pub fn form_vanishes(f: &SingularForm, settings: &Settings, what: &str) -> Result<Certificate> {
    let domain = f.chart().box_domain();
    let mut worst: Option<(usize, f64)> = None;
    for idx in f.indices() {
        let top = f.terms().keys().filter(|(i, _)| *i == idx).map(|(_, k)| *k).max().unwrap();
        let c = f.collected(&idx, top)?;
        match c.is_zero_seeded(&domain, settings.samples, settings.tol_closed, settings.seed)? {
            ZeroVerdict::ProvenZero => {}
            ZeroVerdict::NumericallyZero { margin, samples, .. } => {
                worst = Some((samples, worst.map_or(margin, |w| w.1.min(margin))));
            }
            ZeroVerdict::Nonzero { point, value } => {
                let names: Vec<&str> = idx.iter().map(|i| f.chart().name_of(*i)).collect();
                return Ok(Certificate::refuted(point, value, format!("{what}: component d{} is nonzero", names.join("^d"))));
            }
        }
    }
    Ok(match worst {
        None => Certificate::proven(format!("{what} vanishes identically")),
        Some((samples, margin)) => Certificate::NumericallyVerified {
            grid_points: samples,
            tolerance: settings.tol_closed,
            min_margin: margin,
        },
    })
}

/// Certificate that `f` is closed.
pub fn closedness(f: &SingularForm, settings: &Settings) -> Result<Certificate> {
    form_vanishes(&f.exterior_derivative()?, settings, "dω")
}

/// Smooth-section, closedness and non-degeneracy clauses for `ω` against
/// the frame of `flavor`; the verdict passes iff all three do.
pub fn verify_symplectic(omega: &SingularForm, frame: &AlgebroidFrame, settings: &Settings) -> Result<Report> {
    if omega.degree() != 2 {
        return Err(StructureError::Precondition(format!("expected a 2-form, got degree {}", omega.degree())));
    }
    let mut report = Report::new(format!("{}-symplectic on {}", frame.flavor, omega.chart().name));
    let section = frame.is_smooth_section(omega, settings)?;
    let smooth = section.passed();
    report.push("smooth_section", section);
    report.push("closed", closedness(omega, settings)?);
    if smooth {
        report.push("nondegenerate", frame.nondegenerate(omega, settings)?);
        let sign = frame.orientation_sign(omega, settings)?;
        report.note("top_power_sign", if sign < 0.0 { "negative" } else { "positive" });
    } else {
        report.push("nondegenerate", Certificate::refuted(vec![], f64::NAN, "not a smooth section of the frame"));
    }
    Ok(report)
}

pub fn verify_sc_symplectic(omega: &SingularForm, settings: &Settings) -> Result<Report> {
    let frame = coframe(&Flavor::Sc, omega.chart(), None)?;
    verify_symplectic(omega, &frame, settings)
}

/// Contact form on a hypersurface chart with its Reeb field.
#[derive(Clone, Debug)]
pub struct ContactData {
    pub alpha: SingularForm,
    pub reeb: Multivector,
}

impl ContactData {
    pub fn new(alpha: SingularForm) -> Result<ContactData> {
        let reeb = reeb(&alpha, &alpha.exterior_derivative()?)?;
        Ok(ContactData { alpha, reeb })
    }

    pub fn chart(&self) -> &Arc<Chart> {
        self.alpha.chart()
    }

    /// `α ∧ (dα)^{n-1} ≠ 0`, `α(R) = 1` and `i_R dα = 0`.
    pub fn verify(&self, settings: &Settings) -> Result<Report> {
        let mut r = Report::new(format!("contact data on {}", self.chart().name));
        let d = self.alpha.exterior_derivative()?;
        r.push("volume_nonvanishing", top_form_nonvanishing(&self.alpha, &d, settings)?);
        push_reeb_clauses(&mut r, &self.alpha, &d, &self.reeb, settings)?;
        Ok(r)
    }
}

/// Closed pair `(θ, η)` with `θ ∧ η^{n-1} ≠ 0` and its Reeb field.
#[derive(Clone, Debug)]
pub struct CosymplecticData {
    pub theta: SingularForm,
    pub eta: SingularForm,
    pub reeb: Multivector,
}

impl CosymplecticData {
    pub fn new(theta: SingularForm, eta: SingularForm) -> Result<CosymplecticData> {
        let reeb = reeb(&theta, &eta)?;
        Ok(CosymplecticData { theta, eta, reeb })
    }

    pub fn verify(&self, settings: &Settings) -> Result<Report> {
        let mut r = Report::new(format!("cosymplectic data on {}", self.theta.chart().name));
        r.push("theta_closed", closedness(&self.theta, settings)?);
        r.push("eta_closed", closedness(&self.eta, settings)?);
        r.push("volume_nonvanishing", top_form_nonvanishing(&self.theta, &self.eta, settings)?);
        push_reeb_clauses(&mut r, &self.theta, &self.eta, &self.reeb, settings)?;
        Ok(r)
    }
}

fn push_reeb_clauses(r: &mut Report, a: &SingularForm, b: &SingularForm, field: &Multivector, settings: &Settings) -> Result<()> {
    let one = SingularForm::scalar(a.chart(), Expr::one());
    r.push("reeb_normalized", form_vanishes(&a.interior(field)?.sub(&one)?, settings, "α(R) - 1")?);
    r.push("reeb_in_kernel", form_vanishes(&b.interior(field)?, settings, "i_R dα")?);
    Ok(())
}

fn top_coefficient(f: &SingularForm) -> Result<Expr> {
    let all: Vec<usize> = (0..f.chart().dim()).collect();
    if f.degree() != all.len() {
        return Err(GeometryError::DegreeMismatch(f.degree(), all.len()).into());
    }
    Ok(f.collected(&all, f.max_exponent().unwrap_or(0))?)
}

fn top_form_nonvanishing(a: &SingularForm, b: &SingularForm, settings: &Settings) -> Result<Certificate> {
    let chart = a.chart();
    let dim = chart.dim();
    if dim % 2 == 0 {
        return Err(StructureError::Precondition("odd-dimensional hypersurface expected".into()));
    }
    let vol = a.wedge(&power(b, (dim - 1) / 2)?)?;
    let c = top_coefficient(&vol)?;
    let compiled = Compiled::new(&c, &chart.names())?;
    let points = chart.grid(settings.grid, settings.grid_budget);
    Ok(certify_positive(&chart.names(), &points, settings.tol_nondeg, "|α ∧ (dα)^(n-1)|", |p| compiled.eval(p).abs()))
}

/// `b ∧ … ∧ b` (`n` factors), the scalar 1 for `n = 0`.
pub fn power(b: &SingularForm, n: usize) -> Result<SingularForm> {
    let mut acc = SingularForm::scalar(b.chart(), Expr::one());
    for _ in 0..n {
        acc = acc.wedge(b)?;
    }
    Ok(acc)
}

/// Reeb field of `(a, b)` on an odd-dimensional chart: the kernel direction
/// `X` of `b` defined by `i_X vol = b^{n-1}`, normalized by `a(X)`. With
/// `b = da` this is the contact Reeb field; with a closed pair `(θ, η)` the
/// cosymplectic one.
pub fn reeb(a: &SingularForm, b: &SingularForm) -> Result<Multivector> {
    let chart = a.chart();
    let dim = chart.dim();
    if dim % 2 == 0 || a.degree() != 1 || b.degree() != 2 {
        return Err(StructureError::Precondition("Reeb field needs a 1-form and a 2-form on an odd-dimensional chart".into()));
    }
    let bp = power(b, (dim - 1) / 2)?;
    let mut x = Multivector::zero(chart, 1);
    for i in 0..dim {
        let rest: Vec<usize> = (0..dim).filter(|j| *j != i).collect();
        let c = bp.collected(&rest, bp.max_exponent().unwrap_or(0).max(0))?;
        if c.is_const_zero() {
            continue;
        }
        let c = if i % 2 == 0 { c } else { -c };
        x = x.add(&Multivector::monomial(chart, 0, c, &[chart.name_of(i)])?)?;
    }
    let ax = a.interior(&x)?;
    let norm = Expr::sum(ax.plain_coefficients().into_values()).expand();
    if norm.is_const_zero() {
        return Err(StructureError::Singular("a(X) vanishes identically".into()));
    }
    Ok(x.scale(&norm.recip()))
}

/// Reads the contact form from the `dx/x³` slot and checks that the `x^{-2}`
/// slot equals `-dα/2` on Z. The representative is the one determined by
/// the chart's x.
pub fn induced_contact(omega: &SingularForm, settings: &Settings) -> Result<ContactData> {
    let slots = omega.laurent_decompose(0)?;
    let slot = |e: i64| slots.iter().find(|s| s.exponent == e);
    if let Some(s) = slots.iter().find(|s| s.exponent > 3) {
        return Err(StructureError::Decomposition(format!("pole of order {} beyond the sc range", s.exponent)));
    }
    let s3 = slot(3).ok_or_else(|| StructureError::Decomposition("no dx/x³ slot".into()))?;
    if !s3.rest.is_zero() {
        return Err(StructureError::Decomposition("x^-3 slot has a component without dx".into()));
    }
    let alpha = s3.dx_part.clone();
    let d_alpha = alpha.exterior_derivative()?;
    let rest2 = slot(2).map(|s| s.rest.clone()).unwrap_or_else(|| SingularForm::zero(omega.chart(), 2));
    let residual = rest2.add(&d_alpha.scale(&Expr::rat(1, 2)))?.restrict_to_z()?;
    let cert = form_vanishes(&residual, settings, "x^-2 slot + dα/2")?;
    if !cert.passed() {
        return Err(StructureError::Decomposition(format!("closedness relation fails: {cert:?}")));
    }
    ContactData::new(alpha.restrict_to_z()?)
}

/// A bivector dual to a symplectic form: symbolic up to 6 dimensions,
/// otherwise numeric values at sample points.
#[derive(Clone, Debug)]
pub enum PoissonBivector {
    Symbolic(Multivector),
    Sampled { chart: Arc<Chart>, points: Vec<Vec<f64>>, matrices: Vec<Vec<Vec<f64>>> },
}

/// Largest dimension inverted symbolically.
pub const SYMBOLIC_DUAL_MAX_DIM: usize = 6;

fn form_matrix(f: &SingularForm) -> ExprMatrix {
    let n = f.chart().dim();
    let mut m = vec![vec![Expr::zero(); n]; n];
    for (idx, c) in f.plain_coefficients() {
        m[idx[0]][idx[1]] = c.clone();
        m[idx[1]][idx[0]] = -c;
    }
    m
}

fn bivector_matrix(p: &Multivector) -> ExprMatrix {
    let n = p.chart().dim();
    let mut m = vec![vec![Expr::zero(); n]; n];
    for (idx, c) in p.plain_coefficients() {
        m[idx[0]][idx[1]] = c.clone();
        m[idx[1]][idx[0]] = -c;
    }
    m
}

/// Matrix of `x^K ω` where `K` is the highest pole, together with `K`.
fn cleared_form_matrix(f: &SingularForm) -> Result<(ExprMatrix, i64)> {
    if f.chart().x_name().is_none() {
        return Ok((form_matrix(f), 0));
    }
    let top = f.terms().keys().map(|(_, k)| *k).max().unwrap_or(0).max(0);
    let n = f.chart().dim();
    let mut m = vec![vec![Expr::zero(); n]; n];
    for idx in f.indices() {
        let c = f.collected(&idx, top)?;
        m[idx[1]][idx[0]] = -c.clone();
        m[idx[0]][idx[1]] = c;
    }
    Ok((m, top))
}

fn negated_inverse_terms(m: &ExprMatrix) -> Result<Vec<((Vec<usize>, i64), Expr)>> {
    let (inv, pf) = linalg::antisymmetric_inverse(m);
    if pf.is_const_zero() {
        return Err(StructureError::Singular("Pfaffian vanishes identically".into()));
    }
    let n = m.len();
    let mut terms = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !inv[i][j].is_const_zero() {
                terms.push(((vec![i, j], 0), -inv[i][j].clone()));
            }
        }
    }
    Ok(terms)
}

fn negated_inverse_at(m: &ExprMatrix, names: &[String], p: &[f64]) -> Result<Vec<Vec<f64>>> {
    let vals: Vec<Vec<f64>> = m
        .iter()
        .map(|row| row.iter().map(|e| Compiled::new(e, names).map(|c| c.eval(p))).collect::<std::result::Result<_, _>>())
        .collect::<std::result::Result<_, _>>()?;
    let inv = linalg::inverse_f64(&vals).ok_or_else(|| StructureError::Singular(format!("singular matrix at {p:?}")))?;
    Ok(inv.into_iter().map(|r| r.into_iter().map(|v| -v).collect()).collect())
}

/// The bivector `π` with `π^♯ = (ω^♭)^{-1}`; in coordinates `P = -Ω^{-1}`
/// for `ω = Σ_{i<j} Ω_ij dx_i∧dx_j`, `π = Σ_{i<j} P^{ij} ∂_i∧∂_j`. The frame
/// fixes the chart and is checked for non-degeneracy first.
pub fn dualize(omega: &SingularForm, frame: &AlgebroidFrame, settings: &Settings) -> Result<PoissonBivector> {
    if omega.chart() != frame.chart() || omega.degree() != 2 {
        return Err(StructureError::Precondition("2-form on the frame's chart expected".into()));
    }
    let nd = frame.nondegenerate(omega, settings)?;
    if !nd.passed() {
        return Err(StructureError::Singular(format!("form is degenerate: {nd:?}")));
    }
    let chart = omega.chart();
    if chart.dim() <= SYMBOLIC_DUAL_MAX_DIM {
        // (x^K Ω)^{-1} = x^{-K} Ω^{-1}, so the inverse carries exponent -K.
        let (cleared, top) = cleared_form_matrix(omega)?;
        let terms: Vec<_> = negated_inverse_terms(&cleared)?.into_iter().map(|((idx, _), c)| ((idx, -top), c)).collect();
        Ok(PoissonBivector::Symbolic(Multivector::from_terms(chart, 2, terms)))
    } else {
        let m = form_matrix(omega);
        let names = chart.names();
        let points = chart.samples(settings.samples.min(200), settings.seed);
        let matrices = points.iter().map(|p| negated_inverse_at(&m, &names, p)).collect::<Result<_>>()?;
        Ok(PoissonBivector::Sampled { chart: chart.clone(), points, matrices })
    }
}

/// Inverse of [`dualize`] for a symbolic bivector: `Ω = -P^{-1}`.
pub fn dualize_inverse(pi: &Multivector) -> Result<SingularForm> {
    if pi.degree() != 2 {
        return Err(StructureError::Precondition("bivector expected".into()));
    }
    let m = bivector_matrix(pi);
    Ok(SingularForm::from_terms(pi.chart(), 2, negated_inverse_terms(&m)?))
}

/// Largest entrywise deviation of `ω^♭ π^♯` from the identity over sample
/// points off Z, certified against `1e-8`.
pub fn round_trip_certificate(omega: &SingularForm, pi: &PoissonBivector, settings: &Settings) -> Result<Certificate> {
    let chart = omega.chart();
    let names = chart.names();
    let m = form_matrix(omega);
    let (points, matrices): (Vec<Vec<f64>>, Vec<Vec<Vec<f64>>>) = match pi {
        PoissonBivector::Sampled { points, matrices, .. } => (points.clone(), matrices.clone()),
        PoissonBivector::Symbolic(p) => {
            let pm = bivector_matrix(p);
            let compiled: Vec<Vec<Compiled>> = pm
                .iter()
                .map(|row| row.iter().map(|e| Compiled::new(e, &names)).collect::<std::result::Result<_, _>>())
                .collect::<std::result::Result<_, _>>()?;
            let points = chart.samples(settings.samples.min(200), settings.seed);
            let matrices = points
                .iter()
                .map(|p| compiled.iter().map(|row| row.iter().map(|c| c.eval(p)).collect()).collect())
                .collect();
            (points, matrices)
        }
    };
    let om: Vec<Vec<Compiled>> = m
        .iter()
        .map(|row| row.iter().map(|e| Compiled::new(e, &names)).collect::<std::result::Result<_, _>>())
        .collect::<std::result::Result<_, _>>()?;
    let n = chart.dim();
    let deviation = |i: usize| -> f64 {
        let p = &points[i];
        let pm = &matrices[i];
        let o: Vec<Vec<f64>> = om.iter().map(|row| row.iter().map(|c| c.eval(p)).collect()).collect();
        let mut worst: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                // (-Ω)·P should be the identity.
                let s: f64 = (0..n).map(|c| -o[a][c] * pm[c][b]).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                let scale = 1.0 + (0..n).map(|c| (o[a][c] * pm[c][b]).abs()).sum::<f64>();
                worst = worst.max((s - target).abs() / scale);
            }
        }
        worst
    };
    let idx: Vec<Vec<f64>> = (0..points.len()).map(|i| vec![i as f64]).collect();
    Ok(certify_small(&["sample".to_string()], &idx, 1e-8, "relative deviation of -Ω·P from the identity", |p| {
        deviation(p[0] as usize)
    }))
}

/// `[π,π]^{ijk} = Σ_l (π^{li}∂_l π^{jk} + π^{lj}∂_l π^{ki} + π^{lk}∂_l π^{ij})`
/// for `i < j < k`, each tested for zero.
pub fn schouten_bracket_components(pi: &Multivector) -> Vec<(Vec<usize>, Expr)> {
    let chart = pi.chart();
    let n = chart.dim();
    let p = bivector_matrix(pi);
    let names = chart.names();
    let mut out = Vec::new();
    for idx in subsets(n, 3) {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let mut terms = Vec::new();
        for (l, name) in names.iter().enumerate() {
            for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                if p[l][a].is_const_zero() {
                    continue;
                }
                let d = p[b][c].diff(name);
                if !d.is_const_zero() {
                    terms.push(&p[l][a] * d);
                }
            }
        }
        out.push((idx, Expr::sum(terms)));
    }
    out
}

pub fn schouten_jacobi_check(pi: &Multivector, settings: &Settings) -> Result<Certificate> {
    let chart = pi.chart();
    let f = SingularForm::from_terms(
        chart,
        3,
        schouten_bracket_components(pi).into_iter().map(|(idx, c)| ((idx, 0), c)),
    );
    form_vanishes(&f, settings, "[π,π]")
}

/// `dx/x³ ∧ (α + x²β₁) − dα/(2x²) + β₂` from forms on the hypersurface.
pub fn normal_form(
    chart: &Arc<Chart>,
    alpha: &SingularForm,
    beta1: &SingularForm,
    beta2: &SingularForm,
    settings: &Settings,
) -> Result<SingularForm> {
    for (name, b) in [("β₁", beta1), ("β₂", beta2)] {
        let c = closedness(b, settings)?;
        if !c.passed() {
            return Err(StructureError::Precondition(format!("{name} is not closed: {c:?}")));
        }
    }
    let a = SingularForm::lift_from_z(chart, alpha)?;
    let b1 = SingularForm::lift_from_z(chart, beta1)?;
    let b2 = SingularForm::lift_from_z(chart, beta2)?;
    let inner = a.add(&b1.with_pole(-2))?;
    Ok(inner
        .dx_wedge()?
        .with_pole(3)
        .add(&a.exterior_derivative()?.scale(&Expr::rat(-1, 2)).with_pole(2))?
        .add(&b2)?)
}

/// Tubular decomposition read off the Laurent slots: `a` from `dx/x³`,
/// `b₁` from `dx/x`, `b₂` from the smooth part without `dx`, all on Z.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub a: SingularForm,
    pub b1: SingularForm,
    pub b2: SingularForm,
    /// Slots outside the normal-form pattern, by exponent and part.
    pub other: Vec<(i64, String, SingularForm)>,
}

pub fn decompose(omega: &SingularForm) -> Result<Decomposition> {
    let chart = omega.chart();
    let zchart = chart.hypersurface()?;
    let slots = omega.laurent_decompose(0)?;
    let zero1 = SingularForm::zero(&zchart, 1);
    let zero2 = SingularForm::zero(&zchart, 2);
    let mut d = Decomposition { a: zero1.clone(), b1: zero1, b2: zero2, other: Vec::new() };
    for s in slots {
        let dx = s.dx_part.restrict_to_z()?;
        let rest = s.rest.restrict_to_z()?;
        match s.exponent {
            3 => d.a = dx.clone(),
            1 => d.b1 = dx.clone(),
            0 => d.b2 = rest.clone(),
            _ => {}
        }
        if s.exponent == 2 {
            let expected = d.a.exterior_derivative()?.scale(&Expr::rat(-1, 2));
            let dev = rest.sub(&expected)?;
            if !dev.expanded().is_zero() {
                d.other.push((2, "rest - (-da/2)".into(), dev));
            }
        }
        let unexpected_dx = !matches!(s.exponent, 3 | 1);
        let unexpected_rest = !matches!(s.exponent, 2 | 0);
        if unexpected_dx && !dx.is_zero() {
            d.other.push((s.exponent, "dx".into(), dx));
        }
        if unexpected_rest && !rest.is_zero() {
            d.other.push((s.exponent, "rest".into(), rest));
        }
    }
    Ok(d)
}

#[derive(Clone, Debug)]
pub enum FillingVerdict {
    /// `liouville` is `i_V ω` for `V = -(x/2)∂x`.
    Filling { liouville: SingularForm, report: Report },
    NotFilling { slot: String, form: SingularForm },
}

impl FillingVerdict {
    pub fn is_filling(&self) -> bool {
        matches!(self, FillingVerdict::Filling { .. })
    }
}

/// The Liouville field `-(x/2)∂x`.
pub fn liouville_field(chart: &Arc<Chart>) -> Result<Multivector> {
    let x = chart.x_name().ok_or(GeometryError::NoHypersurface)?;
    Ok(Multivector::monomial(chart, 0, Expr::var(x).scale(&crate::expr::rat(-1, 2)), &[x])?)
}

/// Filling iff the `b₁` and `b₂` slots vanish. For fillings, verifies
/// `L_V ω = ω` and that `i_V ω` is a constant multiple of `a/x²`, reporting
/// the constant.
pub fn strong_filling_check(omega: &SingularForm, settings: &Settings) -> Result<FillingVerdict> {
    let d = decompose(omega)?;
    if !d.b1.expanded().is_zero() {
        return Ok(FillingVerdict::NotFilling { slot: "b1".into(), form: d.b1 });
    }
    if !d.b2.expanded().is_zero() {
        return Ok(FillingVerdict::NotFilling { slot: "b2".into(), form: d.b2 });
    }
    let chart = omega.chart();
    let v = liouville_field(chart)?;
    let lambda = omega.interior(&v)?;
    let mut report = Report::new("strong filling");
    let lie = omega.lie_derivative(&v)?.sub(omega)?;
    report.push("lie_derivative_equals_omega", form_vanishes(&lie, settings, "L_V ω - ω")?);
    let a = SingularForm::lift_from_z(chart, &d.a)?.with_pole(2);
    let ratio = constant_ratio(&lambda, &a)?;
    match ratio {
        Some(c) => {
            let dev = lambda.sub(&a.scale(&c))?;
            report.push_detail(
                "liouville_form_is_multiple_of_contact_form",
                form_vanishes(&dev, settings, "i_V ω - c·a/x²")?,
                format!("c = {c}"),
            );
        }
        None => report.push(
            "liouville_form_is_multiple_of_contact_form",
            Certificate::refuted(vec![], f64::NAN, "i_V ω is not a constant multiple of a/x²"),
        ),
    }
    Ok(FillingVerdict::Filling { liouville: lambda, report })
}

/// The constant `c` with `f = c·g`, read off one shared term: exactly when
/// the quotient simplifies, otherwise from sampled values of the quotient
/// when they agree on a rational with denominator at most 1000. The caller
/// still certifies `f - c·g`.
pub fn constant_ratio(f: &SingularForm, g: &SingularForm) -> Result<Option<Expr>> {
    let Some(((idx, k), gc)) = g.terms().iter().next() else {
        return Ok(None);
    };
    let Some(fc) = f.terms().get(&(idx.clone(), *k)) else {
        return Ok(None);
    };
    let q = (fc * gc.recip()).expand();
    if q.free_vars().is_empty() {
        return Ok(if q.is_const_zero() { None } else { Some(q) });
    }
    let chart = g.chart();
    let names = chart.names();
    let compiled = Compiled::new(&q, &names)?;
    let values: Vec<f64> = chart.samples(16, 0x5eed).iter().map(|p| compiled.eval(p)).filter(|v| v.is_finite()).collect();
    let Some(first) = values.first().copied() else {
        return Ok(None);
    };
    if values.iter().any(|v| (v - first).abs() > 1e-9 * first.abs().max(1.0)) {
        return Ok(None);
    }
    Ok(small_rational(first, 1000).map(|(p, q)| Expr::rat(p, q)))
}

/// Nonzero `p/q` with `q ≤ max_den` within 1e-9 of `v`, by continued fractions.
fn small_rational(v: f64, max_den: i64) -> Option<(i64, i64)> {
    if !v.is_finite() || v.abs() > 1e12 {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut x = v;
    for _ in 0..40 {
        let a = x.floor();
        let (h2, k2) = (a as i64 * h1 + h0, a as i64 * k1 + k0);
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - v).abs() <= 1e-9 {
            return if h1 == 0 { None } else { Some((h1, k1)) };
        }
        let frac = x - a;
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    None
}

/// Reads `(θ, η)` from `ω = dx/x^k ∧ θ + η` near Z and validates them.
pub fn cosymplectic_extract(omega: &SingularForm, k: u32, settings: &Settings) -> Result<(CosymplecticData, Report)> {
    let slots = omega.laurent_decompose(0)?;
    let k = k as i64;
    let theta = slots
        .iter()
        .find(|s| s.exponent == k)
        .map(|s| s.dx_part.clone())
        .ok_or_else(|| StructureError::Decomposition(format!("no dx/x^{k} slot")))?;
    let eta = slots
        .iter()
        .find(|s| s.exponent == 0)
        .map(|s| s.rest.clone())
        .unwrap_or_else(|| SingularForm::zero(omega.chart(), 2));
    let theta = theta.restrict_to_z()?;
    let eta = eta.restrict_to_z()?;
    let data = CosymplecticData::new(theta, eta)?;
    let report = data.verify(settings)?;
    Ok((data, report))
}

/// Folded-form clauses with the fold on the chart's Z: `ω` smooth and
/// closed, `ω^n` vanishing on Z and nowhere else (transversally: `ω^n / x`
/// bounded away from 0, with `∂_x` of the top coefficient on Z), and the
/// pullback of `ω^{n-1}` to Z nonvanishing.
pub fn verify_folded(omega: &SingularForm, settings: &Settings) -> Result<Report> {
    let chart = omega.chart();
    let x = chart.x_name().ok_or(GeometryError::NoHypersurface)?.to_string();
    let xi = chart.z.unwrap();
    let mut r = Report::new(format!("folded on {}", chart.name));
    let tangent = coframe(&Flavor::Tangent, chart, None)?;
    r.push("smooth", tangent.is_smooth_section(omega, settings)?);
    r.push("closed", closedness(omega, settings)?);
    let n = chart.dim() / 2;
    let top = tangent.top_coefficient(omega)?;
    let s = top.expression();
    let on_z = s.subs(&x, &Expr::zero());
    let zdomain = chart.hypersurface()?.box_domain();
    let v = if zdomain.axes.is_empty() {
        if on_z.expand().is_const_zero() {
            ZeroVerdict::ProvenZero
        } else {
            ZeroVerdict::Nonzero { point: vec![], value: on_z.eval_f64(&Default::default())? }
        }
    } else {
        on_z.is_zero_seeded(&zdomain, settings.samples, settings.tol_closed, settings.seed)?
    };
    r.push("top_power_vanishes_on_z", Certificate::from_zero(&v, "ω^n on Z"));
    let names = chart.names();
    let slope = s.diff(&x).subs(&x, &Expr::zero());
    let quotient = (&s * Expr::var(&x).recip()).expand();
    let fq = Compiled::new(&quotient, &names)?;
    let fs = Compiled::new(&slope, &names)?;
    let points = chart.grid(settings.grid, settings.grid_budget);
    r.push(
        "transverse_vanishing",
        certify_positive(&names, &points, settings.tol_nondeg, "|ω^n / x| (∂x on Z)", |p| {
            if p[xi] == 0.0 {
                fs.eval(p).abs()
            } else {
                fq.eval(p).abs()
            }
        }),
    );
    let restricted = omega.restrict_to_z()?;
    let rp = power(&restricted, n.saturating_sub(1))?;
    let zchart = restricted.chart().clone();
    let comps: Vec<Compiled> = rp
        .plain_coefficients()
        .values()
        .map(|c| Compiled::new(c, &zchart.names()))
        .collect::<std::result::Result<_, _>>()?;
    let zpoints = zchart.grid(settings.grid, settings.grid_budget);
    r.push(
        "restriction_power_nonvanishing",
        certify_positive(&zchart.names(), &zpoints, settings.tol_nondeg, "max |i*ω^(n-1)|", |p| {
            comps.iter().map(|c| c.eval(p).abs()).fold(0.0, f64::max)
        }),
    );
    Ok(r)
}

/// Serializable summary of contact data for reports.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ContactSummary {
    pub alpha: String,
    pub reeb: String,
}

impl From<&ContactData> for ContactSummary {
    fn from(c: &ContactData) -> ContactSummary {
        ContactSummary { alpha: c.alpha.describe(), reeb: c.reeb.describe() }
    }
}
