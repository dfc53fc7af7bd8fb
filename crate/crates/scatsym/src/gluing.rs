//! Gluing of strong fillings along a common contact boundary: two convex
//! collars give a scattering-symplectic form, two concave collars a folded
//! one, and a convex/concave pair the classical symplectic union.
//!
//! Every construction lives in a single chart `(s, z…)` where `s` runs across
//! the annulus and `z…` are the coordinates of the contact hypersurface.

use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebroids::{coframe, AlgebroidError, Flavor};
use crate::certificate::{certify_positive, certify_small, Certificate, Report};
use crate::expr::{rat, Compiled, Expr, ExprError, Rational};
use crate::geometry::{interval, Chart, GeometryError, SingularForm};
use crate::settings::Settings;
use crate::structures::{form_vanishes, power, verify_folded, verify_symplectic, ContactData, StructureError};

/// Lower bound claimed for `φ'/(r-1)² - 2φ/(r-1)³` on `(7/8, 1)`.
pub const PHI_CONSTANT_BOUND: f64 = 139.0;
/// Lower bound claimed for `ψ'` on `(7/8, 1)`. It is attained at `r = 15/16`.
pub const PSI_DERIVATIVE_BOUND: f64 = -128.0;
/// Relative slack on [`PSI_DERIVATIVE_BOUND`], which holds with equality.
pub const PSI_BOUND_SLACK: f64 = 1e-12;
/// Interior points of the uniform part of every one-dimensional grid.
pub const LINE_GRID: usize = 10_240;
/// Closest approach of the geometric refinement to a singular endpoint.
pub const LOCUS_REFINEMENT: f64 = 1e-6;
/// Variable in which the bump functions are written.
pub const BUMP_VAR: &str = "r";

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GluingError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("collars do not match: {0}")]
    Mismatch(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
}

impl From<ExprError> for GluingError {
    fn from(e: ExprError) -> GluingError {
        GluingError::Geometry(e.into())
    }
}

type Result<T> = std::result::Result<T, GluingError>;

fn r() -> Expr {
    Expr::var(BUMP_VAR)
}

fn q(e: &Rational) -> Expr {
    Expr::constant(e.clone())
}

/// Smooth step from 0 (for `r ≤ lo`) to 1 (for `r ≥ hi`):
/// `e^{-1/(r-lo)} / (e^{-1/(r-lo)} + e^{-1/(hi-r)})`, stored as
/// `1/(1 + e^{1/(r-lo) + 1/(r-hi)})` so that it stays finite in floating point.
pub fn step_up(lo: Rational, hi: Rational) -> Expr {
    let w = (r() - q(&lo)).recip() + (r() - q(&hi)).recip();
    let middle = (Expr::one() + w.exp()).recip();
    Expr::decay(r(), vec![lo, hi], vec![Expr::zero(), middle, Expr::one()])
}

/// The three cut-off functions of the gluing constructions, as expressions
/// in [`BUMP_VAR`].
#[derive(Clone, Debug, PartialEq)]
pub struct BumpFunctions {
    /// `e^{r/((r-1/2)(r-2))}` on `(1/2, 2)`, zero elsewhere.
    pub phi: Expr,
    /// 1 up to `7/8`, 0 from `1` on.
    pub psi_sc: Expr,
    /// 0 up to `-2`, 1 from `-1` on.
    pub psi_f: Expr,
}

impl Default for BumpFunctions {
    fn default() -> BumpFunctions {
        BumpFunctions::standard()
    }
}

impl BumpFunctions {
    pub fn standard() -> BumpFunctions {
        let inside = (r() * ((r() - Expr::rat(1, 2)) * (r() - Expr::int(2))).recip()).exp();
        let phi = Expr::decay(r(), vec![rat(1, 2), rat(2, 1)], vec![Expr::zero(), inside, Expr::zero()]);
        let psi_sc = Expr::one() - step_up(rat(7, 8), rat(1, 1));
        BumpFunctions { phi, psi_sc, psi_f: step_up(rat(-2, 1), rat(-1, 1)) }
    }

    /// Standard `φ` and `ψ_sc` with the folded cut-off moved to `(lo, hi)`.
    pub fn with_folded_step(lo: Rational, hi: Rational) -> BumpFunctions {
        BumpFunctions { psi_f: step_up(lo, hi), ..BumpFunctions::standard() }
    }

    /// `f(arg)`.
    pub fn at(f: &Expr, arg: &Expr) -> Expr {
        f.subs(BUMP_VAR, arg)
    }

    /// `f'(arg)`.
    pub fn derivative_at(f: &Expr, arg: &Expr) -> Expr {
        f.diff(BUMP_VAR).subs(BUMP_VAR, arg)
    }

    /// Support, plateau and mirror-symmetry clauses.
    pub fn verify(&self, settings: &Settings) -> Result<Report> {
        let mut rep = Report::new("bump functions");
        let names = vec![BUMP_VAR.to_string()];
        let phi = Compiled::new(&self.phi, &names)?;
        let psi = Compiled::new(&self.psi_sc, &names)?;
        let psf = Compiled::new(&self.psi_f, &names)?;
        let outside: Vec<Vec<f64>> = line(-3.0, 0.5, 400).into_iter().chain(line(2.0, 5.0, 400)).map(|t| vec![t]).collect();
        rep.push("phi_vanishes_outside_support", certify_small(&names, &outside, 0.0, "|φ| off (1/2, 2)", |p| phi.eval(p).abs()));
        // φ underflows f64 within about 0.01 of the ends of its support.
        let inside: Vec<Vec<f64>> = open_line(0.51, 1.99, settings.samples.max(1000)).into_iter().map(|t| vec![t]).collect();
        rep.push("phi_positive_inside_support", certify_positive(&names, &inside, 0.0, "φ on (1/2, 2)", |p| phi.eval(p)));
        rep.push(
            "phi_mirror_symmetric",
            certify_small(&names, &inside, 1e-12, "|φ(1/r) - φ(r)|", |p| (phi.eval(&[1.0 / p[0]]) - phi.eval(p)).abs()),
        );
        let low: Vec<Vec<f64>> = line(-3.0, 0.875, 400).into_iter().map(|t| vec![t]).collect();
        let high: Vec<Vec<f64>> = line(1.0, 4.0, 400).into_iter().map(|t| vec![t]).collect();
        rep.push("psi_sc_one_before_7_8", certify_small(&names, &low, 0.0, "|ψ_sc - 1|", |p| (psi.eval(p) - 1.0).abs()));
        rep.push("psi_sc_zero_after_1", certify_small(&names, &high, 0.0, "|ψ_sc|", |p| psi.eval(p).abs()));
        let low: Vec<Vec<f64>> = line(-5.0, -2.0, 400).into_iter().map(|t| vec![t]).collect();
        let high: Vec<Vec<f64>> = line(-1.0, 3.0, 400).into_iter().map(|t| vec![t]).collect();
        rep.push("psi_f_zero_before_minus_2", certify_small(&names, &low, 0.0, "|ψ_f|", |p| psf.eval(p).abs()));
        rep.push("psi_f_one_after_minus_1", certify_small(&names, &high, 0.0, "|ψ_f - 1|", |p| (psf.eval(p) - 1.0).abs()));
        Ok(rep)
    }
}

/// `n + 1` evenly spaced points from `a` to `b` inclusive.
fn line(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// `n - 1` evenly spaced interior points of `(a, b)`.
fn open_line(a: f64, b: f64, n: usize) -> Vec<f64> {
    (1..n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// Interior grid of `(a, b)`: [`LINE_GRID`] uniform points plus geometric
/// refinement towards the flagged endpoints, down to [`LOCUS_REFINEMENT`].
fn refined_line(a: f64, b: f64, refine_a: bool, refine_b: bool) -> Vec<Vec<f64>> {
    let mut pts = open_line(a, b, LINE_GRID);
    let steps = 200;
    let lo = LOCUS_REFINEMENT.log10();
    let hi = ((b - a) / 10.0).log10();
    for i in 0..=steps {
        let d = 10f64.powf(lo + (hi - lo) * i as f64 / steps as f64);
        if refine_a {
            pts.push(a + d);
        }
        if refine_b {
            pts.push(b - d);
        }
    }
    pts.sort_by(|u, v| u.partial_cmp(v).unwrap());
    pts.dedup();
    pts.into_iter().map(|t| vec![t]).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convexity {
    Convex,
    Concave,
}

impl std::str::FromStr for Convexity {
    type Err = GluingError;

    fn from_str(s: &str) -> Result<Convexity> {
        match s {
            "convex" => Ok(Convexity::Convex),
            "concave" => Ok(Convexity::Concave),
            other => Err(GluingError::Precondition(format!("unknown convexity {other:?}"))),
        }
    }
}

/// A collar `Z × [0, c)_r` of a strong filling in normal form:
/// `ω = d(e^{-r}α)` when convex, `ω = d(e^{r}α)` when concave.
#[derive(Clone, Debug)]
pub struct FillingCollar {
    pub contact: ContactData,
    pub convexity: Convexity,
    pub length: f64,
    pub coordinate: String,
}

impl FillingCollar {
    pub fn new(alpha: SingularForm, convexity: Convexity, length: f64) -> Result<FillingCollar> {
        if alpha.degree() != 1 || alpha.chart().z.is_some() {
            return Err(GluingError::Precondition("α must be a 1-form on a hypersurface chart".into()));
        }
        if !(length > 0.0) {
            return Err(GluingError::Precondition(format!("collar length must be positive, got {length}")));
        }
        let coordinate = "r".to_string();
        if alpha.chart().index_of(&coordinate).is_ok() {
            return Err(GluingError::Precondition("hypersurface already has a coordinate named r".into()));
        }
        Ok(FillingCollar { contact: ContactData::new(alpha)?, convexity, length, coordinate })
    }

    pub fn alpha(&self) -> &SingularForm {
        &self.contact.alpha
    }

    pub fn chart(&self) -> Result<Arc<Chart>> {
        product_chart("collar", &self.coordinate, 0.0, self.length, self.alpha().chart())
    }

    pub fn collar_form(&self) -> Result<SingularForm> {
        let chart = self.chart()?;
        let a = SingularForm::lift_from_z(&chart, self.alpha())?;
        let s = match self.convexity {
            Convexity::Convex => -Expr::var(&self.coordinate),
            Convexity::Concave => Expr::var(&self.coordinate),
        };
        Ok(a.scale(&s.exp()).exterior_derivative()?)
    }

    /// Contact clauses for `α` and symplectic clauses for the collar form.
    pub fn verify(&self, settings: &Settings) -> Result<Report> {
        let mut rep = Report::new(format!("{:?} collar over {}", self.convexity, self.alpha().chart().name).to_lowercase());
        rep.absorb("contact", self.contact.verify(settings)?);
        let omega = self.collar_form()?;
        let frame = coframe(&Flavor::Tangent, omega.chart(), None)?;
        rep.absorb("collar", verify_symplectic(&omega, &frame, settings)?);
        Ok(rep)
    }
}

fn product_chart(name: &str, s: &str, lo: f64, hi: f64, z: &Arc<Chart>) -> Result<Arc<Chart>> {
    let mut coords = vec![interval(s, lo, hi)];
    coords.extend(z.coords.iter().cloned());
    let chart = Chart::new(name, coords, Some(s))?;
    Ok(match &z.constraint {
        Some(c) => chart.with_constraint(c.clone()),
        None => chart,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlueKind {
    Sc,
    Folded,
    Classic,
}

impl std::str::FromStr for GlueKind {
    type Err = GluingError;

    fn from_str(s: &str) -> Result<GlueKind> {
        match s {
            "sc" => Ok(GlueKind::Sc),
            "folded" => Ok(GlueKind::Folded),
            "classic" => Ok(GlueKind::Classic),
            other => Err(GluingError::Precondition(format!("unknown gluing kind {other:?}"))),
        }
    }
}

/// The glued form on the annulus chart.
///
/// For [`GlueKind::Sc`] the annulus coordinate is `x = r₁ - 1` on
/// `(-1/2, 1)`, so the singular locus is `x = 0`. For the other kinds it is
/// `r = r₁` on `(-2, 2)` (folded) or `(-1, 1)` (classic), with the fold or
/// the interface at `r = 0`.
#[derive(Clone, Debug)]
pub struct GluedForm {
    pub kind: GlueKind,
    pub chart: Arc<Chart>,
    pub omega: SingularForm,
    pub alpha: SingularForm,
    pub bumps: BumpFunctions,
    pub locus: String,
}

impl GluedForm {
    /// Annulus coordinate name.
    pub fn coordinate(&self) -> &str {
        self.chart.x_name().expect("glued charts carry a hypersurface")
    }

    /// `r₁` as an expression in the chart.
    pub fn r1(&self) -> Expr {
        let s = Expr::var(self.coordinate());
        match self.kind {
            GlueKind::Sc => Expr::one() + s,
            _ => s,
        }
    }

    pub fn half_dim(&self) -> usize {
        self.chart.dim() / 2
    }
}

fn check_pair(c1: &FillingCollar, c2: &FillingCollar, want: [Convexity; 2], min_length: f64) -> Result<()> {
    let mut got = [c1.convexity, c2.convexity];
    let mut want = want;
    got.sort_by_key(|c| *c as u8);
    want.sort_by_key(|c| *c as u8);
    if got != want {
        return Err(GluingError::Precondition(format!("expected {want:?} collars, got {got:?}")));
    }
    if c1.alpha().chart().names() != c2.alpha().chart().names() || c1.alpha() != c2.alpha() {
        return Err(GluingError::Mismatch(format!("contact forms differ: {} vs {}", c1.alpha().describe(), c2.alpha().describe())));
    }
    for c in [c1, c2] {
        if c.length <= min_length {
            return Err(GluingError::Precondition(format!("collar length {} must exceed {min_length}", c.length)));
        }
    }
    Ok(())
}

fn annulus_variable_free(alpha: &SingularForm, s: &str) -> Result<()> {
    if alpha.chart().index_of(s).is_ok() {
        return Err(GluingError::Precondition(format!("hypersurface already has a coordinate named {s}")));
    }
    Ok(())
}

pub fn glue_convex_convex(c1: &FillingCollar, c2: &FillingCollar) -> Result<GluedForm> {
    glue_convex_convex_with(c1, c2, &BumpFunctions::standard())
}

/// `ω = d((φ(r₁)/(r₁-1)² + ψ(r₁)) γ̃) + d((φ(r₂)/(r₂-1)² + ψ(r₂)) γ)` with
/// `γ = e^{-r₁}α`, `γ̃ = e^{-r₂+r₁}γ` and `r₂ = 1/r₁`, written in
/// `x = r₁ - 1`.
pub fn glue_convex_convex_with(c1: &FillingCollar, c2: &FillingCollar, bumps: &BumpFunctions) -> Result<GluedForm> {
    check_pair(c1, c2, [Convexity::Convex, Convexity::Convex], 2.0)?;
    annulus_variable_free(c1.alpha(), "x")?;
    let chart = product_chart("sc-annulus", "x", -0.5, 1.0, c1.alpha().chart())?;
    let x = Expr::var("x");
    let r1 = Expr::one() + x;
    let r2 = r1.recip();
    let alpha = SingularForm::lift_from_z(&chart, c1.alpha())?;
    let gamma = alpha.scale(&(-&r1).exp());
    let gamma_t = gamma.scale(&(&r1 - &r2).exp());
    // (r₂ - 1)^{-2} = r₁² x^{-2}.
    let primitive = gamma_t
        .scale(&BumpFunctions::at(&bumps.phi, &r1))
        .with_pole(2)
        .add(&gamma_t.scale(&BumpFunctions::at(&bumps.psi_sc, &r1)))?
        .add(&gamma.scale(&(BumpFunctions::at(&bumps.phi, &r2) * r1.powi(2))).with_pole(2))?
        .add(&gamma.scale(&BumpFunctions::at(&bumps.psi_sc, &r2)))?;
    Ok(GluedForm {
        kind: GlueKind::Sc,
        chart,
        omega: primitive.exterior_derivative()?,
        alpha: c1.alpha().clone(),
        bumps: bumps.clone(),
        locus: "x = 0 (r1 = 1)".into(),
    })
}

/// `ω = d(e^{r}α)` across the interface `r = 0`: the convex collar enters
/// as `r ≤ 0` and the concave one as `r ≥ 0`.
pub fn glue_convex_concave(c1: &FillingCollar, c2: &FillingCollar) -> Result<GluedForm> {
    check_pair(c1, c2, [Convexity::Convex, Convexity::Concave], 0.0)?;
    annulus_variable_free(c1.alpha(), "r")?;
    let chart = product_chart("classic-collar", "r", -1.0, 1.0, c1.alpha().chart())?;
    let alpha = SingularForm::lift_from_z(&chart, c1.alpha())?;
    Ok(GluedForm {
        kind: GlueKind::Classic,
        omega: alpha.scale(&Expr::var("r").exp()).exterior_derivative()?,
        chart,
        alpha: c1.alpha().clone(),
        bumps: BumpFunctions::standard(),
        locus: "r = 0 (interface)".into(),
    })
}

pub fn glue_concave_concave(c1: &FillingCollar, c2: &FillingCollar) -> Result<GluedForm> {
    glue_concave_concave_with(c1, c2, &BumpFunctions::standard())
}

/// `ω = d(ψ(r₁)e^{r₁}α) + d(ψ(r₂)e^{r₂}α)` with `r₂ = -r₁`.
pub fn glue_concave_concave_with(c1: &FillingCollar, c2: &FillingCollar, bumps: &BumpFunctions) -> Result<GluedForm> {
    check_pair(c1, c2, [Convexity::Concave, Convexity::Concave], 2.0)?;
    annulus_variable_free(c1.alpha(), "r")?;
    let chart = product_chart("fold-annulus", "r", -2.0, 2.0, c1.alpha().chart())?;
    let alpha = SingularForm::lift_from_z(&chart, c1.alpha())?;
    let r1 = Expr::var("r");
    let r2 = -&r1;
    let primitive = alpha
        .scale(&(BumpFunctions::at(&bumps.psi_f, &r1) * r1.exp()))
        .add(&alpha.scale(&(BumpFunctions::at(&bumps.psi_f, &r2) * r2.exp())))?;
    Ok(GluedForm {
        kind: GlueKind::Folded,
        omega: primitive.exterior_derivative()?,
        chart,
        alpha: c1.alpha().clone(),
        bumps: bumps.clone(),
        locus: "r = 0 (fold)".into(),
    })
}

pub fn glue(kind: GlueKind, c1: &FillingCollar, c2: &FillingCollar) -> Result<GluedForm> {
    match kind {
        GlueKind::Sc => glue_convex_convex(c1, c2),
        GlueKind::Folded => glue_concave_concave(c1, c2),
        GlueKind::Classic => glue_convex_concave(c1, c2),
    }
}

/// Certifies the glued form on the annulus. Agreement with each filling is
/// checked on the collar overlaps only; the extension beyond them is assumed
/// and recorded as a note.
pub fn certify(g: &GluedForm, settings: &Settings) -> Result<Report> {
    let mut rep = match g.kind {
        GlueKind::Sc => certify_sc_gluing(g, settings),
        GlueKind::Folded => certify_folded_gluing(g, settings),
        GlueKind::Classic => certify_classic_gluing(g, settings),
    }?;
    rep.note("extension", "assumed beyond the collar overlaps; not verified");
    Ok(rep)
}

/// Coefficients `A`, `B` of `ω = A dr₁∧γ + B dγ`, assembled term by term from
/// the bump functions, as expressions in [`BUMP_VAR`].
pub fn sc_coefficients(bumps: &BumpFunctions) -> (Expr, Expr) {
    let r1 = r();
    let s = r1.recip();
    let e = (&r1 - &s).exp();
    let d1 = Expr::one() / (&r1 - Expr::one());
    let phi = bumps.phi.clone();
    let dphi = bumps.phi.diff(BUMP_VAR);
    let psi = bumps.psi_sc.clone();
    let dpsi = bumps.psi_sc.diff(BUMP_VAR);
    let phi_s = BumpFunctions::at(&bumps.phi, &s);
    let dphi_s = BumpFunctions::derivative_at(&bumps.phi, &s);
    let psi_s = BumpFunctions::at(&bumps.psi_sc, &s);
    let dpsi_s = BumpFunctions::derivative_at(&bumps.psi_sc, &s);
    let lift = s.powi(2) + Expr::one();
    let a = Expr::sum(vec![
        &e * &dphi * d1.powi(2),
        Expr::int(-2) * &e * &phi * d1.powi(3),
        &e * &dpsi,
        -(&dpsi_s * s.powi(2)),
        &lift * &e * &phi * d1.powi(2),
        &lift * &e * &psi,
        -(&dphi_s * d1.powi(2)),
        Expr::int(-2) * &phi_s * &r1 * d1.powi(3),
    ]);
    let b = Expr::sum(vec![&e * &phi * d1.powi(2), &e * &psi, &phi_s * r1.powi(2) * d1.powi(2), psi_s]);
    (a, b)
}

/// `φ'/(r-1)² - 2φ/(r-1)³`.
pub fn phi_constant(bumps: &BumpFunctions) -> Expr {
    let d1 = Expr::one() / (r() - Expr::one());
    bumps.phi.diff(BUMP_VAR) * d1.powi(2) - Expr::int(2) * &bumps.phi * d1.powi(3)
}

fn line_min(e: &Expr, points: &[Vec<f64>]) -> Result<(f64, f64)> {
    let c = Compiled::new(e, &[BUMP_VAR.to_string()])?;
    let mut best = (f64::INFINITY, f64::NAN);
    for p in points {
        let v = c.eval(p);
        if v.is_nan() || v < best.0 {
            best = (v, p[0]);
            if v.is_nan() {
                break;
            }
        }
    }
    Ok(best)
}

fn positive_on_line(e: &Expr, points: &[Vec<f64>], tolerance: f64, what: &str) -> Result<(Certificate, String)> {
    let names = vec![BUMP_VAR.to_string()];
    let c = Compiled::new(e, &names)?;
    let (m, at) = line_min(e, points)?;
    Ok((certify_positive(&names, points, tolerance, what, |p| c.eval(p)), format!("min {m:.12e} at r1 = {at}")))
}

/// Certifies non-degeneracy of a convex–convex gluing.
///
/// Clauses: the glued form equals `A dr₁∧γ + B dγ` for the assembled `A`,
/// `B`; its top power equals `n e^{-n r₁}(AB^{n-1} - B^n) dr₁∧α∧(dα)^{n-1}`;
/// `B > 0` and `A - B > 0` on `r₁ ∈ (1/2, 1)`; the two bump-function
/// constants; the sc-frame verdict on the whole annulus; agreement with the
/// collar forms outside the annulus.
pub fn certify_sc_gluing(g: &GluedForm, settings: &Settings) -> Result<Report> {
    if g.kind != GlueKind::Sc {
        return Err(GluingError::Precondition("not a convex-convex gluing".into()));
    }
    let mut rep = Report::new(format!("sc gluing over {}", g.alpha.chart().name));
    let chart = &g.chart;
    let r1 = g.r1();
    let (a, b) = sc_coefficients(&g.bumps);
    let ax = BumpFunctions::at(&a, &r1);
    let bx = BumpFunctions::at(&b, &r1);
    let alpha = SingularForm::lift_from_z(chart, &g.alpha)?;
    let gamma = alpha.scale(&(-&r1).exp());
    let dgamma = gamma.exterior_derivative()?;
    let model = gamma.dx_wedge()?.scale(&ax).add(&dgamma.scale(&bx))?;
    rep.push("matches_displayed_coefficients", form_vanishes(&g.omega.sub(&model)?, settings, "ω - (A dr∧γ + B dγ)")?);

    let n = g.half_dim();
    let n_i = n as i64;
    let vol = alpha.dx_wedge()?.wedge(&power(&alpha.exterior_derivative()?, n - 1)?)?;
    let factor = Expr::int(n_i) * (Expr::int(-n_i) * &r1).exp() * (&ax * bx.powi(n_i - 1) - bx.powi(n_i));
    let top = power(&g.omega, n)?;
    rep.push("top_power_identity", form_vanishes(&top.sub(&vol.scale(&factor))?, settings, "ω^n - n e^{-nr}(AB^{n-1} - B^n) dr∧α∧(dα)^{n-1}")?);

    let half = refined_line(0.5, 1.0, true, true);
    let (c, d) = positive_on_line(&b, &half, settings.tol_nondeg, "B on (1/2, 1)")?;
    rep.push_detail("b_positive", c, d);
    let (c, d) = positive_on_line(&(&a - &b), &half, settings.tol_nondeg, "A - B on (1/2, 1)")?;
    rep.push_detail("a_minus_b_positive", c, d);

    let window = refined_line(0.875, 1.0, true, true);
    let (c, d) = positive_on_line(&(phi_constant(&g.bumps) - Expr::int(139)), &window, 0.0, "φ'/(r-1)² - 2φ/(r-1)³ - 139 on (7/8, 1)")?;
    rep.push_detail("phi_constant_exceeds_139", c, d.replace("min ", "min excess "));
    let dpsi = g.bumps.psi_sc.diff(BUMP_VAR);
    let slack = -PSI_DERIVATIVE_BOUND * (1.0 + PSI_BOUND_SLACK);
    let (m, at) = line_min(&dpsi, &window)?;
    let names = vec![BUMP_VAR.to_string()];
    let cd = Compiled::new(&dpsi, &names)?;
    rep.push_detail(
        "psi_derivative_at_least_minus_128",
        certify_positive(&names, &window, 0.0, "ψ' + 128(1 + 1e-12) on (7/8, 1)", |p| cd.eval(p) + slack),
        format!("min ψ' = {m:.15} at r1 = {at}; {} points", window.len()),
    );

    let frame = coframe(&Flavor::Sc, chart, None)?;
    rep.absorb("sc_frame", verify_symplectic(&g.omega, &frame, settings)?);

    let z = g.alpha.chart();
    for (name, lo, hi, primitive) in [
        ("agrees_with_second_collar", -0.7, -0.5, (-r1.recip()).exp()),
        ("agrees_with_first_collar", 1.0, 1.5, (-&r1).exp()),
    ] {
        let side = product_chart(&format!("sc-annulus-{name}"), "x", lo, hi, z)?;
        let omega = g.omega.rechart(&side)?;
        let collar = SingularForm::lift_from_z(&side, &g.alpha)?.scale(&primitive).exterior_derivative()?;
        rep.push(name, form_vanishes(&omega.sub(&collar)?, settings, "ω - collar form")?);
    }
    Ok(rep)
}

/// Coefficients `P`, `Q` of `ω = P dr₁∧α + Q dα` for the concave–concave
/// gluing, as expressions in [`BUMP_VAR`].
pub fn folded_coefficients(bumps: &BumpFunctions) -> (Expr, Expr) {
    let r1 = r();
    let m = -&r1;
    let psi = bumps.psi_f.clone();
    let dpsi = bumps.psi_f.diff(BUMP_VAR);
    let psi_m = BumpFunctions::at(&bumps.psi_f, &m);
    let dpsi_m = BumpFunctions::derivative_at(&bumps.psi_f, &m);
    let p = r1.exp() * &dpsi + r1.exp() * &psi - m.exp() * &dpsi_m - m.exp() * &psi_m;
    let q = &psi * r1.exp() + psi_m * m.exp();
    (p, q)
}

/// `e > Σ_{k≤5} 1/k!`, and the square of that partial sum exceeds 4.
fn e_squared_exceeds_four() -> Certificate {
    let mut sum = Rational::zero();
    let mut term = Rational::one();
    for k in 0..=5 {
        if k > 0 {
            term = term / Rational::from_integer(k.into());
        }
        sum += term.clone();
    }
    let sq = &sum * &sum;
    if sq > Rational::from_integer(4.into()) {
        Certificate::proven(format!("e > {sum} and ({sum})² = {sq} > 4"))
    } else {
        Certificate::refuted(vec![], f64::NAN, "partial sum too small")
    }
}

/// Certifies a concave–concave gluing as folded-symplectic.
pub fn certify_folded_gluing(g: &GluedForm, settings: &Settings) -> Result<Report> {
    if g.kind != GlueKind::Folded {
        return Err(GluingError::Precondition("not a concave-concave gluing".into()));
    }
    let mut rep = Report::new(format!("folded gluing over {}", g.alpha.chart().name));
    let chart = &g.chart;
    let r1 = g.r1();
    let (p, q) = folded_coefficients(&g.bumps);
    let alpha = SingularForm::lift_from_z(chart, &g.alpha)?;
    let model = alpha
        .dx_wedge()?
        .scale(&BumpFunctions::at(&p, &r1))
        .add(&alpha.exterior_derivative()?.scale(&BumpFunctions::at(&q, &r1)))?;
    rep.push("matches_displayed_coefficients", form_vanishes(&g.omega.sub(&model)?, settings, "ω - (P dr∧α + Q dα)")?);

    let right = refined_line(0.0, 2.0, true, false);
    let (c, d) = positive_on_line(&q, &right, settings.tol_nondeg, "coefficient of dα on (0, 2)")?;
    rep.push_detail("dalpha_coefficient_positive", c, d);
    let (c, d) = positive_on_line(&p, &right, 0.0, "coefficient of dr∧α on (0, 2)")?;
    rep.push_detail("dr_alpha_coefficient_positive", c, d);

    let upper = refined_line(1.0, 2.0, true, true);
    let bound = Expr::int(3) - BumpFunctions::derivative_at(&g.bumps.psi_f, &-r());
    let (c, d) = positive_on_line(&bound, &upper, 0.0, "3 - ψ'(-r) on (1, 2)")?;
    rep.push_detail("psi_derivative_below_3", c, d);
    let ineq = r().exp() - Expr::int(4) * (-r()).exp();
    let (c, d) = positive_on_line(&ineq, &upper, 0.0, "e^r - 4e^{-r} on (1, 2)")?;
    rep.push_detail("exp_minus_4exp_neg_positive", c, d);
    rep.push("e_squared_exceeds_4", e_squared_exceeds_four());
    let lower: Vec<Vec<f64>> = refined_line(0.0, 1.0, true, false).into_iter().chain(std::iter::once(vec![1.0])).collect();
    let ineq = (Expr::int(2) * r()).exp() - Expr::one();
    let (c, d) = positive_on_line(&ineq, &lower, 0.0, "e^{2r} - 1 on (0, 1]")?;
    rep.push_detail("exp_2r_exceeds_1", c, d);

    let restricted = g.omega.restrict_to_z()?;
    let two_dalpha = g.alpha.exterior_derivative()?.scale(&Expr::int(2));
    rep.push("restriction_is_2dalpha", form_vanishes(&restricted.sub(&two_dalpha.rechart(restricted.chart())?)?, settings, "ω|Z - 2dα")?);
    rep.absorb("fold", verify_folded(&g.omega, settings)?);
    Ok(rep)
}

/// The classical union is symplectic on the joined collar.
pub fn certify_classic_gluing(g: &GluedForm, settings: &Settings) -> Result<Report> {
    if g.kind != GlueKind::Classic {
        return Err(GluingError::Precondition("not a convex-concave gluing".into()));
    }
    let frame = coframe(&Flavor::Tangent, &g.chart, None)?;
    let mut rep = Report::new(format!("classic gluing over {}", g.alpha.chart().name));
    rep.absorb("symplectic", verify_symplectic(&g.omega, &frame, settings)?);
    Ok(rep)
}
