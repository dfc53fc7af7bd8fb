//! The worked examples as chart-level records, each with the properties a
//! run of the verifiers must reproduce.

use std::sync::Arc;

use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebroids::{coframe, AlgebroidError, Flavor};
use crate::certificate::{Certificate, Report};
use crate::cohomology::{horizontal_d, CohomologyError};
use crate::expr::{rat, Expr, Rational};
use crate::geometry::{circle, interval, Chart, CoordinateMap, GeometryError, Multivector, SingularForm};
use crate::gluing::{certify, glue, Convexity, FillingCollar, GlueKind, GluingError};
use crate::settings::Settings;
use crate::structures::{
    closedness, constant_ratio, cosymplectic_extract, dualize, dualize_inverse, form_vanishes, induced_contact, normal_form,
    round_trip_certificate, schouten_jacobi_check, strong_filling_check, verify_folded, verify_symplectic,
    ContactData, FillingVerdict, PoissonBivector, StructureError,
};

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("unknown example `{0}`")]
    Unknown(String),
    #[error("parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Algebroid(#[from] AlgebroidError),
    #[error(transparent)]
    Gluing(#[from] GluingError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

type Result<T> = std::result::Result<T, CatalogError>;

/// Optional record parameters; unset ones take the entry's default.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    /// Sphere records: verify every `U_{x_i}`, `U_{y_i}` chart, not only `U_{x_1}`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub all_charts: bool,
}

impl Params {
    pub fn n(n: usize) -> Params {
        Params { n: Some(n), ..Params::default() }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub summary: &'static str,
}

pub const ENTRIES: &[CatalogEntry] = &[
    CatalogEntry {
        name: "euclidean-end",
        params: "n in 1..=3 (default 2)",
        summary: "standard form on R^2n as dx/x³∧α − dα/(2x²) near the sphere at infinity",
    },
    CatalogEntry {
        name: "sc-sphere",
        params: "n in 1..=4 (default 2), all_charts",
        summary: "d(σ/z²) on S^2n with the equator as singular locus",
    },
    CatalogEntry {
        name: "symplectization",
        params: "alpha in s1|t3|s3 (default s1)",
        summary: "d(α/x²) on Z×R",
    },
    CatalogEntry { name: "t2xs2", params: "", summary: "T²×D² collar over T³, doubled by sc gluing" },
    CatalogEntry { name: "s3xs1", params: "", summary: "D³×S¹ filling of S²×S¹, doubled by sc gluing" },
    CatalogEntry {
        name: "torus-sc-folded",
        params: "m ≥ 1 (default 2), n in 1..=2 (default 1)",
        summary: "d(β/sin²(mθ)) on T^2n: 2m sc loci and 2m folds",
    },
    CatalogEntry {
        name: "bk-torus",
        params: "k in 1..=4 (default 2), n in 1..=3 (default 2)",
        summary: "dθ/sin^kθ∧dφ + β on T^2n near θ = 0 and θ = π",
    },
    CatalogEntry { name: "b2-r-times-t3", params: "", summary: "dx/x²∧dθ1 + dθ2∧dθ3 on R×T³" },
    CatalogEntry {
        name: "folded-darboux",
        params: "n in 1..=4 (default 2)",
        summary: "x1 dx1∧dy1 + Σ dx_i∧dy_i",
    },
    CatalogEntry { name: "sc-darboux", params: "n in 1..=3 (default 2)", summary: "sc Darboux model" },
    CatalogEntry {
        name: "sc-poisson-darboux",
        params: "n in 2..=3 (default 2)",
        summary: "dual bivector of the sc Darboux model against the displayed one",
    },
];

pub fn list_examples() -> &'static [CatalogEntry] {
    ENTRIES
}

/// One property a piece must exhibit.
#[derive(Clone, Debug)]
pub enum Expected {
    /// Smooth section, closed and non-degenerate for the piece's flavor.
    Symplectic,
    Folded,
    /// Dual bivector, round trip and Jacobi identity.
    Dual,
    /// The dual equals this bivector term by term.
    DualMatches(Multivector),
    Filling(bool),
    /// The induced contact form is a constant multiple of this one.
    ContactIdentity(SingularForm),
    /// The piece is itself a contact form.
    Contact,
    Cosymplectic(u32),
    /// `coefficient_over(names, pole)` equals `value` after expansion.
    Coefficient { names: Vec<String>, pole: i64, value: Expr },
    /// The piece is the pullback of `target` under `map`.
    Pullback { map: CoordinateMap, target: SingularForm },
    /// The piece is `d(primitive)` and its closedness is exact.
    ExactPrimitive(SingularForm),
    /// `L_V ω = ω` and `i_V ω = primitive`.
    Liouville { field: Multivector, primitive: SingularForm },
    /// Two copies of the collar over `alpha` glue to a certified form.
    Glued { kind: GlueKind, alpha: SingularForm },
    /// Zeros of `sin(m θ)` and `cos(m θ)`, as multiples of π.
    Loci { m: usize, sc: Vec<Rational>, folds: Vec<Rational> },
    /// `d_h σ = 0` and `L_R σ = lie` for the induced cosymplectic pair of a b^k form.
    Horizontal { k: u32, sigma: SingularForm, lie: SingularForm },
}

impl Expected {
    pub fn label(&self) -> &'static str {
        match self {
            Expected::Symplectic => "symplectic",
            Expected::Folded => "folded",
            Expected::Dual => "dual",
            Expected::DualMatches(_) => "dual_matches_displayed",
            Expected::Filling(_) => "filling",
            Expected::ContactIdentity(_) => "contact_identity",
            Expected::Contact => "contact",
            Expected::Cosymplectic(_) => "cosymplectic",
            Expected::Coefficient { .. } => "coefficient",
            Expected::Pullback { .. } => "pullback",
            Expected::ExactPrimitive(_) => "exact_primitive",
            Expected::Liouville { .. } => "liouville",
            Expected::Glued { .. } => "glued",
            Expected::Loci { .. } => "loci",
            Expected::Horizontal { .. } => "horizontal",
        }
    }
}

/// A form on one chart with its flavor and expected properties.
#[derive(Clone, Debug)]
pub struct Piece {
    pub label: String,
    pub form: SingularForm,
    pub flavor: Flavor,
    pub expected: Vec<Expected>,
}

#[derive(Clone, Debug)]
pub struct ExampleRecord {
    pub name: String,
    pub params: Params,
    pub pieces: Vec<Piece>,
}

impl ExampleRecord {
    pub fn piece(&self, label: &str) -> Option<&Piece> {
        self.pieces.iter().find(|p| p.label == label)
    }

    /// Report subject: the name with its resolved parameters.
    pub fn title(&self) -> String {
        let p = serde_json::to_string(&self.params).expect("params serialize");
        if p == "{}" {
            self.name.clone()
        } else {
            format!("{} {p}", self.name)
        }
    }
}

fn range<T: PartialOrd + Copy + std::fmt::Display>(what: &str, v: T, lo: T, hi: T) -> Result<T> {
    if v < lo || v > hi {
        return Err(CatalogError::Parameter(format!("{what} = {v} outside {lo}..={hi}")));
    }
    Ok(v)
}

pub fn build_example(name: &str, params: &Params) -> Result<ExampleRecord> {
    let mut resolved = params.clone();
    let pieces = match name {
        "euclidean-end" => {
            let n = range("n", params.n.unwrap_or(2), 1, 3)?;
            resolved.n = Some(n);
            euclidean_end(n)?
        }
        "sc-sphere" => {
            let n = range("n", params.n.unwrap_or(2), 1, 4)?;
            resolved.n = Some(n);
            sc_sphere(n, params.all_charts)?
        }
        "symplectization" => {
            let a = params.alpha.clone().unwrap_or_else(|| "s1".into());
            let piece = symplectization(&a)?;
            resolved.alpha = Some(a);
            piece
        }
        "t2xs2" => t2xs2()?,
        "s3xs1" => s3xs1()?,
        "torus-sc-folded" => {
            let m = range("m", params.m.unwrap_or(2), 1, 64)?;
            let n = range("n", params.n.unwrap_or(1), 1, 2)?;
            resolved.m = Some(m);
            resolved.n = Some(n);
            torus_sc_folded(m, n)?
        }
        "bk-torus" => {
            let k = range("k", params.k.unwrap_or(2), 1, 4)?;
            let n = range("n", params.n.unwrap_or(2), 1, 3)?;
            resolved.k = Some(k);
            resolved.n = Some(n);
            bk_torus(k, n)?
        }
        "b2-r-times-t3" => b2_r_times_t3()?,
        "folded-darboux" => {
            let n = range("n", params.n.unwrap_or(2), 1, 4)?;
            resolved.n = Some(n);
            folded_darboux(n)?
        }
        "sc-darboux" => {
            let n = range("n", params.n.unwrap_or(2), 1, 3)?;
            resolved.n = Some(n);
            sc_darboux(n)?
        }
        "sc-poisson-darboux" => {
            let n = range("n", params.n.unwrap_or(2), 2, 3)?;
            resolved.n = Some(n);
            sc_poisson_darboux(n)?
        }
        other => return Err(CatalogError::Unknown(other.into())),
    };
    Ok(ExampleRecord { name: name.into(), params: resolved, pieces })
}

fn v(name: &str) -> Expr {
    Expr::var(name)
}

fn mono(c: &Arc<Chart>, k: i64, e: Expr, names: &[&str]) -> Result<SingularForm> {
    Ok(SingularForm::monomial(c, k, e, names)?)
}

fn total(c: &Arc<Chart>, degree: usize, parts: Vec<SingularForm>) -> Result<SingularForm> {
    parts.iter().try_fold(SingularForm::zero(c, degree), |acc, p| acc.add(p).map_err(Into::into))
}

fn darboux_sum(c: &Arc<Chart>, pairs: &[(String, String)]) -> Result<SingularForm> {
    let parts = pairs.iter().map(|(a, b)| mono(c, 0, Expr::one(), &[a, b])).collect::<Result<Vec<_>>>()?;
    total(c, 2, parts)
}

/// `Σ (u_i dv_i - v_i du_i)` over the given pairs, scaled by `scale`.
fn rotation_form(c: &Arc<Chart>, pairs: &[(String, String)], scale: Rational) -> Result<SingularForm> {
    let mut parts = Vec::new();
    for (a, b) in pairs {
        parts.push(mono(c, 0, v(a).scale(&scale), &[b])?);
        parts.push(mono(c, 0, -v(b).scale(&scale), &[a])?);
    }
    total(c, 1, parts)
}

/// Graph chart on the unit sphere in the span of `names`: the last name is
/// solved for (positive root) and the rest form a box of half-width `w`.
fn graph_chart(label: &str, names: &[String], extra: Vec<crate::geometry::Coordinate>, z: Option<&str>, w: f64) -> Result<(Arc<Chart>, Expr)> {
    let free = &names[..names.len() - 1];
    let mut coords: Vec<_> = free.iter().map(|n| interval(n, -w, w)).collect();
    coords.extend(extra);
    let chart = Chart::new(label, coords, z)?;
    let r2 = Expr::sum(free.iter().map(|n| v(n).powi(2)));
    Ok((chart, (Expr::one() - r2).sqrt()))
}

/// `α = Σ s_i dt_i - t_i ds_i` pulled back to a graph chart of S^{2n-1}
/// solving for `s_n`.
fn sphere_contact(n: usize) -> Result<SingularForm> {
    let pairs: Vec<(String, String)> = (1..=n).map(|i| (format!("s{i}"), format!("t{i}"))).collect();
    let mut amb_names = Vec::new();
    for (s, t) in &pairs {
        amb_names.push(t.clone());
        amb_names.push(s.clone());
    }
    let amb = Chart::new(&format!("R{}", 2 * n), amb_names.iter().map(|a| interval(a, -2.0, 2.0)).collect(), None)?;
    let alpha = rotation_form(&amb, &pairs, Rational::one())?;
    let w = 0.9 / ((2 * n - 1) as f64).sqrt();
    let (z, root) = graph_chart(&format!("S{}", 2 * n - 1), &amb_names, vec![], None, w)?;
    let mut images: Vec<Expr> = amb_names[..amb_names.len() - 1].iter().map(|a| v(a)).collect();
    images.push(root);
    Ok(CoordinateMap::new(&z, &amb, images)?.pullback(&alpha)?)
}

fn product_with_line(alpha: &SingularForm, x: &str, lo: f64, hi: f64) -> Result<Arc<Chart>> {
    let mut coords = vec![interval(x, lo, hi)];
    coords.extend(alpha.chart().coords.iter().cloned());
    Ok(Chart::new(&format!("{}×R", alpha.chart().name), coords, Some(x))?)
}

fn euclidean_end(n: usize) -> Result<Vec<Piece>> {
    let alpha = sphere_contact(n)?;
    let chart = product_with_line(&alpha, "x", -0.5, 0.5)?;
    let z = chart.hypersurface()?;
    let zero1 = SingularForm::zero(&z, 1);
    let zero2 = SingularForm::zero(&z, 2);
    let omega = normal_form(&chart, &alpha, &zero1, &zero2, &Settings::default())?;
    // p_i = t_i/x, q_i = s_i/x pulls Σ dp_i∧dq_i back to ω.
    let mut names = Vec::new();
    let mut images = Vec::new();
    let zn = z.names();
    let s_last = alpha_root(n);
    for i in 1..=n {
        names.push(format!("p{i}"));
        names.push(format!("q{i}"));
        images.push(v(&format!("t{i}")) * v("x").recip());
        let s = if i == n { s_last.clone() } else { v(&format!("s{i}")) };
        images.push(s * v("x").recip());
    }
    debug_assert_eq!(zn.len(), 2 * n - 1);
    let target = Chart::new(&format!("R{}", 2 * n), names.iter().map(|a| interval(a, -10.0, 10.0)).collect(), None)?;
    let pairs: Vec<(String, String)> = (1..=n).map(|i| (format!("p{i}"), format!("q{i}"))).collect();
    let standard = darboux_sum(&target, &pairs)?;
    let map = CoordinateMap::new(&chart, &target, images)?;
    Ok(vec![Piece {
        label: "end".into(),
        form: omega,
        flavor: Flavor::Sc,
        expected: vec![
            Expected::Symplectic,
            Expected::Filling(true),
            Expected::ContactIdentity(alpha),
            Expected::Pullback { map, target: standard },
            Expected::Dual,
        ],
    }])
}

/// `s_n` on the graph chart of [`sphere_contact`].
fn alpha_root(n: usize) -> Expr {
    let mut r2 = Vec::new();
    for i in 1..=n {
        r2.push(v(&format!("t{i}")).powi(2));
        if i < n {
            r2.push(v(&format!("s{i}")).powi(2));
        }
    }
    (Expr::one() - Expr::sum(r2)).sqrt()
}

fn sc_sphere(n: usize, all_charts: bool) -> Result<Vec<Piece>> {
    let mut names = Vec::new();
    for i in 1..=n {
        names.push(format!("x{i}"));
        names.push(format!("y{i}"));
    }
    let mut amb_names = names.clone();
    amb_names.push("z".into());
    let amb = Chart::new(&format!("R{}", 2 * n + 1), amb_names.iter().map(|a| interval(a, -2.0, 2.0)).collect(), Some("z"))?;
    let pairs: Vec<(String, String)> = (1..=n).map(|i| (format!("x{i}"), format!("y{i}"))).collect();
    let sigma = rotation_form(&amb, &pairs, rat(1, 2))?;
    let beta = sigma.with_pole(2).exterior_derivative()?;

    let solved: Vec<String> = if all_charts { names.clone() } else { vec!["x1".into()] };
    let mut pieces = Vec::new();
    for s in &solved {
        let w = 0.9 / ((2 * n) as f64).sqrt();
        let free: Vec<String> = amb_names.iter().filter(|a| *a != s).cloned().collect();
        let chart = Chart::new(&format!("U_{s}"), free.iter().map(|a| interval(a, -w, w)).collect(), Some("z"))?;
        let root = (Expr::one() - Expr::sum(free.iter().map(|a| v(a).powi(2)))).sqrt();
        let images = amb_names.iter().map(|a| if a == s { root.clone() } else { v(a) }).collect();
        let form = CoordinateMap::new(&chart, &amb, images)?.pullback(&beta)?;
        let mut expected = vec![Expected::Symplectic, Expected::Dual];
        if s == "x1" {
            let inv = root.recip();
            let value = -(root.clone() + v("y1").powi(2) * &inv + v("z").powi(2) * &inv);
            expected.push(Expected::Coefficient { names: vec!["z".into(), "y1".into()], pole: 3, value });
        }
        pieces.push(Piece { label: format!("U_{s}"), form, flavor: Flavor::Sc, expected });
    }
    for (label, sign) in [("north", 1), ("south", -1)] {
        let w = 0.5 / (n as f64).sqrt();
        let chart = Chart::new(label, names.iter().map(|a| interval(a, -w, w)).collect(), None)?;
        let root = (Expr::one() - Expr::sum(names.iter().map(|a| v(a).powi(2)))).sqrt();
        let mut images: Vec<Expr> = names.iter().map(|a| v(a)).collect();
        images.push(root * Expr::int(sign));
        let form = CoordinateMap::new(&chart, &amb, images)?.pullback(&beta)?;
        pieces.push(Piece { label: label.into(), form, flavor: Flavor::Tangent, expected: vec![Expected::Symplectic, Expected::Dual] });
    }
    Ok(pieces)
}

/// Contact form presets: the standard `S¹`, `T³` with `cos s dq1 + sin s dq2`, and `S³`.
pub fn contact_by_name(name: &str) -> Result<SingularForm> {
    match name {
        "s1" => {
            let z = Chart::new("S1", vec![circle("t")], None)?;
            Ok(SingularForm::basis(&z, "t")?)
        }
        "t3" => torus_contact(),
        "s3" => sphere_contact(2),
        other => Err(CatalogError::Parameter(format!("unknown contact form {other:?} (s1, t3, s3)"))),
    }
}

/// `cos s dq1 + sin s dq2` on T³.
fn torus_contact() -> Result<SingularForm> {
    let z = Chart::new("T3", vec![circle("s"), circle("q1"), circle("q2")], None)?;
    Ok(mono(&z, 0, v("s").cos(), &["q1"])?.add(&mono(&z, 0, v("s").sin(), &["q2"])?)?)
}

fn symplectization(name: &str) -> Result<Vec<Piece>> {
    let alpha = contact_by_name(name)?;
    let chart = product_with_line(&alpha, "x", -0.5, 0.5)?;
    let lifted = SingularForm::lift_from_z(&chart, &alpha)?;
    let omega = lifted.with_pole(2).exterior_derivative()?;
    Ok(vec![Piece {
        label: "collar".into(),
        form: omega,
        flavor: Flavor::Sc,
        expected: vec![Expected::Symplectic, Expected::Filling(true), Expected::ContactIdentity(alpha), Expected::Dual],
    }])
}

fn contact_piece(alpha: &SingularForm) -> Piece {
    Piece { label: "boundary".into(), form: alpha.clone(), flavor: Flavor::Tangent, expected: vec![Expected::Contact] }
}

fn t2xs2() -> Result<Vec<Piece>> {
    let alpha = torus_contact()?;
    let collar = FillingCollar::new(alpha.clone(), Convexity::Convex, 3.0)?;
    let form = collar.collar_form()?;
    let chart = form.chart().clone();
    // The radial coordinate of the disk is e^{-r}.
    let disk = Chart::new(
        "D2×T2",
        vec![interval("p1", -1.0, 1.0), interval("p2", -1.0, 1.0), circle("q1"), circle("q2")],
        None,
    )?;
    let rho = (-v("r")).exp();
    let map = CoordinateMap::new(&chart, &disk, vec![&rho * v("s").cos(), &rho * v("s").sin(), v("q1"), v("q2")])?;
    let target = darboux_sum(&disk, &[("p1".into(), "q1".into()), ("p2".into(), "q2".into())])?;
    let field = Multivector::monomial(&chart, 0, Expr::int(-1), &["r"])?;
    let primitive = SingularForm::lift_from_z(&chart, &alpha)?.scale(&rho);
    Ok(vec![
        contact_piece(&alpha),
        Piece {
            label: "collar".into(),
            form,
            flavor: Flavor::Tangent,
            expected: vec![
                Expected::Symplectic,
                Expected::Pullback { map, target },
                Expected::Liouville { field, primitive },
                Expected::Glued { kind: GlueKind::Sc, alpha },
            ],
        },
    ])
}

fn s3xs1() -> Result<Vec<Piece>> {
    let ball = Chart::new(
        "D3×S1",
        vec![interval("x", -0.5, 0.5), interval("y", -0.5, 0.5), interval("z", -0.5, 0.5), circle("th")],
        None,
    )?;
    let omega = mono(&ball, 0, Expr::int(2), &["x", "y"])?.add(&mono(&ball, 0, Expr::one(), &["z", "th"])?)?;
    let gamma = total(
        &ball,
        1,
        vec![mono(&ball, 0, v("x"), &["y"])?, mono(&ball, 0, -v("y"), &["x"])?, mono(&ball, 0, v("z"), &["th"])?],
    )?;
    // i_V ω = γ needs half weight on the (x, y) plane.
    let field = total_mv(
        &ball,
        vec![
            Multivector::monomial(&ball, 0, v("x").scale(&rat(1, 2)), &["x"])?,
            Multivector::monomial(&ball, 0, v("y").scale(&rat(1, 2)), &["y"])?,
            Multivector::monomial(&ball, 0, v("z"), &["z"])?,
        ],
    )?;
    let (bdry, root) = graph_chart("S2×S1", &["a".into(), "b".into(), "c".into()], vec![circle("th")], None, 0.5)?;
    let map = CoordinateMap::new(&bdry, &ball, vec![v("a"), v("b"), root, v("th")])?;
    let alpha = map.pullback(&gamma)?;
    let collar = FillingCollar::new(alpha.clone(), Convexity::Convex, 3.0)?;
    Ok(vec![
        Piece {
            label: "ball".into(),
            form: omega,
            flavor: Flavor::Tangent,
            expected: vec![Expected::Symplectic, Expected::Liouville { field, primitive: gamma }, Expected::Dual],
        },
        contact_piece(&alpha),
        Piece {
            label: "collar".into(),
            form: collar.collar_form()?,
            flavor: Flavor::Tangent,
            expected: vec![Expected::Symplectic, Expected::Glued { kind: GlueKind::Sc, alpha }],
        },
    ])
}

fn total_mv(c: &Arc<Chart>, parts: Vec<Multivector>) -> Result<Multivector> {
    parts.iter().try_fold(Multivector::zero(c, 1), |acc, p| acc.add(p).map_err(Into::into))
}

/// Contact form on T^{2n-1} for the torus family: `dθ1` on the circle,
/// `cos θ1 dq1 + sin θ1 dq2` on T³.
fn torus_family_contact(chart: &Arc<Chart>, n: usize) -> Result<SingularForm> {
    match n {
        1 => Ok(SingularForm::basis(chart, "th1")?),
        2 => Ok(mono(chart, 0, v("th1").cos(), &["q1"])?.add(&mono(chart, 0, v("th1").sin(), &["q2"])?)?),
        _ => Err(CatalogError::Parameter("contact forms on T^{2n-1} are only built for n ≤ 2".into())),
    }
}

fn torus_coords(n: usize) -> Vec<crate::geometry::Coordinate> {
    if n == 1 {
        vec![circle("th1")]
    } else {
        vec![circle("th1"), circle("q1"), circle("q2")]
    }
}

fn torus_sc_folded(m: usize, n: usize) -> Result<Vec<Piece>> {
    let mf = m as i64;
    let half = 0.5 / m as f64;
    // Near a zero of sin(mθ), u = sin(mθ) is a coordinate and ω = d(β/u²).
    let mut coords = vec![interval("u", -0.5, 0.5)];
    coords.extend(torus_coords(n));
    let sc_chart = Chart::new("sc-locus", coords, Some("u"))?;
    let beta = torus_family_contact(&sc_chart, n)?;
    let sc_primitive = beta.with_pole(2);
    let sc_form = sc_primitive.exterior_derivative()?;
    // Near a zero of cos(mθ) at shift v, sin²(mθ) = cos²(m v).
    let mut coords = vec![interval("v", -half, half)];
    coords.extend(torus_coords(n));
    let fold_chart = Chart::new("fold", coords, Some("v"))?;
    let beta_f = torus_family_contact(&fold_chart, n)?;
    let fold_primitive = beta_f.scale(&(v("v") * Expr::int(mf)).cos().powi(-2));
    let fold_form = fold_primitive.exterior_derivative()?;
    // On the whole torus, the displayed expansion -2m cos/sin³ dθ∧β + dβ/sin².
    let mut coords = vec![circle("th2")];
    coords.extend(torus_coords(n));
    let torus = Chart::new(&format!("T{}", 2 * n), coords, None)?;
    let beta_t = torus_family_contact(&torus, n)?;
    let s = (v("th2") * Expr::int(mf)).sin();
    let c = (v("th2") * Expr::int(mf)).cos();
    let displayed = SingularForm::basis(&torus, "th2")?
        .wedge(&beta_t)?
        .scale(&(Expr::int(-2 * mf) * c * s.powi(-3)))
        .add(&beta_t.exterior_derivative()?.scale(&s.powi(-2)))?;
    let global_primitive = beta_t.scale(&s.powi(-2));
    let two_m = 2 * mf;
    let sc = (0..two_m).map(|j| Rational::new(j.into(), mf.into())).collect();
    let folds = (0..two_m).map(|j| Rational::new((2 * j + 1).into(), (2 * mf).into())).collect();
    Ok(vec![
        Piece {
            label: "sc-locus".into(),
            form: sc_form,
            flavor: Flavor::Sc,
            expected: vec![Expected::Symplectic, Expected::ExactPrimitive(sc_primitive), Expected::Dual],
        },
        Piece {
            label: "fold".into(),
            form: fold_form,
            flavor: Flavor::Tangent,
            expected: vec![Expected::Folded, Expected::ExactPrimitive(fold_primitive)],
        },
        Piece {
            label: "torus".into(),
            form: displayed,
            flavor: Flavor::Tangent,
            expected: vec![Expected::ExactPrimitive(global_primitive), Expected::Loci { m, sc, folds }],
        },
    ])
}

fn bk_torus(k: u32, n: usize) -> Result<Vec<Piece>> {
    let mut pieces = Vec::new();
    // u = sin θ near θ = 0 (cos θ > 0) and θ = π (cos θ < 0).
    for (label, sign) in [("theta=0", 1), ("theta=pi", -1)] {
        let mut coords = vec![interval("u", -0.5, 0.5), circle("ph")];
        let mut pairs = Vec::new();
        for i in 2..=n {
            coords.push(circle(&format!("a{i}")));
            coords.push(circle(&format!("b{i}")));
            pairs.push((format!("a{i}"), format!("b{i}")));
        }
        let chart = Chart::new(&format!("T{} near {label}", 2 * n), coords, Some("u"))?;
        let dtheta = (Expr::one() - v("u").powi(2)).pow(rat(-1, 2)) * Expr::int(sign);
        let form = mono(&chart, k as i64, dtheta, &["u", "ph"])?.add(&darboux_sum(&chart, &pairs)?)?;
        pieces.push(Piece {
            label: label.into(),
            form,
            flavor: Flavor::BK(k),
            expected: vec![Expected::Symplectic, Expected::Cosymplectic(k), Expected::Dual],
        });
    }
    Ok(pieces)
}

fn b2_r_times_t3() -> Result<Vec<Piece>> {
    let chart = Chart::new("R×T3", vec![interval("x", -0.5, 0.5), circle("th1"), circle("th2"), circle("th3")], Some("x"))?;
    let form = mono(&chart, 2, Expr::one(), &["x", "th1"])?.add(&mono(&chart, 0, Expr::one(), &["th2", "th3"])?)?;
    let z = chart.hypersurface()?;
    let sigma = mono(&z, 0, v("th1").cos(), &["th3"])?;
    let lie = mono(&z, 0, -v("th1").sin(), &["th3"])?;
    Ok(vec![Piece {
        label: "chart".into(),
        form,
        flavor: Flavor::BK(2),
        expected: vec![
            Expected::Symplectic,
            Expected::Cosymplectic(2),
            Expected::Horizontal { k: 2, sigma, lie },
            Expected::Dual,
        ],
    }])
}

fn darboux_chart(n: usize, x1: (f64, f64)) -> Result<Arc<Chart>> {
    let mut coords = vec![interval("x1", x1.0, x1.1), interval("y1", -1.0, 1.0)];
    for i in 2..=n {
        coords.push(interval(&format!("x{i}"), -1.0, 1.0));
        coords.push(interval(&format!("y{i}"), -1.0, 1.0));
    }
    Ok(Chart::new(&format!("R{}", 2 * n), coords, Some("x1"))?)
}

fn higher_pairs(n: usize) -> Vec<(String, String)> {
    (2..=n).map(|i| (format!("x{i}"), format!("y{i}"))).collect()
}

fn folded_darboux(n: usize) -> Result<Vec<Piece>> {
    let chart = darboux_chart(n, (-1.0, 1.0))?;
    let form = mono(&chart, 0, v("x1"), &["x1", "y1"])?.add(&darboux_sum(&chart, &higher_pairs(n))?)?;
    Ok(vec![Piece { label: "chart".into(), form, flavor: Flavor::Tangent, expected: vec![Expected::Folded] }])
}

/// `dx1/x1³ ∧ α + Σ dx_i∧dy_i/x1²` with `α = dy1 + Σ y_i dx_i - x_i dy_i`,
/// and `α` on the hypersurface.
fn sc_darboux_form(n: usize) -> Result<(SingularForm, SingularForm)> {
    let chart = darboux_chart(n, (-0.5, 0.5))?;
    let z = chart.hypersurface()?;
    let pairs = higher_pairs(n);
    let alpha_z = SingularForm::basis(&z, "y1")?.add(&rotation_form(&z, &pairs, -Rational::one())?)?;
    let alpha = SingularForm::lift_from_z(&chart, &alpha_z)?;
    let omega = alpha.dx_wedge()?.with_pole(3).add(&darboux_sum(&chart, &pairs)?.with_pole(2))?;
    Ok((omega, alpha_z))
}

fn sc_darboux(n: usize) -> Result<Vec<Piece>> {
    let (omega, alpha) = sc_darboux_form(n)?;
    Ok(vec![Piece {
        label: "chart".into(),
        form: omega,
        flavor: Flavor::Sc,
        expected: vec![Expected::Symplectic, Expected::ContactIdentity(alpha), Expected::Filling(true), Expected::Dual],
    }])
}

/// The displayed bivector
/// `x1³∂y1∧∂x1 + x1²∂y1∧Σ(y_i∂y_i + x_i∂x_i) + x1² Σ ∂x_i∧∂y_i`.
pub fn displayed_darboux_bivector(chart: &Arc<Chart>, n: usize) -> Result<Multivector> {
    let mut parts = vec![Multivector::monomial(chart, -3, Expr::one(), &["y1", "x1"])?];
    for (x, y) in higher_pairs(n) {
        parts.push(Multivector::monomial(chart, -2, v(&y), &["y1", &y])?);
        parts.push(Multivector::monomial(chart, -2, v(&x), &["y1", &x])?);
        parts.push(Multivector::monomial(chart, -2, Expr::one(), &[&x, &y])?);
    }
    parts.iter().try_fold(Multivector::zero(chart, 2), |acc, p| acc.add(p).map_err(Into::into))
}

fn sc_poisson_darboux(n: usize) -> Result<Vec<Piece>> {
    let (omega, _) = sc_darboux_form(n)?;
    let pi = displayed_darboux_bivector(omega.chart(), n)?;
    Ok(vec![Piece {
        label: "chart".into(),
        form: omega,
        flavor: Flavor::Sc,
        expected: vec![Expected::Dual, Expected::DualMatches(pi)],
    }])
}

fn exact(what: &str, ok: bool, detail: String) -> Certificate {
    if ok {
        Certificate::proven(what.to_string())
    } else {
        Certificate::refuted(vec![], f64::NAN, format!("{what}: {detail}"))
    }
}

fn check_dual(piece: &Piece, settings: &Settings, rep: &mut Report) -> Result<Option<Multivector>> {
    let frame = coframe(&piece.flavor, piece.form.chart(), None)?;
    let pi = dualize(&piece.form, &frame, settings)?;
    rep.push("round_trip", round_trip_certificate(&piece.form, &pi, settings)?);
    match pi {
        PoissonBivector::Symbolic(pi) => {
            let back = dualize_inverse(&pi)?.sub(&piece.form)?;
            rep.push("inverse_recovers_form", form_vanishes(&back, settings, "dualize_inverse(π) - ω")?);
            rep.push("jacobi", schouten_jacobi_check(&pi, settings)?);
            Ok(Some(pi))
        }
        PoissonBivector::Sampled { .. } => {
            rep.note("dual", "sampled (dimension above the symbolic limit); Jacobi not checked");
            Ok(None)
        }
    }
}

fn run_expected(piece: &Piece, e: &Expected, settings: &Settings) -> Result<Report> {
    let omega = &piece.form;
    let mut rep = Report::new(e.label());
    match e {
        Expected::Symplectic => {
            let frame = coframe(&piece.flavor, omega.chart(), None)?;
            rep = verify_symplectic(omega, &frame, settings)?;
        }
        Expected::Folded => rep = verify_folded(omega, settings)?,
        Expected::Dual => {
            check_dual(piece, settings, &mut rep)?;
        }
        Expected::DualMatches(displayed) => {
            rep.push("displayed_jacobi", schouten_jacobi_check(displayed, settings)?);
            match check_dual(piece, settings, &mut Report::new("dual"))? {
                Some(pi) => {
                    let diff = pi.sub(displayed)?.expanded();
                    rep.push_detail(
                        "matches_displayed",
                        exact("dual equals the displayed bivector", diff.is_zero(), format!("difference {}", diff.describe())),
                        pi.describe(),
                    );
                }
                None => rep.push(
                    "matches_displayed",
                    Certificate::refuted(vec![], f64::NAN, "dual is not symbolic in this dimension"),
                ),
            }
        }
        Expected::Filling(want) => match strong_filling_check(omega, settings)? {
            FillingVerdict::Filling { report, .. } => {
                rep.absorb("check", report);
                rep.push("verdict", exact("verdict Filling", *want, "expected NotFilling".into()));
            }
            FillingVerdict::NotFilling { slot, .. } => {
                rep.push_detail("verdict", exact("verdict NotFilling", !*want, "expected Filling".into()), slot);
            }
        },
        Expected::ContactIdentity(alpha) => {
            let cd = induced_contact(omega, settings)?;
            rep.absorb("contact", cd.verify(settings)?);
            rep.note("representative", format!("the conformal class is pinned by the defining function {}", omega.chart().x_name().unwrap_or("x")));
            let alpha = alpha.rechart(cd.alpha.chart())?;
            match constant_ratio(&cd.alpha, &alpha)? {
                Some(c) => {
                    let dev = cd.alpha.sub(&alpha.scale(&c))?;
                    rep.push_detail("multiple_of_expected", form_vanishes(&dev, settings, "α - c·α₀")?, format!("c = {c}"));
                }
                None => rep.push(
                    "multiple_of_expected",
                    Certificate::refuted(vec![], f64::NAN, "induced contact form is not a constant multiple"),
                ),
            }
        }
        Expected::Contact => rep = ContactData::new(omega.clone())?.verify(settings)?,
        Expected::Cosymplectic(k) => {
            let (data, report) = cosymplectic_extract(omega, *k, settings)?;
            rep = report;
            rep.note("reeb", data.reeb.describe());
        }
        Expected::Coefficient { names, pole, value } => {
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let c = omega.coefficient_over(&refs, *pole)?;
            let diff = (&c - value).expand();
            rep.push_detail(
                "structural_match",
                exact("coefficient matches", diff.is_const_zero(), format!("difference {diff}")),
                format!("d{} / x^{pole}: {}", names.join("∧d"), c.expand()),
            );
        }
        Expected::Pullback { map, target } => {
            let dev = omega.sub(&map.pullback(target)?)?;
            rep.push("equals_pullback", form_vanishes(&dev, settings, "ω - φ*ω₀")?);
        }
        Expected::ExactPrimitive(lambda) => {
            let dev = omega.sub(&lambda.exterior_derivative()?)?;
            rep.push("equals_d_primitive", form_vanishes(&dev, settings, "ω - dλ")?);
            let closed = closedness(omega, settings)?;
            let proven = matches!(closed, Certificate::Proven { .. });
            rep.push("closed", closed);
            rep.push("closed_exactly", exact("dω vanishes symbolically", proven, "only numerically".into()));
        }
        Expected::Liouville { field, primitive } => {
            let lie = omega.lie_derivative(field)?.sub(omega)?;
            rep.push("lie_derivative_equals_omega", form_vanishes(&lie, settings, "L_V ω - ω")?);
            let contraction = omega.interior(field)?.sub(primitive)?;
            rep.push("contraction_equals_primitive", form_vanishes(&contraction, settings, "i_V ω - λ")?);
        }
        Expected::Glued { kind, alpha } => {
            let (c1, c2) = match kind {
                GlueKind::Sc => (Convexity::Convex, Convexity::Convex),
                GlueKind::Folded => (Convexity::Concave, Convexity::Concave),
                GlueKind::Classic => (Convexity::Convex, Convexity::Concave),
            };
            let a = FillingCollar::new(alpha.clone(), c1, 3.0)?;
            let b = FillingCollar::new(alpha.clone(), c2, 3.0)?;
            let g = glue(*kind, &a, &b)?;
            rep = certify(&g, settings)?;
        }
        Expected::Loci { m, sc, folds } => {
            let counts = sc.len() == 2 * m && folds.len() == 2 * m;
            let m = Rational::from_integer((*m as i64).into());
            let sc_ok = sc.iter().all(|q| (q * &m).is_integer());
            let fold_ok = folds.iter().all(|q| (q * &m - rat(1, 2)).is_integer());
            let in_range = sc.iter().chain(folds).all(|q| !q.is_negative() && *q < Rational::from_integer(2.into()));
            let interleaved = sc.windows(2).zip(folds).all(|(w, f)| w[0] < *f && *f < w[1]) && sc.last() < folds.last();
            rep.push("sin_vanishes_at_sc_loci", exact("sin(mθ) = 0", sc_ok, format!("{sc:?}")));
            rep.push("cos_vanishes_at_folds", exact("cos(mθ) = 0", fold_ok, format!("{folds:?}")));
            rep.push("counts", exact("2m of each", counts && in_range, format!("{} sc, {} folds", sc.len(), folds.len())));
            rep.push("interleaved", exact("loci alternate", interleaved, "ordering".into()));
        }
        Expected::Horizontal { k, sigma, lie } => {
            let (data, _) = cosymplectic_extract(omega, *k, settings)?;
            let sigma = sigma.rechart(data.theta.chart())?;
            let lie = lie.rechart(data.theta.chart())?;
            let dh = horizontal_d(&sigma, &data.theta, &data.reeb, settings)?;
            rep.push("d_h_vanishes", form_vanishes(&dh, settings, "d_h σ")?);
            let dev = sigma.lie_derivative(&data.reeb)?.sub(&lie)?;
            rep.push("lie_derivative", form_vanishes(&dev, settings, "L_R σ - expected")?);
        }
    }
    Ok(rep)
}

/// Runs every expected property of every piece. Clause names are
/// `piece.property.clause`.
pub fn run_example(record: &ExampleRecord, settings: &Settings) -> Result<Report> {
    let mut report = Report::new(record.title());
    for piece in &record.pieces {
        for e in &piece.expected {
            let r = run_expected(piece, e, settings)?;
            report.absorb(&format!("{}.{}", piece.label, e.label()), r);
        }
    }
    Ok(report)
}

/// Builds and runs records in parallel; results keep the input order.
pub fn run_suite(requests: &[(String, Params)], settings: &Settings) -> Vec<Result<Report>> {
    requests
        .par_iter()
        .map(|(name, params)| build_example(name, params).and_then(|r| run_example(&r, settings)))
        .collect()
}

/// Every entry at its default parameters.
pub fn default_suite() -> Vec<(String, Params)> {
    ENTRIES.iter().map(|e| (e.name.to_string(), Params::default())).collect()
}
