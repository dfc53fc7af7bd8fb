//! Rescaled coframes and the judgments they induce on singular forms.
//!
//! A frame is a list of smooth 1-forms `g_i` with integer weights `w_i`; the
//! algebroid coframe is `g_i / x^{w_i}`. A form is rewritten in the `g`
//! basis by inverting the matrix expressing `g` in coordinate differentials,
//! after which the pole order of each component relative to the frame is an
//! integer comparison.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certificate::{scan_min, witness, Certificate, Report};
use crate::expr::{Compiled, Expr, ZeroVerdict};
use crate::geometry::{Chart, GeometryError, Multivector, SingularForm};
use crate::linalg::{self, ExprMatrix};
use crate::random;
use crate::settings::Settings;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AlgebroidError {
    #[error("flavor `{0}` needs auxiliary data")]
    MissingAux(String),
    #[error("invalid auxiliary data: {0}")]
    InvalidAux(String),
    #[error("unknown flavor `{0}`")]
    UnknownFlavor(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Flavor {
    /// The ordinary tangent bundle; used for smooth and folded forms.
    Tangent,
    B,
    Zero,
    Sc,
    ScK(u32),
    BK(u32),
    ZeroMBK { m: u32, k: u32 },
    RiggedSc,
    RiggedBK(u32),
}

impl Flavor {
    /// Weights of the normal generator, the auxiliary generator (rigged
    /// flavors only), and the remaining generators.
    fn weights(&self) -> (i64, Option<i64>, i64) {
        match *self {
            Flavor::Tangent => (0, None, 0),
            Flavor::B => (1, None, 0),
            Flavor::Zero => (1, None, 1),
            Flavor::Sc => (2, None, 1),
            Flavor::ScK(k) => (k as i64 + 1, None, k as i64),
            Flavor::BK(k) => (k as i64, None, 0),
            Flavor::ZeroMBK { m, k } => ((k + m) as i64, None, m as i64),
            Flavor::RiggedSc => (3, Some(3), 2),
            Flavor::RiggedBK(k) => (k as i64, Some(k as i64), 0),
        }
    }

    pub fn is_rigged(&self) -> bool {
        matches!(self, Flavor::RiggedSc | Flavor::RiggedBK(_))
    }

    /// Parses a CLI flavor name with its integer parameters.
    pub fn parse(name: &str, m: Option<u32>, k: Option<u32>) -> Result<Flavor, AlgebroidError> {
        let need = |v: Option<u32>, p: &str| v.ok_or_else(|| AlgebroidError::UnknownFlavor(format!("{name} needs {p}")));
        Ok(match name {
            "tangent" => Flavor::Tangent,
            "b" => Flavor::B,
            "zero" => Flavor::Zero,
            "sc" => Flavor::Sc,
            "sc^k" => Flavor::ScK(need(k, "k")?),
            "b^k" => Flavor::BK(need(k, "k")?),
            "zero^m-b^k" => Flavor::ZeroMBK { m: need(m, "m")?, k: need(k, "k")? },
            "rigged-sc" => Flavor::RiggedSc,
            "rigged-b^k" => Flavor::RiggedBK(need(k, "k")?),
            other => return Err(AlgebroidError::UnknownFlavor(other.to_string())),
        })
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Tangent => write!(f, "tangent"),
            Flavor::B => write!(f, "b"),
            Flavor::Zero => write!(f, "zero"),
            Flavor::Sc => write!(f, "sc"),
            Flavor::ScK(k) => write!(f, "sc^{k}"),
            Flavor::BK(k) => write!(f, "b^{k}"),
            Flavor::ZeroMBK { m, k } => write!(f, "zero^{m}-b^{k}"),
            Flavor::RiggedSc => write!(f, "rigged-sc"),
            Flavor::RiggedBK(k) => write!(f, "rigged-b^{k}"),
        }
    }
}

impl FromStr for Flavor {
    type Err = AlgebroidError;

    /// Accepts the display form, e.g. `sc^2` or `zero^1-b^3`.
    fn from_str(s: &str) -> Result<Flavor, AlgebroidError> {
        let num = |t: &str| t.parse::<u32>().map_err(|_| AlgebroidError::UnknownFlavor(s.to_string()));
        if let Some(rest) = s.strip_prefix("zero^") {
            if let Some((m, k)) = rest.split_once("-b^") {
                return Ok(Flavor::ZeroMBK { m: num(m)?, k: num(k)? });
            }
        }
        if let Some(k) = s.strip_prefix("rigged-b^") {
            return Ok(Flavor::RiggedBK(num(k)?));
        }
        if let Some(k) = s.strip_prefix("sc^") {
            if k != "k" {
                return Ok(Flavor::ScK(num(k)?));
            }
        }
        if let Some(k) = s.strip_prefix("b^") {
            if k != "k" {
                return Ok(Flavor::BK(num(k)?));
            }
        }
        Flavor::parse(s, None, None)
    }
}

impl TryFrom<String> for Flavor {
    type Error = AlgebroidError;
    fn try_from(s: String) -> Result<Flavor, AlgebroidError> {
        s.parse()
    }
}

impl From<Flavor> for String {
    fn from(f: Flavor) -> String {
        f.to_string()
    }
}

/// A rescaled coframe on one chart.
#[derive(Clone, Debug)]
pub struct AlgebroidFrame {
    pub flavor: Flavor,
    chart: Arc<Chart>,
    weights: Vec<i64>,
    generators: Vec<SingularForm>,
    labels: Vec<String>,
    /// `None` for coordinate frames; otherwise the inverse of the matrix
    /// whose rows are the generators' coefficients.
    inverse: Option<ExprMatrix>,
    det: Expr,
}

/// Builds the frame of `flavor` on `chart`. Rigged flavors need the
/// auxiliary 1-form (contact form or cosymplectic θ), given on the
/// hypersurface chart or on `chart` without `dx` component.
pub fn coframe(flavor: &Flavor, chart: &Arc<Chart>, aux: Option<&SingularForm>) -> Result<AlgebroidFrame, AlgebroidError> {
    let n = chart.dim();
    let (wx, waux, wy) = flavor.weights();
    let xi = match chart.z {
        Some(i) => Some(i),
        None if wx == 0 && wy == 0 => None,
        None => return Err(GeometryError::NoHypersurface.into()),
    };
    let names = chart.names();
    let mut weights: Vec<i64> = (0..n).map(|i| if Some(i) == xi { wx } else { wy }).collect();
    let mut generators: Vec<SingularForm> =
        names.iter().map(|nm| SingularForm::basis(chart, nm)).collect::<Result<_, _>>()?;
    let mut labels: Vec<String> = names.iter().map(|nm| format!("d{nm}")).collect();
    let mut inverse = None;
    let mut det = Expr::one();
    if let Some(wa) = waux {
        let a = aux.ok_or_else(|| AlgebroidError::MissingAux(flavor.to_string()))?;
        let a = lift_aux(chart, a)?;
        let xi = xi.expect("rigged flavors have weights");
        let j = choose_replaced(chart, xi, &a)?;
        weights[j] = wa;
        generators[j] = a;
        labels[j] = if *flavor == Flavor::RiggedSc { "α".into() } else { "θ".into() };
        let matrix: ExprMatrix = generators
            .iter()
            .map(|g| (0..n).map(|c| g.collected(&[c], 0)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<_, _>>()?;
        let (inv, d) = linalg::inverse(&matrix);
        if d.is_const_zero() {
            return Err(AlgebroidError::InvalidAux("generators are linearly dependent".into()));
        }
        inverse = Some(inv);
        det = d;
    }
    let labels = labels
        .into_iter()
        .zip(&weights)
        .map(|(l, w)| if *w == 0 { l } else { format!("{l}/x^{w}") })
        .collect();
    Ok(AlgebroidFrame { flavor: flavor.clone(), chart: chart.clone(), weights, generators, labels, inverse, det })
}

fn lift_aux(chart: &Arc<Chart>, a: &SingularForm) -> Result<SingularForm, AlgebroidError> {
    if a.degree() != 1 {
        return Err(AlgebroidError::InvalidAux(format!("expected a 1-form, got degree {}", a.degree())));
    }
    let lifted = if a.chart() == chart {
        a.clone()
    } else {
        SingularForm::lift_from_z(chart, a)?
    };
    let xi = chart.z.ok_or(GeometryError::NoHypersurface)?;
    if lifted.terms().keys().any(|(idx, k)| *k != 0 || idx.contains(&xi)) {
        return Err(AlgebroidError::InvalidAux("auxiliary form must be smooth and tangent to Z".into()));
    }
    Ok(lifted)
}

/// Coordinate differential to trade for the auxiliary form: the first one
/// with a nonzero constant coefficient, else the one whose coefficient has
/// the largest minimum modulus on sample points.
fn choose_replaced(chart: &Arc<Chart>, xi: usize, a: &SingularForm) -> Result<usize, AlgebroidError> {
    let mut best: Option<(usize, f64)> = None;
    let samples = chart.samples(64, crate::expr::DEFAULT_SEED);
    for j in (0..chart.dim()).filter(|j| *j != xi) {
        let c = a.collected(&[j], 0)?;
        if let Some(q) = c.as_const() {
            if *q != num_rational::BigRational::from_integer(0.into()) {
                return Ok(j);
            }
            continue;
        }
        let compiled = Compiled::new(&c, &chart.names()).map_err(GeometryError::from)?;
        let m = samples.iter().map(|p| compiled.eval(p).abs()).fold(f64::INFINITY, f64::min);
        if m.is_finite() && best.map_or(true, |(_, b)| m > b) {
            best = Some((j, m));
        }
    }
    match best {
        Some((j, m)) if m > 0.0 => Ok(j),
        _ => Err(AlgebroidError::InvalidAux("auxiliary form vanishes somewhere on every axis".into())),
    }
}

impl AlgebroidFrame {
    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    /// Smooth parts `g_i` of the generators `g_i / x^{w_i}`.
    pub fn generators(&self) -> &[SingularForm] {
        &self.generators
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Determinant of the generator matrix (1 for coordinate frames).
    pub fn determinant(&self) -> &Expr {
        &self.det
    }

    /// The algebroid coframe `g_i / x^{w_i}` as singular forms.
    pub fn coframe_forms(&self) -> Vec<SingularForm> {
        self.generators.iter().zip(&self.weights).map(|(g, w)| g.with_pole(*w)).collect()
    }

    /// Sections dual to the coframe: `x^{w_i} V_i` with `g_j(V_i) = δ_ij`.
    pub fn dual_sections(&self) -> Result<Vec<Multivector>, GeometryError> {
        let n = self.rank();
        let names = self.chart.names();
        (0..n)
            .map(|i| {
                let mut v = Multivector::zero(&self.chart, 1);
                for (j, name) in names.iter().enumerate() {
                    let c = match &self.inverse {
                        None => Expr::int(i64::from(i == j)),
                        Some(inv) => inv[j][i].clone(),
                    };
                    if !c.is_const_zero() {
                        v = v.add(&Multivector::monomial(&self.chart, 0, c, &[name])?)?;
                    }
                }
                Ok(v.with_pole(-self.weights[i]))
            })
            .collect()
    }

    fn check_chart(&self, f: &SingularForm) -> Result<(), GeometryError> {
        if f.chart() != &self.chart {
            return Err(GeometryError::ChartMismatch(f.chart().name.clone(), self.chart.name.clone()));
        }
        Ok(())
    }

    /// Rewrites `f` in the `g` basis: index `i` of the result stands for
    /// the smooth generator `g_i`, Laurent exponents are unchanged.
    pub fn to_generator_basis(&self, f: &SingularForm) -> Result<SingularForm, GeometryError> {
        self.check_chart(f)?;
        let Some(inv) = &self.inverse else {
            return Ok(f.clone());
        };
        let n = self.rank();
        let images: Vec<SingularForm> = (0..n)
            .map(|j| SingularForm::from_terms(&self.chart, 1, (0..n).map(|i| ((vec![i], 0), inv[j][i].clone()))))
            .collect();
        let mut out = SingularForm::zero(&self.chart, f.degree());
        for ((idx, k), c) in f.terms() {
            let mut piece = SingularForm::scalar(&self.chart, c.clone()).with_pole(*k);
            for j in idx {
                piece = piece.wedge(&images[*j])?;
            }
            out = out.add(&piece)?;
        }
        Ok(out)
    }

    /// Pole order of the term `x^{-k} g_I` relative to the coframe.
    pub fn frame_exponent(&self, idx: &[usize], k: i64) -> i64 {
        k - idx.iter().map(|i| self.weights[*i]).sum::<i64>()
    }

    fn describe_index(&self, idx: &[usize]) -> String {
        if idx.is_empty() {
            return "1".into();
        }
        idx.iter().map(|i| self.labels[*i].clone()).collect::<Vec<_>>().join("∧")
    }

    /// Decides whether `f` is a smooth section of the exterior powers of the
    /// algebroid dual. Components with positive frame exponent `e` are
    /// accepted only if the Taylor coefficients of orders `< e` of their
    /// collected numerator vanish on Z.
    pub fn is_smooth_section(&self, f: &SingularForm, settings: &Settings) -> Result<Certificate, GeometryError> {
        let g = self.to_generator_basis(f)?;
        let mut numeric: Option<(usize, f64)> = None;
        for idx in g.indices() {
            let top = g
                .terms()
                .keys()
                .filter(|(i, _)| *i == idx)
                .map(|(_, k)| *k)
                .max()
                .expect("index present");
            let e = self.frame_exponent(&idx, top);
            if e <= 0 {
                continue;
            }
            let x = self.chart.x_name().ok_or(GeometryError::NoHypersurface)?;
            let numerator = g.collected(&idx, top)?;
            let zchart = self.chart.hypersurface()?;
            let domain = zchart.box_domain();
            for (order, cj) in numerator.taylor_coefficients(x, e as usize - 1).into_iter().enumerate() {
                let verdict = if zchart.dim() == 0 {
                    match cj.as_const() {
                        Some(q) if *q == num_rational::BigRational::from_integer(0.into()) => ZeroVerdict::ProvenZero,
                        _ => ZeroVerdict::Nonzero { point: vec![], value: cj.eval_f64(&Default::default())? },
                    }
                } else {
                    cj.is_zero_seeded(&domain, settings.samples, settings.tol_closed, settings.seed)?
                };
                match verdict {
                    ZeroVerdict::ProvenZero => {}
                    ZeroVerdict::NumericallyZero { margin, samples, .. } => {
                        let prev = numeric.map_or(f64::INFINITY, |p| p.1);
                        numeric = Some((samples, prev.min(margin)));
                    }
                    ZeroVerdict::Nonzero { mut point, value } => {
                        point.insert(self.chart.z.unwrap_or(0), (x.to_string(), 0.0));
                        return Ok(Certificate::refuted(
                            point,
                            value,
                            format!(
                                "component {} has pole order {} relative to the {} frame (order-{} Taylor coefficient nonzero)",
                                self.describe_index(&idx),
                                e - order as i64,
                                self.flavor,
                                order
                            ),
                        ));
                    }
                }
            }
        }
        Ok(match numeric {
            None => Certificate::proven(format!("every component is smooth in the {} frame", self.flavor)),
            Some((samples, margin)) => Certificate::NumericallyVerified {
                grid_points: samples,
                tolerance: settings.tol_closed,
                min_margin: margin,
            },
        })
    }

    /// Scalar `s` with `f^n = s · (g_1/x^{w_1}) ∧ … ∧ (g_{2n}/x^{w_{2n}})`,
    /// returned as `(numerator, d)` with `s = numerator / (det · x^d)`.
    pub fn top_coefficient(&self, f: &SingularForm) -> Result<TopCoefficient, GeometryError> {
        self.check_chart(f)?;
        let dim = self.rank();
        if f.degree() != 2 || dim % 2 == 1 {
            return Err(GeometryError::DegreeMismatch(f.degree(), 2));
        }
        let top = f.top_power(dim / 2)?;
        let all: Vec<usize> = (0..dim).collect();
        let kmax = top.max_exponent().unwrap_or(0);
        let numerator = top.collected(&all, kmax)?;
        let d = self.frame_exponent(&all, kmax);
        Ok(TopCoefficient { numerator, pole: d, det: self.det.clone(), chart: self.chart.clone() })
    }

    /// Certifies that `f^n` is bounded away from zero relative to the frame
    /// volume on the grid (which always contains the x = 0 slice). The margin
    /// is the smallest modulus; a sign change is a refutation.
    pub fn nondegenerate(&self, f: &SingularForm, settings: &Settings) -> Result<Certificate, GeometryError> {
        let tc = self.top_coefficient(f)?;
        let eval = tc.evaluator()?;
        let points = self.chart.grid(settings.grid, settings.grid_budget);
        let names = self.chart.names();
        let tol = settings.tol_nondeg;
        let Some((i_abs, m_abs)) = scan_min(&points, |p| eval(p).abs()) else {
            return Ok(Certificate::refuted(vec![], f64::NAN, "empty grid"));
        };
        if m_abs.is_nan() || m_abs <= tol {
            return Ok(Certificate::refuted(
                witness(&names, &points[i_abs]),
                eval(&points[i_abs]),
                format!("top power degenerates relative to the {} frame", self.flavor),
            ));
        }
        let (i_lo, lo) = scan_min(&points, |p| eval(p)).expect("nonempty");
        let (i_hi, hi) = scan_min(&points, |p| -eval(p)).expect("nonempty");
        if lo < 0.0 && -hi > 0.0 {
            let (i, v) = if -lo < -hi { (i_lo, lo) } else { (i_hi, -hi) };
            return Ok(Certificate::refuted(
                witness(&names, &points[i]),
                v,
                "top coefficient changes sign, so it vanishes between grid points".to_string(),
            ));
        }
        Ok(Certificate::NumericallyVerified { grid_points: points.len(), tolerance: tol, min_margin: m_abs })
    }

    /// Sign of the frame top coefficient at the first grid point.
    pub fn orientation_sign(&self, f: &SingularForm, settings: &Settings) -> Result<f64, GeometryError> {
        let eval = self.top_coefficient(f)?.evaluator()?;
        let points = self.chart.grid(settings.grid, settings.grid_budget);
        Ok(points.first().map_or(0.0, |p| eval(p).signum()))
    }
}

/// Frame-normalized top power `numerator / (det · x^pole)`.
#[derive(Clone, Debug)]
pub struct TopCoefficient {
    pub numerator: Expr,
    pub pole: i64,
    pub det: Expr,
    chart: Arc<Chart>,
}

impl TopCoefficient {
    /// The coefficient as a single expression, valid off Z.
    pub fn expression(&self) -> Expr {
        let mut e = &self.numerator * self.det.recip();
        if self.pole != 0 {
            if let Some(x) = self.chart.x_name() {
                e = e * Expr::var(x).powi(-self.pole);
            }
        }
        e
    }

    /// Value on Z: the order-`pole` Taylor coefficient when `pole > 0`.
    pub fn on_z(&self) -> Result<Expr, GeometryError> {
        let x = self.chart.x_name().ok_or(GeometryError::NoHypersurface)?;
        if self.pole < 0 {
            return Ok(Expr::zero());
        }
        let c = self.numerator.taylor_coefficients(x, self.pole as usize).pop().unwrap_or_else(Expr::zero);
        Ok((c * self.det.subs(x, &Expr::zero()).recip()).expand())
    }

    /// Pointwise evaluator using the Z value on the x = 0 slice.
    pub fn evaluator(&self) -> Result<impl Fn(&[f64]) -> f64 + Sync, GeometryError> {
        let names = self.chart.names();
        let off = Compiled::new(&self.expression(), &names)?;
        let on = match self.chart.z {
            Some(_) if self.pole >= 0 => Some(Compiled::new(&self.on_z()?, &names)?),
            _ => None,
        };
        let xi = self.chart.z;
        Ok(move |p: &[f64]| match (xi, &on) {
            (Some(i), Some(c)) if p[i] == 0.0 => c.eval(p),
            _ => off.eval(p),
        })
    }
}

/// Outcome of reproducing the no-go argument for `(0^m; b^k)` flavors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NoGoOutcome {
    pub m: u32,
    pub k: u32,
    pub dim: usize,
    /// Every clause passing means the refutation is established.
    pub report: Report,
}

impl NoGoOutcome {
    pub fn refutes(&self) -> bool {
        self.report.passed()
    }
}

/// Reproduces the no-go argument on generic data: with `α`, `β` random
/// polynomial forms on Z extended constantly in x, the candidate
/// `ω = dx/x^{k+m} ∧ α + β/x^m` has `-m dx/x^{m+1} ∧ β` as the only
/// contribution to its `x^{-(m+1)}` dx-slot of `dω`, so closedness forces
/// `β|_Z = 0`; then `∧ⁿω` vanishes identically and the frame-normalized top
/// coefficient of the generic candidate vanishes on Z.
pub fn no_go_check(m: u32, k: u32, dim: usize, seed: u64) -> Result<NoGoOutcome, AlgebroidError> {
    if m == 0 || k == 1 || dim <= 2 || dim % 2 == 1 {
        return Err(AlgebroidError::NotApplicable(format!(
            "needs m > 0, k ≠ 1 and even dimension > 2 (got m = {m}, k = {k}, dim = {dim})"
        )));
    }
    let mut coords = vec![crate::geometry::interval("x", -1.0, 1.0)];
    coords.extend((1..dim).map(|i| crate::geometry::interval(&format!("y{i}"), -1.0, 1.0)));
    let chart = Chart::new(&format!("no-go({m},{k},{dim})"), coords, Some("x"))?;
    let zchart = chart.hypersurface()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = SingularForm::lift_from_z(&chart, &random::form(&mut rng, &zchart, 1, None, 2))?;
    let beta = SingularForm::lift_from_z(&chart, &random::form(&mut rng, &zchart, 2, None, 2))?;
    let (m_i, k_i) = (m as i64, k as i64);
    let omega = alpha.dx_wedge()?.with_pole(k_i + m_i).add(&beta.with_pole(m_i))?;
    let settings = Settings::default();

    let mut report = Report::new(format!("no-go for zero^{m}-b^{k} in dimension {dim}"));
    report.push(
        "exponents_distinct",
        if k_i + m_i != m_i + 1 {
            Certificate::proven(format!("dα enters at x^-{} and β at x^-{}", k_i + m_i, m_i + 1))
        } else {
            Certificate::refuted(vec![], 0.0, "k + m = m + 1")
        },
    );

    let d_omega = omega.exterior_derivative()?;
    let slots = d_omega.laurent_decompose(0)?;
    let slot = slots.iter().find(|s| s.exponent == m_i + 1);
    let relation = match slot {
        None => Certificate::refuted(vec![], 0.0, "dω has no x^-(m+1) slot"),
        Some(s) => {
            let residual = s.dx_part.add(&beta.scale(&Expr::int(m_i)))?;
            let (_, b_no_dx) = beta.split_dx()?;
            if residual.is_zero() && s.rest.is_zero() && b_no_dx == beta {
                Certificate::proven("the dx/x^(m+1) slot of dω equals -m·β")
            } else {
                Certificate::refuted(vec![], 0.0, format!("residual {}", residual.describe()))
            }
        }
    };
    report.push("closedness_slot_is_minus_m_beta", relation);
    report.push(
        "generic_beta_not_closed",
        if beta.is_zero() || d_omega.is_zero() {
            Certificate::refuted(vec![], 0.0, "random β vanished; the relation is vacuous")
        } else {
            Certificate::proven("dω ≠ 0 for the random β, so closedness is exactly β|_Z = 0")
        },
    );

    let n = dim / 2;
    let reduced = alpha.dx_wedge()?.with_pole(k_i + m_i);
    let reduced_top = reduced.top_power(n)?;
    report.push(
        "top_power_vanishes_when_beta_zero",
        if reduced_top.is_zero() {
            Certificate::proven("(dx/x^(k+m) ∧ α)^n = 0 since dx appears twice")
        } else {
            Certificate::refuted(vec![], 0.0, reduced_top.describe())
        },
    );

    let frame = coframe(&Flavor::ZeroMBK { m, k }, &chart, None)?;
    let tc = frame.top_coefficient(&omega)?;
    let on_z = tc.on_z()?;
    let zdomain = zchart.box_domain();
    let verdict = on_z.is_zero_seeded(&zdomain, settings.samples, settings.tol_closed, seed).map_err(GeometryError::from)?;
    report.push_detail(
        "frame_top_coefficient_vanishes_on_z",
        Certificate::from_zero(&verdict, "frame top coefficient on Z"),
        format!("frame exponent of the top power is {}", tc.pole),
    );
    let nondeg = frame.nondegenerate(&omega, &settings)?;
    report.push_detail(
        "nondegeneracy_refuted",
        match nondeg {
            Certificate::Refuted { witness, value, .. } => {
                Certificate::proven(format!("degenerate at {witness:?}, frame top coefficient {value:e}"))
            }
            other => Certificate::refuted(vec![], other.margin().unwrap_or(0.0), "candidate certified non-degenerate"),
        },
        "grid certificate of the generic candidate fails at x = 0",
    );
    Ok(NoGoOutcome { m, k, dim, report })
}

/// Pairing matrix `⟨c_i, s_j⟩` of covectors against vector fields, as
/// expressions (Laurent exponents multiplied out).
pub fn pairing(covectors: &[SingularForm], sections: &[Multivector]) -> Result<Vec<Vec<Expr>>, GeometryError> {
    covectors
        .iter()
        .map(|c| {
            sections
                .iter()
                .map(|s| {
                    let v = c.interior(s)?;
                    Ok(Expr::sum(v.plain_coefficients().into_values()).expand())
                })
                .collect()
        })
        .collect()
}
