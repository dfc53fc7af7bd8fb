//! Descriptors for the singular de Rham and Poisson cohomology theorems, the
//! kernel relations of their quotient complexes, and the horizontal complex
//! of a cosymplectic foliation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::certificate::{Certificate, Report};
use crate::expr::{Expr, Rational};
use crate::geometry::{Chart, GeometryError, Multivector, SingularForm};
use crate::settings::Settings;
use crate::structures::{form_vanishes, ContactData, StructureError};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum CohomologyError {
    #[error("invalid profile: {0}")]
    Profile(String),
    #[error("degree {0} out of range: {1}")]
    Degree(i64, String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

type Result<T> = std::result::Result<T, CohomologyError>;

/// Closed building blocks of tagged product constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Factor {
    Sphere(usize),
    Torus(usize),
}

impl Factor {
    pub fn dim(&self) -> usize {
        match self {
            Factor::Sphere(d) | Factor::Torus(d) => *d,
        }
    }

    pub fn betti(&self) -> Vec<u64> {
        match *self {
            Factor::Sphere(0) => vec![2],
            Factor::Sphere(d) => {
                let mut b = vec![0; d + 1];
                b[0] = 1;
                b[d] = 1;
                b
            }
            Factor::Torus(d) => (0..=d).map(|p| binomial(d, p)).collect(),
        }
    }
}

pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Künneth: Betti numbers of a product are the convolution of the factors'.
pub fn kunneth(factors: &[Factor]) -> Vec<u64> {
    factors.iter().fold(vec![1], |acc, f| {
        let b = f.betti();
        let mut out = vec![0; acc.len() + b.len() - 1];
        for (i, x) in acc.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    })
}

/// Where a profile's Betti numbers came from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Construction {
    /// Numbers supplied by the user.
    #[default]
    Given,
    /// `M` and each of `z_copies` components of `Z` are products of factors.
    Product { m: Vec<Factor>, z: Vec<Factor>, z_copies: usize },
    /// `T^{2n}` with `Z` two parallel copies of `T^{2n-1}` and Reeb field
    /// along one circle.
    BkTorus { n: usize },
}

/// Betti data of `(M, Z)` with `dim Z = dim M - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BettiProfile {
    pub dim: usize,
    pub betti_m: Vec<u64>,
    pub betti_z: Vec<u64>,
    pub z_components: usize,
    #[serde(default)]
    pub construction: Construction,
    /// Enables the Poincaré duality check.
    #[serde(default)]
    pub closed_oriented: bool,
}

impl BettiProfile {
    pub fn from_construction(construction: Construction) -> Result<BettiProfile> {
        let profile = match &construction {
            Construction::Given => {
                return Err(CohomologyError::Profile("a given profile needs explicit Betti numbers".into()))
            }
            Construction::Product { m, z, z_copies } => {
                let dim: usize = m.iter().map(Factor::dim).sum();
                let zdim: usize = z.iter().map(Factor::dim).sum();
                if zdim + 1 != dim {
                    return Err(CohomologyError::Profile(format!("dim Z = {zdim} but dim M = {dim}")));
                }
                let betti_z: Vec<u64> = kunneth(z).into_iter().map(|b| b * *z_copies as u64).collect();
                BettiProfile {
                    dim,
                    betti_m: kunneth(m),
                    z_components: betti_z[0] as usize,
                    betti_z,
                    construction: construction.clone(),
                    closed_oriented: true,
                }
            }
            Construction::BkTorus { n } => {
                if *n == 0 {
                    return Err(CohomologyError::Profile("the torus family needs n ≥ 1".into()));
                }
                let d = 2 * n;
                BettiProfile {
                    dim: d,
                    betti_m: (0..=d).map(|p| binomial(d, p)).collect(),
                    betti_z: (0..d).map(|p| 2 * binomial(d - 1, p)).collect(),
                    z_components: 2,
                    construction: construction.clone(),
                    closed_oriented: true,
                }
            }
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn sphere(d: usize) -> Result<BettiProfile> {
        if d == 0 {
            return Err(CohomologyError::Profile("S^0 has no hypersurface".into()));
        }
        Self::from_construction(Construction::Product { m: vec![Factor::Sphere(d)], z: vec![Factor::Sphere(d - 1)], z_copies: 1 })
    }

    pub fn torus(d: usize) -> Result<BettiProfile> {
        if d == 0 {
            return Err(CohomologyError::Profile("T^0 has no hypersurface".into()));
        }
        let z = if d == 1 { vec![] } else { vec![Factor::Torus(d - 1)] };
        Self::from_construction(Construction::Product { m: vec![Factor::Torus(d)], z, z_copies: 1 })
    }

    pub fn bk_torus(n: usize) -> Result<BettiProfile> {
        Self::from_construction(Construction::BkTorus { n })
    }

    pub fn z_dim(&self) -> usize {
        self.dim - 1
    }

    pub fn b_m(&self, p: i64) -> u64 {
        usize::try_from(p).ok().and_then(|p| self.betti_m.get(p).copied()).unwrap_or(0)
    }

    pub fn b_z(&self, p: i64) -> u64 {
        usize::try_from(p).ok().and_then(|p| self.betti_z.get(p).copied()).unwrap_or(0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CohomologyError::Profile(m));
        if self.dim == 0 {
            return bad("dim M must be at least 1".into());
        }
        if self.betti_m.len() != self.dim + 1 {
            return bad(format!("expected {} Betti numbers for M, got {}", self.dim + 1, self.betti_m.len()));
        }
        if self.betti_z.len() != self.dim {
            return bad(format!("expected {} Betti numbers for Z, got {}", self.dim, self.betti_z.len()));
        }
        if self.betti_m[0] == 0 {
            return bad("b_0(M) must be at least 1".into());
        }
        if self.z_components == 0 || self.betti_z[0] != self.z_components as u64 {
            return bad(format!("b_0(Z) = {} but Z has {} components", self.betti_z[0], self.z_components));
        }
        if self.closed_oriented {
            for (name, b) in [("M", &self.betti_m), ("Z", &self.betti_z)] {
                let n = b.len() - 1;
                if let Some(p) = (0..=n).find(|&p| b[p] != b[n - p]) {
                    return bad(format!("Poincaré duality fails for {name}: b_{p} = {} but b_{} = {}", b[p], n - p, b[n - p]));
                }
            }
        }
        Ok(())
    }

    /// Accepts either a full profile or `{"construction": {...}}` alone.
    pub fn from_json(s: &str) -> Result<BettiProfile> {
        #[derive(Deserialize)]
        struct TagOnly {
            construction: Construction,
        }
        if let Ok(p) = serde_json::from_str::<BettiProfile>(s) {
            p.validate()?;
            return Ok(p);
        }
        let t: TagOnly = serde_json::from_str(s).map_err(|e| CohomologyError::Profile(e.to_string()))?;
        Self::from_construction(t.construction)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SummandValue {
    FiniteRank(u64),
    /// Names the function space.
    InfiniteDimensional(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub label: String,
    pub value: SummandValue,
    pub multiplicity: usize,
}

impl Summand {
    fn finite(label: impl Into<String>, rank: u64) -> Summand {
        Summand { label: label.into(), value: SummandValue::FiniteRank(rank), multiplicity: 1 }
    }

    fn infinite(label: impl Into<String>, space: impl Into<String>, multiplicity: usize) -> Summand {
        Summand { label: label.into(), value: SummandValue::InfiniteDimensional(space.into()), multiplicity }
    }

    pub fn is_zero(&self) -> bool {
        self.value == SummandValue::FiniteRank(0) || self.multiplicity == 0
    }
}

/// Summands in the order the theorem lists them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyReport {
    pub theorem: String,
    pub degree: usize,
    pub summands: Vec<Summand>,
}

impl CohomologyReport {
    /// Sum of the finite ranks, or `None` when an infinite summand is present.
    pub fn finite_rank(&self) -> Option<u64> {
        self.summands.iter().filter(|s| !s.is_zero()).try_fold(0, |acc, s| match &s.value {
            SummandValue::FiniteRank(r) => Some(acc + r * s.multiplicity as u64),
            SummandValue::InfiniteDimensional(_) => None,
        })
    }

    pub fn summand(&self, label: &str) -> Option<&Summand> {
        self.summands.iter().find(|s| s.label == label)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn check_degree(profile: &BettiProfile, p: usize) -> Result<()> {
    profile.validate()?;
    if p > profile.dim {
        return Err(CohomologyError::Degree(p as i64, format!("dim M = {}", profile.dim)));
    }
    Ok(())
}

/// `Ω^j(Z)` with an optional twist, zero outside `0..=dim Z`.
fn z_forms(label: &str, j: i64, zdim: usize, space: String, components: usize) -> Summand {
    if j < 0 || j > zdim as i64 {
        return Summand::finite(label, 0);
    }
    if zdim == 0 {
        return Summand::finite(label, components as u64);
    }
    Summand::infinite(label, space, 1)
}

/// `^{sc}H^p ≅ H^p(M) ⊕ H^{p-1}(Z) ⊕ Ω^{p-1}(Z; |N*Z|^{-p})`.
pub fn sc_derham(profile: &BettiProfile, p: usize) -> Result<CohomologyReport> {
    check_degree(profile, p)?;
    let q = p as i64 - 1;
    let mut twisted = z_forms("Ω^{p-1}(Z;|N*Z|^{-p})", q, profile.z_dim(), format!("Ω^{q}(Z_j;|N*Z_j|^-{p})"), profile.z_components);
    if matches!(twisted.value, SummandValue::InfiniteDimensional(_)) {
        twisted.multiplicity = profile.z_components;
    }
    Ok(CohomologyReport {
        theorem: "sc-derham".into(),
        degree: p,
        summands: vec![
            Summand::finite("H^p(M)", profile.b_m(p as i64)),
            Summand::finite("H^{p-1}(Z)", profile.b_z(q)),
            twisted,
        ],
    })
}

/// Resolution of `K^k = ker(dα∧ : Ω_ξ^k(Z) → Ω_ξ^{k+2}(Z))` on a contact
/// manifold whose distribution has rank `2m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSlot {
    Zero,
    /// All of `Ω_ξ^k(Z)`: the target degree exceeds the rank of `ξ`.
    Horizontal,
    Unresolved,
}

pub fn kernel_slot(k: i64, m: usize) -> KernelSlot {
    let m = m as i64;
    if k <= 0 || k > 2 * m || k < m {
        // Non-positive degrees by convention; beyond the rank Ω_ξ^k = 0;
        // below the middle dα∧ is injective.
        KernelSlot::Zero
    } else if k + 2 > 2 * m {
        KernelSlot::Horizontal
    } else {
        KernelSlot::Unresolved
    }
}

/// Fixed-`x` form of the scattering Poisson theorem:
/// `H^p(M) ⊕ H^{p-1}(Z) ⊕ Ω^{p-1}(Z) ⊕ Ω_ξ^{p-1}(Z) ⊕ K^{p-2}`, where `n` is
/// half the dimension of `M`.
pub fn sc_poisson(profile: &BettiProfile, p: usize, n: usize) -> Result<CohomologyReport> {
    check_degree(profile, p)?;
    if n == 0 || profile.dim != 2 * n {
        return Err(CohomologyError::Profile(format!("dim M = {} is not 2n for n = {n}", profile.dim)));
    }
    let zdim = profile.z_dim();
    let m = n - 1;
    let q = p as i64 - 1;
    let xi = if q < 0 || q > 2 * m as i64 {
        Summand::finite("Ω_ξ^{p-1}(Z)", 0)
    } else {
        Summand::infinite("Ω_ξ^{p-1}(Z)", format!("Ω_ξ^{q}(Z)"), 1)
    };
    let k = p as i64 - 2;
    let kernel = match kernel_slot(k, m) {
        KernelSlot::Zero => Summand::finite("K^{p-2}", 0),
        KernelSlot::Horizontal => Summand::infinite("K^{p-2}", format!("Ω_ξ^{k}(Z)"), 1),
        KernelSlot::Unresolved => {
            Summand::infinite("K^{p-2}", format!("K^{k} = ker(dα∧ : Ω_ξ^{k}(Z) → Ω_ξ^{}(Z))", k + 2), 1)
        }
    };
    Ok(CohomologyReport {
        theorem: "sc-poisson".into(),
        degree: p,
        summands: vec![
            Summand::finite("H^p(M)", profile.b_m(p as i64)),
            Summand::finite("H^{p-1}(Z)", profile.b_z(q)),
            z_forms("Ω^{p-1}(Z)", q, zdim, format!("Ω^{q}(Z)"), profile.z_components),
            xi,
            kernel,
        ],
    })
}

/// `H^p(M) ⊕ H^{p-1}(Z)`, plus `(H_h^{p-2}(F_R))^{k-1} ⊕ (H_h^{p-1}(F_R))^{k-1}`
/// for `k ≥ 2`.
pub fn bk_poisson(profile: &BettiProfile, p: usize, k: usize) -> Result<CohomologyReport> {
    check_degree(profile, p)?;
    if k == 0 {
        return Err(CohomologyError::Precondition("b^k needs k ≥ 1".into()));
    }
    let mut summands = vec![Summand::finite("H^p(M)", profile.b_m(p as i64)), Summand::finite("H^{p-1}(Z)", profile.b_z(p as i64 - 1))];
    if k >= 2 {
        for (label, j) in [("H_h^{p-2}(F_R)", p as i64 - 2), ("H_h^{p-1}(F_R)", p as i64 - 1)] {
            summands.push(horizontal_summand(profile, label, j, k - 1));
        }
    }
    Ok(CohomologyReport { theorem: "bk-poisson".into(), degree: p, summands })
}

fn horizontal_summand(profile: &BettiProfile, label: &str, j: i64, copies: usize) -> Summand {
    if j < 0 || j >= profile.z_dim() as i64 {
        return Summand::finite(label, 0);
    }
    match profile.construction {
        Construction::BkTorus { n } => {
            // Leaves are T^{2n-2}; the leaf space of each component is a circle.
            let leaf = 2 * n - 2;
            if binomial(leaf, j as usize) == 0 {
                return Summand::finite(label, 0);
            }
            Summand::infinite(label, format!("C^∞(S¹;H^{j}(T^{leaf}))"), copies * profile.z_components)
        }
        _ => Summand::infinite(label, format!("H_h^{j}(F_R)"), copies),
    }
}

/// Keeps the terms not in the b-complex: `dx`-terms with pole order at
/// least 2 and the rest with pole order at least 1.
pub fn quotient_part(f: &SingularForm) -> Result<SingularForm> {
    let (a, b) = f.split_dx()?;
    let keep = |g: &SingularForm, min: i64| {
        SingularForm::from_terms(g.chart(), g.degree(), g.terms().iter().filter(|((_, k), _)| *k >= min).map(|(t, c)| (t.clone(), c.clone())))
    };
    Ok(keep(&a, 2).dx_wedge()?.add(&keep(&b, 1))?)
}

fn scaled(f: &SingularForm, q: Rational) -> SingularForm {
    f.scale(&Expr::constant(q))
}

fn on_chart(chart: &Arc<Chart>, f: &SingularForm) -> Result<SingularForm> {
    Ok(SingularForm::lift_from_z(chart, f)?)
}

/// `dx ∧ f · x^{-k}` for a form `f` on `Z`.
fn dx_pole(chart: &Arc<Chart>, f: &SingularForm, k: i64) -> Result<SingularForm> {
    Ok(on_chart(chart, f)?.dx_wedge()?.with_pole(k))
}

fn pole(chart: &Arc<Chart>, f: &SingularForm, k: i64) -> Result<SingularForm> {
    Ok(on_chart(chart, f)?.with_pole(k))
}

fn sum_forms(chart: &Arc<Chart>, degree: usize, parts: impl IntoIterator<Item = SingularForm>) -> Result<SingularForm> {
    let mut acc = SingularForm::zero(chart, degree);
    for p in parts {
        acc = acc.add(&p)?;
    }
    Ok(acc)
}

/// Structural identity after expanding every coefficient.
fn identical(a: &SingularForm, b: &SingularForm, what: &str) -> Result<Certificate> {
    let diff = a.sub(b)?.expanded();
    Ok(if diff.is_zero() {
        Certificate::proven(format!("{what} holds term by term"))
    } else {
        Certificate::refuted(vec![], f64::NAN, format!("{what} differs in {}", diff.describe()))
    })
}

fn check_degrees(forms: &[SingularForm], degree: usize, what: &str) -> Result<()> {
    match forms.iter().position(|f| f.degree() != degree) {
        Some(i) => Err(CohomologyError::Degree(forms[i].degree() as i64, format!("{what}_{i} must have degree {degree}"))),
        None => Ok(()),
    }
}

/// Outcome of a quotient-complex kernel check. `consistent` records that
/// the computed and displayed differentials agree and that closedness
/// coincides with the stated relations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelVerdict {
    pub closed: bool,
    pub relations_hold: bool,
    pub failing_slot: Option<String>,
    pub consistent: bool,
    pub report: Report,
}

impl KernelVerdict {
    fn conclude(report: Report, closed_clause: &str, relation_prefix: &str, identity_clauses: &[&str]) -> KernelVerdict {
        let passed = |n: &str| report.clause(n).is_some_and(|c| c.passed);
        let closed = passed(closed_clause);
        let failing_slot = report
            .clauses
            .iter()
            .find(|c| c.name.starts_with(relation_prefix) && !c.passed)
            .map(|c| c.name[relation_prefix.len()..].to_string());
        let relations_hold = failing_slot.is_none();
        let consistent = closed == relations_hold && identity_clauses.iter().all(|n| passed(n));
        KernelVerdict { closed, relations_hold, failing_slot, consistent, report }
    }
}

/// Kernel check in the scattering quotient complex for
/// `ν = Σ_i dx/x^{p+1} ∧ α_i x^i + β_i x^i / x^p`, `α_i` of degree `p-1`
/// and `β_i` of degree `p` on the hypersurface chart of `chart`.
pub fn quotient_kernel_check_sc(chart: &Arc<Chart>, alphas: &[SingularForm], betas: &[SingularForm], settings: &Settings) -> Result<KernelVerdict> {
    let p = alphas.len();
    if p == 0 || betas.len() != p {
        return Err(CohomologyError::Degree(betas.len() as i64, format!("need {p} β coefficients, one per α, and p ≥ 1")));
    }
    check_degrees(alphas, p - 1, "α")?;
    check_degrees(betas, p, "β")?;
    let pi = p as i64;
    let mut nu = Vec::new();
    let mut displayed = Vec::new();
    for i in 0..p {
        let ii = i as i64;
        nu.push(dx_pole(chart, &alphas[i], pi + 1 - ii)?);
        nu.push(pole(chart, &betas[i], pi - ii)?);
        let da = alphas[i].exterior_derivative()?;
        let rel = da.neg().sub(&scaled(&betas[i], Rational::from_integer((pi - ii).into())))?;
        displayed.push(dx_pole(chart, &rel, pi + 1 - ii)?);
        displayed.push(pole(chart, &betas[i].exterior_derivative()?, pi - ii)?);
    }
    let nu = sum_forms(chart, p, nu)?;
    let computed = quotient_part(&nu.exterior_derivative()?)?;
    let displayed = sum_forms(chart, p + 1, displayed)?;

    let mut report = Report::new(format!("sc quotient kernel, degree {p}"));
    report.push("matches_displayed_differential", identical(&computed, &displayed, "π(dν) = displayed formula")?);
    report.push("closed", form_vanishes(&computed, settings, "π(dν)")?);
    for i in 0..p {
        let target = scaled(&alphas[i].exterior_derivative()?, Rational::new((-1).into(), ((pi - i as i64)).into()));
        report.push(format!("relation_{i}"), form_vanishes(&betas[i].sub(&target)?, settings, &format!("β_{i} + dα_{i}/(p-{i})"))?);
    }

    let mut identities = vec!["matches_displayed_differential"];
    if p >= 2 {
        // ν̃ = Σ_{i≥1} -α_i x^{i-p} / (p-i) and its image.
        let mut primitive = Vec::new();
        let mut image = Vec::new();
        for i in 1..p {
            let c = Rational::new((-1).into(), (pi - i as i64).into());
            primitive.push(pole(chart, &scaled(&alphas[i], c.clone()), pi - i as i64)?);
            image.push(dx_pole(chart, &alphas[i], pi + 1 - i as i64)?);
            image.push(pole(chart, &scaled(&alphas[i].exterior_derivative()?, c), pi - i as i64)?);
        }
        let primitive = sum_forms(chart, p - 1, primitive)?;
        let image = sum_forms(chart, p, image)?;
        let d_primitive = quotient_part(&primitive.exterior_derivative()?)?;
        report.push("primitive_image", identical(&d_primitive, &image, "dν̃ = displayed image")?);
        identities.push("primitive_image");
    }
    let closed = report.clause("closed").is_some_and(|c| c.passed);
    if closed {
        let c0 = Rational::new((-1).into(), pi.into());
        let reduced = dx_pole(chart, &alphas[0], pi + 1)?.add(&pole(chart, &scaled(&alphas[0].exterior_derivative()?, c0), pi)?)?;
        let mut tilde = SingularForm::zero(chart, p - 1);
        for i in 1..p {
            let c = Rational::new((-1).into(), (pi - i as i64).into());
            tilde = tilde.add(&pole(chart, &scaled(&alphas[i], c), pi - i as i64)?)?;
        }
        let rest = nu.sub(&quotient_part(&tilde.exterior_derivative()?)?)?;
        report.push("reduction_to_leading_slot", form_vanishes(&rest.sub(&reduced)?, settings, "ν - dν̃ - (dx/x^{p+1}∧α_0 - dα_0/(p x^p))")?);
        identities.push("reduction_to_leading_slot");
    }
    Ok(KernelVerdict::conclude(report, "closed", "relation_", &identities))
}

/// Coefficients of the rigged ansatz
/// `ν = dx/x^{2k+1} ∧ Σ η_i x^i + x^{-2k} Σ β_i x^i + dx∧α∧θ/x^{2k+2} + α∧γ/x^{2k+1}`
/// for `i = 0..2k`, all forms on the hypersurface.
#[derive(Clone, Debug)]
pub struct RiggedAnsatz {
    pub degree: usize,
    pub eta: Vec<SingularForm>,
    pub beta: Vec<SingularForm>,
    /// Absent means zero; required to be absent for degree below 2.
    pub theta: Option<SingularForm>,
    pub gamma: SingularForm,
}

impl RiggedAnsatz {
    fn validate(&self, contact: &ContactData, settings: &Settings) -> Result<()> {
        let k = self.degree;
        if k == 0 || self.eta.len() != 2 * k || self.beta.len() != 2 * k {
            return Err(CohomologyError::Degree(k as i64, format!("need 2k η and β coefficients, got {} and {}", self.eta.len(), self.beta.len())));
        }
        check_degrees(&self.eta, k - 1, "η")?;
        check_degrees(&self.beta, k, "β")?;
        check_degrees(std::slice::from_ref(&self.gamma), k - 1, "γ")?;
        match (&self.theta, k) {
            (Some(t), k) if k < 2 || t.degree() != k - 2 => {
                return Err(CohomologyError::Degree(t.degree() as i64, format!("θ must have degree {} ", k as i64 - 2)))
            }
            _ => {}
        }
        require_horizontal(&self.gamma, &contact.reeb, settings, "γ")?;
        if let Some(t) = &self.theta {
            require_horizontal(t, &contact.reeb, settings, "θ")?;
        }
        Ok(())
    }

    fn theta_or_zero(&self, zchart: &Arc<Chart>) -> SingularForm {
        self.theta.clone().unwrap_or_else(|| SingularForm::zero(zchart, self.degree.saturating_sub(2)))
    }

    /// The assembled singular part on `chart`.
    pub fn assemble(&self, chart: &Arc<Chart>, contact: &ContactData) -> Result<SingularForm> {
        let k = 2 * self.degree as i64;
        let alpha = &contact.alpha;
        let mut parts = Vec::new();
        for i in 0..self.eta.len() {
            parts.push(dx_pole(chart, &self.eta[i], k + 1 - i as i64)?);
            parts.push(pole(chart, &self.beta[i], k - i as i64)?);
        }
        if let Some(t) = &self.theta {
            parts.push(dx_pole(chart, &alpha.wedge(t)?, k + 2)?);
        }
        parts.push(pole(chart, &alpha.wedge(&self.gamma)?, k + 1)?);
        sum_forms(chart, self.degree, parts)
    }
}

fn require_horizontal(f: &SingularForm, reeb: &Multivector, settings: &Settings, what: &str) -> Result<()> {
    if f.degree() == 0 {
        return Ok(());
    }
    let c = form_vanishes(&f.interior(reeb)?, settings, &format!("i_R {what}"))?;
    if !c.passed() {
        return Err(CohomologyError::Precondition(format!("{what} is not supported in ∧ξ: i_R {what} ≠ 0")));
    }
    Ok(())
}

/// `σ - α ∧ i_R σ`, the part of `σ` annihilated by `i_R` when `α(R) = 1`.
pub fn horizontal_part(sigma: &SingularForm, alpha: &SingularForm, reeb: &Multivector) -> Result<SingularForm> {
    if sigma.degree() == 0 {
        return Ok(sigma.clone());
    }
    Ok(sigma.sub(&alpha.wedge(&sigma.interior(reeb)?)?)?)
}

/// Kernel check for the rigged quotient complex of a scattering Poisson
/// structure with contact data on the hypersurface chart of `chart`.
pub fn quotient_kernel_check_rigged(chart: &Arc<Chart>, ansatz: &RiggedAnsatz, contact: &ContactData, settings: &Settings) -> Result<KernelVerdict> {
    ansatz.validate(contact, settings)?;
    let k = ansatz.degree;
    let kk = 2 * k as i64;
    let alpha = &contact.alpha;
    let dalpha = alpha.exterior_derivative()?;
    let zchart = alpha.chart().clone();
    let theta = ansatz.theta_or_zero(&zchart);
    let gamma = &ansatz.gamma;

    let nu = ansatz.assemble(chart, contact)?;
    let computed = quotient_part(&nu.exterior_derivative()?)?;

    let mut displayed = Vec::new();
    for i in 0..2 * k {
        let ii = i as i64;
        displayed.push(dx_pole(chart, &ansatz.eta[i].exterior_derivative()?.neg(), kk + 1 - ii)?);
        displayed.push(dx_pole(chart, &scaled(&ansatz.beta[i], Rational::from_integer((-(kk - ii)).into())), kk + 1 - ii)?);
        displayed.push(pole(chart, &ansatz.beta[i].exterior_derivative()?, kk - ii)?);
    }
    if k >= 2 {
        displayed.push(dx_pole(chart, &dalpha.wedge(&theta)?.neg(), kk + 2)?);
        displayed.push(dx_pole(chart, &alpha.wedge(&theta.exterior_derivative()?)?, kk + 2)?);
    }
    displayed.push(dx_pole(chart, &scaled(&alpha.wedge(gamma)?, Rational::from_integer((-(kk + 1)).into())), kk + 2)?);
    displayed.push(pole(chart, &dalpha.wedge(gamma)?, kk + 1)?);
    displayed.push(pole(chart, &alpha.wedge(&gamma.exterior_derivative()?)?.neg(), kk + 1)?);
    let displayed = sum_forms(chart, k + 1, displayed)?;

    let mut report = Report::new(format!("rigged quotient kernel, degree {k}"));
    report.push("matches_displayed_differential", identical(&computed, &displayed, "P(dS_b(ν)) = displayed expansion")?);
    report.push("closed", form_vanishes(&computed, settings, "P(dS_b(ν))")?);
    for i in 0..2 * k {
        let target = scaled(&ansatz.eta[i].exterior_derivative()?, Rational::new((-1).into(), (kk - i as i64).into()));
        report.push(format!("relation_beta_{i}"), form_vanishes(&ansatz.beta[i].sub(&target)?, settings, &format!("β_{i} + dη_{i}/(2k-{i})"))?);
    }
    let expected_gamma = if k >= 2 {
        let dt = theta.exterior_derivative()?;
        scaled(&horizontal_part(&dt, alpha, &contact.reeb)?, Rational::new(1.into(), (kk + 1).into()))
    } else {
        SingularForm::zero(&zchart, k - 1)
    };
    report.push("relation_gamma", form_vanishes(&gamma.sub(&expected_gamma)?, settings, "γ - (dθ - α∧i_R dθ)/(2k+1)")?);
    if k >= 2 {
        report.push("relation_theta", form_vanishes(&dalpha.wedge(&theta)?, settings, "dα∧θ")?);
    }
    Ok(KernelVerdict::conclude(report, "closed", "relation_", &["matches_displayed_differential"]))
}

/// Terms of the `dx/x^{2k+1}` coefficient of a representative, written in
/// the rescaled frame `α̂ = α/x`, grouped by their order in `x`.
#[derive(Clone, Debug)]
pub struct JetDecomposition {
    pub zero_jet: Vec<(String, SingularForm)>,
    pub one_jet: Vec<(String, SingularForm)>,
}

impl JetDecomposition {
    /// `dx/x^{2k+1} ∧ (Σ_{0-jet} + x Σ_{1-jet})` with `α̂` written back as `α/x`.
    pub fn reassemble(&self, chart: &Arc<Chart>, degree: usize) -> Result<SingularForm> {
        let base = 2 * degree as i64 + 1;
        let mut parts = Vec::new();
        for (label, f) in &self.zero_jet {
            let extra = i64::from(label.contains("α̂"));
            parts.push(dx_pole(chart, f, base + extra)?);
        }
        for (label, f) in &self.one_jet {
            let extra = i64::from(label.contains("α̂"));
            parts.push(dx_pole(chart, f, base - 1 + extra)?);
        }
        sum_forms(chart, degree, parts)
    }
}

#[derive(Clone, Debug)]
pub struct RiggedRepresentative {
    pub form: SingularForm,
    pub ansatz: RiggedAnsatz,
    pub jets: JetDecomposition,
}

/// The closed representative
/// `dx/x^{2k+1}∧(δ_0 + α∧γ_0) + dx/x^{2k+1}∧xδ_1 + dx/x^{2k+2}∧α∧θ
///  - d(δ_0 + α∧γ_0)/(2k x^{2k}) - dδ_1/((2k-1)x^{2k-1}) - d(α∧θ)/((2k+1)x^{2k+1})`.
pub fn rigged_closed_representative(
    chart: &Arc<Chart>,
    contact: &ContactData,
    degree: usize,
    delta0: &SingularForm,
    gamma0: &SingularForm,
    delta1: &SingularForm,
    theta: Option<&SingularForm>,
    settings: &Settings,
) -> Result<RiggedRepresentative> {
    let k = degree;
    if k == 0 {
        return Err(CohomologyError::Degree(0, "representatives start in degree 1".into()));
    }
    let kk = 2 * k as i64;
    let alpha = &contact.alpha;
    let zchart = alpha.chart().clone();
    check_degrees(&[delta0.clone(), delta1.clone()], k - 1, "δ")?;
    if k >= 2 {
        check_degrees(std::slice::from_ref(gamma0), k - 2, "γ")?;
    } else if !gamma0.is_zero() || theta.is_some_and(|t| !t.is_zero()) {
        return Err(CohomologyError::Degree(-1, "γ_0 and θ have negative degree for k = 1 and must vanish".into()));
    }
    for (f, what) in [(delta0, "δ_0"), (delta1, "δ_1"), (gamma0, "γ_0")] {
        require_horizontal(f, &contact.reeb, settings, what)?;
    }
    let theta = match theta {
        Some(t) if k >= 2 => {
            check_degrees(std::slice::from_ref(t), k - 2, "θ")?;
            require_horizontal(t, &contact.reeb, settings, "θ")?;
            let dat = alpha.exterior_derivative()?.wedge(t)?;
            if !form_vanishes(&dat, settings, "dα∧θ")?.passed() {
                return Err(CohomologyError::Precondition(format!("θ is not in K^{}: dα∧θ ≠ 0", k - 2)));
            }
            Some(t.clone())
        }
        _ => None,
    };
    let eta0 = if k >= 2 { delta0.add(&alpha.wedge(gamma0)?)? } else { delta0.clone() };
    let mut eta = vec![eta0.clone(), delta1.clone()];
    eta.resize(2 * k, SingularForm::zero(&zchart, k - 1));
    let beta: Vec<SingularForm> = eta
        .iter()
        .enumerate()
        .map(|(i, e)| Ok(scaled(&e.exterior_derivative()?, Rational::new((-1).into(), (kk - i as i64).into()))))
        .collect::<Result<_>>()?;
    let gamma = match &theta {
        Some(t) => scaled(&horizontal_part(&t.exterior_derivative()?, alpha, &contact.reeb)?, Rational::new(1.into(), (kk + 1).into())),
        None => SingularForm::zero(&zchart, k - 1),
    };
    let ansatz = RiggedAnsatz { degree: k, eta, beta, theta: theta.clone(), gamma };

    let mut parts = vec![
        dx_pole(chart, &eta0, kk + 1)?,
        dx_pole(chart, delta1, kk)?,
        pole(chart, &scaled(&eta0.exterior_derivative()?, Rational::new((-1).into(), kk.into())), kk)?,
        pole(chart, &scaled(&delta1.exterior_derivative()?, Rational::new((-1).into(), (kk - 1).into())), kk - 1)?,
    ];
    if let Some(t) = &theta {
        let at = alpha.wedge(t)?;
        parts.push(dx_pole(chart, &at, kk + 2)?);
        parts.push(pole(chart, &scaled(&at.exterior_derivative()?, Rational::new((-1).into(), (kk + 1).into())), kk + 1)?);
    }
    let form = sum_forms(chart, k, parts)?;

    let mut zero_jet = vec![("δ0".to_string(), delta0.clone())];
    let mut one_jet = Vec::new();
    if let Some(t) = &theta {
        zero_jet.push(("α̂∧θ".to_string(), alpha.wedge(t)?));
    }
    if k >= 2 {
        one_jet.push(("α̂∧γ0".to_string(), alpha.wedge(gamma0)?));
    }
    one_jet.push(("δ1".to_string(), delta1.clone()));
    Ok(RiggedRepresentative { form, ansatz, jets: JetDecomposition { zero_jet, one_jet } })
}

/// `d_h σ = dσ - θ ∧ L_R σ` for a horizontal form `σ` (`i_R σ = 0`) and
/// `θ(R) = 1`.
pub fn horizontal_d(sigma: &SingularForm, theta: &SingularForm, reeb: &Multivector, settings: &Settings) -> Result<SingularForm> {
    if theta.degree() != 1 {
        return Err(CohomologyError::Degree(theta.degree() as i64, "θ must be a 1-form".into()));
    }
    let pairing = theta.interior(reeb)?.sub(&SingularForm::scalar(theta.chart(), Expr::one()))?;
    if !form_vanishes(&pairing, settings, "θ(R) - 1")?.passed() {
        return Err(CohomologyError::Precondition("θ(R) ≠ 1".into()));
    }
    if sigma.degree() > 0 && !form_vanishes(&sigma.interior(reeb)?, settings, "i_R σ")?.passed() {
        return Err(CohomologyError::Precondition("σ is not horizontal: i_R σ ≠ 0".into()));
    }
    Ok(sigma.exterior_derivative()?.sub(&theta.wedge(&sigma.lie_derivative(reeb)?)?)?)
}

/// `d_h(d_h σ) = 0` and `i_R d_h σ = 0`.
pub fn d_h_squared_check(sigma: &SingularForm, theta: &SingularForm, reeb: &Multivector, settings: &Settings) -> Result<Report> {
    let once = horizontal_d(sigma, theta, reeb, settings)?;
    let mut report = Report::new(format!("horizontal complex on {}", sigma.chart().name));
    report.push("d_h_horizontal", form_vanishes(&once.interior(reeb)?, settings, "i_R d_h σ")?);
    let twice = if report.passed() {
        form_vanishes(&horizontal_d(&once, theta, reeb, settings)?, settings, "d_h² σ")?
    } else {
        Certificate::refuted(vec![], f64::NAN, "d_h σ is not horizontal")
    };
    report.push("d_h_squared_vanishes", twice);
    Ok(report)
}
