use scatsym::certificate::Certificate;
use scatsym::expr::{rat, Compiled, Expr};
use scatsym::geometry::{circle, interval, Chart, CoordinateMap, SingularForm};
use scatsym::gluing::*;
use scatsym::settings::Settings;
use scatsym::structures::induced_contact;

fn v(n: &str) -> Expr {
    Expr::var(n)
}

fn darboux_alpha() -> SingularForm {
    let z = Chart::new("R3", vec![interval("p", -1.0, 1.0), interval("q", -1.0, 1.0), interval("t", -1.0, 1.0)], None).unwrap();
    SingularForm::basis(&z, "t").unwrap().add(&SingularForm::monomial(&z, 0, v("p"), &["q"]).unwrap()).unwrap()
}

/// `x1 dy1 - y1 dx1 + x2 dy2 - y2 dx2` on the graph chart of S³ over
/// `(x1, y1, x2)` with `y2 > 0`.
fn sphere_alpha() -> SingularForm {
    let r4 = Chart::new("R4", ["x1", "y1", "x2", "y2"].iter().map(|n| interval(n, -1.0, 1.0)).collect(), None).unwrap();
    let z = Chart::new("S3", vec![interval("a", -0.4, 0.4), interval("b", -0.4, 0.4), interval("c", -0.4, 0.4)], None).unwrap();
    let mono = |c: Expr, n: &str| SingularForm::monomial(&r4, 0, c, &[n]).unwrap();
    let a = mono(v("x1"), "y1").sub(&mono(v("y1"), "x1")).unwrap().add(&mono(v("x2"), "y2")).unwrap().sub(&mono(v("y2"), "x2")).unwrap();
    let d = (Expr::one() - v("a") * v("a") - v("b") * v("b") - v("c") * v("c")).sqrt();
    let map = CoordinateMap::new(&z, &r4, vec![v("a"), v("b"), v("c"), d]).unwrap();
    map.pullback(&a).unwrap()
}

fn torus_alpha() -> SingularForm {
    let z = Chart::new("T3", vec![circle("th"), circle("q1"), circle("q2")], None).unwrap();
    SingularForm::monomial(&z, 0, v("th").cos(), &["q1"]).unwrap().add(&SingularForm::monomial(&z, 0, v("th").sin(), &["q2"]).unwrap()).unwrap()
}

fn collar(alpha: &SingularForm, c: Convexity) -> FillingCollar {
    FillingCollar::new(alpha.clone(), c, 3.0).unwrap()
}

fn eval1(e: &Expr, r: f64) -> f64 {
    Compiled::new(e, &[BUMP_VAR.to_string()]).unwrap().eval(&[r])
}

fn min_of(detail: &str) -> f64 {
    let s = detail.split_whitespace().find_map(|w| w.parse::<f64>().ok()).unwrap();
    s
}

#[test]
fn bump_functions_have_their_supports() {
    let s = Settings::default();
    let b = BumpFunctions::standard();
    let rep = b.verify(&s).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
}

#[test]
fn stable_steps_equal_the_displayed_ratios() {
    let b = BumpFunctions::standard();
    let r = v(BUMP_VAR);
    let u = (-(&r - Expr::one()).recip()).exp();
    let w = (-(Expr::rat(7, 8) - &r).recip()).exp();
    let displayed_sc = Expr::one() - &u * (&u + &w).recip();
    let u = (-(&r + Expr::int(2)).recip()).exp();
    let w = (-(Expr::int(-1) - &r).recip()).exp();
    let displayed_f = &u * (&u + &w).recip();
    for i in 1..200 {
        let t = 0.875 + 0.12 * i as f64 / 200.0;
        assert!((eval1(&b.psi_sc, t) - eval1(&displayed_sc, t)).abs() < 1e-12, "{t}");
        let t = -2.0 + i as f64 / 200.0;
        assert!((eval1(&b.psi_f, t) - eval1(&displayed_f, t)).abs() < 1e-12, "{t}");
    }
    let displayed_phi = (&r * ((&r - Expr::rat(1, 2)) * (&r - Expr::int(2))).recip()).exp();
    for i in 1..100 {
        let t = 0.5 + 1.5 * i as f64 / 100.0;
        assert!((eval1(&b.phi, t) - eval1(&displayed_phi, t)).abs() < 1e-15);
    }
}

#[test]
fn sc_gluing_of_darboux_collars_is_certified() {
    let s = Settings::default();
    let alpha = darboux_alpha();
    let g = glue_convex_convex(&collar(&alpha, Convexity::Convex), &collar(&alpha, Convexity::Convex)).unwrap();
    let rep = certify_sc_gluing(&g, &s).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    // Oracle (40-digit mpmath): inf of φ'/(r-1)² - 2φ/(r-1)³ on (7/8, 1) is its
    // limit 139.28056058957... at 7/8. The slope there is about 3300, so the
    // sampled minimum sits at the innermost grid point 7/8 + 1e-6, where the
    // oracle gives 139.28388531372592.
    let c = rep.clause("phi_constant_exceeds_139").unwrap();
    let sampled = min_of(&c.detail) + 139.0;
    assert!((sampled - 139.283_885_313_725_93).abs() < 1e-6, "{}", c.detail);
    assert!(sampled > 139.280_560_589_570_85);
    // inf ψ' = -128, attained at r = 15/16.
    let c = rep.clause("psi_derivative_at_least_minus_128").unwrap();
    assert!(c.detail.contains("at r1 = 0.9375"), "{}", c.detail);
    assert!((min_of(&c.detail) + 128.0).abs() < 1e-9, "{}", c.detail);
    // A - B → 4e^{-3/2} and B → e^{-3/2} as r₁ → 1/2.
    let c = rep.clause("a_minus_b_positive").unwrap();
    assert!((min_of(&c.detail) - 4.0 * (-1.5f64).exp()).abs() < 1e-4, "{}", c.detail);
    let c = rep.clause("b_positive").unwrap();
    assert!((min_of(&c.detail) - (-1.5f64).exp()).abs() < 1e-4, "{}", c.detail);
    assert!(matches!(rep.clause("e_squared_exceeds_4"), None));
}

#[test]
fn sc_gluing_of_sphere_and_torus_collars() {
    let s = Settings { grid: 9, ..Settings::default() };
    for alpha in [sphere_alpha(), torus_alpha()] {
        let c = collar(&alpha, Convexity::Convex);
        assert!(c.verify(&s).unwrap().passed());
        let g = glue_convex_convex(&c, &c).unwrap();
        let rep = certify_sc_gluing(&g, &s).unwrap();
        assert!(rep.passed(), "{}", rep.to_json());
    }
}

#[test]
fn sc_glued_form_induces_a_conformal_contact_form() {
    let s = Settings::default();
    let alpha = darboux_alpha();
    let g = glue_convex_convex(&collar(&alpha, Convexity::Convex), &collar(&alpha, Convexity::Convex)).unwrap();
    let cd = induced_contact(&g.omega, &s).unwrap();
    let z = cd.alpha.chart().clone();
    let a = alpha.rechart(&z).unwrap();
    assert!(cd.alpha.wedge(&a).unwrap().is_zero() || {
        let w = cd.alpha.wedge(&a).unwrap();
        scatsym::structures::form_vanishes(&w, &s, "α' ∧ α").unwrap().passed()
    });
    assert!(!cd.alpha.is_zero());
    assert!(cd.verify(&s).unwrap().passed());
}

#[test]
fn sc_gluing_preconditions() {
    let alpha = darboux_alpha();
    let convex = collar(&alpha, Convexity::Convex);
    let concave = collar(&alpha, Convexity::Concave);
    assert!(matches!(glue_convex_convex(&convex, &concave), Err(GluingError::Precondition(_))));
    let other = darboux_alpha().scale(&Expr::int(2));
    let c2 = collar(&other, Convexity::Convex);
    assert!(matches!(glue_convex_convex(&convex, &c2), Err(GluingError::Mismatch(_))));
    let short = FillingCollar::new(alpha.clone(), Convexity::Convex, 1.5).unwrap();
    assert!(matches!(glue_convex_convex(&convex, &short), Err(GluingError::Precondition(_))));
    assert!(matches!(glue_concave_concave(&convex, &convex), Err(GluingError::Precondition(_))));
    assert!(matches!(glue_convex_concave(&convex, &convex), Err(GluingError::Precondition(_))));
}

#[test]
fn classic_gluing_of_sphere_collars() {
    let s = Settings { grid: 11, ..Settings::default() };
    let alpha = sphere_alpha();
    let concave = collar(&alpha, Convexity::Concave);
    let g = glue_convex_concave(&collar(&alpha, Convexity::Convex), &concave).unwrap();
    let rep = certify_classic_gluing(&g, &s).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    let on_collar = g.omega.rechart(&concave.chart().unwrap()).unwrap();
    assert_eq!(on_collar, concave.collar_form().unwrap());
}

#[test]
fn classic_gluing_of_the_torus_contact_form() {
    let s = Settings { grid: 11, ..Settings::default() };
    let alpha = torus_alpha();
    let g = glue_convex_concave(&collar(&alpha, Convexity::Concave), &collar(&alpha, Convexity::Convex)).unwrap();
    assert!(certify(&g, &s).unwrap().passed());
}

#[test]
fn folded_gluing_is_certified() {
    let s = Settings::default();
    let alpha = darboux_alpha();
    let c = collar(&alpha, Convexity::Concave);
    let g = glue_concave_concave(&c, &c).unwrap();
    let rep = certify_folded_gluing(&g, &s).unwrap();
    assert!(rep.passed(), "{}", rep.to_json());
    assert!(matches!(rep.clause("e_squared_exceeds_4").unwrap().certificate, Certificate::Proven { .. }));
    assert!(rep.clause("restriction_is_2dalpha").unwrap().passed);
    // Oracle: max ψ_f' = 2 at r = -3/2, so 3 - ψ'(-r) bottoms out at 1.
    let c = rep.clause("psi_derivative_below_3").unwrap();
    assert!((min_of(&c.detail) - 1.0).abs() < 1e-6, "{}", c.detail);
}

#[test]
fn folded_glued_form_is_symmetric_under_the_flip() {
    let alpha = sphere_alpha();
    let c = collar(&alpha, Convexity::Concave);
    let g = glue_concave_concave(&c, &c).unwrap();
    let mut images = vec![-v("r")];
    images.extend(["a", "b", "c"].iter().map(|n| v(n)));
    let flip = CoordinateMap::new(&g.chart, &g.chart, images).unwrap();
    assert_eq!(flip.pullback(&g.omega).unwrap(), g.omega);
}

#[test]
fn tampered_fold_cutoff_is_refuted() {
    let s = Settings::default();
    let alpha = darboux_alpha();
    let c = collar(&alpha, Convexity::Concave);
    let bumps = BumpFunctions::with_folded_step(rat(-1, 2), rat(-1, 4));
    let g = glue_concave_concave_with(&c, &c, &bumps).unwrap();
    let rep = certify_folded_gluing(&g, &s).unwrap();
    assert!(!rep.passed());
    let clause = rep.clause("dr_alpha_coefficient_positive").unwrap();
    assert!(!clause.passed);
    // Oracle (mpmath ternary search): the coefficient dips to
    // -20.888015036 at r = 0.374733.
    match &clause.certificate {
        Certificate::Refuted { witness, .. } => {
            let r = witness[0].1;
            assert!(r > 0.25 && r < 0.5, "{r}");
        }
        other => panic!("{other:?}"),
    }
    assert!((min_of(&clause.detail) + 20.888_015_036).abs() < 1e-3, "{}", clause.detail);
}

#[test]
fn folded_coefficient_oracle_values() {
    let b = BumpFunctions::standard();
    let (p, q) = folded_coefficients(&b);
    // P(r) = e^r - e^{-r} on (0, 1], e^r - e^{-r}(ψ'(-r) + ψ(-r)) on (1, 2).
    for t in [0.1, 0.5, 1.0] {
        assert!((eval1(&p, t) - (t.exp() - (-t).exp())).abs() < 1e-12);
        assert!((eval1(&q, t) - (t.exp() + (-t).exp())).abs() < 1e-12);
    }
    assert!((eval1(&p, 1.5) - (1.5f64.exp() - (-1.5f64).exp() * 2.5)).abs() < 1e-12);
}

#[test]
fn sc_coefficients_match_independent_evaluation() {
    // Oracle: 40-digit mpmath evaluation of the displayed A, B.
    let (a, b) = sc_coefficients(&BumpFunctions::standard());
    for (r, want_a, want_b) in [
        (0.9, 487.961_288_734_316_77, 21.755_664_649_666_817),
        (1.5, -6.897_530_558_050_507_6, 1.906_318_991_281_526_4),
    ] {
        assert!((eval1(&a, r) / want_a - 1.0).abs() < 1e-10, "A({r}) = {}", eval1(&a, r));
        assert!((eval1(&b, r) / want_b - 1.0).abs() < 1e-10, "B({r}) = {}", eval1(&b, r));
    }
}
