use scatsym::catalog::*;
use scatsym::certificate::{Certificate, Report};
use scatsym::expr::{rat, Expr, Rational};
use scatsym::geometry::{Multivector, SingularForm};
use scatsym::settings::Settings;

fn run(name: &str, params: Params) -> Report {
    let rec = build_example(name, &params).unwrap();
    run_example(&rec, &Settings::default()).unwrap()
}

fn failing(r: &Report) -> Vec<String> {
    r.clauses.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
}

#[test]
fn every_default_record_passes_except_the_displayed_poisson_bivector() {
    for e in list_examples() {
        let r = run(e.name, Params::default());
        if e.name == "sc-poisson-darboux" {
            assert_eq!(failing(&r), vec!["chart.dual_matches_displayed.matches_displayed".to_string()]);
        } else {
            assert!(r.passed(), "{} failed: {:?}", e.name, failing(&r));
        }
    }
}

#[test]
fn suite_keeps_order_and_is_reproducible() {
    let s = Settings::default();
    let reqs: Vec<(String, Params)> =
        ["sc-darboux", "b2-r-times-t3", "folded-darboux"].iter().map(|n| (n.to_string(), Params::default())).collect();
    let a: Vec<String> = run_suite(&reqs, &s).into_iter().map(|r| r.unwrap().to_json()).collect();
    let b: Vec<String> = run_suite(&reqs, &s).into_iter().map(|r| r.unwrap().to_json()).collect();
    assert_eq!(a, b);
    assert!(a[0].contains("\"subject\": \"sc-darboux {\\\"n\\\":2}\""), "{}", a[0]);
    assert!(a[1].contains("\"subject\": \"b2-r-times-t3\""));
}

#[test]
fn unknown_names_and_out_of_range_parameters_are_errors() {
    assert!(matches!(build_example("klein-bottle", &Params::default()), Err(CatalogError::Unknown(_))));
    assert!(matches!(build_example("sc-sphere", &Params::n(5)), Err(CatalogError::Parameter(_))));
    assert!(matches!(build_example("torus-sc-folded", &Params::n(3)), Err(CatalogError::Parameter(_))));
    let bad = Params { alpha: Some("s5".into()), ..Params::default() };
    assert!(matches!(build_example("symplectization", &bad), Err(CatalogError::Parameter(_))));
}

fn sampled_enough(c: &Certificate) -> bool {
    match c {
        Certificate::Proven { .. } => true,
        Certificate::NumericallyVerified { grid_points, .. } => *grid_points >= 500,
        Certificate::Refuted { .. } => false,
    }
}

#[test]
fn spheres_in_dimensions_two_four_six() {
    for n in 1..=3 {
        let r = run("sc-sphere", Params::n(n));
        assert!(r.passed(), "n = {n}: {:?}", failing(&r));
        for chart in ["U_x1", "north", "south"] {
            let c = r.clause(&format!("{chart}.symplectic.closed")).unwrap();
            assert!(sampled_enough(&c.certificate), "{chart}: {:?}", c.certificate);
            assert!(r.clause(&format!("{chart}.symplectic.nondegenerate")).unwrap().passed);
        }
        assert!(r.clause("U_x1.coefficient.structural_match").unwrap().passed);
    }
}

#[test]
fn sphere_all_charts() {
    let p = Params { n: Some(2), all_charts: true, ..Params::default() };
    let rec = build_example("sc-sphere", &p).unwrap();
    let labels: Vec<&str> = rec.pieces.iter().map(|p| p.label.as_str()).collect();
    assert_eq!(labels, ["U_x1", "U_y1", "U_x2", "U_y2", "north", "south"]);
    let r = run_example(&rec, &Settings::default()).unwrap();
    assert!(r.passed(), "{:?}", failing(&r));
}

/// Ambient β = -2 dz∧σ/z³ + dσ/z² with σ = ½Σ(x dy - y dx), pulled back
/// through a finite-difference Jacobian of the U_x1 parametrization.
fn sphere_pullback_numeric(n: usize, p: &[f64]) -> Vec<Vec<f64>> {
    let embed = |q: &[f64]| -> Vec<f64> {
        let r2: f64 = q.iter().map(|v| v * v).sum();
        let mut out = vec![(1.0 - r2).sqrt()];
        out.extend_from_slice(q);
        out
    };
    let dim = 2 * n;
    let amb = dim + 1;
    let pt = embed(p);
    let z = pt[amb - 1];
    let mut b = vec![vec![0.0; amb]; amb];
    for i in 0..n {
        let (xi, yi) = (2 * i, 2 * i + 1);
        b[xi][yi] += 1.0 / (z * z);
        b[yi][xi] -= 1.0 / (z * z);
        // -2/z³ dz∧(½(x dy - y dx)) = -(x/z³) dz∧dy + (y/z³) dz∧dx
        let zi = amb - 1;
        b[zi][yi] -= pt[xi] / z.powi(3);
        b[yi][zi] += pt[xi] / z.powi(3);
        b[zi][xi] += pt[yi] / z.powi(3);
        b[xi][zi] -= pt[yi] / z.powi(3);
    }
    let h = 1e-6;
    let mut jac = vec![vec![0.0; dim]; amb];
    for j in 0..dim {
        let mut plus = p.to_vec();
        let mut minus = p.to_vec();
        plus[j] += h;
        minus[j] -= h;
        let (ep, em) = (embed(&plus), embed(&minus));
        for i in 0..amb {
            jac[i][j] = (ep[i] - em[i]) / (2.0 * h);
        }
    }
    let mut out = vec![vec![0.0; dim]; dim];
    for a in 0..dim {
        for c in 0..dim {
            out[a][c] = (0..amb).flat_map(|i| (0..amb).map(move |k| (i, k))).map(|(i, k)| jac[i][a] * b[i][k] * jac[k][c]).sum();
        }
    }
    out
}

#[test]
fn sphere_coefficient_against_finite_difference_pullback() {
    let n = 2;
    let rec = build_example("sc-sphere", &Params::n(n)).unwrap();
    let piece = rec.piece("U_x1").unwrap();
    let chart = piece.form.chart().clone();
    assert_eq!(chart.names(), ["y1", "x2", "y2", "z"]);
    let coef = piece.form.coefficient_over(&["z", "y1"], 3).unwrap();
    for p in [[0.1, -0.2, 0.3, 0.25], [-0.3, 0.05, 0.1, -0.4], [0.2, 0.2, -0.2, 0.1]] {
        let m = sphere_pullback_numeric(n, &p);
        // dz∧dy1 component of the pulled-back matrix, times z³.
        let oracle = m[3][0] * p[3].powi(3);
        let pt = chart.point_map(&p);
        let sym = coef.eval_f64(&pt.iter().map(|(k, v)| (k.clone(), scatsym::expr::Scalar::Real(*v))).collect()).unwrap();
        assert!((oracle - sym).abs() < 1e-6, "{oracle} vs {sym}");
        let x1 = (1.0 - p.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let displayed = -(x1 + p[0] * p[0] / x1 + p[3] * p[3] / x1);
        assert!((oracle - displayed).abs() < 1e-6);
    }
}

#[test]
fn torus_sc_folded_loci_for_m_two() {
    let rec = build_example("torus-sc-folded", &Params { m: Some(2), n: Some(1), ..Params::default() }).unwrap();
    let torus = rec.piece("torus").unwrap();
    let Some(Expected::Loci { sc, folds, .. }) = torus.expected.iter().find(|e| matches!(e, Expected::Loci { .. })) else {
        panic!("no loci")
    };
    let q = |n, d| rat(n, d);
    assert_eq!(*sc, vec![q(0, 1), q(1, 2), q(1, 1), q(3, 2)]);
    assert_eq!(*folds, vec![q(1, 4), q(3, 4), q(5, 4), q(7, 4)]);
    let r = run_example(&rec, &Settings::default()).unwrap();
    assert!(r.passed(), "{:?}", failing(&r));
    for piece in ["sc-locus", "fold", "torus"] {
        let c = r.clause(&format!("{piece}.exact_primitive.closed")).unwrap();
        assert!(matches!(c.certificate, Certificate::Proven { .. }), "{piece}: {:?}", c.certificate);
    }
}

#[test]
fn torus_sc_folded_other_parameters() {
    for (m, n) in [(1, 1), (3, 1), (2, 2)] {
        let r = run("torus-sc-folded", Params { m: Some(m), n: Some(n), ..Params::default() });
        assert!(r.passed(), "m = {m}, n = {n}: {:?}", failing(&r));
    }
}

#[test]
fn tampered_loci_are_refuted() {
    let mut rec = build_example("torus-sc-folded", &Params::default()).unwrap();
    let torus = rec.pieces.iter_mut().find(|p| p.label == "torus").unwrap();
    for e in torus.expected.iter_mut() {
        if let Expected::Loci { folds, .. } = e {
            folds[0] = Rational::new(1.into(), 3.into());
        }
    }
    let r = run_example(&rec, &Settings::default()).unwrap();
    assert_eq!(failing(&r), vec!["torus.loci.cos_vanishes_at_folds".to_string()]);
}

#[test]
fn symplectizations_fill_with_constant_minus_two() {
    for a in ["s1", "t3", "s3"] {
        let r = run("symplectization", Params { alpha: Some(a.into()), ..Params::default() });
        assert!(r.passed(), "{a}: {:?}", failing(&r));
        assert!(r.clause("collar.filling.verdict").unwrap().passed);
        let c = r.clause("collar.contact_identity.multiple_of_expected").unwrap();
        assert_eq!(c.detail, "c = -2", "{a}");
        let c = r.clause("collar.filling.check.liouville_form_is_multiple_of_contact_form").unwrap();
        // i_V ω = α/x² while the dx/x³ slot is -2α.
        assert_eq!(c.detail, "c = -1/2", "{a}");
    }
}

#[test]
fn euclidean_end_is_the_standard_form() {
    for n in 1..=3 {
        let r = run("euclidean-end", Params::n(n));
        assert!(r.passed(), "n = {n}: {:?}", failing(&r));
        assert!(r.clause("end.pullback.equals_pullback").unwrap().passed);
        assert_eq!(r.clause("end.contact_identity.multiple_of_expected").unwrap().detail, "c = 1");
    }
}

#[test]
fn s3xs1_radial_field_is_not_liouville() {
    let rec = build_example("s3xs1", &Params::default()).unwrap();
    let ball = rec.piece("ball").unwrap();
    let c = ball.form.chart();
    let radial = ["x", "y", "z"]
        .iter()
        .map(|n| Multivector::monomial(c, 0, Expr::var(n), &[n]).unwrap())
        .reduce(|a, b| a.add(&b).unwrap())
        .unwrap();
    let Some(Expected::Liouville { primitive, .. }) = ball.expected.iter().find(|e| matches!(e, Expected::Liouville { .. })) else {
        panic!()
    };
    // i_R(2dx∧dy + dz∧dθ) = 2(x dy - y dx) + z dθ.
    let contraction = ball.form.interior(&radial).unwrap();
    let gap = contraction.sub(primitive).unwrap().expanded();
    let expect = SingularForm::monomial(c, 0, Expr::var("x"), &["y"])
        .unwrap()
        .add(&SingularForm::monomial(c, 0, -Expr::var("y"), &["x"]).unwrap())
        .unwrap();
    assert_eq!(gap, expect);
}

#[test]
fn bk_torus_family() {
    for k in 1..=3 {
        for n in 1..=2 {
            let r = run("bk-torus", Params { k: Some(k), n: Some(n), ..Params::default() });
            assert!(r.passed(), "k = {k}, n = {n}: {:?}", failing(&r));
        }
    }
}

#[test]
fn b2_example_horizontal_identities_are_exact() {
    let r = run("b2-r-times-t3", Params::default());
    for name in ["chart.horizontal.d_h_vanishes", "chart.horizontal.lie_derivative"] {
        let c = r.clause(name).unwrap();
        assert!(matches!(c.certificate, Certificate::Proven { .. }), "{name}: {:?}", c.certificate);
    }
    assert_eq!(r.notes.get("chart.cosymplectic.reeb").map(String::as_str), Some("1 ∂th1"));
}

#[test]
fn darboux_models_in_higher_dimension() {
    assert!(run("sc-darboux", Params::n(3)).passed());
    assert!(run("folded-darboux", Params::n(4)).passed());
    let r = run("sc-poisson-darboux", Params::n(3));
    assert_eq!(failing(&r), vec!["chart.dual_matches_displayed.matches_displayed".to_string()]);
    assert!(r.clause("chart.dual_matches_displayed.displayed_jacobi").unwrap().passed);
}
