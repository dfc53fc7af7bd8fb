use std::sync::Arc;

use scatsym::algebroids::{coframe, Flavor};
use scatsym::certificate::Certificate;
use scatsym::expr::Expr;
use scatsym::geometry::{circle, interval, Chart, CoordinateMap, Multivector, SingularForm};
use scatsym::settings::Settings;
use scatsym::structures::*;

fn v(n: &str) -> Expr {
    Expr::var(n)
}

fn mono(c: &Arc<Chart>, k: i64, e: Expr, names: &[&str]) -> SingularForm {
    SingularForm::monomial(c, k, e, names).unwrap()
}

fn sum<S: scatsym::geometry::Side>(fs: Vec<scatsym::geometry::Graded<S>>) -> scatsym::geometry::Graded<S> {
    let mut it = fs.into_iter();
    let first = it.next().unwrap();
    it.fold(first, |a, b| a.add(&b).unwrap())
}

fn darboux_chart() -> Arc<Chart> {
    Chart::new(
        "darboux",
        vec![interval("x1", -0.5, 0.5), interval("y1", -1.0, 1.0), interval("x2", -1.0, 1.0), interval("y2", -1.0, 1.0)],
        Some("x1"),
    )
    .unwrap()
}

fn darboux_form(c: &Arc<Chart>) -> SingularForm {
    let alpha = sum(vec![mono(c, 0, Expr::one(), &["y1"]), mono(c, 0, v("y2"), &["x2"]), mono(c, 0, -v("x2"), &["y2"])]);
    alpha.dx_wedge().unwrap().with_pole(3).add(&mono(c, 2, Expr::one(), &["x2", "y2"])).unwrap()
}

#[test]
fn darboux_model_is_sc_symplectic() {
    let s = Settings::default();
    let c = darboux_chart();
    let r = verify_sc_symplectic(&darboux_form(&c), &s).unwrap();
    assert!(r.passed(), "{}", r.to_json());
}

#[test]
fn darboux_induced_contact_is_standard() {
    let s = Settings::default();
    let c = darboux_chart();
    let cd = induced_contact(&darboux_form(&c), &s);
    // The x^-2 slot is dx2∧dy2 while -dα/2 = dx2∧dy2, so the relation holds.
    let cd = cd.unwrap();
    let z = c.hypersurface().unwrap();
    let expect = sum(vec![mono(&z, 0, Expr::one(), &["y1"]), mono(&z, 0, v("y2"), &["x2"]), mono(&z, 0, -v("x2"), &["y2"])]);
    assert_eq!(cd.alpha, expect);
    assert!(cd.verify(&s).unwrap().passed());
    assert_eq!(cd.reeb, Multivector::monomial(&z, 0, Expr::one(), &["y1"]).unwrap());
}

#[test]
fn degenerate_two_dim_form_fails_with_witness() {
    let s = Settings::default();
    let c = Chart::new("plane", vec![interval("x", -0.5, 0.5), interval("y", -1.0, 1.0)], Some("x")).unwrap();
    let omega = mono(&c, 3, v("y") - Expr::rat(1, 2), &["x", "y"]);
    let r = verify_sc_symplectic(&omega, &s).unwrap();
    assert!(!r.passed());
    match &r.clause("nondegenerate").unwrap().certificate {
        Certificate::Refuted { witness, .. } => assert_eq!(witness[1].1, 0.5),
        other => panic!("{other:?}"),
    }
}

#[test]
fn reeb_of_simple_forms() {
    let z = Chart::new("z", vec![interval("r", -1.0, 1.0), interval("s", -1.0, 1.0), interval("t", -1.0, 1.0)], None).unwrap();
    let alpha = mono(&z, 0, Expr::one(), &["r"]).add(&mono(&z, 0, v("s"), &["t"])).unwrap();
    let r = reeb(&alpha, &alpha.exterior_derivative().unwrap()).unwrap();
    assert_eq!(r, Multivector::basis(&z, "r").unwrap());
    let t3 = Chart::new("T3", vec![circle("a"), circle("b"), circle("c")], None).unwrap();
    let theta = SingularForm::basis(&t3, "a").unwrap();
    let eta = mono(&t3, 0, Expr::one(), &["b", "c"]);
    let data = CosymplecticData::new(theta, eta).unwrap();
    assert_eq!(data.reeb, Multivector::basis(&t3, "a").unwrap());
    assert!(data.verify(&Settings::default()).unwrap().passed());
}

#[test]
fn reeb_of_non_darboux_contact_form() {
    let s = Settings::default();
    let z = Chart::new("t3", vec![circle("q1"), circle("q2"), circle("th")], None).unwrap();
    let alpha = mono(&z, 0, v("th").cos(), &["q1"]).add(&mono(&z, 0, v("th").sin(), &["q2"])).unwrap();
    let cd = ContactData::new(alpha).unwrap();
    assert!(cd.verify(&s).unwrap().passed());
}

#[test]
fn bk_dual_in_two_dimensions() {
    let s = Settings::default();
    let c = Chart::new("plane", vec![interval("x", -0.5, 0.5), interval("y", -1.0, 1.0)], Some("x")).unwrap();
    for k in 1..4 {
        let omega = mono(&c, k, Expr::one(), &["x", "y"]);
        let frame = coframe(&Flavor::BK(k as u32), &c, None).unwrap();
        let PoissonBivector::Symbolic(pi) = dualize(&omega, &frame, &s).unwrap() else { panic!() };
        assert_eq!(pi, Multivector::monomial(&c, -k, Expr::one(), &["x", "y"]).unwrap());
        assert_eq!(dualize_inverse(&pi).unwrap(), omega);
        assert!(schouten_jacobi_check(&pi, &s).unwrap().passed());
    }
}

#[test]
fn darboux_dual_round_trip_and_jacobi() {
    let s = Settings::default();
    let c = darboux_chart();
    let omega = darboux_form(&c);
    let frame = coframe(&Flavor::Sc, &c, None).unwrap();
    let pi = dualize(&omega, &frame, &s).unwrap();
    assert!(round_trip_certificate(&omega, &pi, &s).unwrap().passed());
    let PoissonBivector::Symbolic(pi) = pi else { panic!() };
    assert_eq!(dualize_inverse(&pi).unwrap(), omega);
    assert!(schouten_jacobi_check(&pi, &s).unwrap().passed());
    // x1³∂x1∧∂y1 − x1²∂y1∧(x2∂x2 + y2∂y2) + x1²∂x2∧∂y2
    let expect = sum(vec![
        Multivector::monomial(&c, -3, Expr::one(), &["x1", "y1"]).unwrap(),
        Multivector::monomial(&c, -2, -v("x2"), &["y1", "x2"]).unwrap(),
        Multivector::monomial(&c, -2, -v("y2"), &["y1", "y2"]).unwrap(),
        Multivector::monomial(&c, -2, Expr::one(), &["x2", "y2"]).unwrap(),
    ]);
    assert_eq!(pi, expect);
}

#[test]
fn hamiltonian_fields_vanish_on_z_in_two_dimensions() {
    let s = Settings::default();
    let c = Chart::new("plane", vec![interval("x", -0.5, 0.5), interval("y", -1.0, 1.0)], Some("x")).unwrap();
    let omega = mono(&c, 3, Expr::one() + v("y") * v("y"), &["x", "y"]);
    let frame = coframe(&Flavor::Sc, &c, None).unwrap();
    let PoissonBivector::Symbolic(pi) = dualize(&omega, &frame, &s).unwrap() else { panic!() };
    let h = (v("x") + v("y")).sin() + v("y") * v("y") * v("x");
    let dh = SingularForm::differential(&c, &h).unwrap();
    // i_{dh} π: contract the 1-form into the bivector.
    for ((idx, k), coef) in pi.terms() {
        assert!(*k <= -2, "{idx:?} {k} {coef}");
    }
    assert!(!dh.is_zero());
}

#[test]
fn schouten_detects_non_poisson() {
    let s = Settings::default();
    let c = Chart::new("r3", vec![interval("x", -1.0, 1.0), interval("y", -1.0, 1.0), interval("z", -1.0, 1.0)], None).unwrap();
    // y∂x∧∂y + ∂x∧∂z has v = (0, -1, y), v·curl v = 0: Poisson.
    let pi = Multivector::monomial(&c, 0, v("y"), &["x", "y"]).unwrap().add(&Multivector::monomial(&c, 0, Expr::one(), &["x", "z"]).unwrap()).unwrap();
    assert!(schouten_jacobi_check(&pi, &s).unwrap().passed());
    // ∂x∧∂y + y∂y∧∂z has v = (y, 0, 1), v·curl v = -1.
    let bad = Multivector::monomial(&c, 0, Expr::one(), &["x", "y"]).unwrap().add(&Multivector::monomial(&c, 0, v("y"), &["y", "z"]).unwrap()).unwrap();
    assert_eq!(schouten_bracket_components(&bad).len(), 1);
    assert!(!schouten_jacobi_check(&bad, &s).unwrap().passed());
    // Independent oracle in three dimensions: the bracket is v·curl v for
    // v = (π^yz, π^zx, π^xy).
    let (a, b, cc) = (v("x") * v("z") + v("y"), v("x") * v("x") - v("z"), v("y") * v("z") * Expr::int(3) + Expr::one());
    let generic = sum(vec![
        Multivector::monomial(&c, 0, a.clone(), &["y", "z"]).unwrap(),
        Multivector::monomial(&c, 0, b.clone(), &["z", "x"]).unwrap(),
        Multivector::monomial(&c, 0, cc.clone(), &["x", "y"]).unwrap(),
    ]);
    let curl = [cc.diff("y") - b.diff("z"), a.diff("z") - cc.diff("x"), b.diff("x") - a.diff("y")];
    let vcurl = &a * &curl[0] + &b * &curl[1] + &cc * &curl[2];
    let comps = schouten_bracket_components(&generic);
    assert!(comps[0].1.same_as(&vcurl), "{} vs {}", comps[0].1.expand(), vcurl.expand());
    assert!(!schouten_jacobi_check(&bad, &s).unwrap().passed());
}

fn s1_collar() -> (Arc<Chart>, SingularForm) {
    let c = Chart::new("collar", vec![interval("x", -0.5, 0.5), circle("t")], Some("x")).unwrap();
    let z = c.hypersurface().unwrap();
    (c, SingularForm::basis(&z, "t").unwrap())
}

#[test]
fn symplectization_is_a_filling_with_liouville_form_alpha_over_x2() {
    let s = Settings::default();
    let (c, alpha) = s1_collar();
    let lifted = SingularForm::lift_from_z(&c, &alpha).unwrap();
    let omega = lifted.with_pole(2).exterior_derivative().unwrap();
    assert!(verify_sc_symplectic(&omega, &s).unwrap().passed());
    match strong_filling_check(&omega, &s).unwrap() {
        FillingVerdict::Filling { liouville, report } => {
            assert!(report.passed(), "{}", report.to_json());
            assert_eq!(liouville, lifted.with_pole(2));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn normal_form_slots_decide_filling() {
    let s = Settings::default();
    let c = Chart::new("collar", vec![interval("x", -0.5, 0.5), circle("t"), circle("u"), circle("w")], Some("x")).unwrap();
    let z = c.hypersurface().unwrap();
    let alpha = mono(&z, 0, v("w").cos(), &["t"]).add(&mono(&z, 0, v("w").sin(), &["u"])).unwrap();
    let zero1 = SingularForm::zero(&z, 1);
    let zero2 = SingularForm::zero(&z, 2);
    let plain = normal_form(&c, &alpha, &zero1, &zero2, &s).unwrap();
    assert!(verify_sc_symplectic(&plain, &s).unwrap().passed());
    assert!(strong_filling_check(&plain, &s).unwrap().is_filling());
    let b1 = SingularForm::basis(&z, "t").unwrap();
    let with_b1 = normal_form(&c, &alpha, &b1, &zero2, &s).unwrap();
    assert!(closedness(&with_b1, &s).unwrap().passed());
    match strong_filling_check(&with_b1, &s).unwrap() {
        FillingVerdict::NotFilling { slot, .. } => assert_eq!(slot, "b1"),
        other => panic!("{other:?}"),
    }
    let b2 = mono(&z, 0, Expr::one(), &["t", "u"]);
    let with_b2 = normal_form(&c, &alpha, &zero1, &b2, &s).unwrap();
    match strong_filling_check(&with_b2, &s).unwrap() {
        FillingVerdict::NotFilling { slot, .. } => assert_eq!(slot, "b2"),
        other => panic!("{other:?}"),
    }
    let not_closed = mono(&z, 0, v("u"), &["t"]);
    assert!(matches!(normal_form(&c, &alpha, &not_closed, &zero2, &s), Err(StructureError::Precondition(_))));
}

#[test]
fn normal_form_liouville_constant_is_minus_half() {
    let s = Settings::default();
    let (c, alpha) = s1_collar();
    let z = c.hypersurface().unwrap();
    let omega = normal_form(&c, &alpha, &SingularForm::zero(&z, 1), &SingularForm::zero(&z, 2), &s).unwrap();
    let FillingVerdict::Filling { report, .. } = strong_filling_check(&omega, &s).unwrap() else { panic!() };
    assert_eq!(report.clause("liouville_form_is_multiple_of_contact_form").unwrap().detail, "c = -1/2");
}

#[test]
fn induced_contact_rescales_under_change_of_defining_function() {
    let s = Settings::default();
    let c = Chart::new("collar", vec![interval("x", -0.3, 0.3), interval("t", -1.0, 1.0), interval("u", -1.0, 1.0), interval("w", -1.0, 1.0)], Some("x")).unwrap();
    let z = c.hypersurface().unwrap();
    let alpha = mono(&z, 0, Expr::one(), &["w"]).add(&mono(&z, 0, v("t"), &["u"])).unwrap();
    let omega = normal_form(&c, &alpha, &SingularForm::zero(&z, 1), &SingularForm::zero(&z, 2), &s).unwrap();
    // New defining function x̃ = φ x with φ = 2 + t/2 > 0: substitute x = x̃ / φ.
    let phi = Expr::int(2) + v("t") * Expr::rat(1, 2);
    let c2 = Chart::new("collar2", vec![interval("x", -0.3, 0.3), interval("t", -1.0, 1.0), interval("u", -1.0, 1.0), interval("w", -1.0, 1.0)], Some("x")).unwrap();
    let map = CoordinateMap::new(&c2, &c, vec![v("x") * phi.recip(), v("t"), v("u"), v("w")]).unwrap();
    let pulled = map.pullback(&omega).unwrap();
    let cd = induced_contact(&pulled, &s).unwrap();
    let z2 = c2.hypersurface().unwrap();
    let expect = SingularForm::lift_from_z(&c2, &alpha).unwrap().restrict_to_z().unwrap().scale(&phi.powi(2));
    let diff = cd.alpha.sub(&expect.rechart(&z2).unwrap()).unwrap();
    assert!(form_vanishes(&diff, &s, "α̃ - φ²α").unwrap().passed());
}

#[test]
fn folded_darboux_is_folded_and_standard_is_not() {
    let s = Settings::default();
    let c = Chart::new(
        "fold",
        vec![interval("x1", -1.0, 1.0), interval("y1", -1.0, 1.0), interval("x2", -1.0, 1.0), interval("y2", -1.0, 1.0)],
        Some("x1"),
    )
    .unwrap();
    let folded = mono(&c, 0, v("x1"), &["x1", "y1"]).add(&mono(&c, 0, Expr::one(), &["x2", "y2"])).unwrap();
    let r = verify_folded(&folded, &s).unwrap();
    assert!(r.passed(), "{}", r.to_json());
    let standard = mono(&c, 0, Expr::one(), &["x1", "y1"]).add(&mono(&c, 0, Expr::one(), &["x2", "y2"])).unwrap();
    let r = verify_folded(&standard, &s).unwrap();
    assert!(!r.clause("top_power_vanishes_on_z").unwrap().passed);
}

#[test]
fn cosymplectic_from_b2_form() {
    let s = Settings::default();
    let c = Chart::new("RxT3", vec![interval("x", -0.5, 0.5), circle("a"), circle("b"), circle("c")], Some("x")).unwrap();
    let omega = mono(&c, 2, Expr::one(), &["x", "a"]).add(&mono(&c, 0, Expr::one(), &["b", "c"])).unwrap();
    let frame = coframe(&Flavor::BK(2), &c, None).unwrap();
    assert!(verify_symplectic(&omega, &frame, &s).unwrap().passed());
    let (data, report) = cosymplectic_extract(&omega, 2, &s).unwrap();
    assert!(report.passed());
    let z = c.hypersurface().unwrap();
    assert_eq!(data.theta, SingularForm::basis(&z, "a").unwrap());
    assert_eq!(data.eta, mono(&z, 0, Expr::one(), &["b", "c"]));
    assert_eq!(data.reeb, Multivector::basis(&z, "a").unwrap());
}

#[test]
fn degenerate_cosymplectic_pair_is_refuted() {
    let t3 = Chart::new("T3", vec![circle("a"), circle("b"), circle("c")], None).unwrap();
    let theta = SingularForm::basis(&t3, "b").unwrap();
    let eta = mono(&t3, 0, Expr::one(), &["b", "c"]);
    assert!(CosymplecticData::new(theta, eta).is_err());
}
