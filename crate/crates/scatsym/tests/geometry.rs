use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scatsym::expr::Expr;
use scatsym::geometry::*;
use scatsym::random;

fn v(n: &str) -> Expr {
    Expr::var(n)
}

fn chart() -> Arc<Chart> {
    Chart::new("R4", ["x", "a", "b", "c"].iter().map(|n| interval(n, -1.0, 1.0)).collect(), Some("x")).unwrap()
}

fn plain(name: &str, vars: &[&str]) -> Arc<Chart> {
    Chart::new(name, vars.iter().map(|n| interval(n, -1.0, 1.0)).collect(), None).unwrap()
}

/// A random form with Laurent exponents up to `max_pole` on separate pieces.
fn singular_form(seed: u64, c: &Arc<Chart>, degree: usize, max_pole: i64) -> SingularForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=max_pole).fold(SingularForm::zero(c, degree), |acc, k| {
        acc.add(&random::form(&mut rng, c, degree, None, 2).with_pole(k)).unwrap()
    })
}

fn vector_field(seed: u64, c: &Arc<Chart>) -> Multivector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = random::form(&mut rng, c, 1, None, 2);
    Multivector::from_terms(c, 1, f.terms().iter().map(|(k, e)| (k.clone(), e.clone())))
}

fn zero(f: &SingularForm) -> bool {
    f.expanded().is_zero()
}

fn sign(p: usize, q: usize) -> Expr {
    if (p * q) % 2 == 0 {
        Expr::one()
    } else {
        Expr::int(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn d_squared_vanishes(seed in any::<u64>(), degree in 0usize..3, pole in 0i64..3) {
        let c = chart();
        let f = singular_form(seed, &c, degree, pole);
        prop_assert!(zero(&f.exterior_derivative().unwrap().exterior_derivative().unwrap()));
    }

    #[test]
    fn wedge_is_graded_commutative(seed in any::<u64>(), p in 0usize..3, q in 0usize..3) {
        let c = chart();
        let a = singular_form(seed, &c, p, 1);
        let b = singular_form(seed ^ 0x9e37, &c, q, 2);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap().scale(&sign(p, q));
        prop_assert!(zero(&ab.sub(&ba).unwrap()));
    }

    #[test]
    fn d_obeys_leibniz(seed in any::<u64>(), p in 0usize..2, q in 0usize..2) {
        let c = chart();
        let a = singular_form(seed, &c, p, 2);
        let b = singular_form(seed.wrapping_add(1), &c, q, 1);
        let lhs = a.wedge(&b).unwrap().exterior_derivative().unwrap();
        let da_b = a.exterior_derivative().unwrap().wedge(&b).unwrap();
        let a_db = a.wedge(&b.exterior_derivative().unwrap()).unwrap().scale(&sign(p, 1));
        prop_assert!(zero(&lhs.sub(&da_b.add(&a_db).unwrap()).unwrap()));
    }

    #[test]
    fn lie_derivative_is_a_derivation_commuting_with_d(seed in any::<u64>(), p in 0usize..2) {
        let c = chart();
        let x = vector_field(seed, &c);
        let a = singular_form(seed ^ 1, &c, p, 1);
        let b = singular_form(seed ^ 2, &c, 1, 0);
        let lhs = a.wedge(&b).unwrap().lie_derivative(&x).unwrap();
        let rhs = a.lie_derivative(&x).unwrap().wedge(&b).unwrap().add(&a.wedge(&b.lie_derivative(&x).unwrap()).unwrap()).unwrap();
        prop_assert!(zero(&lhs.sub(&rhs).unwrap()));
        let da = a.exterior_derivative().unwrap();
        prop_assert!(zero(&da.lie_derivative(&x).unwrap().sub(&a.lie_derivative(&x).unwrap().exterior_derivative().unwrap()).unwrap()));
    }

    #[test]
    fn pullback_commutes_with_d(seed in any::<u64>(), degree in 0usize..3) {
        let src = plain("src", &["u", "w"]);
        let tgt = plain("tgt", &["p", "q", "r"]);
        let map = CoordinateMap::new(&src, &tgt, vec![v("u") * v("w"), v("u").sin() + v("w"), v("w").powi(2) - v("u")]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random::form(&mut rng, &tgt, degree, None, 2);
        let a = map.pullback(&f.exterior_derivative().unwrap()).unwrap();
        let b = map.pullback(&f).unwrap().exterior_derivative().unwrap();
        prop_assert!(zero(&a.sub(&b).unwrap()));
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), degree in 0usize..4, pole in 0i64..4) {
        let c = chart();
        let f = singular_form(seed, &c, degree, pole);
        let back = SingularForm::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn laurent_slots_reassemble(seed in any::<u64>(), degree in 1usize..3, pole in 0i64..4) {
        let c = chart();
        let f = singular_form(seed, &c, degree, pole);
        // Coefficients are quadratic in x, so two orders below x⁰ are exact.
        let slots = f.laurent_decompose(2).unwrap();
        prop_assert!(slots.iter().all(|s| s.exponent >= -2 && s.exponent <= pole));
        let back = SingularForm::reassemble(&c, &slots, degree).unwrap();
        prop_assert!(zero(&back.sub(&f).unwrap()));
    }
}

#[test]
fn sphere_coefficient_in_the_x1_chart() {
    let amb = Chart::new("R3", vec![interval("x1", -1.0, 1.0), interval("y1", -1.0, 1.0), interval("z", -1.0, 1.0)], Some("z")).unwrap();
    let half = Expr::rat(1, 2);
    let sigma = SingularForm::monomial(&amb, 0, v("x1") * &half, &["y1"])
        .unwrap()
        .add(&SingularForm::monomial(&amb, 0, -(v("y1") * &half), &["x1"]).unwrap())
        .unwrap();
    let beta = sigma.with_pole(2).exterior_derivative().unwrap();
    let u = Chart::new("U_x1", vec![interval("y1", -0.4, 0.4), interval("z", -0.4, 0.4)], Some("z")).unwrap();
    let root = (Expr::one() - v("y1").powi(2) - v("z").powi(2)).sqrt();
    let map = CoordinateMap::new(&u, &amb, vec![root.clone(), v("y1"), v("z")]).unwrap();
    let pulled = map.pullback(&beta).unwrap();
    let c = pulled.coefficient_over(&["z", "y1"], 3).unwrap();
    let expected = -(root.clone() + v("y1").powi(2) / &root + v("z").powi(2) / &root);
    assert!(c.same_as(&expected), "{c}");
    assert!(zero(&pulled.exterior_derivative().unwrap()));
}

#[test]
fn wedge_of_one_forms_and_interior_products() {
    let c = chart();
    let da = SingularForm::basis(&c, "a").unwrap();
    let db = SingularForm::basis(&c, "b").unwrap();
    assert!(zero(&da.wedge(&da).unwrap()));
    let w = da.wedge(&db).unwrap();
    let dir_a = Multivector::basis(&c, "a").unwrap();
    assert_eq!(w.interior(&dir_a).unwrap(), db);
    let dir_b = Multivector::basis(&c, "b").unwrap();
    assert_eq!(w.interior(&dir_b).unwrap(), da.neg());
}

#[test]
fn poles_combine_under_wedge_and_d() {
    let c = chart();
    let f = SingularForm::monomial(&c, 2, v("a"), &["b"]).unwrap();
    let g = SingularForm::monomial(&c, 1, Expr::one(), &["x"]).unwrap();
    assert_eq!(f.wedge(&g).unwrap().max_exponent(), Some(3));
    // d(a/x² db) = da∧db/x² - 2a dx∧db/x³.
    let df = f.exterior_derivative().unwrap();
    let expected = SingularForm::monomial(&c, 2, Expr::one(), &["a", "b"])
        .unwrap()
        .add(&SingularForm::monomial(&c, 3, Expr::int(-2) * v("a"), &["x", "b"]).unwrap())
        .unwrap();
    assert!(zero(&df.sub(&expected).unwrap()));
}

#[test]
fn chart_validation_and_errors() {
    assert!(Chart::new("bad", vec![interval("x", 1.0, -1.0)], None).is_err());
    assert!(Chart::new("dup", vec![interval("x", -1.0, 1.0), interval("x", -1.0, 1.0)], None).is_err());
    assert!(Chart::new("noz", vec![interval("x", -1.0, 1.0)], Some("y")).is_err());
    let c = chart();
    assert!(matches!(SingularForm::basis(&c, "q"), Err(GeometryError::UnknownCoordinate(_))));
    let other = plain("other", &["x", "a"]);
    let f = SingularForm::basis(&c, "a").unwrap();
    let g = SingularForm::basis(&other, "a").unwrap();
    assert!(matches!(f.add(&g), Err(GeometryError::ChartMismatch(..))));
    assert!(plain("p", &["u"]).hypersurface().is_err());
}

#[test]
fn malformed_form_json_is_rejected() {
    assert!(SingularForm::from_json("{").is_err());
    let c = chart();
    let mut file = SingularForm::basis(&c, "a").unwrap().to_file();
    file.degree = 2;
    assert!(SingularForm::from_file(&file).is_err());
}
