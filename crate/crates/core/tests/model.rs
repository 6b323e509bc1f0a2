use std::f64::consts::{E, PI};

use proptest::prelude::*;
use wparab_core::model::{RadiusMode, WeightedModel};
use wparab_core::radial::{
    classify_improper, find_root, integrate, weights, AsymptoticHint, IntegralOutcome, RadialProfile, Tolerance,
    WarpingFunction,
};
use wparab_core::verdict::Outcome;

fn euclid(m: usize, f: RadialProfile) -> WeightedModel {
    WeightedModel::new(m, WarpingFunction::euclidean(), f).unwrap()
}

#[test]
fn quadrature_examples() {
    let tol = Tolerance::new(1e-12, 1e-12);
    assert!((integrate(|t| t, 0.0, 1.0, tol).unwrap().value - 0.5).abs() < 1e-12);
    assert!((integrate(f64::sin, 0.0, PI, tol).unwrap().value - 2.0).abs() < 1e-10);
    let q = integrate(|t| 1.0 / (2.0 * PI * t), 1.0, E, tol).unwrap();
    assert!((q.value - 1.0 / (2.0 * PI)).abs() < 1e-10);
}

#[test]
fn improper_examples() {
    match classify_improper(|t| t.powi(-2), 1.0, AsymptoticHint::None).unwrap().outcome {
        IntegralOutcome::Convergent { value, .. } => assert!((value - 1.0).abs() < 1e-6),
        other => panic!("{other:?}"),
    }
    let v = classify_improper(|t| 1.0 / t, 1.0, AsymptoticHint::None).unwrap();
    assert_eq!(v.outcome, IntegralOutcome::Divergent);
    let v = classify_improper(|t| (t * t / 2.0).exp() / (2.0 * PI * t), 1.0, AsymptoticHint::None).unwrap();
    assert_eq!(v.outcome, IntegralOutcome::Divergent);
}

#[test]
fn root_examples() {
    assert!((find_root(|t| t * t - 4.0, 0.0, 3.0, 1e-14).unwrap() - 2.0).abs() < 1e-12);
    assert!((find_root(|t| 2.0 / t - t, 0.1, 10.0, 1e-14).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    assert!((find_root(|t| 1.0 / t - t - 1.0, 0.1, 10.0, 1e-14).unwrap() - golden).abs() < 1e-12);
    assert!(find_root(|t| t * t + 1.0, 0.0, 3.0, 1e-14).is_err());
}

fn catalog_profiles() -> Vec<RadialProfile> {
    let w = WarpingFunction::hyperbolic(-2.0).unwrap();
    vec![
        WarpingFunction::euclidean().profile().clone(),
        w.profile().clone(),
        weights::power(0.7, 3.0),
        weights::power(-1.3, 2.5),
        weights::gaussian(),
        weights::antigaussian(),
        weights::logpow(1.5, &w),
        weights::logpow(-2.0, &WarpingFunction::euclidean()),
    ]
}

#[test]
fn catalog_derivatives_match_finite_differences() {
    for p in catalog_profiles() {
        for i in 0..=40 {
            let t = 0.1 * 500f64.powf(i as f64 / 40.0);
            let h = 1e-5 * t;
            let d1 = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
            let d2 = (p.d1(t + h) - p.d1(t - h)) / (2.0 * h);
            assert!((d1 - p.d1(t)).abs() <= 1e-6 * (1.0 + p.d1(t).abs()), "{} at {t}", p.name());
            assert!((d2 - p.d2(t)).abs() <= 1e-6 * (1.0 + p.d2(t).abs()), "{} at {t}", p.name());
        }
    }
}

#[test]
fn closed_form_capacities() {
    let c = euclid(2, weights::zero()).capacity_potential(1.0, E).unwrap();
    assert!((c.capacity - 2.0 * PI).abs() < 1e-8);
    let c = euclid(3, weights::zero()).capacity_potential(1.0, 2.0).unwrap();
    assert!((c.capacity - 8.0 * PI).abs() < 1e-8);
}

#[test]
fn sphere_area_examples() {
    assert!((euclid(3, weights::zero()).sphere_area(2.0).unwrap() - 16.0 * PI).abs() < 1e-12);
    let a = euclid(2, weights::gaussian()).sphere_area(1.0).unwrap();
    assert!((a - 2.0 * PI * (-0.5f64).exp()).abs() < 1e-12);
    assert!(euclid(3, weights::zero()).sphere_area(0.0).is_err());
}

#[test]
fn critical_sphere_radii() {
    for (m, lambda) in [(2usize, 1.0), (3, 0.0), (10, 0.0), (5, 2.0)] {
        let r = euclid(m, weights::gaussian())
            .critical_sphere_radius(m - 1, lambda, RadiusMode::LastAbove)
            .unwrap();
        let exact = (-lambda + (lambda * lambda + 4.0 * (m - 1) as f64).sqrt()) / 2.0;
        assert!((r.t0 - exact).abs() < 1e-10, "{m} {lambda}");
    }
}

#[test]
fn ahlfors_table_has_no_inconclusive() {
    let classify = |m, f| euclid(m, f).ahlfors_classify(1.0, AsymptoticHint::None).unwrap().outcome;
    assert_eq!(classify(2, weights::zero()), Outcome::Parabolic);
    assert_eq!(classify(2, weights::antigaussian()), Outcome::Hyperbolic);
    for m in [3, 4] {
        assert_eq!(classify(m, weights::zero()), Outcome::Hyperbolic);
        assert_eq!(classify(m, weights::gaussian()), Outcome::Parabolic);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integrate_is_additive(c0 in -2.0f64..2.0, c1 in -2.0f64..2.0, k in 0.2f64..3.0, a in 0.0f64..1.0, l1 in 0.1f64..2.0, l2 in 0.1f64..2.0) {
        let f = |t: f64| c0 + c1 * (k * t).sin() + (-(t - 1.0).powi(2)).exp();
        let tol = Tolerance::default();
        let (b, c) = (a + l1, a + l1 + l2);
        let ab = integrate(f, a, b, tol).unwrap();
        let bc = integrate(f, b, c, tol).unwrap();
        let ac = integrate(f, a, c, tol).unwrap();
        let bound = ab.error + bc.error + ac.error + 1e-12;
        prop_assert!((ab.value + bc.value - ac.value).abs() <= bound.max(1e-10));
    }

    #[test]
    fn improper_classification_is_deterministic(p in 0.5f64..3.0, a in 0.5f64..4.0) {
        let once = classify_improper(|t| t.powf(-p), a, AsymptoticHint::None).unwrap();
        let twice = classify_improper(|t| t.powf(-p), a, AsymptoticHint::None).unwrap();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn potentials_are_monotone_and_pinned(m in 2usize..5, rho in 0.3f64..1.5, gap in 0.2f64..3.0, weight in 0usize..3) {
        let f = [weights::zero(), weights::gaussian(), weights::antigaussian()][weight].clone();
        let model = euclid(m, f);
        let big_r = rho + gap;
        let c = model.capacity_potential(rho, big_r).unwrap();
        prop_assert!(c.capacity > 0.0);
        prop_assert_eq!(c.potential.phi(rho), 1.0);
        prop_assert_eq!(c.potential.phi(big_r), 0.0);
        let mut last = 1.0;
        for i in 1..=64 {
            let v = c.potential.phi(rho + gap * i as f64 / 64.0);
            prop_assert!(v <= last + 1e-15);
            last = v;
        }
        // Shrinking the outer ball raises the capacity.
        let inner = model.capacity_potential(rho, rho + gap / 2.0).unwrap();
        prop_assert!(inner.capacity >= c.capacity);
    }
}
