use std::f64::consts::E;

use wparab_core::criteria::{balanced_anchor, classify_thm32, classify_thm33, ComparisonSetup, ConditionA};
use wparab_core::geometry::catalog::{self, radial_ambient};
use wparab_core::geometry::{weighted_laplacian, AmbientSpace, AmbientWeight, ImmersedSubmanifold, ProfileSense};
use wparab_core::model::WeightedModel;
use wparab_core::radial::{weights, AsymptoticHint, RadialProfile, WarpingFunction};
use wparab_core::stochastic::{
    comparison_check, generator_check, hit_probability, recurrence_probe, wilson_interval, DiffusionSpec,
    StochasticError, Trend,
};
use wparab_core::verdict::Outcome;

fn flat(m: usize, f: RadialProfile) -> ImmersedSubmanifold {
    catalog::coordinate_plane(radial_ambient(m, f), m).unwrap()
}

fn plane2() -> ImmersedSubmanifold {
    catalog::coordinate_plane(AmbientSpace::euclidean(2, AmbientWeight::none()), 2).unwrap()
}

// Harmonic measure of the inner circle in the planar annulus.
fn planar_potential(s: f64, rho: f64, big_r: f64) -> f64 {
    (big_r / s).ln() / (big_r / rho).ln()
}

fn euclid(m: usize, f: RadialProfile) -> WeightedModel {
    WeightedModel::new(m, WarpingFunction::euclidean(), f).unwrap()
}

#[test]
fn planar_annulus_matches_closed_form() {
    let spec = DiffusionSpec::new(plane2(), 11).with_step(1e-4);
    let s = E.sqrt();
    let est = hit_probability(&spec, &[s, 0.0], 1.0, E, 20_000).unwrap();
    let exact = planar_potential(s, 1.0, E);
    assert!((exact - 0.5).abs() < 1e-15);
    assert!(est.ci.0 <= exact && exact <= est.ci.1, "{est:?}");
    assert_eq!(est.hits + est.escapes, est.paths);
    assert!(est.resolution_warning.is_none());
    assert!(est.mean_exit_time > 0.0);
}

#[test]
fn boundary_starts_are_immediate() {
    let spec = DiffusionSpec::new(plane2(), 3);
    let inner = hit_probability(&spec, &[1.0, 0.0], 1.0, 3.0, 100).unwrap();
    assert_eq!(inner.p_hat, 1.0);
    assert_eq!(inner.mean_steps, 0.0);
    let outer = hit_probability(&spec, &[0.0, 3.0], 1.0, 3.0, 100).unwrap();
    assert_eq!(outer.p_hat, 0.0);
}

#[test]
fn bad_inputs_are_rejected() {
    let spec = DiffusionSpec::new(plane2(), 3);
    assert!(hit_probability(&spec, &[2.0], 1.0, 3.0, 10).is_err());
    assert!(hit_probability(&spec, &[2.0, 0.0], 3.0, 1.0, 10).is_err());
    assert!(hit_probability(&spec, &[2.0, 0.0], 1.0, 3.0, 0).is_err());
    assert!(recurrence_probe(&spec, &[2.0, 0.0], 1.0, &[4.0, 3.0], 10).is_err());
}

#[test]
fn estimates_are_deterministic_per_seed() {
    let p = flat(3, weights::gaussian());
    let a = DiffusionSpec::new(p.clone(), 99).with_step(1e-3);
    let b = DiffusionSpec::new(p, 99).with_step(1e-3);
    let x = hit_probability(&a, &[1.5, 0.2, 0.0], 1.0, 2.5, 500).unwrap();
    let y = hit_probability(&b, &[1.5, 0.2, 0.0], 1.0, 2.5, 500).unwrap();
    assert_eq!(format!("{x:?}"), format!("{y:?}"));
    let z = hit_probability(&a.with_seed(100), &[1.5, 0.2, 0.0], 1.0, 2.5, 500).unwrap();
    assert_ne!(format!("{x:?}"), format!("{z:?}"));
}

#[test]
fn general_and_affine_paths_agree() {
    // A rotated plane through the general chart machinery (a graph of a
    // linear function) against the affine fast path.
    let amb = radial_ambient(3, weights::gaussian());
    let graph = catalog::graph(amb.clone(), "0*x1", 6.0).unwrap();
    let plane = catalog::coordinate_plane(amb, 2).unwrap();
    let g = DiffusionSpec::new(graph, 5).with_step(1e-3);
    let a = DiffusionSpec::new(plane, 5).with_step(1e-3);
    let x = hit_probability(&g, &[1.5, 0.0], 1.0, 2.0, 300).unwrap();
    let y = hit_probability(&a, &[1.5, 0.0], 1.0, 2.0, 300).unwrap();
    assert_eq!(x.hits, y.hits);
    assert!((x.mean_exit_time - y.mean_exit_time).abs() < 1e-9);
}

#[test]
fn confidence_intervals_are_calibrated() {
    let s = 1.6;
    let exact = planar_potential(s, 1.0, E);
    let covered = (0..50u64)
        .filter(|&seed| {
            let spec = DiffusionSpec::new(plane2(), 1000 + seed).with_step(1e-3);
            let est = hit_probability(&spec, &[0.0, s], 1.0, E, 1000).unwrap();
            est.ci.0 <= exact && exact <= est.ci.1
        })
        .count();
    assert!(covered >= 45, "{covered} of 50");
}

#[test]
fn interval_width_scales_like_inverse_root() {
    let spec = DiffusionSpec::new(plane2(), 8).with_step(1e-3);
    let w = |n| {
        let e = hit_probability(&spec, &[1.8, 0.0], 1.0, E, n).unwrap();
        e.ci.1 - e.ci.0
    };
    let ratio = w(1000) / w(4000);
    assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
    let (lo, hi) = wilson_interval(500, 1000);
    assert!(lo < 0.5 && hi > 0.5);
}

#[test]
fn generator_matches_weighted_laplacian_on_catalog() {
    let psi = |u: &[f64]| {
        let s: f64 = u.iter().sum();
        u.iter().enumerate().map(|(i, v)| (v + 0.3 * i as f64).sin()).sum::<f64>() + 0.1 * s * s
    };
    let mut checked = 0;
    for (k, p) in catalog::identity_suite().into_iter().enumerate() {
        let spec = DiffusionSpec::new(p.clone(), 40 + k as u64);
        for u in catalog::interior_points(&p, 10, 7 + k as u64, 0.2) {
            let report = generator_check(&spec, &u, &psi, 1e-4, 4000).unwrap();
            assert!(report.passes, "{}: {report:?}", p.name());
            let exact = weighted_laplacian(&p, &u, &psi).unwrap();
            assert_eq!(report.exact, exact);
            checked += 1;
        }
    }
    assert!(checked >= 300);
}

#[test]
fn planar_recurrence_trend() {
    let spec = DiffusionSpec::new(plane2(), 21);
    let r = recurrence_probe(&spec, &[2.0, 0.0], 1.0, &[4.0, 8.0, 16.0, 32.0], 4000).unwrap();
    assert_eq!(r.trend, Trend::Increasing);
    for row in &r.rows {
        let exact = planar_potential(2.0, 1.0, row.big_r);
        assert!((row.p_hat - exact).abs() <= 4.0 * row.standard_error, "{row:?}");
    }
}

#[test]
fn spatial_recurrence_tends_to_inverse_distance() {
    let spec = DiffusionSpec::new(flat(3, weights::zero()), 22);
    let r = recurrence_probe(&spec, &[2.0, 0.0, 0.0], 1.0, &[4.0, 8.0, 16.0, 32.0], 4000).unwrap();
    for row in &r.rows {
        let exact = (0.5 - 1.0 / row.big_r) / (1.0 - 1.0 / row.big_r);
        assert!((row.p_hat - exact).abs() <= 4.0 * row.standard_error, "{row:?}");
    }
    assert!(r.last_ci.1 < 0.6);
}

#[test]
fn gaussian_recurrence_stays_at_one() {
    let spec = DiffusionSpec::new(flat(3, weights::gaussian()), 23);
    let r = recurrence_probe(&spec, &[2.0, 0.0, 0.0], 1.0, &[4.0, 8.0, 16.0, 32.0], 2000).unwrap();
    assert!(matches!(r.trend, Trend::Flat | Trend::Increasing));
    assert!(r.last_ci.1 > 0.999 && r.rows.last().unwrap().p_hat > 0.99);
}

fn setup(base: WeightedModel, n: usize, alpha: RadialProfile, sense: ProfileSense) -> ComparisonSetup {
    let t0 = balanced_anchor(&base, n, &alpha, sense).unwrap().unwrap().max(1.0);
    ComparisonSetup::new(base, n, t0, alpha).unwrap()
}

#[test]
fn gaussian_plane_sits_below_comparison_potential() {
    let s = setup(euclid(3, weights::gaussian()), 2, RadialProfile::linear(0.0, -1.0), ProfileSense::Upper);
    let v = classify_thm32(&s, &ConditionA::asserted("self-shrinker"), AsymptoticHint::None).unwrap();
    assert_eq!(v.outcome, Outcome::Parabolic);
    let plane = catalog::coordinate_plane(radial_ambient(3, weights::gaussian()), 2).unwrap();
    let spec = DiffusionSpec::new(plane, 31);
    let report = comparison_check(&spec, &s, &v, &[2.0, 0.0], 1.0, 4.0, 4000).unwrap();
    assert!(report.passes, "{report:?}");
    assert_eq!(report.relation, "<=");
    assert_eq!(report.r_start, 2.0);
}

#[test]
fn flat_three_plane_sits_above_comparison_potential() {
    let s = setup(euclid(4, weights::zero()), 3, weights::zero(), ProfileSense::Lower);
    let v = classify_thm33(&s, &ConditionA::asserted("minimal"), AsymptoticHint::None).unwrap();
    assert_eq!(v.outcome, Outcome::Hyperbolic);
    let plane = catalog::coordinate_plane(radial_ambient(4, weights::zero()), 3).unwrap();
    let spec = DiffusionSpec::new(plane, 32);
    let report = comparison_check(&spec, &s, &v, &[2.0, 0.0, 0.0], 1.0, 8.0, 4000).unwrap();
    let exact = (0.5 - 1.0 / 8.0) / (1.0 - 1.0 / 8.0);
    assert!((report.phi - exact).abs() < 1e-6, "{report:?}");
    assert!(report.passes, "{report:?}");
    assert_eq!(report.relation, ">=");
}

#[test]
fn inconclusive_verdicts_are_refused() {
    let s = setup(euclid(3, weights::zero()), 2, weights::zero(), ProfileSense::Lower);
    let v = classify_thm33(&s, &ConditionA::asserted("minimal"), AsymptoticHint::None).unwrap();
    assert_eq!(v.outcome, Outcome::Inconclusive);
    let plane = catalog::coordinate_plane(radial_ambient(3, weights::zero()), 2).unwrap();
    let spec = DiffusionSpec::new(plane, 33);
    let err = comparison_check(&spec, &s, &v, &[2.0, 0.0], 1.0, 4.0, 100).unwrap_err();
    assert!(matches!(err, StochasticError::Refused(_)), "{err:?}");
}
