use std::f64::consts::{E, PI};

use nalgebra::DVector;
use wparab_core::geometry::catalog::{self, expression_ambient, radial_ambient};
use wparab_core::geometry::{
    angle_function_laplacian, cylinder_distance_laplacian, height_laplacian, index_form,
    lemma31_residual, radial_hypothesis_profile, weighted_laplacian, AmbientSpace, AmbientWeight,
    ChartMap, GeometryError, ImmersedSubmanifold, ProfileSense,
};
use wparab_core::radial::{weights, RadialProfile};
use wparab_core::verdict::{CheckStatus, Window};

fn unweighted(m: usize) -> AmbientSpace {
    AmbientSpace::euclidean(m, AmbientWeight::none())
}

fn gaussian(m: usize) -> AmbientSpace {
    radial_ambient(m, weights::gaussian())
}

fn half_square() -> RadialProfile {
    RadialProfile::parse("t^2/2").unwrap()
}

fn norm(v: &DVector<f64>) -> f64 {
    v.norm()
}

#[test]
fn sphere_mean_curvature_matches_divergence_of_radial_normal() {
    let p = catalog::sphere(unweighted(3), 2.0).unwrap();
    let normal_field = |x: &DVector<f64>| -x / x.norm();
    for u in catalog::interior_points(&p, 10, 1, 0.0) {
        let s = p.geometry_at(&u).unwrap();
        let x = DVector::from_column_slice(&s.p);
        // Orthonormal tangent frame by Gram-Schmidt on the chart columns.
        let e1 = s.tangents.column(0).normalize();
        let t2 = s.tangents.column(1) - &e1 * e1.dot(&s.tangents.column(1));
        let e2 = t2.normalize();
        let eps = 1e-5;
        let div: f64 = [e1, e2]
            .iter()
            .map(|e| {
                let d = (normal_field(&(&x + e * eps)) - normal_field(&(&x - e * eps))) / (2.0 * eps);
                d.dot(e)
            })
            .sum();
        let oracle = -normal_field(&x) * div;
        assert!((&s.mean_curvature_vector - &oracle).norm() < 1e-8);
        assert!((&s.mean_curvature_vector + &s.grad_r).norm() < 1e-12);
        assert!((norm(&s.mean_curvature_vector) - 1.0).abs() < 1e-12);
        // Inward normal: scalar mean curvature (m-1)H = 2/a > 0.
        assert!((s.mean_curvature().unwrap() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn gaussian_sphere_of_radius_sqrt_m_minus_one_is_minimal() {
    for m in [3usize, 4] {
        let p = catalog::sphere(gaussian(m), ((m - 1) as f64).sqrt()).unwrap();
        for u in catalog::interior_points(&p, 20, 2, 0.0) {
            let s = p.geometry_at(&u).unwrap();
            assert!(norm(&s.weighted_mean_curvature_vector) < 1e-8);
        }
    }
}

#[test]
fn linear_hyperplanes_are_minimal_for_radial_weights() {
    for f in [weights::gaussian(), weights::power(1.0, 3.0), weights::antigaussian()] {
        let p = catalog::hyperplane(radial_ambient(4, f), &[0.2, -1.0, 0.4, 0.7], 0.0).unwrap();
        for u in catalog::interior_points(&p, 20, 3, 0.1) {
            let s = p.geometry_at(&u).unwrap();
            assert!(norm(&s.weighted_mean_curvature_vector) < 1e-10);
        }
    }
}

#[test]
fn frames_are_orthonormal_and_radial_gradient_splits() {
    for p in catalog::identity_suite() {
        for u in catalog::interior_points(&p, 5, 4, 0.25) {
            let s = p.geometry_at(&u).unwrap();
            for (i, a) in s.normals.iter().enumerate() {
                for (j, b) in s.normals.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    assert!((s.inner(a, b) - target).abs() < 1e-10, "{}", p.name());
                }
                for k in 0..p.dim() {
                    let t = s.tangents.column(k).into_owned();
                    assert!(s.inner(a, &t).abs() < 1e-8, "{}", p.name());
                }
            }
            assert!((s.grad_r_tangent_sq + s.grad_r_normal_sq - 1.0).abs() < 1e-8, "{}", p.name());
            for k in 0..p.dim() {
                let t = s.tangents.column(k).into_owned();
                assert!(s.inner(&s.mean_curvature_vector, &t).abs() < 1e-8);
                assert!(s.inner(&s.weighted_mean_curvature_vector, &t).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn mean_curvature_vector_does_not_depend_on_seed_order() {
    let torus = ChartMap::Components {
        components: ["cos(x1)", "sin(x1)", "2*cos(x2)", "2*sin(x2) + 0.3*x1"]
            .iter()
            .map(|c| wparab_core::expr::Expression::parse(c, &["x1", "x2"]).unwrap())
            .collect(),
    };
    let p = ImmersedSubmanifold::new(
        "torus",
        gaussian(4),
        torus,
        Window {
            lower: vec![0.0, 0.0],
            upper: vec![2.0 * PI, 2.0 * PI],
        },
    )
    .unwrap();
    for u in catalog::interior_points(&p, 10, 5, 0.0) {
        let a = p.geometry_with_seeds(&u, &[0, 1, 2, 3]).unwrap();
        let b = p.geometry_with_seeds(&u, &[3, 1, 2, 0]).unwrap();
        assert!((&a.mean_curvature_vector - &b.mean_curvature_vector).norm() < 1e-8);
        assert!((&a.weighted_mean_curvature_vector - &b.weighted_mean_curvature_vector).norm() < 1e-8);
        assert!((a.sigma_sq - b.sigma_sq).abs() < 1e-8);
    }
}

#[test]
fn degenerate_chart_is_reported() {
    let p = catalog::sphere(unweighted(3), 1.0).unwrap();
    let err = p.geometry_at(&[0.0, 1.0]).unwrap_err();
    assert!(matches!(err, GeometryError::Degenerate { .. }), "{err:?}");
}

#[test]
fn weighted_laplacian_examples() {
    let sphere = catalog::sphere(unweighted(3), 1.7).unwrap();
    let chart = sphere.chart().clone();
    for u in catalog::interior_points(&sphere, 5, 6, 0.0) {
        let v = weighted_laplacian(&sphere, &u, &|v: &[f64]| {
            let x = chart.eval(v);
            (x.iter().map(|c| c * c).sum::<f64>()).sqrt().powi(3)
        })
        .unwrap();
        assert!(v.abs() < 1e-8, "{v}");
    }

    let plane = catalog::coordinate_plane(gaussian(3), 2).unwrap();
    let u = [0.6, 0.8];
    let v = weighted_laplacian(&plane, &u, &|v: &[f64]| 0.5 * (v[0] * v[0] + v[1] * v[1])).unwrap();
    assert!((v - 1.0).abs() < 1e-8, "{v}");
    let c = weighted_laplacian(&plane, &u, &|_: &[f64]| 3.0).unwrap();
    assert_eq!(c, 0.0);
}

#[test]
fn lemma31_examples() {
    let psi = RadialProfile::parse("sin(t) + t^3").unwrap();
    let p = catalog::sphere(gaussian(3), 1.3).unwrap();
    for u in catalog::interior_points(&p, 10, 7, 0.0) {
        let r = lemma31_residual(&p, &u, &psi).unwrap();
        assert!(r.residual <= 1e-7, "{r:?}");
        assert!(r.formula.abs() < 1e-12);
    }

    let plane = catalog::coordinate_plane(gaussian(3), 2).unwrap();
    let r = lemma31_residual(&plane, &[0.6, 0.8], &half_square()).unwrap();
    assert!(r.residual <= 1e-6, "{r:?}");
    assert!((r.formula - 1.0).abs() < 1e-12);

    let cyl = catalog::cylinder(unweighted(3), 2, 1.0).unwrap().to_numeric();
    assert!(cyl.chart().is_numeric());
    for u in catalog::interior_points(&cyl, 20, 8, 0.0) {
        let r = lemma31_residual(&cyl, &u, &RadialProfile::linear(0.0, 1.0)).unwrap();
        assert!(r.residual <= 1e-5, "{r:?}");
    }
}

#[test]
fn lemma31_holds_across_the_catalog() {
    let profiles = [
        half_square(),
        RadialProfile::linear(0.0, 1.0),
        RadialProfile::parse("log(1 + t^2)").unwrap(),
    ];
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for p in catalog::identity_suite() {
        for u in catalog::interior_points(&p, 20, 9, 0.25) {
            for psi in &profiles {
                let r = lemma31_residual(&p, &u, psi).unwrap();
                assert!(r.residual <= 1e-5, "{} at {u:?} with {}: {r:?}", p.name(), psi.name());
                worst = worst.max(r.residual);
                count += 1;
            }
        }
    }
    assert!(count >= 600);
    println!("{count} combinations, worst residual {worst:e}");
}

#[test]
fn radial_hypothesis_profile_examples() {
    let minus_t = RadialProfile::linear(0.0, -1.0);
    let p = catalog::sphere(gaussian(3), 2f64.sqrt()).unwrap();
    let c = radial_hypothesis_profile(&p, &p.domain().clone(), &minus_t, ProfileSense::Upper);
    assert_eq!(c.status, CheckStatus::Holds, "{c:?}");
    assert!(c.worst_margin.unwrap().abs() < 1e-8);
    assert_eq!(c.samples, 32 * 32);

    let plane = catalog::hyperplane(gaussian(3), &[0.0, 0.0, 1.0], 0.0).unwrap();
    let window = Window {
        lower: vec![0.5, 0.5],
        upper: vec![3.0, 3.0],
    };
    let c = radial_hypothesis_profile(&plane, &window, &minus_t, ProfileSense::Upper);
    assert!(matches!(c.status, CheckStatus::WindowOnly { .. }), "{c:?}");
    assert!(c.worst_margin.unwrap().abs() < 1e-8);

    let huge = RadialProfile::constant(1e30);
    let c = radial_hypothesis_profile(&p, &p.domain().clone(), &huge, ProfileSense::Upper);
    assert!(c.holds());

    // A bound that is too small fails with a witness.
    let c = radial_hypothesis_profile(&p, &p.domain().clone(), &RadialProfile::constant(-2.0), ProfileSense::Upper);
    match c.status {
        CheckStatus::Fails { witness, value } => {
            assert_eq!(witness.len(), 2);
            assert!((value - (2.0 - 2f64.sqrt())).abs() < 1e-8);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn height_laplacian_examples() {
    let a = [0.6, 0.0, 0.8];
    let p = catalog::hyperplane(gaussian(3), &a, 1.5).unwrap();
    for u in catalog::interior_points(&p, 10, 10, 0.0) {
        let s = p.geometry_at(&u).unwrap();
        assert!((s.weighted_mean_curvature().unwrap() - 1.5).abs() < 1e-12);
        let r = height_laplacian(&p, &u, &a).unwrap();
        assert!(r.formula.abs() < 1e-12 && r.direct.abs() < 1e-8, "{r:?}");
    }

    let vertical = catalog::hyperplane(expression_ambient(3, "x3").unwrap(), &[1.0, 0.0, 0.0], 0.4).unwrap();
    for u in catalog::interior_points(&vertical, 10, 11, 0.0) {
        let r = height_laplacian(&vertical, &u, &[0.0, 0.0, 1.0]).unwrap();
        assert!((r.formula - 1.0).abs() < 1e-12 && r.residual < 1e-8, "{r:?}");
        let r = height_laplacian(&vertical, &u, &[1.0, 0.0, 0.0]).unwrap();
        assert!(r.formula.abs() < 1e-12 && r.residual < 1e-8, "{r:?}");
    }

    let helicoid = catalog::helicoid(gaussian(3), 0.7).unwrap();
    for u in catalog::interior_points(&helicoid, 10, 12, 0.0) {
        let r = height_laplacian(&helicoid, &u, &[0.0, 0.6, 0.8]).unwrap();
        assert!(r.residual < 1e-7, "{r:?}");
    }
}

#[test]
fn cylinder_distance_examples() {
    let p = catalog::cylinder(gaussian(5), 4, 3f64.sqrt()).unwrap();
    for u in catalog::interior_points(&p, 10, 13, 0.0) {
        let r = cylinder_distance_laplacian(&p, &u, 4).unwrap();
        assert!(r.formula.abs() < 1e-7 && r.direct.abs() < 1e-7, "{r:?}");
    }

    let amb = expression_ambient(3, "-x3^2/2").unwrap();
    let vertical = ImmersedSubmanifold::new(
        "vertical line",
        amb,
        ChartMap::Affine {
            origin: vec![1.0, 0.5, 0.0],
            basis: vec![vec![0.0, 0.0, 1.0]],
        },
        Window::interval(-3.0, 3.0),
    )
    .unwrap();
    let r = cylinder_distance_laplacian(&vertical, &[0.7], 2).unwrap();
    assert!(r.formula.abs() < 1e-14 && r.direct.abs() < 1e-10, "{r:?}");

    let cyl = catalog::cylinder(unweighted(3), 2, 1.0).unwrap().to_numeric();
    for u in catalog::interior_points(&cyl, 10, 14, 0.0) {
        let r = cylinder_distance_laplacian(&cyl, &u, 2).unwrap();
        assert!(r.residual <= 1e-5, "{r:?}");
    }
    assert!(cylinder_distance_laplacian(&cyl, &[0.1, 0.1], 4).is_err());
}

#[test]
fn angle_function_on_hyperplanes() {
    let horizontal = catalog::graph(gaussian(3), "0.7", 2.0).unwrap();
    for u in catalog::interior_points(&horizontal, 5, 15, 0.0) {
        let a = angle_function_laplacian(&horizontal, &u).unwrap();
        assert_eq!(a.theta, -1.0);
        assert!(a.formula.abs() < 1e-14 && a.residual < 1e-10, "{a:?}");
    }
    let tilted = catalog::graph(gaussian(4), "0.3*x1 - 0.2*x2 + 0.1*x3 + 0.5", 2.0).unwrap();
    for u in catalog::interior_points(&tilted, 10, 16, 0.0) {
        let a = angle_function_laplacian(&tilted, &u).unwrap();
        assert!(a.formula.abs() < 1e-12 && a.residual < 1e-8, "{a:?}");
        assert_eq!(a.split_defect, 0.0);
    }
}

#[test]
fn angle_function_reports_the_translation_term() {
    // Off constant weighted mean curvature the formula misses exactly the
    // variation of H^h along vertical translations.
    let p = catalog::paraboloid_graph(gaussian(3)).unwrap();
    for u in catalog::interior_points(&p, 10, 17, 0.0) {
        let a = angle_function_laplacian(&p, &u).unwrap();
        assert!(a.general_residual < 1e-6, "{a:?}");
    }
}

#[test]
fn catalog_solitons_are_weighted_minimal() {
    let mut cases: Vec<ImmersedSubmanifold> = vec![
        catalog::sphere(gaussian(3), 2f64.sqrt()).unwrap(),
        catalog::sphere(gaussian(4), 3f64.sqrt()).unwrap(),
        catalog::hyperplane(gaussian(3), &[1.0, 2.0, -0.5], 0.0).unwrap(),
        catalog::hyperplane(radial_ambient(4, weights::power(2.0, 4.0)), &[0.0, 1.0, 1.0, 1.0], 0.0).unwrap(),
        catalog::cylinder(gaussian(4), 3, 2f64.sqrt()).unwrap(),
        catalog::cylinder(gaussian(5), 4, 3f64.sqrt()).unwrap(),
        catalog::hyperplane(expression_ambient(3, "-x3^2/2 + sin(x3)").unwrap(), &[0.6, 0.8, 0.0], 1.2).unwrap(),
    ];
    cases.push(catalog::grim_curve(expression_ambient(2, "x2").unwrap()).unwrap());
    for p in &cases {
        for u in catalog::interior_points(p, 20, 18, 0.0) {
            let s = p.geometry_at(&u).unwrap();
            assert!(norm(&s.weighted_mean_curvature_vector) <= 1e-7, "{}: {}", p.name(), s.weighted_mean_curvature_vector);
        }
    }
}

#[test]
fn grim_curve_satisfies_the_translator_equation() {
    // Oracle: φ'' = 1 + φ'² for φ = -log cos x.
    let p = catalog::grim_curve(expression_ambient(2, "x2").unwrap()).unwrap();
    for u in catalog::interior_points(&p, 10, 19, 0.0) {
        let jet = p.chart().jet(&u);
        let d1 = jet.d1[(1, 0)];
        assert!((jet.d2[1][(0, 0)] - (1.0 + d1 * d1)).abs() < 1e-12);
    }
}

#[test]
fn index_form_on_the_minimal_sphere() {
    let p = catalog::sphere(gaussian(3), 2f64.sqrt()).unwrap();
    let q = index_form(&p, &|_: &[f64]| 1.0, &p.domain().clone(), 48).unwrap();
    let expected = -16.0 * PI / E;
    assert!(((q - expected) / expected).abs() < 1e-4, "{q} vs {expected}");
    assert_eq!(index_form(&p, &|_: &[f64]| 0.0, &p.domain().clone(), 16).unwrap(), 0.0);
}

#[test]
fn index_form_of_a_bump_on_the_gaussian_plane() {
    let p = catalog::coordinate_plane(gaussian(3), 2).unwrap();
    let bump = |u: &[f64]| (1.0 - u[0] * u[0] / 4.0).powi(2) * (1.0 - u[1] * u[1] / 4.0).powi(2);
    let support = Window {
        lower: vec![-2.0, -2.0],
        upper: vec![2.0, 2.0],
    };
    let q = index_form(&p, &bump, &support, 24).unwrap();

    // Oracle: the same integral written out in Cartesian coordinates with
    // analytic derivatives, on a 4x denser Gauss-Legendre rule.
    let (x, w) = wparab_core::geometry::gauss_legendre(96);
    let b = |s: f64| (1.0 - s * s / 4.0).powi(2);
    let db = |s: f64| -s * (1.0 - s * s / 4.0);
    let mut oracle = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        for (yj, wj) in x.iter().zip(&w) {
            let (s, t) = (2.0 * xi, 2.0 * yj);
            let grad_sq = (db(s) * b(t)).powi(2) + (b(s) * db(t)).powi(2);
            let u2 = (b(s) * b(t)).powi(2);
            let density = (-(s * s + t * t) / 2.0).exp();
            oracle += 4.0 * wi * wj * density * (grad_sq - u2);
        }
    }
    assert!((q - oracle).abs() < 1e-8 * oracle.abs(), "{q} vs {oracle}");
    assert!(q < 0.0);
}

#[test]
fn index_form_rejects_tests_that_do_not_vanish_on_the_boundary() {
    let p = catalog::coordinate_plane(gaussian(3), 2).unwrap();
    let support = Window {
        lower: vec![-1.0, -1.0],
        upper: vec![1.0, 1.0],
    };
    let err = index_form(&p, &|_: &[f64]| 1.0, &support, 8).unwrap_err();
    assert!(matches!(err, GeometryError::Support { .. }));
}
