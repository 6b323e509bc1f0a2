use std::f64::consts::E;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use wparab_core::geometry::catalog::{self, radial_ambient};
use wparab_core::geometry::{lemma31_residual, AmbientSpace, AmbientWeight};
use wparab_core::model::WeightedModel;
use wparab_core::radial::{integrate, weights, AsymptoticHint, RadialProfile, Tolerance, WarpingFunction};
use wparab_core::stochastic::{hit_probability, DiffusionSpec};
use wparab_core::Expression;

fn expressions(c: &mut Criterion) {
    let e = Expression::parse("exp(-t^2/2) * sin(3*t) + log(1 + t^2)", &["t"]).unwrap();
    c.bench_function("expr/jet", |b| b.iter(|| e.jet(black_box(1.3)).unwrap()));
    c.bench_function("expr/parse", |b| {
        b.iter(|| Expression::parse(black_box("-x3^2/2 + sin(x1*x2) - sqrt(1 + x1^2)"), &["x1", "x2", "x3"]).unwrap())
    });
}

fn radial(c: &mut Criterion) {
    let tol = Tolerance::default();
    c.bench_function("radial/integrate", |b| {
        b.iter(|| integrate(|t| (-t * t).exp() * t.cos(), 0.0, black_box(6.0), tol).unwrap())
    });
    let gaussian = WeightedModel::new(3, WarpingFunction::euclidean(), weights::gaussian()).unwrap();
    c.bench_function("radial/ahlfors", |b| {
        b.iter(|| gaussian.ahlfors_classify(black_box(1.0), AsymptoticHint::None).unwrap())
    });
    let h3 = WeightedModel::new(3, WarpingFunction::hyperbolic(-1.0).unwrap(), weights::zero()).unwrap();
    c.bench_function("radial/capacity_potential", |b| {
        b.iter(|| h3.capacity_potential(black_box(0.5), 3.0).unwrap())
    });
}

fn geometry(c: &mut Criterion) {
    let sphere = catalog::sphere(radial_ambient(3, weights::gaussian()), 1.3).unwrap();
    let psi = RadialProfile::parse("t^2/2").unwrap();
    c.bench_function("geometry/sample", |b| b.iter(|| sphere.geometry_at(black_box(&[0.7, 1.1])).unwrap()));
    c.bench_function("geometry/lemma_residual", |b| {
        b.iter(|| lemma31_residual(&sphere, black_box(&[0.7, 1.1]), &psi).unwrap())
    });
}

fn stochastic(c: &mut Criterion) {
    let plane = catalog::coordinate_plane(AmbientSpace::euclidean(2, AmbientWeight::none()), 2).unwrap();
    let spec = DiffusionSpec::new(plane, 1).with_step(1e-3);
    let mut group = c.benchmark_group("stochastic");
    group.sample_size(10);
    group.bench_function("planar_hit_200", |b| {
        b.iter(|| hit_probability(&spec, black_box(&[E.sqrt(), 0.0]), 1.0, E, 200).unwrap())
    });
    group.finish();
}

criterion_group!(benches, expressions, radial, geometry, stochastic);
criterion_main!(benches);
