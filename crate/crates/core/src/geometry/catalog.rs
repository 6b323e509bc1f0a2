//! Named submanifolds with closed-form charts.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AmbientSpace, AmbientWeight, ChartMap, GeometryError, ImmersedSubmanifold, Orientation};
use crate::expr::Expression;
use crate::model::WeightedModel;
use crate::radial::{weights, RadialProfile, WarpingFunction};
use crate::verdict::Window;

/// Half-width of the parameter box used for non-compact entries.
pub const HALF_WIDTH: f64 = 4.0;

/// Variable names `x1..xm` for ambient expressions.
pub fn coordinate_names(m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("x{i}")).collect()
}

/// Euclidean ambient with the radial weight `f(|x|)`.
pub fn radial_ambient(m: usize, f: RadialProfile) -> AmbientSpace {
    AmbientSpace::euclidean(m, AmbientWeight::radial(f))
}

/// Euclidean ambient with `h` given as an expression in `x1..xm`.
pub fn expression_ambient(m: usize, h: &str) -> Result<AmbientSpace, GeometryError> {
    let e = Expression::parse(h, &coordinate_names(m))
        .map_err(|e| GeometryError::Unsupported(format!("weight `{h}`: {e}")))?;
    Ok(AmbientSpace::euclidean(m, AmbientWeight::expression(e)))
}

fn angle_box(angles: usize) -> (Vec<f64>, Vec<f64>) {
    let mut upper = vec![PI; angles];
    if let Some(last) = upper.last_mut() {
        *last = 2.0 * PI;
    }
    (vec![0.0; angles], upper)
}

/// The sphere `S_a ⊂ ℝ^m` in hyperspherical angles, inward normal.
pub fn sphere(ambient: AmbientSpace, a: f64) -> Result<ImmersedSubmanifold, GeometryError> {
    let m = ambient.dim();
    let (lower, upper) = angle_box(m - 1);
    Ok(ImmersedSubmanifold::new(
        format!("sphere(a={a})"),
        ambient,
        ChartMap::Sphere { radius: a, n: m - 1 },
        Window { lower, upper },
    )?
    .closed()
    .with_orientation(Orientation::AgainstRadial))
}

/// Orthonormal basis of `a^⊥`, built from the coordinate axes.
fn complement(a: &[f64]) -> Vec<Vec<f64>> {
    let m = a.len();
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = vec![a.iter().map(|v| v / norm).collect()];
    for axis in 0..m {
        let mut v: Vec<f64> = (0..m).map(|i| if i == axis { 1.0 } else { 0.0 }).collect();
        for _ in 0..2 {
            for e in &basis {
                let c: f64 = v.iter().zip(e).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-8 && basis.len() < m {
            basis.push(v.iter().map(|x| x / len).collect());
        }
    }
    basis.split_off(1)
}

/// The hyperplane `⟨p, a⟩ = t` with normal along `a`.
pub fn hyperplane(ambient: AmbientSpace, a: &[f64], t: f64) -> Result<ImmersedSubmanifold, GeometryError> {
    let m = ambient.dim();
    if a.len() != m {
        return Err(GeometryError::Arity {
            got: a.len(),
            expected: m,
        });
    }
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let origin: Vec<f64> = a.iter().map(|v| t * v / norm).collect();
    Ok(ImmersedSubmanifold::new(
        format!("hyperplane(a={a:?}, t={t})"),
        ambient,
        ChartMap::Affine {
            origin,
            basis: complement(a),
        },
        Window {
            lower: vec![-HALF_WIDTH; m - 1],
            upper: vec![HALF_WIDTH; m - 1],
        },
    )?
    .with_orientation(Orientation::Along(a.to_vec())))
}

/// The coordinate plane `ℝ^k × {0}`.
pub fn coordinate_plane(ambient: AmbientSpace, k: usize) -> Result<ImmersedSubmanifold, GeometryError> {
    let m = ambient.dim();
    let basis = (0..k)
        .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    ImmersedSubmanifold::new(
        format!("plane(k={k})"),
        ambient,
        ChartMap::Affine {
            origin: vec![0.0; m],
            basis,
        },
        Window {
            lower: vec![-HALF_WIDTH; k],
            upper: vec![HALF_WIDTH; k],
        },
    )
}

/// The cylinder `S^{k-1}_a × ℝ^{m-k}`, normal pointing to the axis.
pub fn cylinder(ambient: AmbientSpace, k: usize, a: f64) -> Result<ImmersedSubmanifold, GeometryError> {
    let m = ambient.dim();
    if k < 2 || k > m {
        return Err(GeometryError::Unsupported(format!("cylinder needs 2 <= k <= {m}, got {k}")));
    }
    let (mut lower, mut upper) = angle_box(k - 1);
    lower.extend(std::iter::repeat_n(-HALF_WIDTH, m - k));
    upper.extend(std::iter::repeat_n(HALF_WIDTH, m - k));
    let sub = ImmersedSubmanifold::new(
        format!("cylinder(k={k}, a={a})"),
        ambient,
        ChartMap::Cylinder { radius: a, k, m },
        Window { lower, upper },
    )?
    .with_orientation(Orientation::AgainstHorizontal(k));
    Ok(if k == m { sub.closed() } else { sub })
}

/// The graph `x_m = φ(x1..x_{m-1})` with downward normal, on the box
/// `[-half_width, half_width]^{m-1}`.
pub fn graph(ambient: AmbientSpace, phi: &str, half_width: f64) -> Result<ImmersedSubmanifold, GeometryError> {
    let m = ambient.dim();
    let height = Expression::parse(phi, &coordinate_names(m - 1))
        .map_err(|e| GeometryError::Unsupported(format!("graph `{phi}`: {e}")))?;
    let mut down = vec![0.0; m];
    down[m - 1] = -1.0;
    Ok(ImmersedSubmanifold::new(
        format!("graph({phi})"),
        ambient,
        ChartMap::Graph { height },
        Window {
            lower: vec![-half_width; m - 1],
            upper: vec![half_width; m - 1],
        },
    )?
    .with_orientation(Orientation::Along(down)))
}

/// `x_m = |x|²/4`.
pub fn paraboloid_graph(ambient: AmbientSpace) -> Result<ImmersedSubmanifold, GeometryError> {
    let m = ambient.dim();
    let phi = (1..m).map(|i| format!("x{i}^2")).collect::<Vec<_>>().join(" + ");
    graph(ambient, &format!("({phi})/4"), 2.0)
}

/// The grim reaper `t = -log cos x` in the plane.
pub fn grim_curve(ambient: AmbientSpace) -> Result<ImmersedSubmanifold, GeometryError> {
    if ambient.dim() != 2 {
        return Err(GeometryError::Unsupported("grim curve lives in the plane".into()));
    }
    graph(ambient, "-log(cos(x1))", 1.4)
}

/// `(u cos v, u sin v, pitch v)` in ℝ³ for `u > 0.3`, away from the axis.
pub fn helicoid(ambient: AmbientSpace, pitch: f64) -> Result<ImmersedSubmanifold, GeometryError> {
    ImmersedSubmanifold::new(
        format!("helicoid(pitch={pitch})"),
        ambient,
        ChartMap::Helicoid { pitch },
        Window {
            lower: vec![0.3, -PI],
            upper: vec![3.0, PI],
        },
    )
}

/// The geodesic sphere `t = a` of a model, in its polar chart.
pub fn model_sphere(model: WeightedModel, a: f64) -> Result<ImmersedSubmanifold, GeometryError> {
    let m = model.dim();
    let (lower, upper) = angle_box(m - 1);
    Ok(ImmersedSubmanifold::new(
        format!("geodesic_sphere(a={a})"),
        AmbientSpace::model_chart(model),
        ChartMap::ModelSphere { radius: a, n: m - 1 },
        Window { lower, upper },
    )?
    .closed()
    .with_orientation(Orientation::AgainstRadial))
}

/// A submanifold of a model given by its polar-chart coordinates
/// `(t, θ1, …)` as expressions in `u1..un`.
pub fn model_components(
    model: WeightedModel,
    components: &[&str],
    window: Window,
) -> Result<ImmersedSubmanifold, GeometryError> {
    let n = window.lower.len();
    let names: Vec<String> = (1..=n).map(|i| format!("u{i}")).collect();
    let components = components
        .iter()
        .map(|c| {
            Expression::parse(c, &names).map_err(|e| GeometryError::Unsupported(format!("component `{c}`: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    ImmersedSubmanifold::new(
        format!("model_chart({})", components.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")),
        AmbientSpace::model_chart(model),
        ChartMap::Components { components },
        window,
    )
}

/// Random parameter points in the inner 80% of the domain box whose image
/// is at distance at least `pole_clearance` from the pole.
pub fn interior_points(p: &ImmersedSubmanifold, count: usize, seed: u64, pole_clearance: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = p.domain();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u: Vec<f64> = w
            .lower
            .iter()
            .zip(&w.upper)
            .map(|(&lo, &hi)| {
                let pad = 0.1 * (hi - lo);
                rng.random_range(lo + pad..hi - pad)
            })
            .collect();
        if p.ambient().r(&p.chart().eval(&u)) >= pole_clearance {
            out.push(u);
        }
    }
    out
}

/// The shapes used for identity sweeps: spheres, planes, cylinders,
/// paraboloid graphs and a helicoid in weighted ℝ³ (and a sphere in ℝ⁴),
/// plus geodesic spheres and chart-defined surfaces and curves in weighted
/// hyperbolic space. Each shape appears under the zero, Gaussian and cubic
/// power weights.
pub fn identity_suite() -> Vec<ImmersedSubmanifold> {
    let weights = [weights::zero(), weights::gaussian(), weights::power(0.5, 3.0)];
    let mut out = Vec::new();
    for f in &weights {
        let e3 = || radial_ambient(3, f.clone());
        let entries = [
            sphere(e3(), 1.3),
            sphere(radial_ambient(4, f.clone()), 1.1),
            hyperplane(e3(), &[0.3, -0.5, 0.8], 0.0),
            hyperplane(e3(), &[1.0, 1.0, 0.5], 0.7),
            coordinate_plane(e3(), 2),
            cylinder(e3(), 2, 1.0),
            paraboloid_graph(e3()),
            helicoid(e3(), 0.5),
        ];
        out.extend(entries.into_iter().map(|e| e.expect("catalog entry")));
        let model = WeightedModel::new(3, WarpingFunction::hyperbolic(-1.0).expect("kappa < 0"), f.clone())
            .expect("pole-regular weight");
        let angles = Window {
            lower: vec![0.3, 0.0],
            upper: vec![PI - 0.3, 2.0 * PI],
        };
        let chart_entries = [
            model_sphere(model.clone(), 1.2),
            model_components(
                model.clone(),
                &["u1", "u2", "1.1"],
                Window {
                    lower: vec![0.4, 0.3],
                    upper: vec![2.5, PI - 0.3],
                },
            ),
            model_components(model.clone(), &["1.2 + 0.3*sin(u1)*cos(u2)", "u1", "u2"], angles),
            model_components(
                model,
                &["u1", "1 + 0.2*u1", "0.5*u1"],
                Window {
                    lower: vec![0.5],
                    upper: vec![2.0],
                },
            ),
        ];
        out.extend(chart_entries.into_iter().map(|e| e.expect("catalog entry")));
    }
    out
}
