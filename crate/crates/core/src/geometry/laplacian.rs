use nalgebra::{DMatrix, DVector};

use super::{GeometryError, ImmersedSubmanifold};

const STEP: f64 = 2e-3;

fn step(u: f64) -> f64 {
    STEP * (1.0 + u.abs())
}

fn shifted(u: &[f64], moves: &[(usize, f64)]) -> Vec<f64> {
    let mut v = u.to_vec();
    for &(i, d) in moves {
        v[i] += d;
    }
    v
}

/// Central differences at `h` and `h/2` combined by Richardson
/// extrapolation.
fn richardson<T, F>(h: f64, d: F) -> T
where
    F: Fn(f64) -> T,
    T: std::ops::Mul<f64, Output = T> + std::ops::Sub<Output = T>,
{
    (d(0.5 * h) * 4.0 - d(h)) * (1.0 / 3.0)
}

/// Gradient of a scalar field on the parameter domain.
pub(crate) fn field_gradient<F>(u: &[f64], field: &F) -> DVector<f64>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    DVector::from_iterator(
        u.len(),
        (0..u.len()).map(|i| {
            richardson(step(u[i]), |h| {
                (field(&shifted(u, &[(i, h)])) - field(&shifted(u, &[(i, -h)]))) / (2.0 * h)
            })
        }),
    )
}

/// Gradient and Hessian of a scalar field on the parameter domain.
pub(crate) fn field_derivatives<F>(u: &[f64], field: &F) -> (DVector<f64>, DMatrix<f64>)
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = u.len();
    let f0 = field(u);
    let grad = field_gradient(u, field);
    let mut hess = DMatrix::zeros(n, n);
    for i in 0..n {
        let hi = step(u[i]);
        hess[(i, i)] = richardson(hi, |h| {
            (field(&shifted(u, &[(i, h)])) - 2.0 * f0 + field(&shifted(u, &[(i, -h)]))) / (h * h)
        });
        for j in 0..i {
            let hj = step(u[j]);
            let r = hj / hi;
            let v = richardson(hi, |h| {
                let k = h * r;
                (field(&shifted(u, &[(i, h), (j, k)])) - field(&shifted(u, &[(i, h), (j, -k)]))
                    - field(&shifted(u, &[(i, -h), (j, k)]))
                    + field(&shifted(u, &[(i, -h), (j, -k)])))
                    / (4.0 * h * k)
            });
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    (grad, hess)
}

/// Intrinsic Christoffel symbols `Γ^k_ij` of the induced metric, from
/// differences of the metric.
pub(crate) fn intrinsic_christoffel(
    p: &ImmersedSubmanifold,
    u: &[f64],
    metric_inv: &DMatrix<f64>,
) -> Vec<DMatrix<f64>> {
    let n = u.len();
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|k| {
            richardson(step(u[k]), |h| {
                (p.induced_metric(&shifted(u, &[(k, h)])) - p.induced_metric(&shifted(u, &[(k, -h)])))
                    / (2.0 * h)
            })
        })
        .collect();
    (0..n)
        .map(|k| {
            DMatrix::from_fn(n, n, |i, j| {
                (0..n)
                    .map(|l| 0.5 * metric_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]))
                    .sum()
            })
        })
        .collect()
}

/// `Δ^h_P u = g^{ij}(∂_ij u - Γ^k_ij ∂_k u) + g^{ij} ∂_i(h∘X) ∂_j u`.
pub fn weighted_laplacian<F>(p: &ImmersedSubmanifold, u: &[f64], field: &F) -> Result<f64, GeometryError>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let s = p.geometry_at(u)?;
    let n = u.len();
    let (grad, hess) = field_derivatives(u, field);
    let gamma = intrinsic_christoffel(p, u, &s.metric_inv);
    let mut lap = 0.0;
    for i in 0..n {
        for j in 0..n {
            let conn: f64 = (0..n).map(|k| gamma[k][(i, j)] * grad[k]).sum();
            lap += s.metric_inv[(i, j)] * (hess[(i, j)] - conn);
        }
    }
    let dh = DVector::from_iterator(
        n,
        (0..n).map(|i| s.inner(&s.grad_h, &s.tangents.column(i).into_owned())),
    );
    let drift = (dh.transpose() * &s.metric_inv * &grad)[(0, 0)];
    Ok(lap + drift)
}
