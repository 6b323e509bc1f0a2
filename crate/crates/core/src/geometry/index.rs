use std::f64::consts::PI;

use super::laplacian::field_gradient;
use super::{GeometryError, ImmersedSubmanifold};
use crate::verdict::Window;

const SUPPORT_TOL: f64 = 1e-10;
const FACE_SAMPLES: usize = 16;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Three-term recurrence for P_n and its derivative.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn check_support<F>(support: &Window, test: &F) -> Result<(), GeometryError>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let n = support.lower.len();
    for face in 0..n {
        for side in [support.lower[face], support.upper[face]] {
            let count = FACE_SAMPLES.pow((n - 1) as u32);
            for mut idx in 0..count {
                let u: Vec<f64> = (0..n)
                    .map(|d| {
                        if d == face {
                            return side;
                        }
                        let i = idx % FACE_SAMPLES;
                        idx /= FACE_SAMPLES;
                        let t = i as f64 / (FACE_SAMPLES - 1) as f64;
                        support.lower[d] + t * (support.upper[d] - support.lower[d])
                    })
                    .collect();
                let value = test(&u);
                if !(value.abs() <= SUPPORT_TOL) {
                    return Err(GeometryError::Support { u, value });
                }
            }
        }
    }
    Ok(())
}

/// `Q_h(u,u) = ∫ {|∇_P u|² - (Ric_h(N,N) + |σ|²) u²} da_h` over the
/// parameter box `support`, with `Ric_h(N,N) = -Hess h(N,N)` and
/// `da_h = e^h √det g du`, by an `nodes`-point Gauss-Legendre tensor rule.
///
/// The test must vanish on the boundary of `support`, unless the box is
/// the whole domain of a closed hypersurface.
pub fn index_form<F>(
    p: &ImmersedSubmanifold,
    test: &F,
    support: &Window,
    nodes: usize,
) -> Result<f64, GeometryError>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    if !p.ambient().is_euclidean() {
        return Err(GeometryError::Unsupported("index form needs a Euclidean ambient".into()));
    }
    if p.codim() != 1 {
        return Err(GeometryError::Unsupported("index form needs a hypersurface".into()));
    }
    let n = p.dim();
    if support.lower.len() != n {
        return Err(GeometryError::Arity {
            got: support.lower.len(),
            expected: n,
        });
    }
    if !(p.is_closed() && support == p.domain()) {
        check_support(support, test)?;
    }
    let (x, w) = gauss_legendre(nodes);
    let total = nodes.pow(n as u32);
    let mut sum = 0.0;
    for mut idx in 0..total {
        let mut u = vec![0.0; n];
        let mut weight = 1.0;
        for (d, ud) in u.iter_mut().enumerate() {
            let i = idx % nodes;
            idx /= nodes;
            let half = 0.5 * (support.upper[d] - support.lower[d]);
            *ud = support.lower[d] + half * (x[i] + 1.0);
            weight *= half * w[i];
        }
        let value = test(&u);
        let grad = field_gradient(&u, test);
        if value == 0.0 && grad.iter().all(|g| *g == 0.0) {
            continue;
        }
        let s = p.geometry_at(&u)?;
        let grad_sq = (grad.transpose() * &s.metric_inv * &grad)[(0, 0)];
        let hess = p.ambient().hess_h(&s.p).expect("Euclidean ambient");
        let nu = &s.normals[0];
        let ric = -(nu.transpose() * hess * nu)[(0, 0)];
        let density = p.ambient().h(&s.p).exp() * s.metric.determinant().sqrt();
        sum += weight * density * (grad_sq - (ric + s.sigma_sq) * value * value);
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let (x, w) = gauss_legendre(5);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        let m8: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((m8 - 2.0 / 9.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(40);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (x * 3.0).cos()).sum();
        assert!((s - 2.0 * 3f64.sin() / 3.0).abs() < 1e-14);
    }
}
