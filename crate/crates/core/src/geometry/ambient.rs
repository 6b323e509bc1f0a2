//! Ambient spaces: weighted Euclidean space and the polar chart of a
//! weighted model.

use nalgebra::{DMatrix, DVector};

use crate::expr::{Dual, Expression, Scalar};
use crate::model::WeightedModel;
use crate::radial::RadialProfile;

/// Log-density `h` on Euclidean space: an optional radial part `f(|x|)`
/// plus an optional expression in `x1..xm`.
#[derive(Clone, Debug, Default)]
pub struct AmbientWeight {
    pub radial: Option<RadialProfile>,
    pub extra: Option<Expression>,
}

impl AmbientWeight {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn radial(f: RadialProfile) -> Self {
        Self {
            radial: Some(f),
            extra: None,
        }
    }

    pub fn expression(e: Expression) -> Self {
        Self {
            radial: None,
            extra: Some(e),
        }
    }

    pub fn with_extra(mut self, e: Expression) -> Self {
        self.extra = Some(e);
        self
    }

    fn is_zero(&self) -> bool {
        self.radial.is_none() && self.extra.is_none()
    }
}

#[derive(Clone, Debug)]
pub enum AmbientSpace {
    Euclidean { m: usize, weight: AmbientWeight },
    /// Coordinates `(t, θ1, …, θ_{m-1})` with metric
    /// `dt² + w(t)² (dθ1² + sin²θ1 dθ2² + …)` and weight `f(t)`.
    ModelChart { model: WeightedModel },
}

fn nan_on_err<S: Scalar>(r: Result<S, crate::expr::DomainError>) -> S {
    r.unwrap_or_else(|_| S::constant(f64::NAN))
}

impl AmbientSpace {
    pub fn euclidean(m: usize, weight: AmbientWeight) -> Self {
        AmbientSpace::Euclidean { m, weight }
    }

    pub fn model_chart(model: WeightedModel) -> Self {
        AmbientSpace::ModelChart { model }
    }

    pub fn dim(&self) -> usize {
        match self {
            AmbientSpace::Euclidean { m, .. } => *m,
            AmbientSpace::ModelChart { model } => model.dim(),
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self, AmbientSpace::Euclidean { .. })
    }

    /// True when the weight is identically zero.
    pub fn is_unweighted(&self) -> bool {
        match self {
            AmbientSpace::Euclidean { weight, .. } => weight.is_zero(),
            AmbientSpace::ModelChart { .. } => false,
        }
    }

    /// Diagonal of the metric at `x`. Both supported ambients are diagonal.
    pub fn metric_diag(&self, x: &[f64]) -> DVector<f64> {
        match self {
            AmbientSpace::Euclidean { m, .. } => DVector::from_element(*m, 1.0),
            AmbientSpace::ModelChart { model } => {
                let m = model.dim();
                let w = model.warping().value(x[0]);
                let mut g = DVector::from_element(m, w * w);
                g[0] = 1.0;
                let mut s = 1.0;
                for a in 2..m {
                    s *= x[a - 1].sin().powi(2);
                    g[a] *= s;
                }
                g
            }
        }
    }

    pub fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.metric_diag(x))
    }

    pub fn inner(&self, x: &[f64], a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        match self {
            AmbientSpace::Euclidean { .. } => a.dot(b),
            AmbientSpace::ModelChart { .. } => {
                let g = self.metric_diag(x);
                (0..a.len()).map(|i| g[i] * a[i] * b[i]).sum()
            }
        }
    }

    /// Christoffel symbols, `gamma[k][(i, j)] = Γ^k_ij`.
    pub fn christoffel(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let m = self.dim();
        let mut gamma = vec![DMatrix::zeros(m, m); m];
        let AmbientSpace::ModelChart { model } = self else {
            return gamma;
        };
        let j = model.warping().jet(x[0]);
        let g = self.metric_diag(x);
        // dlog[i][a] = ∂_i G_a / G_a
        let mut dlog = DMatrix::zeros(m, m);
        for a in 1..m {
            dlog[(0, a)] = 2.0 * j.d1 / j.value;
            for b in 1..a {
                let th = x[b];
                dlog[(b, a)] = 2.0 * th.cos() / th.sin();
            }
        }
        for a in 0..m {
            for b in 0..m {
                let d = 0.5 * dlog[(b, a)];
                if d == 0.0 {
                    continue;
                }
                // Γ^a_ab = Γ^a_ba = ½ ∂_b G_a / G_a
                gamma[a][(a, b)] += d;
                if a != b {
                    gamma[a][(b, a)] += d;
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                if a == b {
                    continue;
                }
                // Γ^a_bb = -½ ∂_a G_b / G_a
                let d = dlog[(a, b)];
                if d != 0.0 {
                    gamma[a][(b, b)] -= 0.5 * d * g[b] / g[a];
                }
            }
        }
        gamma
    }

    /// Distance to the pole.
    pub fn r(&self, x: &[f64]) -> f64 {
        match self {
            AmbientSpace::Euclidean { .. } => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            AmbientSpace::ModelChart { .. } => x[0],
        }
    }

    /// Gradient of the distance to the pole (contravariant components).
    pub fn grad_r(&self, x: &[f64]) -> DVector<f64> {
        let m = self.dim();
        match self {
            AmbientSpace::Euclidean { .. } => {
                let r = self.r(x);
                DVector::from_iterator(m, x.iter().map(|v| v / r))
            }
            AmbientSpace::ModelChart { .. } => {
                let mut v = DVector::zeros(m);
                v[0] = 1.0;
                v
            }
        }
    }

    /// Mean curvature `w'/w` of the distance sphere of radius `t`.
    pub fn sphere_mean_curvature(&self, t: f64) -> f64 {
        match self {
            AmbientSpace::Euclidean { .. } => 1.0 / t,
            AmbientSpace::ModelChart { model } => {
                let j = model.warping().jet(t);
                j.d1 / j.value
            }
        }
    }

    /// The log-density `h` evaluated over any scalar type.
    pub fn h_generic<S: Scalar>(&self, x: &[S]) -> S {
        match self {
            AmbientSpace::Euclidean { weight, .. } => {
                let mut total = S::constant(0.0);
                if let Some(f) = &weight.radial {
                    let r2 = x.iter().fold(S::constant(0.0), |acc, &v| acc + v * v);
                    total = total + radial_generic(f, r2);
                }
                if let Some(e) = &weight.extra {
                    total = total + nan_on_err(e.eval_generic(x));
                }
                total
            }
            AmbientSpace::ModelChart { model } => radial_of_t(model.weight(), x[0]),
        }
    }

    pub fn h(&self, x: &[f64]) -> f64 {
        self.h_generic(x)
    }

    /// Gradient of `h` (contravariant components).
    pub fn grad_h(&self, x: &[f64]) -> DVector<f64> {
        let m = self.dim();
        match self {
            AmbientSpace::Euclidean { weight, .. } => {
                let mut g = DVector::zeros(m);
                if let Some(f) = &weight.radial {
                    let r = self.r(x);
                    if r > 0.0 {
                        let fp = f.d1(r);
                        for i in 0..m {
                            g[i] += fp * x[i] / r;
                        }
                    }
                }
                if let Some(e) = &weight.extra {
                    for i in 0..m {
                        let dir: Vec<f64> = (0..m).map(|k| if k == i { 1.0 } else { 0.0 }).collect();
                        g[i] += e.eval_dual(x, &dir).map(|d| d.derivative()).unwrap_or(f64::NAN);
                    }
                }
                g
            }
            AmbientSpace::ModelChart { model } => {
                let mut g = DVector::zeros(m);
                g[0] = model.weight().d1(x[0]);
                g
            }
        }
    }

    /// Euclidean Hessian of `h`. `None` for model charts.
    pub fn hess_h(&self, x: &[f64]) -> Option<DMatrix<f64>> {
        let AmbientSpace::Euclidean { m, weight } = self else {
            return None;
        };
        let m = *m;
        let mut hess = DMatrix::zeros(m, m);
        if let Some(f) = &weight.radial {
            let r = self.r(x);
            let j = f.jet(r);
            if r > 1e-300 {
                let p = DVector::from_iterator(m, x.iter().map(|v| v / r));
                let pp = &p * p.transpose();
                hess += &pp * j.d2 + (DMatrix::identity(m, m) - &pp) * (j.d1 / r);
            } else {
                hess += DMatrix::identity(m, m) * f.d2(0.0);
            }
        }
        if let Some(e) = &weight.extra {
            for i in 0..m {
                for k in i..m {
                    let seed: Vec<Dual<Dual<f64>>> = (0..m)
                        .map(|c| {
                            let di = if c == i { 1.0 } else { 0.0 };
                            let dk = if c == k { 1.0 } else { 0.0 };
                            Dual::new(Dual::new(x[c], di), Dual::new(dk, 0.0))
                        })
                        .collect();
                    let v = e.eval_generic(&seed).map(|o| o.eps.eps).unwrap_or(f64::NAN);
                    hess[(i, k)] += v;
                    if i != k {
                        hess[(k, i)] += v;
                    }
                }
            }
        }
        Some(hess)
    }
}

/// `f(sqrt(r2))` over a generic scalar, using the profile jet for the
/// chain rule. Exact to second order, which is all any caller differentiates.
fn radial_generic<S: Scalar>(f: &RadialProfile, r2: S) -> S {
    let r = r2.sqrt();
    radial_of_t(f, r)
}

fn radial_of_t<S: Scalar>(f: &RadialProfile, t: S) -> S {
    let t0 = t.re();
    let j = f.jet(t0);
    let dt = t - S::constant(t0);
    // Second-order Taylor model around the real part: exact value and
    // first two derivatives through any dual nesting of depth <= 2.
    S::constant(j.value) + dt.scale(j.d1) + (dt * dt).scale(0.5 * j.d2)
}
