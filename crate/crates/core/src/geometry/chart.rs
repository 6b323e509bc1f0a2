//! Parametrisations `X: U ⊂ ℝⁿ → ambient coordinates` and their first and
//! second derivatives.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::expr::{Dual, Expression, Scalar};

type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A chart map. Closed-form kinds are differentiated with nested dual
/// numbers, `Numeric` with central differences.
#[derive(Clone)]
pub enum ChartMap {
    /// Round sphere of radius `radius` in ℝ^{n+1}, hyperspherical angles.
    Sphere { radius: f64, n: usize },
    /// `origin + Σ u_i basis_i`.
    Affine { origin: Vec<f64>, basis: Vec<Vec<f64>> },
    /// `S^{k-1}_radius × ℝ^{m-k}`: `k-1` angles followed by `m-k` linear
    /// coordinates.
    Cylinder { radius: f64, k: usize, m: usize },
    /// `(u, φ(u))` with `φ` an expression in `x1..xn`.
    Graph { height: Expression },
    /// `(u cos v, u sin v, pitch v)`.
    Helicoid { pitch: f64 },
    /// Component expressions in the parameters.
    Components { components: Vec<Expression> },
    /// The geodesic sphere `t = radius` in a model polar chart.
    ModelSphere { radius: f64, n: usize },
    /// An arbitrary map; derivatives by central differences.
    Numeric { n: usize, m: usize, map: MapFn },
}

impl fmt::Debug for ChartMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChartMap::Sphere { radius, n } => write!(f, "Sphere(radius={radius}, n={n})"),
            ChartMap::Affine { origin, basis } => write!(f, "Affine({origin:?}, {basis:?})"),
            ChartMap::Cylinder { radius, k, m } => {
                write!(f, "Cylinder(radius={radius}, k={k}, m={m})")
            }
            ChartMap::Graph { height } => write!(f, "Graph({height})"),
            ChartMap::Helicoid { pitch } => write!(f, "Helicoid(pitch={pitch})"),
            ChartMap::Components { components } => {
                let parts: Vec<String> = components.iter().map(|c| c.to_string()).collect();
                write!(f, "Components({})", parts.join(", "))
            }
            ChartMap::ModelSphere { radius, n } => write!(f, "ModelSphere(radius={radius}, n={n})"),
            ChartMap::Numeric { n, m, .. } => write!(f, "Numeric({n} -> {m})"),
        }
    }
}

/// Position, first derivatives (`m × n`) and component Hessians.
#[derive(Clone, Debug)]
pub struct ChartJet {
    pub x: Vec<f64>,
    pub d1: DMatrix<f64>,
    /// `d2[a][(i, j)] = ∂_i ∂_j X^a`
    pub d2: Vec<DMatrix<f64>>,
}

fn hyperspherical<S: Scalar>(radius: f64, angles: &[S]) -> Vec<S> {
    let n = angles.len();
    let mut out = Vec::with_capacity(n + 1);
    let mut prod = S::constant(radius);
    for a in angles {
        out.push(prod * a.cos());
        prod = prod * a.sin();
    }
    out.push(prod);
    out
}

impl ChartMap {
    pub fn numeric<F>(n: usize, m: usize, map: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        ChartMap::Numeric {
            n,
            m,
            map: Arc::new(map),
        }
    }

    /// The same map with derivatives taken by central differences.
    pub fn to_numeric(&self) -> Self {
        let me = self.clone();
        ChartMap::numeric(self.param_dim(), self.target_dim(), move |u| me.eval(u))
    }

    pub fn param_dim(&self) -> usize {
        match self {
            ChartMap::Sphere { n, .. } | ChartMap::ModelSphere { n, .. } => *n,
            ChartMap::Affine { basis, .. } => basis.len(),
            ChartMap::Cylinder { m, .. } => m - 1,
            ChartMap::Graph { height } => height.variables().len(),
            ChartMap::Helicoid { .. } => 2,
            ChartMap::Components { components } => {
                components.first().map_or(0, |c| c.variables().len())
            }
            ChartMap::Numeric { n, .. } => *n,
        }
    }

    pub fn target_dim(&self) -> usize {
        match self {
            ChartMap::Sphere { n, .. } | ChartMap::ModelSphere { n, .. } => n + 1,
            ChartMap::Affine { origin, .. } => origin.len(),
            ChartMap::Cylinder { m, .. } => *m,
            ChartMap::Graph { height } => height.variables().len() + 1,
            ChartMap::Helicoid { .. } => 3,
            ChartMap::Components { components } => components.len(),
            ChartMap::Numeric { m, .. } => *m,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, ChartMap::Numeric { .. })
    }

    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        match self {
            ChartMap::Numeric { map, .. } => map(u),
            _ => self.eval_generic(u),
        }
    }

    /// Closed-form evaluation. `Numeric` charts only accept `f64`, so for
    /// them this returns NaN.
    pub fn eval_generic<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let nan = || S::constant(f64::NAN);
        match self {
            ChartMap::Sphere { radius, .. } => hyperspherical(*radius, u),
            ChartMap::Affine { origin, basis } => origin
                .iter()
                .enumerate()
                .map(|(a, &o)| {
                    basis
                        .iter()
                        .zip(u)
                        .fold(S::constant(o), |acc, (b, &ui)| acc + ui.scale(b[a]))
                })
                .collect(),
            ChartMap::Cylinder { radius, k, .. } => {
                let mut out = hyperspherical(*radius, &u[..k - 1]);
                out.extend_from_slice(&u[k - 1..]);
                out
            }
            ChartMap::Graph { height } => {
                let mut out = u.to_vec();
                out.push(height.eval_generic(u).unwrap_or_else(|_| nan()));
                out
            }
            ChartMap::Helicoid { pitch } => {
                vec![u[0] * u[1].cos(), u[0] * u[1].sin(), u[1].scale(*pitch)]
            }
            ChartMap::Components { components } => components
                .iter()
                .map(|c| c.eval_generic(u).unwrap_or_else(|_| nan()))
                .collect(),
            ChartMap::ModelSphere { radius, .. } => {
                let mut out = vec![S::constant(*radius)];
                out.extend_from_slice(u);
                out
            }
            ChartMap::Numeric { m, .. } => vec![nan(); *m],
        }
    }

    /// Position and first derivatives.
    pub fn first(&self, u: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
        let n = u.len();
        let m = self.target_dim();
        let mut d1 = DMatrix::zeros(m, n);
        match self {
            ChartMap::Numeric { map, .. } => {
                let x = map(u);
                for i in 0..n {
                    let h = f64::EPSILON.cbrt() * (1.0 + u[i].abs());
                    let (mut up, mut um) = (u.to_vec(), u.to_vec());
                    up[i] += h;
                    um[i] -= h;
                    let (xp, xm) = (map(&up), map(&um));
                    for a in 0..m {
                        d1[(a, i)] = (xp[a] - xm[a]) / (up[i] - um[i]);
                    }
                }
                (x, d1)
            }
            _ => {
                let mut x = vec![0.0; m];
                for i in 0..n {
                    let seed: Vec<Dual> = (0..n)
                        .map(|k| Dual::new(u[k], if k == i { 1.0 } else { 0.0 }))
                        .collect();
                    let out = self.eval_generic(&seed);
                    for a in 0..m {
                        x[a] = out[a].re;
                        d1[(a, i)] = out[a].eps;
                    }
                }
                (x, d1)
            }
        }
    }

    pub fn jet(&self, u: &[f64]) -> ChartJet {
        let n = u.len();
        let m = self.target_dim();
        let mut d2 = vec![DMatrix::zeros(n, n); m];
        match self {
            ChartMap::Numeric { map, .. } => {
                let (x, d1) = self.first(u);
                let f0 = map(u);
                for i in 0..n {
                    for j in i..n {
                        let hi = f64::EPSILON.powf(0.25) * (1.0 + u[i].abs());
                        let hj = f64::EPSILON.powf(0.25) * (1.0 + u[j].abs());
                        let at = |si: f64, sj: f64| {
                            let mut v = u.to_vec();
                            v[i] += si * hi;
                            v[j] += sj * hj;
                            map(&v)
                        };
                        for a in 0..m {
                            let val = if i == j {
                                (at(1.0, 0.0)[a] - 2.0 * f0[a] + at(-1.0, 0.0)[a]) / (hi * hi)
                            } else {
                                (at(1.0, 1.0)[a] - at(1.0, -1.0)[a] - at(-1.0, 1.0)[a]
                                    + at(-1.0, -1.0)[a])
                                    / (4.0 * hi * hj)
                            };
                            d2[a][(i, j)] = val;
                            d2[a][(j, i)] = val;
                        }
                    }
                }
                ChartJet { x, d1, d2 }
            }
            _ => {
                let mut x = vec![0.0; m];
                let mut d1 = DMatrix::zeros(m, n);
                for i in 0..n {
                    for j in i..n {
                        let seed: Vec<Dual<Dual<f64>>> = (0..n)
                            .map(|k| {
                                let di = if k == i { 1.0 } else { 0.0 };
                                let dj = if k == j { 1.0 } else { 0.0 };
                                Dual::new(Dual::new(u[k], di), Dual::new(dj, 0.0))
                            })
                            .collect();
                        let out = self.eval_generic(&seed);
                        for a in 0..m {
                            x[a] = out[a].re.re;
                            d1[(a, i)] = out[a].re.eps;
                            d1[(a, j)] = out[a].eps.re;
                            d2[a][(i, j)] = out[a].eps.eps;
                            d2[a][(j, i)] = out[a].eps.eps;
                        }
                    }
                }
                ChartJet { x, d1, d2 }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_chart_lies_on_sphere() {
        let c = ChartMap::Sphere { radius: 2.0, n: 3 };
        let x = c.eval(&[0.4, 1.2, 2.5]);
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((r - 2.0).abs() < 1e-14);
    }

    #[test]
    fn dual_and_numeric_jets_agree() {
        let g = Expression::parse("x1^2*sin(x2) + x2^3/3", &["x1", "x2"]).unwrap();
        let c = ChartMap::Graph { height: g };
        let num = c.to_numeric();
        let u = [0.7, -0.4];
        let (a, b) = (c.jet(&u), num.jet(&u));
        assert!((&a.d1 - &b.d1).norm() < 1e-9);
        for k in 0..3 {
            assert!((&a.d2[k] - &b.d2[k]).norm() < 1e-6, "{k}: {} {}", a.d2[k], b.d2[k]);
        }
    }

    #[test]
    fn helicoid_mixed_derivative() {
        let c = ChartMap::Helicoid { pitch: 0.5 };
        let j = c.jet(&[1.5, 0.3]);
        assert!((j.d2[0][(0, 1)] + 0.3f64.sin()).abs() < 1e-15);
        assert!((j.d2[1][(1, 1)] + 1.5 * 0.3f64.sin()).abs() < 1e-15);
        assert_eq!(j.d1[(2, 1)], 0.5);
    }
}
