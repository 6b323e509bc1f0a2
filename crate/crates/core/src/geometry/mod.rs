//! Numerical geometry of immersed submanifolds in weighted ambients.
//!
//! Sign conventions: `nH̄ = Σ_α (g^{ij} σ^α_ij) N_α` and
//! `H̄^h = nH̄ - (∇h)^⊥`. A sphere `S_a ⊂ ℝ^m` with inward normal has
//! `nH̄ = -(n/a) ∇r`.

mod ambient;
pub mod catalog;
mod chart;
mod identities;
mod index;
pub(crate) mod laplacian;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::verdict::Window;

pub use ambient::{AmbientSpace, AmbientWeight};
pub use chart::{ChartJet, ChartMap};
pub use identities::{
    AngleIdentity, IdentityCheck, ProfileSense, angle_function_laplacian,
    cylinder_distance_laplacian, height_laplacian, lemma31_residual, radial_balance,
    radial_hypothesis_profile,
};
pub use index::{gauss_legendre, index_form};
pub use laplacian::weighted_laplacian;

const MAX_CONDITION: f64 = 1e12;
const PARALLEL_SKIP: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("induced metric is degenerate at u = {u:?} (condition number {condition:e})")]
    Degenerate { u: Vec<f64>, condition: f64 },
    #[error("chart maps into ℝ^{chart} but the ambient has dimension {ambient}")]
    DimensionMismatch { chart: usize, ambient: usize },
    #[error("parameter point has {got} coordinates, expected {expected}")]
    Arity { got: usize, expected: usize },
    #[error("non-finite chart value at u = {0:?}")]
    NonFinite(Vec<f64>),
    #[error("point X(u) is at the pole, u = {0:?}")]
    AtPole(Vec<f64>),
    #[error("test function is {value:e} on the boundary of the support box at u = {u:?}")]
    Support { u: Vec<f64>, value: f64 },
    #[error("{0}")]
    Unsupported(String),
}

/// How the first normal of a hypersurface is signed.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Orientation {
    /// Whatever axis-seeded Gram-Schmidt produces.
    #[default]
    Seeded,
    /// `⟨N, v⟩ > 0` for the given ambient vector.
    Along(Vec<f64>),
    /// `⟨N, ∇r⟩ < 0`.
    AgainstRadial,
    /// `⟨N, (x, 0)⟩ < 0` for the splitting `ℝ^k × ℝ^{m-k}`.
    AgainstHorizontal(usize),
}

#[derive(Clone, Debug)]
pub struct ImmersedSubmanifold {
    name: String,
    ambient: AmbientSpace,
    chart: ChartMap,
    domain: Window,
    closed: bool,
    orientation: Orientation,
}

/// Everything `geometry_at` computes at one parameter point.
#[derive(Clone, Debug)]
pub struct GeometrySample {
    pub u: Vec<f64>,
    pub p: Vec<f64>,
    /// Columns `∂_i X`.
    pub tangents: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    pub metric_inv: DMatrix<f64>,
    pub condition: f64,
    pub normals: Vec<DVector<f64>>,
    /// `second_fundamental[α][(i, j)] = ⟨∇_{X_i} X_j, N_α⟩`
    pub second_fundamental: Vec<DMatrix<f64>>,
    /// `Σ_α |σ^α|²` with indices raised by the induced metric.
    pub sigma_sq: f64,
    pub mean_curvature_vector: DVector<f64>,
    pub weighted_mean_curvature_vector: DVector<f64>,
    pub grad_h: DVector<f64>,
    pub grad_r: DVector<f64>,
    pub r: f64,
    pub grad_r_tangent_sq: f64,
    pub grad_r_normal_sq: f64,
    /// Diagonal of the ambient metric at `p`.
    pub ambient_metric: DVector<f64>,
}

impl GeometrySample {
    /// Ambient inner product at `p`.
    pub fn inner(&self, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
        a.component_mul(&self.ambient_metric).dot(b)
    }

    /// `H^h = ⟨H̄^h, N⟩` for a hypersurface.
    pub fn weighted_mean_curvature(&self) -> Option<f64> {
        (self.normals.len() == 1)
            .then(|| self.inner(&self.weighted_mean_curvature_vector, &self.normals[0]))
    }

    /// `(m-1) H_P = ⟨nH̄, N⟩` for a hypersurface.
    pub fn mean_curvature(&self) -> Option<f64> {
        (self.normals.len() == 1).then(|| self.inner(&self.mean_curvature_vector, &self.normals[0]))
    }

    /// Tangential part `Σ g^{ij} ⟨v, X_i⟩ X_j`.
    pub fn tangential(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.metric.nrows();
        let c = DVector::from_iterator(n, (0..n).map(|i| self.inner(v, &self.tangents.column(i).into_owned())));
        &self.tangents * (&self.metric_inv * c)
    }

    /// `Σ_α ⟨v, N_α⟩ N_α`
    pub fn normal_part(&self, v: &DVector<f64>) -> DVector<f64> {
        self.normals
            .iter()
            .fold(DVector::zeros(v.len()), |acc, nu| acc + nu * self.inner(v, nu))
    }
}

impl ImmersedSubmanifold {
    pub fn new(
        name: impl Into<String>,
        ambient: AmbientSpace,
        chart: ChartMap,
        domain: Window,
    ) -> Result<Self, GeometryError> {
        if chart.target_dim() != ambient.dim() {
            return Err(GeometryError::DimensionMismatch {
                chart: chart.target_dim(),
                ambient: ambient.dim(),
            });
        }
        if domain.lower.len() != chart.param_dim() || domain.upper.len() != chart.param_dim() {
            return Err(GeometryError::Arity {
                got: domain.lower.len(),
                expected: chart.param_dim(),
            });
        }
        Ok(Self {
            name: name.into(),
            ambient,
            chart,
            domain,
            closed: false,
            orientation: Orientation::Seeded,
        })
    }

    /// Marks the domain box as covering the whole closed submanifold.
    pub fn closed(mut self) -> Self {
        self.closed = true;
        self
    }

    pub fn with_orientation(mut self, o: Orientation) -> Self {
        self.orientation = o;
        self
    }

    pub fn with_ambient(mut self, ambient: AmbientSpace) -> Result<Self, GeometryError> {
        if ambient.dim() != self.ambient.dim() {
            return Err(GeometryError::DimensionMismatch {
                chart: self.chart.target_dim(),
                ambient: ambient.dim(),
            });
        }
        self.ambient = ambient;
        Ok(self)
    }

    /// Same submanifold with a finite-difference chart.
    pub fn to_numeric(mut self) -> Self {
        self.chart = self.chart.to_numeric();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient(&self) -> &AmbientSpace {
        &self.ambient
    }

    pub fn chart(&self) -> &ChartMap {
        &self.chart
    }

    pub fn domain(&self) -> &Window {
        &self.domain
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        self.chart.param_dim()
    }

    pub fn codim(&self) -> usize {
        self.ambient.dim() - self.dim()
    }

    fn check_arity(&self, u: &[f64]) -> Result<(), GeometryError> {
        if u.len() != self.dim() {
            return Err(GeometryError::Arity {
                got: u.len(),
                expected: self.dim(),
            });
        }
        Ok(())
    }

    /// Induced metric `g_ij = ⟨X_i, X_j⟩` from first derivatives only.
    pub fn induced_metric(&self, u: &[f64]) -> DMatrix<f64> {
        let (x, d1) = self.chart.first(u);
        gram(&self.ambient.metric_diag(&x), &d1)
    }

    /// The oriented normal frame at `u` from first derivatives only.
    pub fn normal_frame(&self, u: &[f64]) -> Result<Vec<DVector<f64>>, GeometryError> {
        let (x, d1) = self.chart.first(u);
        let seeds: Vec<usize> = (0..self.ambient.dim()).collect();
        self.frame(u, &x, &d1, &seeds)
    }

    fn frame(
        &self,
        u: &[f64],
        x: &[f64],
        d1: &DMatrix<f64>,
        seeds: &[usize],
    ) -> Result<Vec<DVector<f64>>, GeometryError> {
        let m = self.ambient.dim();
        let diag = self.ambient.metric_diag(x);
        let ip = |a: &DVector<f64>, b: &DVector<f64>| a.component_mul(&diag).dot(b);
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m);
        for i in 0..d1.ncols() {
            let mut v = d1.column(i).into_owned();
            orthogonalize(&mut v, &basis, &ip);
            let norm = ip(&v, &v).sqrt();
            if !(norm > 0.0) {
                return Err(GeometryError::Degenerate {
                    u: u.to_vec(),
                    condition: f64::INFINITY,
                });
            }
            basis.push(v / norm);
        }
        let n = basis.len();
        for &s in seeds {
            if basis.len() == m {
                break;
            }
            let mut v = DVector::zeros(m);
            v[s] = 1.0 / diag[s].sqrt();
            orthogonalize(&mut v, &basis, &ip);
            let norm = ip(&v, &v).sqrt();
            if norm < PARALLEL_SKIP {
                continue;
            }
            basis.push(v / norm);
        }
        let mut normals = basis.split_off(n);
        if let Some(first) = normals.first_mut() {
            let reference = match &self.orientation {
                Orientation::Seeded => None,
                Orientation::Along(v) => Some(DVector::from_column_slice(v)),
                Orientation::AgainstRadial => Some(-self.ambient.grad_r(x)),
                Orientation::AgainstHorizontal(k) => {
                    let mut v = DVector::zeros(m);
                    for i in 0..*k {
                        v[i] = -x[i];
                    }
                    Some(v)
                }
            };
            if let Some(r) = reference {
                if ip(first, &r) < 0.0 {
                    *first = -first.clone();
                }
            }
        }
        Ok(normals)
    }

    pub fn geometry_at(&self, u: &[f64]) -> Result<GeometrySample, GeometryError> {
        let seeds: Vec<usize> = (0..self.ambient.dim()).collect();
        self.geometry_with_seeds(u, &seeds)
    }

    /// `geometry_at` with a custom order of the Gram-Schmidt seed axes.
    pub fn geometry_with_seeds(
        &self,
        u: &[f64],
        seeds: &[usize],
    ) -> Result<GeometrySample, GeometryError> {
        self.check_arity(u)?;
        let m = self.ambient.dim();
        let n = self.dim();
        let jet = self.chart.jet(u);
        if jet.x.iter().any(|v| !v.is_finite()) || jet.d1.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite(u.to_vec()));
        }
        let x = &jet.x;
        let diag = self.ambient.metric_diag(x);
        let metric = gram(&diag, &jet.d1);
        let eig = SymmetricEigen::new(metric.clone());
        let (lo, hi) = eig
            .eigenvalues
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(GeometryError::Degenerate {
                u: u.to_vec(),
                condition,
            });
        }
        let metric_inv = metric.clone().try_inverse().ok_or(GeometryError::Degenerate {
            u: u.to_vec(),
            condition,
        })?;
        let normals = self.frame(u, x, &jet.d1, seeds)?;
        let ip = |a: &DVector<f64>, b: &DVector<f64>| a.component_mul(&diag).dot(b);

        let gamma = self.ambient.christoffel(x);
        // B_ij = X_ij + Γ(X_i, X_j)
        let mut b = vec![vec![DVector::zeros(m); n]; n];
        for i in 0..n {
            for j in i..n {
                let mut v = DVector::from_iterator(m, jet.d2.iter().map(|h| h[(i, j)]));
                if !self.ambient.is_euclidean() {
                    let xi = jet.d1.column(i);
                    let xj = jet.d1.column(j);
                    for a in 0..m {
                        v[a] += (xi.transpose() * &gamma[a] * xj)[(0, 0)];
                    }
                }
                b[j][i] = v.clone();
                b[i][j] = v;
            }
        }
        let second_fundamental: Vec<DMatrix<f64>> = normals
            .iter()
            .map(|nu| DMatrix::from_fn(n, n, |i, j| ip(&b[i][j], nu)))
            .collect();
        let sigma_sq = second_fundamental
            .iter()
            .map(|s| (&metric_inv * s * &metric_inv).component_mul(s).sum())
            .sum();
        let mut mean_curvature_vector = DVector::zeros(m);
        for (nu, s) in normals.iter().zip(&second_fundamental) {
            mean_curvature_vector += nu * metric_inv.component_mul(s).sum();
        }
        let grad_h = self.ambient.grad_h(x);
        let mut grad_h_perp = DVector::zeros(m);
        let mut grad_r_normal_sq = 0.0;
        let r = self.ambient.r(x);
        let grad_r = self.ambient.grad_r(x);
        for nu in &normals {
            grad_h_perp += nu * ip(&grad_h, nu);
            grad_r_normal_sq += ip(&grad_r, nu).powi(2);
        }
        let weighted_mean_curvature_vector = &mean_curvature_vector - grad_h_perp;
        // |∇_P r|² = g^{ij} ⟨∇r, X_i⟩⟨∇r, X_j⟩
        let dr = DVector::from_iterator(n, (0..n).map(|i| ip(&grad_r, &jet.d1.column(i).into_owned())));
        let grad_r_tangent_sq = (dr.transpose() * &metric_inv * &dr)[(0, 0)];

        Ok(GeometrySample {
            u: u.to_vec(),
            p: jet.x.clone(),
            tangents: jet.d1,
            metric,
            metric_inv,
            condition,
            normals,
            second_fundamental,
            sigma_sq,
            mean_curvature_vector,
            weighted_mean_curvature_vector,
            grad_h,
            grad_r,
            r,
            grad_r_tangent_sq,
            grad_r_normal_sq,
            ambient_metric: diag,
        })
    }
}

fn gram(diag: &DVector<f64>, d1: &DMatrix<f64>) -> DMatrix<f64> {
    let weighted = DMatrix::from_fn(d1.nrows(), d1.ncols(), |a, i| d1[(a, i)] * diag[a]);
    let g = d1.transpose() * weighted;
    (&g + g.transpose()) * 0.5
}

fn orthogonalize<F>(v: &mut DVector<f64>, basis: &[DVector<f64>], ip: &F)
where
    F: Fn(&DVector<f64>, &DVector<f64>) -> f64,
{
    // Two passes keep the frame orthogonal to rounding.
    for _ in 0..2 {
        for e in basis {
            let c = ip(v, e);
            *v -= e * c;
        }
    }
}
