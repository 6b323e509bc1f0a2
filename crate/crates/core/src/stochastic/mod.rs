//! Monte Carlo checks of capacity potentials through the diffusion whose
//! generator is the weighted Laplacian of a submanifold.
//!
//! Paths follow Euler–Maruyama in the chart with drift
//! `b^k = -g^{ij}Γ^k_ij + g^{kj}∂_j(h∘X)` and diffusion `sqrt(2 g^{-1})`.
//! A Brownian-bridge test catches boundary crossings between steps.

use std::borrow::Cow;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::criteria::{ComparisonSetup, CriteriaError};
use crate::geometry::laplacian::{field_gradient, intrinsic_christoffel};
use crate::geometry::{weighted_laplacian, AmbientSpace, ChartMap, GeometryError, ImmersedSubmanifold};
use crate::model::ModelError;
use crate::verdict::{Criterion, Outcome, Verdict};

const DEFAULT_MAX_STEPS: usize = 2_000_000;
const COARSE_FRACTION: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum StochasticError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Criteria(#[from] CriteriaError),
    #[error("{0}")]
    Invalid(String),
    #[error("comparison refused: {0}")]
    Refused(String),
}

type Result<T> = std::result::Result<T, StochasticError>;

/// A submanifold, a step size policy and a master seed.
#[derive(Clone, Debug)]
pub struct DiffusionSpec {
    p: ImmersedSubmanifold,
    seed: u64,
    dt: Option<f64>,
    max_steps: usize,
}

impl DiffusionSpec {
    pub fn new(p: ImmersedSubmanifold, seed: u64) -> Self {
        Self {
            p,
            seed,
            dt: None,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    /// Fixed step; the default is `1e-4 (R - ρ)²`.
    pub fn with_step(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn with_max_steps(mut self, n: usize) -> Self {
        self.max_steps = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn submanifold(&self) -> &ImmersedSubmanifold {
        &self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn step_for(&self, rho: f64, big_r: f64) -> f64 {
        self.dt.unwrap_or(1e-4 * (big_r - rho).powi(2))
    }
}

/// Drift, diffusion factor and the differential of `r` at a point.
struct Local<'e> {
    drift: DVector<f64>,
    sigma: Cow<'e, DMatrix<f64>>,
    dr: DVector<f64>,
    ginv: Cow<'e, DMatrix<f64>>,
}

fn sqrt_two_inverse(ginv: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(ginv.clone());
    if eig.eigenvalues.iter().any(|&l| !(l > 0.0)) {
        return Err(StochasticError::Invalid("induced metric is not positive definite".into()));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| (2.0 * l).sqrt()));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Affine charts in Euclidean space have a constant metric and no
/// Christoffel symbols; everything else goes through the general path.
#[allow(clippy::large_enum_variant)]
enum Engine<'a> {
    Affine {
        p: &'a ImmersedSubmanifold,
        origin: &'a [f64],
        basis: DMatrix<f64>,
        ginv: DMatrix<f64>,
        sigma: DMatrix<f64>,
        /// `g^{-1} Bᵀ`, taking `∇h` to the drift.
        drift_map: DMatrix<f64>,
        /// `B g^{-1} Bᵀ`, orthogonal projection onto the tangent space.
        proj: DMatrix<f64>,
    },
    General {
        p: &'a ImmersedSubmanifold,
    },
}

impl<'a> Engine<'a> {
    fn new(p: &'a ImmersedSubmanifold) -> Result<Self> {
        match (p.chart(), p.ambient().is_euclidean()) {
            (ChartMap::Affine { origin, basis }, true) => {
                let m = origin.len();
                let b = DMatrix::from_fn(m, basis.len(), |i, j| basis[j][i]);
                let ginv = (b.transpose() * &b)
                    .try_inverse()
                    .ok_or_else(|| StochasticError::Invalid("affine basis is degenerate".into()))?;
                let sigma = sqrt_two_inverse(&ginv)?;
                let drift_map = &ginv * b.transpose();
                let proj = &b * &drift_map;
                Ok(Engine::Affine {
                    p,
                    origin,
                    basis: b,
                    ginv,
                    sigma,
                    drift_map,
                    proj,
                })
            }
            _ => Ok(Engine::General { p }),
        }
    }

    fn p(&self) -> &ImmersedSubmanifold {
        match self {
            Engine::Affine { p, .. } | Engine::General { p } => p,
        }
    }

    /// Whether leaving the parameter box ends a path.
    fn bounded(&self) -> bool {
        matches!(self, Engine::General { .. })
    }

    fn local(&self, u: &[f64], x: &[f64]) -> Result<Local<'_>> {
        match self {
            Engine::Affine {
                p,
                basis,
                ginv,
                sigma,
                ..
            } => {
                let amb = p.ambient();
                let gh = amb.grad_h(x);
                let drift = ginv * (basis.transpose() * gh);
                let dr = basis.transpose() * amb.grad_r(x);
                Ok(Local {
                    drift,
                    sigma: Cow::Borrowed(sigma),
                    dr,
                    ginv: Cow::Borrowed(ginv),
                })
            }
            Engine::General { p } => {
                let amb = p.ambient();
                let (x, d1) = p.chart().first(u);
                let diag = amb.metric_diag(&x);
                let g = p.induced_metric(u);
                let ginv = g
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| GeometryError::Degenerate {
                        u: u.to_vec(),
                        condition: f64::INFINITY,
                    })?;
                let n = u.len();
                let gamma = intrinsic_christoffel(p, u, &ginv);
                let dh = d1.transpose() * amb.grad_h(&x).component_mul(&diag);
                let dr = d1.transpose() * amb.grad_r(&x).component_mul(&diag);
                let mut drift = &ginv * dh;
                for k in 0..n {
                    drift[k] -= (0..n)
                        .flat_map(|i| (0..n).map(move |j| (i, j)))
                        .map(|(i, j)| ginv[(i, j)] * gamma[k][(i, j)])
                        .sum::<f64>();
                }
                Ok(Local {
                    drift,
                    sigma: Cow::Owned(sqrt_two_inverse(&ginv)?),
                    dr,
                    ginv: Cow::Owned(ginv),
                })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
enum PathEnd {
    Hit,
    Escape,
    ChartExit,
    Unresolved,
}

#[derive(Clone, Copy, Debug)]
struct PathResult {
    end: PathEnd,
    time: f64,
    steps: usize,
    coarse: usize,
    bridge: bool,
}

fn path_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

fn gaussian_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_iterator(n, (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

struct Annulus {
    rho: f64,
    big_r: f64,
    dt: f64,
    max_steps: usize,
}

fn run_path(engine: &Engine, start: &[f64], a: &Annulus, rng: &mut ChaCha8Rng) -> Result<PathResult> {
    if let Engine::Affine {
        p,
        origin,
        basis,
        sigma,
        drift_map,
        proj,
        ..
    } = engine
    {
        let flat = AffineStepper {
            weighted: !p.ambient().is_unweighted(),
            ambient: p.ambient(),
            origin,
            basis,
            sigma,
            drift_map,
            proj,
        };
        return Ok(flat.run(start, a, rng));
    }
    let p = engine.p();
    let chart = p.chart();
    let amb = p.ambient();
    let domain = p.domain();
    let n = start.len();
    let sqdt = a.dt.sqrt();
    let coarse_jump = (a.big_r - a.rho) / 10.0;
    let mut u = DVector::from_column_slice(start);
    let mut x = chart.eval(start);
    let mut r = amb.r(&x);
    let mut result = PathResult {
        end: PathEnd::Unresolved,
        time: 0.0,
        steps: 0,
        coarse: 0,
        bridge: false,
    };
    if r <= a.rho {
        result.end = PathEnd::Hit;
        return Ok(result);
    }
    if r >= a.big_r {
        result.end = PathEnd::Escape;
        return Ok(result);
    }
    while result.steps < a.max_steps {
        let local = engine.local(u.as_slice(), &x)?;
        let z = gaussian_vec(rng, n);
        let u1 = &u + &local.drift * a.dt + local.sigma.as_ref() * z * sqdt;
        let x1 = chart.eval(u1.as_slice());
        let r1 = amb.r(&x1);
        // The bridge draw is taken on every step so the random stream does
        // not depend on the path geometry.
        let bridge_draw: f64 = rng.random();
        result.steps += 1;
        if (r1 - r).abs() > coarse_jump {
            result.coarse += 1;
        }
        if !r1.is_finite() {
            return Err(StochasticError::Invalid(format!("path left the domain of the chart at {u1:?}")));
        }
        if r1 <= a.rho {
            result.end = PathEnd::Hit;
            result.time += a.dt * (r - a.rho) / (r - r1);
            return Ok(result);
        }
        if r1 >= a.big_r {
            result.end = PathEnd::Escape;
            result.time += a.dt * (a.big_r - r) / (r1 - r);
            return Ok(result);
        }
        let var = 2.0 * local.dr.dot(&(local.ginv.as_ref() * &local.dr)) * a.dt;
        if var > 0.0 {
            let p_in = (-2.0 * (r - a.rho) * (r1 - a.rho) / var).exp();
            let p_out = (-2.0 * (a.big_r - r) * (a.big_r - r1) / var).exp();
            if bridge_draw < p_in {
                result.end = PathEnd::Hit;
                result.bridge = true;
                result.time += 0.5 * a.dt;
                return Ok(result);
            }
            if bridge_draw > 1.0 - p_out {
                result.end = PathEnd::Escape;
                result.bridge = true;
                result.time += 0.5 * a.dt;
                return Ok(result);
            }
        }
        result.time += a.dt;
        if engine.bounded()
            && u1
                .iter()
                .zip(domain.lower.iter().zip(&domain.upper))
                .any(|(v, (lo, hi))| v < lo || v > hi)
        {
            result.end = PathEnd::ChartExit;
            return Ok(result);
        }
        u = u1;
        x = x1;
        r = r1;
    }
    Ok(result)
}

/// Buffer-reusing loop for affine charts; draws the same random stream as
/// the general path.
struct AffineStepper<'e> {
    weighted: bool,
    ambient: &'e AmbientSpace,
    origin: &'e [f64],
    basis: &'e DMatrix<f64>,
    sigma: &'e DMatrix<f64>,
    drift_map: &'e DMatrix<f64>,
    proj: &'e DMatrix<f64>,
}

impl AffineStepper<'_> {
    fn embed(&self, u: &[f64], x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = self.origin[i] + u.iter().enumerate().map(|(j, uj)| self.basis[(i, j)] * uj).sum::<f64>();
        }
    }

    fn run(&self, start: &[f64], a: &Annulus, rng: &mut ChaCha8Rng) -> PathResult {
        let n = start.len();
        let m = self.origin.len();
        let sqdt = a.dt.sqrt();
        let coarse_jump = (a.big_r - a.rho) / 10.0;
        let mut u = start.to_vec();
        let mut x = vec![0.0; m];
        let mut px = vec![0.0; m];
        let mut z = vec![0.0; n];
        let mut drift = vec![0.0; n];
        self.embed(&u, &mut x);
        let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut r = norm(&x);
        let mut result = PathResult {
            end: PathEnd::Unresolved,
            time: 0.0,
            steps: 0,
            coarse: 0,
            bridge: false,
        };
        if r <= a.rho {
            result.end = PathEnd::Hit;
            return result;
        }
        if r >= a.big_r {
            result.end = PathEnd::Escape;
            return result;
        }
        while result.steps < a.max_steps {
            if self.weighted {
                let gh = self.ambient.grad_h(&x);
                for (k, d) in drift.iter_mut().enumerate() {
                    *d = (0..m).map(|i| self.drift_map[(k, i)] * gh[i]).sum();
                }
            }
            // |∇_P r|² = xᵀ P x / r²
            for (i, v) in px.iter_mut().enumerate() {
                *v = (0..m).map(|j| self.proj[(i, j)] * x[j]).sum();
            }
            let tangential = x.iter().zip(&px).map(|(a, b)| a * b).sum::<f64>() / (r * r);
            for v in z.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            for k in 0..n {
                u[k] += drift[k] * a.dt + sqdt * (0..n).map(|j| self.sigma[(k, j)] * z[j]).sum::<f64>();
            }
            self.embed(&u, &mut x);
            let r1 = norm(&x);
            let bridge_draw: f64 = rng.random();
            result.steps += 1;
            if (r1 - r).abs() > coarse_jump {
                result.coarse += 1;
            }
            if r1 <= a.rho {
                result.end = PathEnd::Hit;
                result.time += a.dt * (r - a.rho) / (r - r1);
                return result;
            }
            if r1 >= a.big_r {
                result.end = PathEnd::Escape;
                result.time += a.dt * (a.big_r - r) / (r1 - r);
                return result;
            }
            let var = 2.0 * tangential * a.dt;
            if var > 0.0 {
                let p_in = (-2.0 * (r - a.rho) * (r1 - a.rho) / var).exp();
                let p_out = (-2.0 * (a.big_r - r) * (a.big_r - r1) / var).exp();
                if bridge_draw < p_in {
                    result.end = PathEnd::Hit;
                    result.bridge = true;
                    result.time += 0.5 * a.dt;
                    return result;
                }
                if bridge_draw > 1.0 - p_out {
                    result.end = PathEnd::Escape;
                    result.bridge = true;
                    result.time += 0.5 * a.dt;
                    return result;
                }
            }
            result.time += a.dt;
            r = r1;
        }
        result
    }
}

fn z95() -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(0.975)
}

/// Wilson score interval at 95%.
pub fn wilson_interval(hits: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = z95();
    let nf = n as f64;
    let p = hits as f64 / nf;
    let denom = 1.0 + z * z / nf;
    let centre = (p + z * z / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Kahan summation in the given order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut c) = (0.0, 0.0);
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HitEstimate {
    /// Fraction of resolved paths that reach `r <= ρ` before `r >= R`.
    pub p_hat: f64,
    pub paths: usize,
    pub hits: usize,
    pub escapes: usize,
    /// Paths that left the chart's parameter box; excluded from `p_hat`.
    pub chart_exits: usize,
    /// Paths still inside after the step budget; excluded from `p_hat`.
    pub unresolved: usize,
    /// Boundary crossings found by the bridge test rather than by a step.
    pub bridge_crossings: usize,
    pub ci: (f64, f64),
    pub standard_error: f64,
    pub mean_exit_time: f64,
    pub mean_steps: f64,
    pub coarse_step_fraction: f64,
    pub resolution_warning: Option<String>,
    pub dt: f64,
    pub seed: u64,
    pub rho: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

/// Probability that the diffusion started at `start` reaches the extrinsic
/// ball `r <= ρ` before leaving `r < R`.
pub fn hit_probability(spec: &DiffusionSpec, start: &[f64], rho: f64, big_r: f64, n: usize) -> Result<HitEstimate> {
    let p = &spec.p;
    if start.len() != p.dim() {
        return Err(GeometryError::Arity {
            got: start.len(),
            expected: p.dim(),
        }
        .into());
    }
    if !(rho > 0.0 && rho < big_r && big_r.is_finite()) {
        return Err(StochasticError::Invalid(format!("radii must satisfy 0 < rho < R, got {rho}, {big_r}")));
    }
    if n == 0 {
        return Err(StochasticError::Invalid("path count must be positive".into()));
    }
    let dt = spec.step_for(rho, big_r);
    if !(dt > 0.0) {
        return Err(StochasticError::Invalid(format!("step must be positive, got {dt}")));
    }
    let engine = Engine::new(p)?;
    let annulus = Annulus {
        rho,
        big_r,
        dt,
        max_steps: spec.max_steps,
    };
    let results: Vec<PathResult> = (0..n as u64)
        .into_par_iter()
        .map(|i| run_path(&engine, start, &annulus, &mut path_rng(spec.seed, i)))
        .collect::<Result<_>>()?;
    let count = |e: PathEnd| results.iter().filter(|r| r.end == e).count();
    let hits = count(PathEnd::Hit);
    let escapes = count(PathEnd::Escape);
    let resolved = hits + escapes;
    let p_hat = if resolved > 0 { hits as f64 / resolved as f64 } else { f64::NAN };
    let ci = wilson_interval(hits, resolved);
    let z = z95();
    let standard_error = if resolved > 0 {
        (p_hat * (1.0 - p_hat) / resolved as f64).sqrt().max((ci.1 - ci.0) / (2.0 * z))
    } else {
        f64::NAN
    };
    let finished: Vec<&PathResult> = results
        .iter()
        .filter(|r| matches!(r.end, PathEnd::Hit | PathEnd::Escape))
        .collect();
    let mean_exit_time = compensated_sum(finished.iter().map(|r| r.time)) / finished.len().max(1) as f64;
    let total_steps: usize = results.iter().map(|r| r.steps).sum();
    let coarse: usize = results.iter().map(|r| r.coarse).sum();
    let coarse_step_fraction = if total_steps > 0 { coarse as f64 / total_steps as f64 } else { 0.0 };
    let resolution_warning = (coarse_step_fraction > COARSE_FRACTION).then(|| {
        format!(
            "{:.2}% of steps move r by more than (R - rho)/10; reduce dt",
            100.0 * coarse_step_fraction
        )
    });
    Ok(HitEstimate {
        p_hat,
        paths: n,
        hits,
        escapes,
        chart_exits: count(PathEnd::ChartExit),
        unresolved: count(PathEnd::Unresolved),
        bridge_crossings: results.iter().filter(|r| r.bridge).count(),
        ci,
        standard_error,
        mean_exit_time,
        mean_steps: total_steps as f64 / n as f64,
        coarse_step_fraction,
        resolution_warning,
        dt,
        seed: spec.seed,
        rho,
        big_r,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeneratorReport {
    pub u: Vec<f64>,
    /// `Δ^h_P ψ` from the chart.
    pub exact: f64,
    /// `(E ψ(X_dt) - ψ(u)) / dt` with a martingale control variate.
    pub empirical: f64,
    /// The same at `dt/2` on common random numbers.
    pub empirical_half: f64,
    pub standard_error: f64,
    pub dt: f64,
    pub samples: usize,
    /// `3 SE + 2 |empirical - empirical_half|`
    pub tolerance: f64,
    pub passes: bool,
}

/// Compares the one-step generator of the diffusion with the weighted
/// Laplacian at `u`.
pub fn generator_check<F>(spec: &DiffusionSpec, u: &[f64], psi: &F, dt: f64, n: usize) -> Result<GeneratorReport>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let p = &spec.p;
    if n < 2 || !(dt > 0.0) {
        return Err(StochasticError::Invalid("need n >= 2 samples and dt > 0".into()));
    }
    let engine = Engine::new(p)?;
    let x = p.chart().eval(u);
    let local = engine.local(u, &x)?;
    let exact = weighted_laplacian(p, u, psi)?;
    let grad = field_gradient(u, psi);
    let psi0 = psi(u);
    let dim = u.len();
    let uv = DVector::from_column_slice(u);
    let sample = |h: f64, z: &DVector<f64>| {
        let noise = local.sigma.as_ref() * z * h.sqrt();
        let u1 = &uv + &local.drift * h + &noise;
        (psi(u1.as_slice()) - psi0 - grad.dot(&noise)) / h
    };
    let pairs: Vec<(f64, f64)> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(spec.seed, i);
            let z = gaussian_vec(&mut rng, dim);
            (sample(dt, &z), sample(0.5 * dt, &z))
        })
        .collect();
    let nf = n as f64;
    let mean_full = compensated_sum(pairs.iter().map(|p| p.0)) / nf;
    let mean_half = compensated_sum(pairs.iter().map(|p| p.1)) / nf;
    let var = compensated_sum(pairs.iter().map(|p| (p.0 - mean_full).powi(2))) / (nf - 1.0);
    let standard_error = (var / nf).sqrt();
    let tolerance = 3.0 * standard_error + 2.0 * (mean_full - mean_half).abs();
    Ok(GeneratorReport {
        u: u.to_vec(),
        exact,
        empirical: mean_full,
        empirical_half: mean_half,
        standard_error,
        dt,
        samples: n,
        tolerance,
        passes: (mean_full - exact).abs() <= tolerance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub criterion: Criterion,
    /// `<=` under the parabolicity hypotheses, `>=` under the
    /// hyperbolicity ones.
    pub relation: String,
    pub p_hat: f64,
    pub standard_error: f64,
    /// Radial potential of the comparison model at `r(start)`.
    pub phi: f64,
    pub r_start: f64,
    /// Slack of the 3σ inequality; non-negative when it passes.
    pub margin: f64,
    pub passes: bool,
    pub estimate: HitEstimate,
}

/// Checks the pointwise capacity-potential comparison predicted by a
/// decisive verdict: `p̂ <= φ(r) + 3 SE` after the parabolicity theorem,
/// `p̂ >= φ(r) - 3 SE` after the hyperbolicity one.
pub fn comparison_check(
    spec: &DiffusionSpec,
    setup: &ComparisonSetup,
    verdict: &Verdict,
    start: &[f64],
    rho: f64,
    big_r: f64,
    n: usize,
) -> Result<ComparisonReport> {
    let failing: Vec<String> = verdict
        .checks
        .iter()
        .filter(|c| c.fails())
        .map(|c| format!("{:?}", c.name))
        .collect();
    if !failing.is_empty() {
        return Err(StochasticError::Refused(format!("hypothesis checks fail: {failing:?}")));
    }
    let upper = match (verdict.criterion, verdict.outcome) {
        (Criterion::AhlforsDirect, _) => {
            return Err(StochasticError::Refused("direct Ahlfors verdicts carry no comparison".into()));
        }
        (_, Outcome::Parabolic) => true,
        (_, Outcome::Hyperbolic) => false,
        (c, Outcome::Inconclusive) => {
            return Err(StochasticError::Refused(format!("{c:?} is inconclusive")));
        }
    };
    if spec.p.dim() != setup.n() {
        return Err(StochasticError::Invalid(format!(
            "submanifold dimension {} differs from the setup's n = {}",
            spec.p.dim(),
            setup.n()
        )));
    }
    let estimate = hit_probability(spec, start, rho, big_r, n)?;
    let r_start = spec.p.ambient().r(&spec.p.chart().eval(start));
    let potential = setup.comparison_model().capacity_potential(rho, big_r)?;
    let phi = if r_start <= rho {
        1.0
    } else if r_start >= big_r {
        0.0
    } else {
        potential.potential.phi(r_start)
    };
    let se = estimate.standard_error;
    let margin = if upper {
        phi + 3.0 * se - estimate.p_hat
    } else {
        estimate.p_hat - (phi - 3.0 * se)
    };
    Ok(ComparisonReport {
        criterion: verdict.criterion,
        relation: if upper { "<=" } else { ">=" }.into(),
        p_hat: estimate.p_hat,
        standard_error: se,
        phi,
        r_start,
        margin,
        passes: margin >= 0.0,
        estimate,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Increasing,
    Decreasing,
    Flat,
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceReport {
    pub rows: Vec<HitEstimate>,
    /// Direction of `p̂` along the schedule, steps within 2 SE counted as
    /// flat.
    pub trend: Trend,
    /// Aitken extrapolation of the last three estimates, when defined.
    pub extrapolated_limit: Option<f64>,
    pub last_ci: (f64, f64),
}

/// Runs `hit_probability` for each outer radius in `schedule`.
pub fn recurrence_probe(
    spec: &DiffusionSpec,
    start: &[f64],
    rho: f64,
    schedule: &[f64],
    n: usize,
) -> Result<RecurrenceReport> {
    if schedule.is_empty() || schedule.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(StochasticError::Invalid("schedule must be a non-empty increasing list".into()));
    }
    let rows = schedule
        .iter()
        .map(|&big_r| hit_probability(spec, start, rho, big_r, n))
        .collect::<Result<Vec<_>>>()?;
    let (mut up, mut down) = (0, 0);
    for w in rows.windows(2) {
        let d = w[1].p_hat - w[0].p_hat;
        let noise = 2.0 * (w[0].standard_error.powi(2) + w[1].standard_error.powi(2)).sqrt();
        if d > noise {
            up += 1;
        } else if d < -noise {
            down += 1;
        }
    }
    let trend = match (up, down) {
        (0, 0) => Trend::Flat,
        (_, 0) => Trend::Increasing,
        (0, _) => Trend::Decreasing,
        _ => Trend::Mixed,
    };
    let extrapolated_limit = (rows.len() >= 3)
        .then(|| {
            let k = rows.len();
            let (a, b, c) = (rows[k - 3].p_hat, rows[k - 2].p_hat, rows[k - 1].p_hat);
            let denom = (c - b) - (b - a);
            (denom.abs() > 1e-12).then(|| (c - (c - b).powi(2) / denom).clamp(0.0, 1.0))
        })
        .flatten();
    let last_ci = rows.last().map(|r| r.ci).unwrap_or((0.0, 1.0));
    Ok(RecurrenceReport {
        rows,
        trend,
        extrapolated_limit,
        last_ci,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }

    #[test]
    fn kahan_keeps_small_terms() {
        let v = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 1000));
        assert!((compensated_sum(v) - (1.0 + 1e-13)).abs() < 1e-16);
    }
}
