//! Closed-form Laplacian identities, each checked against the direct
//! coordinate Laplacian.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::laplacian::field_gradient;
use super::{weighted_laplacian, GeometryError, GeometrySample, ImmersedSubmanifold};
use crate::radial::RadialProfile;
use crate::verdict::{CheckName, CheckStatus, HypothesisCheck, Window};

const GRID_PER_AXIS: usize = 32;
const GRID_CAP: usize = 4096;

/// A Laplacian computed two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub direct: f64,
    pub formula: f64,
    pub residual: f64,
}

impl IdentityCheck {
    fn new(direct: f64, formula: f64) -> Self {
        Self {
            direct,
            formula,
            residual: (direct - formula).abs(),
        }
    }
}

fn radial_field(p: &ImmersedSubmanifold, psi: &RadialProfile) -> impl Fn(&[f64]) -> f64 {
    let ambient = p.ambient().clone();
    let chart = p.chart().clone();
    let psi = psi.clone();
    move |v: &[f64]| psi.value(ambient.r(&chart.eval(v)))
}

/// `Δ^h_P ψ(r)` directly and via
/// `(ψ'' - Hψ')|∇_P r|² + (nH + ⟨∇h,∇r⟩ + ⟨H̄^h,∇r⟩)ψ'`.
pub fn lemma31_residual(
    p: &ImmersedSubmanifold,
    u: &[f64],
    psi: &RadialProfile,
) -> Result<IdentityCheck, GeometryError> {
    let s = p.geometry_at(u)?;
    if !(s.r > 0.0) {
        return Err(GeometryError::AtPole(u.to_vec()));
    }
    let n = p.dim() as f64;
    let big_h = p.ambient().sphere_mean_curvature(s.r);
    let j = psi.jet(s.r);
    let drift = n * big_h + s.inner(&s.grad_h, &s.grad_r) + s.inner(&s.weighted_mean_curvature_vector, &s.grad_r);
    let formula = (j.d2 - big_h * j.d1) * s.grad_r_tangent_sq + drift * j.d1;
    let direct = weighted_laplacian(p, u, &radial_field(p, psi))?;
    Ok(IdentityCheck::new(direct, formula))
}

/// `⟨∇h, ∇r⟩ + ⟨H̄^h, ∇r⟩`, the left-hand side of the radial balance
/// condition.
pub fn radial_balance(s: &GeometrySample) -> f64 {
    s.inner(&s.grad_h, &s.grad_r) + s.inner(&s.weighted_mean_curvature_vector, &s.grad_r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSense {
    /// `⟨∇h,∇r⟩ + ⟨H̄^h,∇r⟩ <= α(r)`
    Upper,
    /// `⟨∇h,∇r⟩ + ⟨H̄^h,∇r⟩ >= α(r)`
    Lower,
}

/// Grid points of a box: `k` cell centres per axis with `k^n <= 4096`.
pub(crate) fn grid(window: &Window) -> Vec<Vec<f64>> {
    let n = window.lower.len();
    let mut k = GRID_PER_AXIS;
    while k > 1 && k.pow(n as u32) > GRID_CAP {
        k -= 1;
    }
    let total = k.pow(n as u32);
    (0..total)
        .map(|mut idx| {
            (0..n)
                .map(|d| {
                    let i = idx % k;
                    idx /= k;
                    let (lo, hi) = (window.lower[d], window.upper[d]);
                    lo + (hi - lo) * (i as f64 + 0.5) / k as f64
                })
                .collect()
        })
        .collect()
}

/// Samples the radial balance condition on a grid in `window`.
///
/// The result is `Holds` only when the window covers a closed
/// submanifold; otherwise a clean sample is reported as `WindowOnly`.
pub fn radial_hypothesis_profile(
    p: &ImmersedSubmanifold,
    window: &Window,
    alpha: &RadialProfile,
    sense: ProfileSense,
) -> HypothesisCheck {
    let points = grid(window);
    let mut worst: Option<(f64, Vec<f64>)> = None;
    let mut samples = 0;
    let mut skipped = 0;
    for u in &points {
        let Ok(s) = p.geometry_at(u) else {
            skipped += 1;
            continue;
        };
        let lhs = radial_balance(&s);
        let a = alpha.value(s.r);
        let margin = match sense {
            ProfileSense::Upper => a - lhs,
            ProfileSense::Lower => lhs - a,
        };
        if !margin.is_finite() {
            skipped += 1;
            continue;
        }
        samples += 1;
        // Equality cases such as h-minimal spheres sit on the bound up to
        // rounding.
        let slack = margin + 1e-9 * (1.0 + a.abs().min(1e12));
        if worst.as_ref().is_none_or(|(w, _)| slack < *w) {
            worst = Some((slack, u.clone()));
        }
    }
    let covers = p.is_closed() && window == p.domain();
    let (status, worst_margin) = match worst {
        Some((w, u)) if w < 0.0 => (
            CheckStatus::Fails {
                witness: u,
                value: -w,
            },
            Some(w),
        ),
        Some((w, _)) if covers => (CheckStatus::Holds, Some(w)),
        Some((w, _)) => (
            CheckStatus::WindowOnly {
                window: window.clone(),
            },
            Some(w),
        ),
        None => (
            CheckStatus::WindowOnly {
                window: window.clone(),
            },
            None,
        ),
    };
    let relation = match sense {
        ProfileSense::Upper => "<=",
        ProfileSense::Lower => ">=",
    };
    HypothesisCheck {
        name: CheckName::A,
        status,
        samples,
        worst_margin,
        detail: format!(
            "<grad h, grad r> + <Hh, grad r> {relation} alpha(r) on {} grid points of {}, {skipped} skipped",
            points.len(),
            p.name()
        ),
    }
}

fn euclidean_only(p: &ImmersedSubmanifold, what: &str) -> Result<(), GeometryError> {
    if p.ambient().is_euclidean() {
        Ok(())
    } else {
        Err(GeometryError::Unsupported(format!("{what} needs a Euclidean ambient")))
    }
}

/// `Δ^h_P ⟨X, a⟩` directly and via `⟨H̄^h, a⟩ + ⟨∇h, a⟩`.
pub fn height_laplacian(
    p: &ImmersedSubmanifold,
    u: &[f64],
    a: &[f64],
) -> Result<IdentityCheck, GeometryError> {
    euclidean_only(p, "height_laplacian")?;
    if a.len() != p.ambient().dim() {
        return Err(GeometryError::Arity {
            got: a.len(),
            expected: p.ambient().dim(),
        });
    }
    let s = p.geometry_at(u)?;
    let av = DVector::from_column_slice(a);
    let formula = s.weighted_mean_curvature_vector.dot(&av) + s.grad_h.dot(&av);
    let chart = p.chart().clone();
    let a = a.to_vec();
    let direct = weighted_laplacian(p, u, &move |v: &[f64]| {
        chart.eval(v).iter().zip(&a).map(|(x, y)| x * y).sum()
    })?;
    Ok(IdentityCheck::new(direct, formula))
}

/// `Δ^h_P |x|²/2` for the splitting `ℝ^k × ℝ^{m-k}`, directly and via
/// `Σ|e_i^ℓ|² + ⟨∇h, X⟩ + ⟨H̄^h, X⟩` with `X = (x, 0)`.
pub fn cylinder_distance_laplacian(
    p: &ImmersedSubmanifold,
    u: &[f64],
    k: usize,
) -> Result<IdentityCheck, GeometryError> {
    euclidean_only(p, "cylinder_distance_laplacian")?;
    let m = p.ambient().dim();
    if k == 0 || k > m {
        return Err(GeometryError::Unsupported(format!(
            "splitting k = {k} must satisfy 1 <= k <= {m}"
        )));
    }
    let s = p.geometry_at(u)?;
    let horizontal = DVector::from_fn(m, |i, _| if i < k { s.p[i] } else { 0.0 });
    let top = s.tangents.rows(0, k);
    let tangent_sq = (s.metric_inv.clone() * (top.transpose() * top)).trace();
    let formula = tangent_sq + s.grad_h.dot(&horizontal) + s.weighted_mean_curvature_vector.dot(&horizontal);
    let chart = p.chart().clone();
    let direct = weighted_laplacian(p, u, &move |v: &[f64]| {
        0.5 * chart.eval(v)[..k].iter().map(|x| x * x).sum::<f64>()
    })?;
    Ok(IdentityCheck::new(direct, formula))
}

/// The angle function `θ = ⟨N, ∂_t⟩` of a graph `t = φ(x)` two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleIdentity {
    pub theta: f64,
    /// `Δ^h_P θ` from the chart.
    pub direct: f64,
    /// `{Hess η(n,n) + μ''(θ² - 1) - |σ|²} θ`
    pub formula: f64,
    pub residual: f64,
    /// `-⟨∇_P H^h, ∂_t⟩`, the change of `H^h` along vertical
    /// translations that the formula drops. Zero when `P` has constant
    /// weighted mean curvature, the setting in which the formula holds.
    pub translation_term: f64,
    /// `|direct - formula - translation_term|`
    pub general_residual: f64,
    /// Largest mixed entry `|∂_{x_i}∂_t h|`; the weight splits as
    /// `η(x) + μ(t)` only when this vanishes.
    pub split_defect: f64,
}

pub fn angle_function_laplacian(
    p: &ImmersedSubmanifold,
    u: &[f64],
) -> Result<AngleIdentity, GeometryError> {
    euclidean_only(p, "angle_function_laplacian")?;
    if p.codim() != 1 {
        return Err(GeometryError::Unsupported("angle function needs a hypersurface".into()));
    }
    let m = p.ambient().dim();
    let t = m - 1;
    let s = p.geometry_at(u)?;
    let normal = &s.normals[0];
    let theta = normal[t];
    if !(theta < 0.0) {
        return Err(GeometryError::Unsupported(format!(
            "graph normal must point downward, got theta = {theta}"
        )));
    }
    let hess = p.ambient().hess_h(&s.p).expect("Euclidean ambient");
    let horizontal = normal.rows(0, t).into_owned();
    let eta = hess.view((0, 0), (t, t));
    let mu2 = hess[(t, t)];
    let split_defect = (0..t).map(|i| hess[(i, t)].abs()).fold(0.0, f64::max);
    let bracket = (horizontal.transpose() * eta * &horizontal)[(0, 0)] + mu2 * (theta * theta - 1.0) - s.sigma_sq;
    let formula = bracket * theta;

    let q = p.clone();
    let direct = weighted_laplacian(p, u, &move |v: &[f64]| {
        q.normal_frame(v).map(|f| f[0][t]).unwrap_or(f64::NAN)
    })?;

    let q = p.clone();
    let dhh = field_gradient(u, &move |v: &[f64]| {
        q.geometry_at(v)
            .ok()
            .and_then(|g| g.weighted_mean_curvature())
            .unwrap_or(f64::NAN)
    });
    let dt = DVector::from_iterator(p.dim(), (0..p.dim()).map(|i| s.tangents[(t, i)]));
    let translation_term = -(dhh.transpose() * &s.metric_inv * dt)[(0, 0)];
    Ok(AngleIdentity {
        theta,
        direct,
        formula,
        residual: (direct - formula).abs(),
        translation_term,
        general_residual: (direct - formula - translation_term).abs(),
        split_defect,
    })
}
