//! Parabolicity and hyperbolicity criteria for submanifolds of weighted
//! models, their corollary shortcuts, and the critical radii of spheres,
//! cylinders and hyperplanes.

mod corollary;
mod critical;
mod setup;

use crate::geometry::{radial_hypothesis_profile, GeometryError, ImmersedSubmanifold, ProfileSense};
use crate::model::ModelError;
use crate::radial::{AsymptoticHint, ImproperError, IntegralOutcome, ProfileError, QuadratureError, RootError};
use crate::verdict::{
    BoundSense, CapacityBound, CheckName, CheckStatus, Criterion, HypothesisCheck, Outcome, Verdict, Window,
};

pub use corollary::{corollary_shortcut, CorollaryId, CorollaryRequest, Direction};
pub use critical::{
    critical_cylinder_radius, cylinder_weighted_mc, cylinder_weighted_mc_n, hyperplane_weighted_mc,
    HyperplaneReport,
};
pub use setup::ComparisonSetup;

const B_SAMPLES: usize = 512;
const B_WINDOW: f64 = 32.0;
const B_DOUBLINGS: i32 = 40;
const BOUND_SAMPLES: usize = 16;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum CriteriaError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Improper(#[from] ImproperError),
    #[error("{0}")]
    Invalid(String),
}

/// Where condition (A) comes from.
#[derive(Clone, Debug, Default)]
pub enum ConditionA {
    /// Not checked; the verdict stays inconclusive.
    #[default]
    Unchecked,
    /// The caller asserts (A) on all of `P` outside `D_{t0}`.
    Asserted(String),
    /// Sampled on a parameter window of `P`. With `assert_beyond` set, a
    /// clean window result is accepted for the whole submanifold.
    Sampled {
        submanifold: Box<ImmersedSubmanifold>,
        window: Window,
        assert_beyond: bool,
    },
}

impl ConditionA {
    pub fn asserted(reason: impl Into<String>) -> Self {
        ConditionA::Asserted(reason.into())
    }

    pub fn sampled(submanifold: ImmersedSubmanifold, window: Window, assert_beyond: bool) -> Self {
        ConditionA::Sampled {
            submanifold: Box::new(submanifold),
            window,
            assert_beyond,
        }
    }
}

fn check_a(setup: &ComparisonSetup, a: &ConditionA, sense: ProfileSense) -> Result<HypothesisCheck, CriteriaError> {
    let relation = match sense {
        ProfileSense::Upper => "<=",
        ProfileSense::Lower => ">=",
    };
    Ok(match a {
        ConditionA::Unchecked => HypothesisCheck {
            name: CheckName::A,
            status: CheckStatus::WindowOnly {
                window: Window::interval(setup.t0(), setup.t0()),
            },
            samples: 0,
            worst_margin: None,
            detail: "not checked: no submanifold and no assertion".into(),
        },
        ConditionA::Asserted(reason) => HypothesisCheck {
            name: CheckName::A,
            status: CheckStatus::Holds,
            samples: 0,
            worst_margin: None,
            detail: format!("asserted: {reason}"),
        },
        ConditionA::Sampled {
            submanifold,
            window,
            assert_beyond,
        } => {
            if submanifold.ambient().dim() != setup.base().dim() || submanifold.dim() != setup.n() {
                return Err(CriteriaError::Invalid(format!(
                    "submanifold {} has dimension {} in ℝ^{}, setup expects n = {} in dimension {}",
                    submanifold.name(),
                    submanifold.dim(),
                    submanifold.ambient().dim(),
                    setup.n(),
                    setup.base().dim()
                )));
            }
            let mut c = radial_hypothesis_profile(submanifold, window, setup.alpha(), sense);
            c.detail = format!("{} (alpha {relation} bound, outside D_t0 not enforced)", c.detail);
            if *assert_beyond && matches!(c.status, CheckStatus::WindowOnly { .. }) && c.samples > 0 {
                c.status = CheckStatus::Holds;
                c.detail.push_str("; window result asserted for all of P");
            }
            c
        }
    })
}

/// Samples `nH + α` on `[t0, 32 t0]` and at the doublings `2^j t0`,
/// `j <= 40`, against `<= 0` (parabolic) or `>= 0` (hyperbolic).
fn check_b(setup: &ComparisonSetup, sense: ProfileSense) -> Result<HypothesisCheck, CriteriaError> {
    let t0 = setup.t0();
    let window: Vec<f64> = (0..B_SAMPLES)
        .map(|i| t0 * B_WINDOW.powf(i as f64 / (B_SAMPLES - 1) as f64))
        .collect();
    let probes = (6..=B_DOUBLINGS).map(|j| t0 * 2f64.powi(j));
    let mut worst: Option<(f64, f64)> = None;
    let mut samples = 0;
    let mut overflow = 0;
    for t in window.into_iter().chain(probes) {
        // Exponential warpings overflow far out; those probes are dropped.
        if !setup.base().warping().jet(t).is_finite() {
            overflow += 1;
            continue;
        }
        let b = setup.balance(t)?;
        let margin = match sense {
            ProfileSense::Upper => -b,
            ProfileSense::Lower => b,
        };
        let scale = setup.n() as f64 * setup.base().mean_curvature(t)?.abs() + setup.alpha().value(t).abs();
        let slack = margin + 1e-12 * (1.0 + scale);
        samples += 1;
        if !slack.is_finite() {
            worst = Some((f64::NEG_INFINITY, t));
            break;
        }
        if worst.is_none_or(|(w, _)| slack < w) {
            worst = Some((slack, t));
        }
    }
    let (w, at) = worst.expect("at least one sample");
    let relation = match sense {
        ProfileSense::Upper => "<= 0",
        ProfileSense::Lower => ">= 0",
    };
    let status = if w < 0.0 {
        CheckStatus::Fails {
            witness: vec![at],
            value: -w,
        }
    } else {
        CheckStatus::Holds
    };
    Ok(HypothesisCheck {
        name: CheckName::B,
        status,
        samples,
        worst_margin: Some(w),
        detail: format!(
            "nH + alpha {relation} on {B_SAMPLES} points of [{t0}, {}] and at 2^j t0 for j <= {B_DOUBLINGS}, \
             {overflow} probes past the range of w dropped",
            B_WINDOW * t0
        ),
    })
}

fn capacity_bound(setup: &ComparisonSetup, sense: BoundSense, hint: AsymptoticHint) -> CapacityBound {
    let model = setup.comparison_model();
    let t0 = setup.t0();
    let mut rho = Vec::with_capacity(BOUND_SAMPLES);
    let mut bound = Vec::with_capacity(BOUND_SAMPLES);
    for i in 0..BOUND_SAMPLES {
        let r = t0 * B_WINDOW.powf(i as f64 / (BOUND_SAMPLES - 1) as f64);
        // A zero capacity stays zero even where the area overflows.
        let value = match model.capacity_to_infinity(r, hint).ok().and_then(|c| c.capacity) {
            Some(0.0) => 0.0,
            Some(cap) => model.sphere_area(r).map_or(f64::NAN, |area| cap / area),
            None => f64::NAN,
        };
        rho.push(r);
        bound.push(value);
    }
    let description = match sense {
        BoundSense::Upper => "Cap_h(D_rho) / A_h(dD_rho) <= Cap_f(B_rho) / A_f(S_rho)",
        BoundSense::Lower => "Cap_h(D_rho) >= Cap_f(B_rho) / A_f(S_rho) * int_{dD_rho} |grad_P r| da_h",
    };
    CapacityBound {
        sense,
        description: description.into(),
        rho,
        bound,
    }
}

fn classify(
    setup: &ComparisonSetup,
    a: &ConditionA,
    hint: AsymptoticHint,
    parabolic: bool,
) -> Result<Verdict, CriteriaError> {
    let sense = if parabolic { ProfileSense::Upper } else { ProfileSense::Lower };
    let checks = vec![check_a(setup, a, sense)?, check_b(setup, sense)?];
    let cap = setup.comparison_model().capacity_to_infinity(setup.t0(), hint)?;
    let wanted = match cap.verdict.outcome {
        IntegralOutcome::Divergent if parabolic => Outcome::Parabolic,
        IntegralOutcome::Convergent { .. } if !parabolic => Outcome::Hyperbolic,
        _ => Outcome::Inconclusive,
    };
    let (criterion, bound_sense) = if parabolic {
        (Criterion::Thm32, BoundSense::Upper)
    } else {
        (Criterion::Thm33, BoundSense::Lower)
    };
    let mut v = Verdict::assemble(criterion, wanted, checks, Some(cap.verdict));
    v.capacity_bound = Some(capacity_bound(setup, bound_sense, hint));
    Ok(v)
}

/// Parabolicity: (A) `⟨∇h,∇r⟩ + ⟨H̄^h,∇r⟩ <= α(r)`, (B) `nH + α <= 0`
/// and a divergent `∫_{t0}^∞ dt / A_f(S_t)`.
pub fn classify_thm32(setup: &ComparisonSetup, a: &ConditionA, hint: AsymptoticHint) -> Result<Verdict, CriteriaError> {
    classify(setup, a, hint, true)
}

/// Hyperbolicity: the reversed inequalities and a convergent integral.
pub fn classify_thm33(setup: &ComparisonSetup, a: &ConditionA, hint: AsymptoticHint) -> Result<Verdict, CriteriaError> {
    classify(setup, a, hint, false)
}

/// Smallest `t0` on a log grid of `(1e-6, 1e6)`, cut where `w` overflows, after which every grid
/// value of `nH + α` has the required sign, refined by bisection-free
/// Brent on the last sign change. `None` if the sign is wrong at `1e6`.
pub fn balanced_anchor(
    base: &crate::model::WeightedModel,
    n: usize,
    alpha: &crate::radial::RadialProfile,
    sense: ProfileSense,
) -> Result<Option<f64>, CriteriaError> {
    let g = |t: f64| -> f64 {
        let b = n as f64 * base.mean_curvature(t).unwrap_or(f64::NAN) + alpha.value(t);
        match sense {
            ProfileSense::Upper => -b,
            ProfileSense::Lower => b,
        }
    };
    let lo = (alpha.t_min() * (1.0 + 1e-9)).max(1e-6);
    let mut hi = 1e6;
    while hi > lo && !base.warping().jet(hi).is_finite() {
        hi /= 2.0;
    }
    let steps = 1024;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let grid: Vec<f64> = (0..=steps).map(|i| lo * ratio.powi(i)).collect();
    if !(g(hi) >= 0.0) {
        return Ok(None);
    }
    let last_bad = grid.iter().rposition(|&t| !(g(t) >= 0.0));
    let Some(k) = last_bad else {
        return Ok(Some(lo));
    };
    let (a, b) = (grid[k], grid[k + 1]);
    if g(b) == 0.0 {
        return Ok(Some(b));
    }
    let t = crate::radial::find_root(g, a, b, 1e-15)?;
    // Step just past the root so that (B) holds at the anchor itself.
    let mut t0 = t;
    while !(g(t0) >= 0.0) {
        t0 *= 1.0 + 1e-14;
    }
    Ok(Some(t0))
}
