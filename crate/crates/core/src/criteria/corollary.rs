//! Corollary shortcuts: each assembles `α` and `t0` from its own
//! hypotheses, checks its side conditions and runs the matching theorem.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{balanced_anchor, classify_thm32, classify_thm33, ComparisonSetup, ConditionA, CriteriaError};
use crate::expr::Jet;
use crate::geometry::ProfileSense;
use crate::model::WeightedModel;
use crate::radial::{classify_improper, AsymptoticHint, IntegralOutcome, RadialProfile, WarpingFunction};
use crate::verdict::{CheckName, CheckStatus, Criterion, HypothesisCheck, Verdict, Window};

const PROBE_DOUBLINGS: i32 = 40;
const LIMIT_FLOOR: f64 = 1e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorollaryId {
    CorUseful,
    CorRadialcase,
    CorRadial2,
    CorTranslating,
}

impl CorollaryId {
    fn criterion(self) -> Criterion {
        match self {
            CorollaryId::CorUseful => Criterion::CorUseful,
            CorollaryId::CorRadialcase => Criterion::CorRadialcase,
            CorollaryId::CorRadial2 => Criterion::CorRadial2,
            CorollaryId::CorTranslating => Criterion::CorTranslating,
        }
    }
}

impl FromStr for CorollaryId {
    type Err = CriteriaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "cor_useful" => CorollaryId::CorUseful,
            "cor_radialcase" => CorollaryId::CorRadialcase,
            "cor_radial2" => CorollaryId::CorRadial2,
            "cor_translating" => CorollaryId::CorTranslating,
            other => return Err(CriteriaError::Invalid(format!("unknown corollary `{other}`"))),
        })
    }
}

/// Which half of a two-sided corollary to apply.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    Parabolic,
    Hyperbolic,
}

/// Inputs of a corollary shortcut. Unused fields are ignored by corollaries
/// that do not need them.
#[derive(Clone, Debug)]
pub struct CorollaryRequest {
    pub id: CorollaryId,
    /// Base model; its weight is the radial weight for `cor_radialcase`.
    pub model: WeightedModel,
    pub n: usize,
    pub direction: Direction,
    /// Bound on the weighted mean curvature of `P`.
    pub c: f64,
    /// `β` of `cor_useful`.
    pub beta: Option<RadialProfile>,
    /// Exponent of the weight `w^k` in `cor_radial2`.
    pub k: Option<f64>,
    /// `α` of `cor_translating`.
    pub alpha: Option<RadialProfile>,
    /// Anchor; chosen automatically when absent.
    pub t0: Option<f64>,
    /// Replaces the default assertion that `P` satisfies the corollary.
    pub condition_a: Option<ConditionA>,
    /// Use the `∫ e^{ct - f} < ∞` form of the radial hyperbolicity test.
    pub exp_integral: bool,
    pub hint: AsymptoticHint,
}

impl CorollaryRequest {
    pub fn new(id: CorollaryId, model: WeightedModel, n: usize) -> Self {
        Self {
            id,
            model,
            n,
            direction: Direction::Parabolic,
            c: 0.0,
            beta: None,
            k: None,
            alpha: None,
            t0: None,
            condition_a: None,
            exp_integral: false,
            hint: AsymptoticHint::None,
        }
    }

    pub fn direction(mut self, d: Direction) -> Self {
        self.direction = d;
        self
    }

    pub fn c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn beta(mut self, beta: RadialProfile) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn k(mut self, k: f64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn alpha(mut self, alpha: RadialProfile) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn t0(mut self, t0: f64) -> Self {
        self.t0 = Some(t0);
        self
    }

    pub fn condition_a(mut self, a: ConditionA) -> Self {
        self.condition_a = Some(a);
        self
    }

    pub fn exp_integral(mut self, on: bool) -> Self {
        self.exp_integral = on;
        self
    }

    pub fn hint(mut self, hint: AsymptoticHint) -> Self {
        self.hint = hint;
        self
    }
}

fn holds(name: CheckName, samples: usize, detail: String) -> HypothesisCheck {
    HypothesisCheck {
        name,
        status: CheckStatus::Holds,
        samples,
        worst_margin: None,
        detail,
    }
}

fn window_only(name: CheckName, window: Window, samples: usize, detail: String) -> HypothesisCheck {
    HypothesisCheck {
        name,
        status: CheckStatus::WindowOnly { window },
        samples,
        worst_margin: None,
        detail,
    }
}

fn fails(name: CheckName, at: f64, value: f64, samples: usize, detail: String) -> HypothesisCheck {
    HypothesisCheck {
        name,
        status: CheckStatus::Fails {
            witness: vec![at],
            value,
        },
        samples,
        worst_margin: Some(-value.abs()),
        detail,
    }
}

/// `w ∉ L¹` (`want_l1 = false`) or `w ∈ L¹` on `[1, ∞)`.
fn check_integrability(w: &WarpingFunction, want_l1: bool) -> Result<HypothesisCheck, CriteriaError> {
    let name = if want_l1 { CheckName::WL1 } else { CheckName::WNotL1 };
    let v = classify_improper(|t| w.value(t), 1.0, AsymptoticHint::None)?;
    let samples = v.cutoffs.len();
    let last = v.cutoffs.last().copied().unwrap_or(1.0);
    let detail = format!("int_1^inf w: {}", v.reason);
    Ok(match (v.outcome, want_l1) {
        (IntegralOutcome::Divergent, false) | (IntegralOutcome::Convergent { .. }, true) => {
            holds(name, samples, detail)
        }
        (IntegralOutcome::Convergent { value, .. }, false) => fails(name, last, value, samples, detail),
        (IntegralOutcome::Divergent, true) => {
            fails(name, last, v.partials.last().copied().unwrap_or(f64::INFINITY), samples, detail)
        }
        (IntegralOutcome::Inconclusive, _) => window_only(name, Window::interval(1.0, last), samples, detail),
    })
}

/// `H` bounded at infinity: `sup |H|` on `[2^8 t0, 2^9 t0]` does not
/// exceed the value on `[2^4 t0, 2^5 t0]`. Exponential warpings overflow
/// further out.
fn check_h_bounded(model: &WeightedModel, t0: f64) -> Result<HypothesisCheck, CriteriaError> {
    let near = model.mean_curvature_probe(t0 * 2f64.powi(4))?;
    let far = model.mean_curvature_probe(t0 * 2f64.powi(8))?;
    let samples = near.samples + far.samples;
    let detail = format!(
        "sup |H| = {} on [{}, {}], {} on [{}, {}]",
        near.sup_abs, near.window.0, near.window.1, far.sup_abs, far.window.0, far.window.1
    );
    Ok(if far.sup_abs.is_finite() && far.sup_abs <= near.sup_abs * (1.0 + 1e-9) + 1e-12 {
        holds(CheckName::HBoundedInfinity, samples, detail)
    } else {
        fails(CheckName::HBoundedInfinity, far.window.0, far.sup_abs, samples, detail)
    })
}

/// `g(t) → -∞` (`sign = -1`) or `+∞` over the doublings `2^j t0`: the
/// last 8 values must move monotonically in that direction and the final
/// one must exceed `1e6` in size.
fn check_limit(name: CheckName, label: &str, g: impl Fn(f64) -> f64, t0: f64, sign: f64) -> HypothesisCheck {
    let ts: Vec<f64> = (0..=PROBE_DOUBLINGS).map(|j| t0 * 2f64.powi(j)).collect();
    let vals: Vec<f64> = ts.iter().map(|&t| sign * g(t)).collect();
    let samples = ts.len();
    let target = if sign < 0.0 { "-inf" } else { "+inf" };
    let tail = vals.len() - 9;
    for i in tail..vals.len() - 1 {
        if !(vals[i + 1] > vals[i]) {
            return fails(
                name,
                ts[i + 1],
                sign * vals[i + 1],
                samples,
                format!("{label} is not monotone towards {target} at t = {}", ts[i + 1]),
            );
        }
    }
    let last = *vals.last().unwrap();
    let detail = format!("{label}({}) = {}", ts[samples - 1], sign * last);
    if last >= LIMIT_FLOOR {
        holds(name, samples, format!("{detail}, tends to {target}"))
    } else {
        window_only(
            name,
            Window::interval(t0, ts[samples - 1]),
            samples,
            format!("{detail}, monotone but below {LIMIT_FLOOR:e} in size"),
        )
    }
}

/// `H(t) >= 0` on 512 points of `[t0, 32 t0]` and at the doublings.
fn check_h_nonnegative(model: &WeightedModel, t0: f64) -> Result<HypothesisCheck, CriteriaError> {
    let window = (0..512).map(|i| t0 * 32f64.powf(i as f64 / 511.0));
    let probes = (6..=PROBE_DOUBLINGS).map(|j| t0 * 2f64.powi(j));
    let mut samples = 0;
    for t in window.chain(probes) {
        if !model.warping().jet(t).is_finite() {
            continue;
        }
        samples += 1;
        let h = model.mean_curvature(t)?;
        if !(h >= 0.0) {
            return Ok(fails(
                CheckName::HNonnegative,
                t,
                h,
                samples,
                "spheres are not convex".into(),
            ));
        }
    }
    Ok(holds(
        CheckName::HNonnegative,
        samples,
        format!("H >= 0 on [{t0}, {}] and at 2^j t0", 32.0 * t0),
    ))
}

fn check_alpha_floor(alpha: &RadialProfile, n: usize, t0: f64) -> HypothesisCheck {
    let window = (0..512).map(|i| t0 * 32f64.powf(i as f64 / 511.0));
    let probes = (6..=PROBE_DOUBLINGS).map(|j| t0 * 2f64.powi(j));
    let mut samples = 0;
    for t in window.chain(probes) {
        samples += 1;
        let floor = -(n as f64) / t;
        let a = alpha.value(t);
        if !(a >= floor - 1e-12 * (1.0 + floor.abs())) {
            return fails(CheckName::AlphaFloor, t, a - floor, samples, format!("alpha < -{n}/t"));
        }
    }
    holds(
        CheckName::AlphaFloor,
        samples,
        format!("alpha >= -{n}/t on [{t0}, {}] and at 2^j t0", 32.0 * t0),
    )
}

/// `f' + c` as a profile; its second derivative is a central difference
/// of `f''`.
fn derivative_plus(f: &RadialProfile, c: f64) -> RadialProfile {
    let g = f.clone();
    RadialProfile::new(format!("d/dt({}) + {c}", f.name()), move |t| {
        let j = g.jet(t);
        let h = 1e-4 * t.max(1.0);
        let d3 = (g.d2(t + h) - g.d2(t - h)) / (2.0 * h);
        Jet::new(j.d1 + c, j.d2, d3)
    })
    .with_t_min(f.t_min())
    .pole_singular()
}

fn anchor(
    req: &CorollaryRequest,
    base: &WeightedModel,
    alpha: &RadialProfile,
    sense: ProfileSense,
) -> Result<f64, CriteriaError> {
    if let Some(t0) = req.t0 {
        return Ok(t0);
    }
    // Without a crossing the tail check of (B) reports the failure.
    Ok(balanced_anchor(base, req.n, alpha, sense)?.map_or(1.0, |t| t.max(1.0)))
}

fn run(
    req: &CorollaryRequest,
    base: WeightedModel,
    alpha: RadialProfile,
    t0: f64,
    parabolic: bool,
    premise: &str,
    side: Vec<HypothesisCheck>,
) -> Result<Verdict, CriteriaError> {
    let setup = ComparisonSetup::new(base, req.n, t0, alpha)?;
    let a = req.condition_a.clone().unwrap_or_else(|| ConditionA::asserted(premise));
    let mut v = if parabolic {
        classify_thm32(&setup, &a, req.hint)?
    } else {
        classify_thm33(&setup, &a, req.hint)?
    };
    v.checks.extend(side);
    let mut out = Verdict::assemble(req.id.criterion(), v.outcome, v.checks, v.integral_evidence);
    out.capacity_bound = v.capacity_bound;
    Ok(out)
}

/// Runs one corollary shortcut.
pub fn corollary_shortcut(req: &CorollaryRequest) -> Result<Verdict, CriteriaError> {
    if !(req.c >= 0.0) {
        return Err(CriteriaError::Invalid(format!("c must be non-negative, got {}", req.c)));
    }
    let parabolic = req.direction == Direction::Parabolic;
    let (sense, sign) = if parabolic {
        (ProfileSense::Upper, -1.0)
    } else {
        (ProfileSense::Lower, 1.0)
    };
    let c = req.c;
    match req.id {
        CorollaryId::CorUseful => {
            let beta = req
                .beta
                .clone()
                .ok_or_else(|| CriteriaError::Invalid("cor_useful needs beta".into()))?;
            let alpha = if parabolic { beta.plus_constant(c) } else { beta.plus_constant(-c) };
            let t0 = anchor(req, &req.model, &alpha, sense)?;
            let side = vec![
                check_integrability(req.model.warping(), !parabolic)?,
                check_h_bounded(&req.model, t0)?,
                check_limit(CheckName::FprimeLimit, "beta", |t| beta.value(t), t0, sign),
            ];
            let premise = format!(
                "|Hh_P| <= {c} and <grad h, grad r> {} beta(r) on P",
                if parabolic { "<=" } else { ">=" }
            );
            run(req, req.model.clone(), alpha, t0, parabolic, &premise, side)
        }
        CorollaryId::CorRadialcase => {
            let f = req.model.weight().clone();
            let alpha = derivative_plus(&f, if parabolic { c } else { -c });
            let t0 = anchor(req, &req.model, &alpha, sense)?;
            let mut side = vec![check_h_bounded(&req.model, t0)?];
            if req.exp_integral {
                if parabolic {
                    return Err(CriteriaError::Invalid(
                        "the exponential-integral form only gives hyperbolicity".into(),
                    ));
                }
                side.push(check_integrability(req.model.warping(), false)?);
                let v = classify_improper(|t| (c * t - f.value(t)).exp(), t0, AsymptoticHint::None)?;
                let samples = v.cutoffs.len();
                let detail = format!("int_t0^inf exp(ct - f): {}", v.reason);
                side.push(match v.outcome {
                    IntegralOutcome::Convergent { .. } => holds(CheckName::ExpIntegral, samples, detail),
                    IntegralOutcome::Divergent => {
                        let at = v.cutoffs.last().copied().unwrap_or(t0);
                        fails(CheckName::ExpIntegral, at, f64::INFINITY, samples, detail)
                    }
                    IntegralOutcome::Inconclusive => {
                        let at = v.cutoffs.last().copied().unwrap_or(t0);
                        window_only(CheckName::ExpIntegral, Window::interval(t0, at), samples, detail)
                    }
                });
            } else {
                side.push(check_integrability(req.model.warping(), !parabolic)?);
                side.push(check_limit(CheckName::FprimeLimit, "f'", |t| f.d1(t), t0, sign));
            }
            let premise = format!("|Hh_P| <= {c} on P");
            run(req, req.model.clone(), alpha, t0, parabolic, &premise, side)
        }
        CorollaryId::CorRadial2 => {
            let k = req
                .k
                .ok_or_else(|| CriteriaError::Invalid("cor_radial2 needs k".into()))?;
            let w = req.model.warping().clone();
            let alpha = RadialProfile::new(format!("{k}*H"), move |t| {
                let j = w.jet(t);
                let h = j.d1 / j.value;
                let dh = j.d2 / j.value - h * h;
                let step = 1e-4 * t.max(1.0);
                let hd = |s: f64| {
                    let j = w.jet(s);
                    j.d2 / j.value - (j.d1 / j.value).powi(2)
                };
                Jet::new(k * h, k * dh, k * (hd(t + step) - hd(t - step)) / (2.0 * step))
            })
            .pole_singular();
            let t0 = req.t0.unwrap_or(1.0);
            let parabolic = k <= -(req.n as f64);
            let side = vec![check_h_nonnegative(&req.model, t0)?];
            let premise = format!("P is h-minimal for the weight w^{k} and avoids the pole");
            run(req, req.model.clone(), alpha, t0, parabolic, &premise, side)
        }
        CorollaryId::CorTranslating => {
            let alpha = req
                .alpha
                .clone()
                .ok_or_else(|| CriteriaError::Invalid("cor_translating needs alpha".into()))?;
            let t0 = req.t0.unwrap_or(1.0);
            let base = WeightedModel::new(req.n + 1, WarpingFunction::euclidean(), crate::radial::weights::zero())?;
            let side = vec![check_alpha_floor(&alpha, req.n, t0)];
            let premise = "P is h-minimal for h = t and lies in {t >= r alpha(r)}";
            run(req, base, alpha, t0, false, premise, side)
        }
    }
}
