//! Classification outcomes with the evidence that produced them.

use serde::Serialize;

use crate::radial::IntegralVerdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Parabolic,
    Hyperbolic,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    Thm32,
    Thm33,
    CorUseful,
    CorRadialcase,
    CorRadial2,
    CorTranslating,
    AhlforsDirect,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckName {
    A,
    B,
    #[serde(rename = "w_not_L1")]
    WNotL1,
    #[serde(rename = "w_L1")]
    WL1,
    #[serde(rename = "H_bounded_infinity")]
    HBoundedInfinity,
    #[serde(rename = "fprime_limit")]
    FprimeLimit,
    #[serde(rename = "exp_integral")]
    ExpIntegral,
    #[serde(rename = "alpha_floor")]
    AlphaFloor,
    #[serde(rename = "H_nonnegative")]
    HNonnegative,
}

/// A box in parameter space or an interval of radii.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Window {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Window {
    pub fn interval(lo: f64, hi: f64) -> Self {
        Self {
            lower: vec![lo],
            upper: vec![hi],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckStatus {
    Holds,
    /// `witness` is the radius or parameter point where the inequality
    /// breaks, `value` the offending left-hand side minus bound.
    Fails { witness: Vec<f64>, value: f64 },
    /// Verified on `window` only; the hypothesis quantifies beyond it.
    WindowOnly { window: Window },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisCheck {
    pub name: CheckName,
    #[serde(flatten)]
    pub status: CheckStatus,
    pub samples: usize,
    /// Smallest slack observed, positive when the inequality holds.
    pub worst_margin: Option<f64>,
    pub detail: String,
}

impl HypothesisCheck {
    pub fn holds(&self) -> bool {
        matches!(self.status, CheckStatus::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self.status, CheckStatus::Fails { .. })
    }
}

/// Tabulated values of the capacity comparison bound.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityBound {
    /// `upper` for the parabolic comparison, `lower` for the hyperbolic one.
    pub sense: BoundSense,
    pub description: String,
    pub rho: Vec<f64>,
    pub bound: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundSense {
    Upper,
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub criterion: Criterion,
    pub checks: Vec<HypothesisCheck>,
    pub integral_evidence: Option<IntegralVerdict>,
    pub capacity_bound: Option<CapacityBound>,
}

impl Verdict {
    /// Builds a verdict that reports `decisive` only when every check holds
    /// and the integral evidence is decisive; otherwise `Inconclusive`.
    pub fn assemble(
        criterion: Criterion,
        decisive: Outcome,
        checks: Vec<HypothesisCheck>,
        integral_evidence: Option<IntegralVerdict>,
    ) -> Self {
        let evidence_ok = integral_evidence
            .as_ref()
            .is_none_or(|e| e.outcome.is_decisive());
        let outcome = if checks.iter().all(HypothesisCheck::holds) && evidence_ok {
            decisive
        } else {
            Outcome::Inconclusive
        };
        Self {
            outcome,
            criterion,
            checks,
            integral_evidence,
            capacity_bound: None,
        }
    }

    pub fn check(&self, name: CheckName) -> Option<&HypothesisCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The soundness invariant: a decisive outcome needs every check to hold
    /// and decisive integral evidence.
    pub fn is_sound(&self) -> bool {
        self.outcome == Outcome::Inconclusive
            || (self.checks.iter().all(HypothesisCheck::holds)
                && self
                    .integral_evidence
                    .as_ref()
                    .is_none_or(|e| e.outcome.is_decisive()))
    }
}
