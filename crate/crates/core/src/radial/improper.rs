//! Convergence classification of `∫_a^∞ f` for positive integrands.
//!
//! Partial integrals are taken over doubling cutoffs `a·2^j`. The verdict is
//! numerical evidence, not a proof; `Inconclusive` is a normal outcome.

use std::cell::Cell;

use serde::Serialize;

use super::profile::AsymptoticHint;
use super::quadrature::{integrate, QuadratureError, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ImproperSettings {
    pub tol: Tolerance,
    pub max_doublings: u32,
    pub divergence_threshold: f64,
    /// Consecutive non-decaying increments that count as divergence.
    pub stall_doublings: usize,
    /// Largest acceptable ratio between consecutive increments in the
    /// geometric tail fit.
    pub max_ratio: f64,
}

impl Default for ImproperSettings {
    fn default() -> Self {
        Self {
            tol: Tolerance::default(),
            max_doublings: 40,
            divergence_threshold: 1e12,
            stall_doublings: 6,
            max_ratio: 0.95,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IntegralOutcome {
    Convergent { value: f64, error_bound: f64 },
    Divergent,
    Inconclusive,
}

impl IntegralOutcome {
    pub fn is_decisive(&self) -> bool {
        !matches!(self, IntegralOutcome::Inconclusive)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralVerdict {
    pub outcome: IntegralOutcome,
    pub lower: f64,
    pub cutoffs: Vec<f64>,
    pub partials: Vec<f64>,
    pub hint_used: Option<AsymptoticHint>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ImproperError {
    #[error("integrand is negative ({value}) at t = {t}")]
    Negative { t: f64, value: f64 },
    #[error("integrand is not a number at t = {t}")]
    NotANumber { t: f64 },
    #[error("lower limit must be positive and finite, got {0}")]
    BadLower(f64),
}

pub fn classify_improper<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    hint: AsymptoticHint,
) -> Result<IntegralVerdict, ImproperError> {
    classify_improper_with(f, a, hint, &ImproperSettings::default())
}

pub fn classify_improper_with<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    hint: AsymptoticHint,
    settings: &ImproperSettings,
) -> Result<IntegralVerdict, ImproperError> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(ImproperError::BadLower(a));
    }
    // Track the most negative sample seen by the quadrature.
    let worst = Cell::new((0.0f64, a));
    let g = |t: f64| {
        let v = f(t);
        if v < worst.get().0 {
            worst.set((v, t));
        }
        v
    };
    let mut verdict = IntegralVerdict {
        outcome: IntegralOutcome::Inconclusive,
        lower: a,
        cutoffs: Vec::new(),
        partials: Vec::new(),
        hint_used: None,
        reason: String::new(),
    };
    let tol = settings.tol;
    let mut partial = 0.0;
    let mut quad_err = 0.0;
    let mut increments: Vec<f64> = Vec::new();
    let mut stalled = 0usize;
    let mut lo = a;
    for j in 1..=settings.max_doublings {
        let hi = a * 2f64.powi(j as i32);
        let q = integrate(g, lo, hi, tol);
        let (v, w) = worst.get();
        if v < 0.0 {
            return Err(ImproperError::Negative { t: w, value: v });
        }
        let q = match q {
            Ok(q) => q,
            Err(QuadratureError::NonFinite { t, value }) if value == f64::INFINITY => {
                verdict.cutoffs.push(hi);
                verdict.partials.push(f64::INFINITY);
                verdict.outcome = IntegralOutcome::Divergent;
                verdict.reason = format!("integrand overflows at t = {t:e}");
                return Ok(verdict);
            }
            Err(QuadratureError::NonFinite { t, .. }) => {
                return Err(ImproperError::NotANumber { t });
            }
            Err(QuadratureError::BadInterval { .. }) => unreachable!("cutoffs are increasing"),
        };
        let inc = q.value;
        partial += inc;
        quad_err += q.error;
        verdict.cutoffs.push(hi);
        verdict.partials.push(partial);

        if !partial.is_finite() || partial > settings.divergence_threshold {
            verdict.outcome = IntegralOutcome::Divergent;
            verdict.reason = format!(
                "partial integral {partial:e} exceeds threshold {:e} at cutoff {hi:e}",
                settings.divergence_threshold
            );
            return Ok(verdict);
        }
        if let Some(&prev) = increments.last() {
            if inc > 0.0 && inc >= prev * (1.0 - 1e-6) {
                stalled += 1;
            } else {
                stalled = 0;
            }
        }
        increments.push(inc);
        if stalled >= settings.stall_doublings {
            verdict.outcome = IntegralOutcome::Divergent;
            verdict.reason = format!(
                "increments did not decay over {stalled} consecutive doublings (last {inc:e})"
            );
            return Ok(verdict);
        }
        if let Some(outcome) = apply_hint(&f, hint, &verdict.cutoffs, partial, &tol) {
            verdict.hint_used = Some(hint);
            verdict.reason = match outcome {
                IntegralOutcome::Divergent => format!("{hint:?} hint with growing integrand"),
                _ => format!("{hint:?} hint tail estimate"),
            };
            verdict.outcome = outcome;
            return Ok(verdict);
        }
        if let Some(q) = geometric_ratio(&increments, settings.max_ratio) {
            let tail = if q == 0.0 { 0.0 } else { inc * q / (1.0 - q) };
            if tail <= tol.target(partial) {
                verdict.outcome = IntegralOutcome::Convergent {
                    value: partial + tail,
                    error_bound: tail + quad_err,
                };
                verdict.reason = format!(
                    "geometric tail fit with ratio {q:.3e}, tail estimate {tail:e} at cutoff {hi:e}"
                );
                return Ok(verdict);
            }
        }
        lo = hi;
    }
    // Out of doublings: accept a decaying fit whose tail is small relative
    // to the partial, otherwise give up.
    let last = *increments.last().unwrap_or(&0.0);
    if let Some(q) = geometric_ratio(&increments, settings.max_ratio) {
        let tail = last * q / (1.0 - q);
        if tail <= 1e-2 * partial {
            verdict.outcome = IntegralOutcome::Convergent {
                value: partial + tail,
                error_bound: tail + quad_err,
            };
            verdict.reason = format!(
                "doubling budget exhausted; geometric tail {tail:e} accepted as error bound"
            );
            return Ok(verdict);
        }
    }
    verdict.reason = format!(
        "no decision after {} doublings (partial {partial:e}, last increment {last:e})",
        settings.max_doublings
    );
    Ok(verdict)
}

/// Largest ratio among the last five increment ratios, if all are below
/// `max_ratio`. Increments that underflow to zero count as ratio zero.
fn geometric_ratio(increments: &[f64], max_ratio: f64) -> Option<f64> {
    if increments.len() < 6 {
        return None;
    }
    let tail = &increments[increments.len() - 6..];
    let mut worst = 0.0f64;
    for pair in tail.windows(2) {
        let (p, c) = (pair[0], pair[1]);
        let r = if c == 0.0 {
            0.0
        } else if p == 0.0 {
            return None;
        } else {
            c / p
        };
        if !(r <= max_ratio) {
            return None;
        }
        worst = worst.max(r);
    }
    Some(worst)
}

fn apply_hint<F: Fn(f64) -> f64>(
    f: &F,
    hint: AsymptoticHint,
    cutoffs: &[f64],
    partial: f64,
    tol: &Tolerance,
) -> Option<IntegralOutcome> {
    if cutoffs.len() < 3 {
        return None;
    }
    let n = cutoffs.len();
    let samples: Vec<f64> = cutoffs[n - 3..].iter().map(|&t| f(t)).collect();
    let growing = samples[0] > 0.0 && samples[0] <= samples[1] && samples[1] <= samples[2];
    match hint {
        AsymptoticHint::None => None,
        AsymptoticHint::EventuallyMonotone => growing.then_some(IntegralOutcome::Divergent),
        AsymptoticHint::ExponentialOrder(c) if c >= 0.0 => {
            growing.then_some(IntegralOutcome::Divergent)
        }
        AsymptoticHint::ExponentialOrder(c) => {
            // Tail of e^{ct} from T is f(T)/|c|.
            let t_last = cutoffs[n - 1];
            let tail = f(t_last) / -c;
            let decaying = samples[0] >= samples[1] && samples[1] >= samples[2];
            (decaying && tail <= tol.target(partial)).then_some(IntegralOutcome::Convergent {
                value: partial + tail,
                error_bound: tail,
            })
        }
        AsymptoticHint::PowerOrder(k) => {
            // Both local exponents over the last two doublings must agree with k.
            let l1 = (samples[1] / samples[0]).log2();
            let l2 = (samples[2] / samples[1]).log2();
            let mismatch = (l1 - k).abs().max((l2 - k).abs());
            if !mismatch.is_finite() || mismatch > 0.01 * k.abs().max(1.0) {
                return None;
            }
            if k >= -1.0 {
                return Some(IntegralOutcome::Divergent);
            }
            let decay = -k - 1.0;
            if mismatch >= 0.5 * decay {
                return None;
            }
            let t_last = cutoffs[n - 1];
            let tail = f(t_last) * t_last / decay;
            Some(IntegralOutcome::Convergent {
                value: partial + tail,
                error_bound: tail * mismatch.max(1e-6) / (decay - mismatch),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(f: impl Fn(f64) -> f64, a: f64) -> IntegralOutcome {
        classify_improper(f, a, AsymptoticHint::None).unwrap().outcome
    }

    #[test]
    fn inverse_square_converges_to_one() {
        match outcome(|t| 1.0 / (t * t), 1.0) {
            IntegralOutcome::Convergent { value, error_bound } => {
                assert!((value - 1.0).abs() < 1e-6, "{value}");
                assert!(error_bound < 1e-6);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn harmonic_diverges() {
        assert_eq!(outcome(|t| 1.0 / t, 1.0), IntegralOutcome::Divergent);
    }

    #[test]
    fn gaussian_plane_integrand_diverges() {
        let f = |t: f64| (0.5 * t * t).exp() / (2.0 * std::f64::consts::PI * t);
        assert_eq!(outcome(f, 1.0), IntegralOutcome::Divergent);
    }

    #[test]
    fn super_exponential_decay_converges() {
        let f = |t: f64| (-0.5 * t * t).exp() / t;
        assert!(matches!(outcome(f, 1.0), IntegralOutcome::Convergent { .. }));
    }

    #[test]
    fn slow_power_is_inconclusive() {
        let v = classify_improper(|t| t.powf(-1.05), 1.0, AsymptoticHint::None).unwrap();
        assert_eq!(v.outcome, IntegralOutcome::Inconclusive);
        assert_eq!(v.cutoffs.len(), 40);
    }

    #[test]
    fn power_hint_decides_slow_tail() {
        let v = classify_improper(|t| t.powf(-1.05), 1.0, AsymptoticHint::PowerOrder(-1.05))
            .unwrap();
        match v.outcome {
            IntegralOutcome::Convergent { value, error_bound } => {
                assert!((value - 20.0).abs() < 1e-4, "{value}");
                assert!(error_bound < 1e-3);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(v.hint_used, Some(AsymptoticHint::PowerOrder(-1.05)));
        let v = classify_improper(|t| (1.0 + 1.0 / t) / t, 1.0, AsymptoticHint::PowerOrder(-1.0))
            .unwrap();
        assert_eq!(v.outcome, IntegralOutcome::Divergent);
    }

    #[test]
    fn negative_integrand_is_an_error() {
        let e = classify_improper(|t| 1.0 - t, 1.0, AsymptoticHint::None).unwrap_err();
        assert!(matches!(e, ImproperError::Negative { .. }));
    }
}
