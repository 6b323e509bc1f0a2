//! Rotationally symmetric weighted models `dt² + w(t)² dθ²` with density
//! `e^{f(t)}`.

mod potential;

use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::radial::{
    classify_improper, find_root, integrate, AsymptoticHint, ImproperError, IntegralOutcome,
    IntegralVerdict, QuadratureError, RadialProfile, RootError, Tolerance, WarpingFunction,
};
use crate::verdict::{Criterion, Outcome, Verdict};

pub use potential::{CapacityPotential, CapacityReport};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("model dimension must be at least 2, got {0}")]
    Dimension(usize),
    #[error("n = {n} must satisfy 1 <= n <= {max}")]
    SubDimension { n: usize, max: usize },
    #[error("weight is pole-regular but f'({t}) = {fprime} does not vanish")]
    WeightAtPole { t: f64, fprime: f64 },
    #[error("t = {t} is outside the domain (t must exceed t_min = {t_min})")]
    Domain { t: f64, t_min: f64 },
    #[error("{0}")]
    Unsupported(String),
    #[error("radii must satisfy t_min < rho < R, got rho = {rho}, R = {r}")]
    Radii { rho: f64, r: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Improper(#[from] ImproperError),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error("weighted mean curvature never reaches {target} on ({lo:e}, {hi:e})")]
    NotAttained { target: f64, lo: f64, hi: f64 },
    #[error("crossing at t0 = {t0} is not followed by a monotone tail: at t = {t} the margin is {margin}")]
    NonMonotoneTail { t0: f64, t: f64, margin: f64 },
}

/// Euclidean area of the unit sphere `S^{m-1}`.
pub fn unit_sphere_area(m: usize) -> f64 {
    let half = m as f64 / 2.0;
    2.0 * (half * PI.ln() - ln_gamma(half)).exp()
}

#[derive(Clone, Debug)]
pub struct WeightedModel {
    m: usize,
    w: WarpingFunction,
    f: RadialProfile,
    ln_cm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusMode {
    /// First `t0` with `H^h_n(t) <= -lambda0` for all `t >= t0`.
    FirstBelow,
    /// Last `t0` with `H^h_n(t) >= lambda0` for all `t <= t0`.
    LastAbove,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalRadius {
    pub t0: f64,
    pub mode: RadiusMode,
    /// Interval on which the one-sided inequality was sampled.
    pub scan_window: (f64, f64),
    pub scan_samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundedProbe {
    pub window: (f64, f64),
    pub sup_abs: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CapacityToInfinity {
    /// `None` when the integral could not be classified.
    pub capacity: Option<f64>,
    pub verdict: IntegralVerdict,
}

impl WeightedModel {
    pub fn new(m: usize, w: WarpingFunction, f: RadialProfile) -> Result<Self, ModelError> {
        if m < 2 {
            return Err(ModelError::Dimension(m));
        }
        if f.t_min() == 0.0 && f.is_pole_regular() {
            let t = 1e-6;
            let fprime = f.d1(t);
            if !(fprime.abs() <= 1e-3) {
                return Err(ModelError::WeightAtPole { t, fprime });
            }
        }
        Ok(Self {
            m,
            w,
            f,
            ln_cm: unit_sphere_area(m).ln(),
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn warping(&self) -> &WarpingFunction {
        &self.w
    }

    pub fn weight(&self) -> &RadialProfile {
        &self.f
    }

    pub fn t_min(&self) -> f64 {
        self.f.t_min()
    }

    /// The same warping with a different dimension and weight.
    pub fn with(&self, m: usize, f: RadialProfile) -> Result<Self, ModelError> {
        Self::new(m, self.w.clone(), f)
    }

    fn domain(&self, t: f64) -> Result<(), ModelError> {
        if t > self.f.t_min() && t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(ModelError::Domain {
                t,
                t_min: self.f.t_min(),
            })
        }
    }

    /// `ln A_h(S_t)`; unchecked.
    pub(crate) fn ln_area(&self, t: f64) -> f64 {
        self.ln_cm + (self.m - 1) as f64 * self.w.value(t).ln() + self.f.value(t)
    }

    /// `1 / A_h(S_t)`, computed from the logarithm so that huge weights
    /// underflow cleanly.
    pub(crate) fn inverse_area(&self, t: f64) -> f64 {
        (-self.ln_area(t)).exp()
    }

    pub fn sphere_area(&self, t: f64) -> Result<f64, ModelError> {
        self.domain(t)?;
        Ok(self.ln_area(t).exp())
    }

    pub fn ball_volume(&self, t: f64) -> Result<f64, ModelError> {
        if !self.f.is_pole_regular() || self.f.t_min() > 0.0 {
            return Err(ModelError::Unsupported(format!(
                "weight `{}` is singular at the pole; volumes from the pole are undefined",
                self.f.name()
            )));
        }
        self.domain(t)?;
        let k = (self.m - 1) as f64;
        let q = integrate(
            |s| (self.ln_cm + k * self.w.value(s).ln() + self.f.value(s)).exp(),
            0.0,
            t,
            Tolerance::new(1e-13, 1e-12),
        )?;
        Ok(q.value)
    }

    pub fn mean_curvature(&self, t: f64) -> Result<f64, ModelError> {
        let j = self.w.jet(t);
        if !(t > 0.0) || j.value == 0.0 {
            return Err(ModelError::Domain { t, t_min: 0.0 });
        }
        Ok(j.d1 / j.value)
    }

    /// `n H(t) + f'(t)`.
    pub fn weighted_mean_curvature(&self, n: usize, t: f64) -> Result<f64, ModelError> {
        if n == 0 || n >= self.m {
            return Err(ModelError::SubDimension { n, max: self.m - 1 });
        }
        self.domain(t)?;
        Ok(n as f64 * self.mean_curvature(t)? + self.f.d1(t))
    }

    /// Sup of `|H|` over 64 points of `[T, 2T]`.
    pub fn mean_curvature_probe(&self, big_t: f64) -> Result<BoundedProbe, ModelError> {
        let samples = 64;
        let mut sup = 0.0f64;
        for i in 0..samples {
            let t = big_t * (1.0 + i as f64 / (samples - 1) as f64);
            sup = sup.max(self.mean_curvature(t)?.abs());
        }
        Ok(BoundedProbe {
            window: (big_t, 2.0 * big_t),
            sup_abs: sup,
            samples,
        })
    }

    pub fn capacity_potential(&self, rho: f64, big_r: f64) -> Result<CapacityReport, ModelError> {
        if !(rho > self.f.t_min() && rho > 0.0 && rho < big_r && big_r.is_finite()) {
            return Err(ModelError::Radii { rho, r: big_r });
        }
        CapacityReport::build(self.clone(), rho, big_r)
    }

    pub fn capacity_to_infinity(
        &self,
        rho: f64,
        hint: AsymptoticHint,
    ) -> Result<CapacityToInfinity, ModelError> {
        self.domain(rho)?;
        let verdict = classify_improper(|t| self.inverse_area(t), rho, hint)?;
        let capacity = match verdict.outcome {
            IntegralOutcome::Divergent => Some(0.0),
            IntegralOutcome::Convergent { value, .. } => Some(1.0 / value),
            IntegralOutcome::Inconclusive => None,
        };
        Ok(CapacityToInfinity { capacity, verdict })
    }

    /// Divergence of `∫_{t0}^∞ dt / A_h(S_t)` decides parabolicity.
    pub fn ahlfors_classify(&self, t0: f64, hint: AsymptoticHint) -> Result<Verdict, ModelError> {
        let cap = self.capacity_to_infinity(t0, hint)?;
        let outcome = match cap.verdict.outcome {
            IntegralOutcome::Divergent => Outcome::Parabolic,
            IntegralOutcome::Convergent { .. } => Outcome::Hyperbolic,
            IntegralOutcome::Inconclusive => Outcome::Inconclusive,
        };
        Ok(Verdict::assemble(
            Criterion::AhlforsDirect,
            outcome,
            Vec::new(),
            Some(cap.verdict),
        ))
    }

    pub fn critical_sphere_radius(
        &self,
        n: usize,
        lambda0: f64,
        mode: RadiusMode,
    ) -> Result<CriticalRadius, ModelError> {
        let target = match mode {
            RadiusMode::FirstBelow => -lambda0,
            RadiusMode::LastAbove => lambda0,
        };
        let g = |t: f64| self.weighted_mean_curvature(n, t).map(|h| h - target);
        let lo = (self.f.t_min() * (1.0 + 1e-9)).max(1e-6);
        let hi = 1e6;
        let steps = 1024;
        let ratio = (hi / lo).powf(1.0 / steps as f64);
        if g(lo)? <= 0.0 {
            return Err(ModelError::NotAttained { target, lo, hi });
        }
        let mut prev_t = lo;
        let mut bracket = None;
        for i in 1..=steps {
            let t = lo * ratio.powi(i);
            let v = g(t)?;
            if v <= 0.0 {
                bracket = Some((prev_t, t));
                break;
            }
            prev_t = t;
        }
        let (a, b) = bracket.ok_or(ModelError::NotAttained { target, lo, hi })?;
        let t0 = find_root(|t| g(t).unwrap_or(f64::NAN), a, b, 1e-15)?;
        let samples = 64;
        let (s_lo, s_hi) = match mode {
            RadiusMode::FirstBelow => (t0, 32.0 * t0),
            RadiusMode::LastAbove => ((t0 / 32.0).max(lo), t0),
        };
        let slack = 1e-9 * (1.0 + target.abs());
        for i in 0..samples {
            let t = s_lo * (s_hi / s_lo).powf(i as f64 / (samples - 1) as f64);
            let v = g(t)?;
            let margin = match mode {
                RadiusMode::FirstBelow => -v,
                RadiusMode::LastAbove => v,
            };
            if margin < -slack {
                return Err(ModelError::NonMonotoneTail { t0, t, margin });
            }
        }
        Ok(CriticalRadius {
            t0,
            mode,
            scan_window: (s_lo, s_hi),
            scan_samples: samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::weights;

    fn euclid(m: usize, f: RadialProfile) -> WeightedModel {
        WeightedModel::new(m, WarpingFunction::euclidean(), f).unwrap()
    }

    #[test]
    fn unit_sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn areas_and_volumes() {
        let r3 = euclid(3, weights::zero());
        assert!((r3.sphere_area(2.0).unwrap() - 16.0 * PI).abs() < 1e-12);
        let g2 = euclid(2, weights::gaussian());
        assert!((g2.sphere_area(1.0).unwrap() - 2.0 * PI * (-0.5f64).exp()).abs() < 1e-13);
        assert!(euclid(2, weights::zero()).sphere_area(1e-12).unwrap() < 1e-10);
        assert!((euclid(2, weights::zero()).ball_volume(1.0).unwrap() - PI).abs() < 1e-8);
        assert!((r3.ball_volume(1.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-8);
        assert!((g2.ball_volume(40.0).unwrap() - 2.0 * PI).abs() < 1e-8);
    }

    #[test]
    fn singular_weight_has_no_volume() {
        let w = WarpingFunction::euclidean();
        let m = WeightedModel::new(3, w.clone(), weights::logpow(-2.0, &w)).unwrap();
        assert!(matches!(m.ball_volume(1.0), Err(ModelError::Unsupported(_))));
        assert!(m.sphere_area(1.0).is_ok());
    }

    #[test]
    fn regular_weight_must_be_flat_at_pole() {
        let f = RadialProfile::parse("t").unwrap();
        assert!(matches!(
            WeightedModel::new(2, WarpingFunction::euclidean(), f),
            Err(ModelError::WeightAtPole { .. })
        ));
    }

    #[test]
    fn curvatures() {
        let r = euclid(3, weights::zero());
        assert_eq!(r.mean_curvature(4.0).unwrap(), 0.25);
        let h = WeightedModel::new(3, WarpingFunction::hyperbolic(-1.0).unwrap(), weights::zero())
            .unwrap();
        assert!((h.mean_curvature(2.0).unwrap() - 1.0 / 2f64.tanh()).abs() < 1e-14);
        let probe = r.mean_curvature_probe(100.0).unwrap();
        assert!(probe.sup_abs <= 0.01);
        let g = euclid(3, weights::gaussian());
        assert!((g.weighted_mean_curvature(2, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let g4 = euclid(4, weights::gaussian());
        assert!(g4.weighted_mean_curvature(3, 3f64.sqrt()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn ahlfors_table() {
        let v = |m, f| {
            euclid(m, f)
                .ahlfors_classify(1.0, AsymptoticHint::None)
                .unwrap()
                .outcome
        };
        assert_eq!(v(2, weights::zero()), Outcome::Parabolic);
        assert_eq!(v(3, weights::zero()), Outcome::Hyperbolic);
        assert_eq!(v(2, weights::antigaussian()), Outcome::Hyperbolic);
        assert_eq!(v(3, weights::gaussian()), Outcome::Parabolic);
    }

    #[test]
    fn capacity_to_infinity_r3() {
        let c = euclid(3, weights::zero())
            .capacity_to_infinity(1.0, AsymptoticHint::None)
            .unwrap();
        assert!((c.capacity.unwrap() - 4.0 * PI).abs() < 1e-5);
    }

    #[test]
    fn critical_radii() {
        let g = |m| euclid(m, weights::gaussian());
        let r = g(10)
            .critical_sphere_radius(9, 0.0, RadiusMode::FirstBelow)
            .unwrap();
        assert!((r.t0 - 3.0).abs() < 1e-12);
        let r = g(2).critical_sphere_radius(1, 1.0, RadiusMode::LastAbove).unwrap();
        assert!((r.t0 - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        let r = g(2).critical_sphere_radius(1, 1.0, RadiusMode::FirstBelow).unwrap();
        assert!((r.t0 - (5f64.sqrt() + 1.0) / 2.0).abs() < 1e-12);
        assert!(matches!(
            euclid(3, weights::zero()).critical_sphere_radius(2, 0.0, RadiusMode::FirstBelow),
            Err(ModelError::NotAttained { .. })
        ));
    }

    #[test]
    fn non_monotone_tail_is_reported() {
        // H^h_1 = 1/t + f' with f' = -2 sin(t): dips below 0 then recovers.
        let f = RadialProfile::parse("2*cos(t) - 2").unwrap();
        let m = WeightedModel::new(2, WarpingFunction::euclidean(), f).unwrap();
        assert!(matches!(
            m.critical_sphere_radius(1, 0.0, RadiusMode::FirstBelow),
            Err(ModelError::NonMonotoneTail { .. })
        ));
    }
}
