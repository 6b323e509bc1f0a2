use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::expr::{Expression, Jet, ParseError};

/// Advisory information about the tail of an integrand.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum AsymptoticHint {
    #[default]
    None,
    /// The integrand is eventually monotone.
    EventuallyMonotone,
    /// The integrand behaves like `exp(c t)`.
    ExponentialOrder(f64),
    /// The integrand behaves like `t^k`.
    PowerOrder(f64),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("profile expressions take exactly one variable, got {0}")]
    Arity(usize),
    #[error("warping function fails w(t)/t -> 1 at t = {t}: ratio {ratio}")]
    PoleCondition { t: f64, ratio: f64 },
    #[error("warping function is not positive at t = {t} (w = {value})")]
    NonPositive { t: f64, value: f64 },
    #[error("{0}")]
    InvalidParameter(String),
}

type JetFn = Arc<dyn Fn(f64) -> Jet + Send + Sync>;

/// A scalar function of `t > t_min` with its first two derivatives.
///
/// Evaluating outside the natural domain yields a NaN jet instead of an
/// error; integrators and root finders report non-finite values with the
/// offending `t`.
#[derive(Clone)]
pub struct RadialProfile {
    name: String,
    jet: JetFn,
    t_min: f64,
    pole_regular: bool,
    hint: AsymptoticHint,
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("name", &self.name)
            .field("t_min", &self.t_min)
            .field("pole_regular", &self.pole_regular)
            .field("hint", &self.hint)
            .finish()
    }
}

impl RadialProfile {
    pub fn new<F>(name: impl Into<String>, jet: F) -> Self
    where
        F: Fn(f64) -> Jet + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            jet: Arc::new(jet),
            t_min: 0.0,
            pole_regular: true,
            hint: AsymptoticHint::None,
        }
    }

    /// Profile from a one-variable expression; derivatives come from nested
    /// dual numbers.
    pub fn from_expr(expr: Expression) -> Result<Self, ProfileError> {
        if expr.variables().len() != 1 {
            return Err(ProfileError::Arity(expr.variables().len()));
        }
        let name = expr.source().to_owned();
        Ok(Self::new(name, move |t| {
            expr.jet(t).unwrap_or(Jet::new(f64::NAN, f64::NAN, f64::NAN))
        }))
    }

    pub fn parse(source: &str) -> Result<Self, ProfileError> {
        Self::from_expr(Expression::parse(source, &["t"])?)
    }

    pub fn with_t_min(mut self, t_min: f64) -> Self {
        self.t_min = t_min;
        self
    }

    /// Marks the profile as not extending smoothly to `t = 0`.
    pub fn pole_singular(mut self) -> Self {
        self.pole_regular = false;
        self
    }

    pub fn with_hint(mut self, hint: AsymptoticHint) -> Self {
        self.hint = hint;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    pub fn is_pole_regular(&self) -> bool {
        self.pole_regular
    }

    pub fn hint(&self) -> AsymptoticHint {
        self.hint
    }

    pub fn jet(&self, t: f64) -> Jet {
        (self.jet)(t)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.jet(t).value
    }

    pub fn d1(&self, t: f64) -> f64 {
        self.jet(t).d1
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.jet(t).d2
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_| Jet::new(c, 0.0, 0.0))
    }

    /// `a + b t`
    pub fn linear(a: f64, b: f64) -> Self {
        Self::new(format!("{a} + {b}*t"), move |t| Jet::new(a + b * t, b, 0.0))
    }

    pub fn scaled(&self, k: f64) -> Self {
        let inner = self.clone();
        let mut out = Self::new(format!("{k}*({})", self.name), move |t| {
            let j = inner.jet(t);
            Jet::new(k * j.value, k * j.d1, k * j.d2)
        });
        out.t_min = self.t_min;
        out.pole_regular = self.pole_regular;
        out
    }

    pub fn plus(&self, other: &RadialProfile) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let mut out = Self::new(format!("({}) + ({})", self.name, other.name), move |t| {
            let (x, y) = (a.jet(t), b.jet(t));
            Jet::new(x.value + y.value, x.d1 + y.d1, x.d2 + y.d2)
        });
        out.t_min = self.t_min.max(other.t_min);
        out.pole_regular = self.pole_regular && other.pole_regular;
        out
    }

    pub fn plus_constant(&self, c: f64) -> Self {
        self.plus(&Self::constant(c))
    }
}

/// A positive profile with `w(0) = 0`, `w'(0) = 1`.
#[derive(Clone, Debug)]
pub struct WarpingFunction(RadialProfile);

impl WarpingFunction {
    pub fn new(profile: RadialProfile) -> Result<Self, ProfileError> {
        for t in [1e-6, 1e-8] {
            let ratio = profile.value(t) / t;
            if !((ratio - 1.0).abs() <= 1e-3) {
                return Err(ProfileError::PoleCondition { t, ratio });
            }
        }
        for k in 0..=40 {
            let t = 1e-3 * 1.5f64.powi(k);
            let v = profile.value(t);
            if !(v > 0.0) {
                return Err(ProfileError::NonPositive { t, value: v });
            }
        }
        Ok(Self(profile))
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.0
    }

    pub fn name(&self) -> &str {
        self.0.name()
    }

    pub fn jet(&self, t: f64) -> Jet {
        self.0.jet(t)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.0.value(t)
    }

    pub fn euclidean() -> Self {
        Self(RadialProfile::new("euclidean", |t| Jet::new(t, 1.0, 0.0)))
    }

    /// `sinh(sqrt(-kappa) t) / sqrt(-kappa)` for `kappa < 0`.
    pub fn hyperbolic(kappa: f64) -> Result<Self, ProfileError> {
        if !(kappa < 0.0 && kappa.is_finite()) {
            return Err(ProfileError::InvalidParameter(format!(
                "hyperbolic warping needs kappa < 0, got {kappa}"
            )));
        }
        let s = (-kappa).sqrt();
        Ok(Self(RadialProfile::new(format!("hyperbolic({kappa})"), move |t| {
            let (sh, ch) = ((s * t).sinh(), (s * t).cosh());
            Jet::new(sh / s, ch, s * sh)
        })))
    }

    /// The profile of the paraboloid of revolution `z = a |x|^2`, in
    /// arc-length parametrisation along the meridian.
    pub fn paraboloid(a: f64) -> Result<Self, ProfileError> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(ProfileError::InvalidParameter(format!(
                "paraboloid needs a > 0, got {a}"
            )));
        }
        Ok(Self(RadialProfile::new(format!("paraboloid({a})"), move |t| {
            let rho = paraboloid_radius(a, t);
            let q = 1.0 + 4.0 * a * a * rho * rho;
            Jet::new(rho, 1.0 / q.sqrt(), -4.0 * a * a * rho / (q * q))
        })))
    }

    pub fn custom(profile: RadialProfile) -> Result<Self, ProfileError> {
        Self::new(profile)
    }
}

/// Inverts the meridian arc length `s(rho)` of `z = a rho^2`.
fn paraboloid_radius(a: f64, t: f64) -> f64 {
    if !(t > 0.0) {
        return if t == 0.0 { 0.0 } else { f64::NAN };
    }
    let arc = |r: f64| {
        let u = 2.0 * a * r;
        0.5 * r * (1.0 + u * u).sqrt() + u.asinh() / (4.0 * a)
    };
    // s is convex with s(r) >= r, so Newton from r = t decreases monotonically.
    let mut r = t;
    for _ in 0..200 {
        let step = (arc(r) - t) / (1.0 + 4.0 * a * a * r * r).sqrt();
        r -= step;
        if step.abs() <= 4.0 * f64::EPSILON * r {
            break;
        }
    }
    r
}

/// Built-in log-weights `f` with closed-form derivatives.
pub mod weights {
    use super::*;

    pub fn zero() -> RadialProfile {
        RadialProfile::new("zero", |_| Jet::new(0.0, 0.0, 0.0))
    }

    /// `f = -t^2/2`
    pub fn gaussian() -> RadialProfile {
        RadialProfile::new("gaussian", |t| Jet::new(-0.5 * t * t, -t, -1.0))
    }

    /// `f = t^2/2`
    pub fn antigaussian() -> RadialProfile {
        RadialProfile::new("antigaussian", |t| Jet::new(0.5 * t * t, t, 1.0))
    }

    /// `f = a t^k`. Singular at the pole unless `k = 0` or `k >= 2`.
    pub fn power(a: f64, k: f64) -> RadialProfile {
        let p = RadialProfile::new(format!("power({a}, {k})"), move |t| {
            if k == 0.0 {
                return Jet::new(a, 0.0, 0.0);
            }
            Jet::new(
                a * t.powf(k),
                a * k * t.powf(k - 1.0),
                a * k * (k - 1.0) * t.powf(k - 2.0),
            )
        });
        if k == 0.0 || k >= 2.0 {
            p
        } else {
            p.pole_singular()
        }
    }

    /// `f = k log w`, the log of the weight `w^k`.
    pub fn logpow(k: f64, w: &WarpingFunction) -> RadialProfile {
        let w = w.clone();
        let p = RadialProfile::new(format!("logpow({k})"), move |t| {
            let j = w.jet(t);
            let h = j.d1 / j.value;
            Jet::new(k * j.value.ln(), k * h, k * (j.d2 / j.value - h * h))
        });
        if k == 0.0 {
            p
        } else {
            p.pole_singular()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &RadialProfile, t: f64) {
        let h = 1e-5 * t.max(1.0);
        let j = p.jet(t);
        let d1 = (p.value(t + h) - p.value(t - h)) / (2.0 * h);
        let d2 = (p.d1(t + h) - p.d1(t - h)) / (2.0 * h);
        let scale = |x: f64| x.abs().max(1.0);
        assert!((d1 - j.d1).abs() <= 1e-6 * scale(j.d1), "{} d1 at {t}: {d1} vs {}", p.name(), j.d1);
        assert!((d2 - j.d2).abs() <= 1e-6 * scale(j.d2), "{} d2 at {t}: {d2} vs {}", p.name(), j.d2);
    }

    #[test]
    fn paraboloid_inverts_arc_length() {
        let w = WarpingFunction::paraboloid(0.5).unwrap();
        for t in [1e-3, 0.5, 3.0, 40.0] {
            let rho = w.value(t);
            let u: f64 = rho;
            let s = 0.5 * u * (1.0 + u * u).sqrt() + u.asinh() / 2.0;
            assert!((s - t).abs() < 1e-12 * t.max(1.0));
            fd_check(w.profile(), t);
        }
    }

    #[test]
    fn pole_condition_is_enforced() {
        assert!(WarpingFunction::new(RadialProfile::parse("2*t").unwrap()).is_err());
        assert!(WarpingFunction::new(RadialProfile::parse("t + 1").unwrap()).is_err());
        assert!(WarpingFunction::new(RadialProfile::parse("sin(t)").unwrap()).is_err());
        assert!(WarpingFunction::new(RadialProfile::parse("sinh(t)").unwrap()).is_ok());
    }

    #[test]
    fn expression_profile_matches_closed_form() {
        let e = RadialProfile::parse("sinh(sqrt(2)*t)/sqrt(2)").unwrap();
        let c = WarpingFunction::hyperbolic(-2.0).unwrap();
        for t in [0.1, 1.0, 5.0] {
            let (a, b) = (e.jet(t), c.jet(t));
            assert!((a.value - b.value).abs() < 1e-12 * b.value);
            assert!((a.d1 - b.d1).abs() < 1e-12 * b.d1);
            assert!((a.d2 - b.d2).abs() < 1e-12 * b.d2);
        }
    }

    #[test]
    fn domain_errors_become_nan() {
        let p = RadialProfile::parse("log(t - 1)").unwrap();
        assert!(p.value(0.5).is_nan());
        assert!(p.value(2.0).is_finite());
    }

    #[test]
    fn logpow_is_singular_at_pole() {
        let w = WarpingFunction::euclidean();
        assert!(!weights::logpow(-2.0, &w).is_pole_regular());
        assert!(weights::power(1.0, 2.0).is_pole_regular());
        assert!(!weights::power(1.0, 1.0).is_pole_regular());
    }

    #[test]
    fn catalog_derivatives_match_finite_differences() {
        let w = WarpingFunction::hyperbolic(-1.0).unwrap();
        let profiles = [
            WarpingFunction::euclidean().profile().clone(),
            WarpingFunction::hyperbolic(-0.25).unwrap().profile().clone(),
            weights::power(0.7, 1.5),
            weights::power(-0.3, 3.0),
            weights::gaussian(),
            weights::logpow(2.0, &w),
            weights::logpow(-1.5, &WarpingFunction::euclidean()),
        ];
        for p in &profiles {
            for i in 0..=20 {
                let t = 0.1 * (500f64).powf(i as f64 / 20.0);
                fd_check(p, t);
            }
        }
    }
}
