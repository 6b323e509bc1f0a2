//! Weighted mean curvatures of the Gaussian cylinders and of hyperplanes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::CriteriaError;
use crate::geometry::{catalog, AmbientSpace};
use crate::radial::{find_root, RadialProfile};

const PROBE_SAMPLES: usize = 64;
const PROBE_SEED: u64 = 0x5eed_1a7e;

/// `(k-1)/t - t + ξ'(t)`, the weighted mean curvature of
/// `S^{k-1}_t × ℝ^{m-k}` for the weight `-|x|²/2 + ξ(|x_h|)` where `x_h`
/// is the horizontal factor.
pub fn cylinder_weighted_mc(k: usize, xi: &RadialProfile, t: f64) -> Result<f64, CriteriaError> {
    if k < 2 {
        return Err(CriteriaError::Invalid(format!("cylinder needs k >= 2, got {k}")));
    }
    cylinder_weighted_mc_n(k - 1, xi, t)
}

/// The variant with `k - 1` replaced by `n`.
pub fn cylinder_weighted_mc_n(n: usize, xi: &RadialProfile, t: f64) -> Result<f64, CriteriaError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(CriteriaError::Invalid(format!("radius must be positive, got {t}")));
    }
    Ok(n as f64 / t - t + xi.d1(t))
}

/// Radius at which the cylinder has weighted mean curvature `lambda`: the
/// first sign change of `H^h_c - λ` on a log grid of `(1e-6, 1e6)`,
/// refined to `1e-15`.
pub fn critical_cylinder_radius(k: usize, xi: &RadialProfile, lambda: f64) -> Result<f64, CriteriaError> {
    let g = |t: f64| cylinder_weighted_mc(k, xi, t).map(|h| h - lambda).unwrap_or(f64::NAN);
    let lo = (xi.t_min() * (1.0 + 1e-9)).max(1e-6);
    let hi = 1e6;
    let steps = 1024;
    let ratio = (hi / lo).powf(1.0 / steps as f64);
    let mut prev = lo;
    let mut prev_v = g(lo);
    for i in 1..=steps {
        let t = lo * ratio.powi(i);
        let v = g(t);
        if prev_v == 0.0 {
            return Ok(prev);
        }
        if prev_v * v <= 0.0 {
            return Ok(find_root(g, prev, t, 1e-15)?);
        }
        prev = t;
        prev_v = v;
    }
    Err(CriteriaError::Invalid(format!(
        "cylinder mean curvature never reaches {lambda} on ({lo:e}, {hi:e})"
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HyperplaneReport {
    /// `H^h` at the requested point.
    pub value: f64,
    /// `max - min` over the probe points.
    pub spread: f64,
    pub samples: usize,
    pub min: f64,
    pub max: f64,
}

/// `H^h` of the hyperplane `⟨p, a⟩ = t` with unit normal along `a`, at
/// `p`: `-(f'(r)/r) t - ∂g/∂a` for `h = f(r) + g`. Also probes 64 random
/// points of the hyperplane for constancy.
pub fn hyperplane_weighted_mc(
    ambient: &AmbientSpace,
    a: &[f64],
    t: f64,
    p: &[f64],
) -> Result<HyperplaneReport, CriteriaError> {
    if !ambient.is_euclidean() {
        return Err(CriteriaError::Invalid("hyperplanes need a Euclidean ambient".into()));
    }
    let m = ambient.dim();
    if a.len() != m || p.len() != m {
        return Err(CriteriaError::Invalid(format!(
            "normal and point must have {m} components, got {} and {}",
            a.len(),
            p.len()
        )));
    }
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(CriteriaError::Invalid("normal must be non-zero".into()));
    }
    let unit: Vec<f64> = a.iter().map(|v| v / norm).collect();
    let offset: f64 = p.iter().zip(&unit).map(|(x, y)| x * y).sum();
    if (offset - t).abs() > 1e-9 * (1.0 + t.abs()) {
        return Err(CriteriaError::Invalid(format!("point is at offset {offset}, not {t}")));
    }
    let mc = |q: &[f64]| -> f64 {
        let g = ambient.grad_h(q);
        -g.iter().zip(&unit).map(|(x, y)| x * y).sum::<f64>()
    };
    let value = mc(p);
    if !value.is_finite() {
        return Err(CriteriaError::Invalid(format!("weight gradient is not finite at {p:?}")));
    }
    let plane = catalog::hyperplane(ambient.clone(), &unit, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let (mut min, mut max) = (value, value);
    for _ in 0..PROBE_SAMPLES {
        let u: Vec<f64> = (0..m - 1)
            .map(|_| rng.random_range(-catalog::HALF_WIDTH..catalog::HALF_WIDTH))
            .collect();
        let v = mc(&plane.chart().eval(&u));
        min = min.min(v);
        max = max.max(v);
    }
    Ok(HyperplaneReport {
        value,
        spread: max - min,
        samples: PROBE_SAMPLES,
        min,
        max,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::weights;

    #[test]
    fn cylinder_values() {
        let zero = weights::zero();
        assert!(cylinder_weighted_mc(4, &zero, 3f64.sqrt()).unwrap().abs() < 1e-15);
        assert_eq!(cylinder_weighted_mc(4, &zero, 1.0).unwrap(), 2.0);
        let xi = RadialProfile::parse("t^2/2").unwrap();
        assert!((cylinder_weighted_mc(2, &xi, 5.0).unwrap() - 0.2).abs() < 1e-15);
        assert!(cylinder_weighted_mc(1, &zero, 1.0).is_err());
    }

    #[test]
    fn cylinder_radius_matches_closed_form() {
        // (k-1)/t - t = λ  ⇔  t = (-λ + sqrt(λ² + 4(k-1)))/2
        for (k, lambda) in [(2, 0.0), (3, 0.0), (4, 0.0), (3, 1.5), (5, -2.0)] {
            let t = critical_cylinder_radius(k, &weights::zero(), lambda).unwrap();
            let exact = (-lambda + (lambda * lambda + 4.0 * (k - 1) as f64).sqrt()) / 2.0;
            assert!((t - exact).abs() < 1e-12, "{k} {lambda}: {t} vs {exact}");
        }
    }
}
