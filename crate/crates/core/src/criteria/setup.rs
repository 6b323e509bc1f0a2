use std::sync::Arc;

use crate::expr::Jet;
use crate::model::WeightedModel;
use crate::radial::{integrate, RadialProfile, Tolerance};

use super::CriteriaError;

const NODES: usize = 512;
const SPAN_DOUBLINGS: f64 = 40.0;

fn panel_tolerance() -> Tolerance {
    Tolerance::new(0.0, 1e-13)
}

/// Cumulative table of `∫_{t0}^t α` on geometric nodes over
/// `[t0, 2^40 t0]`.
#[derive(Debug)]
struct Cumulative {
    alpha: RadialProfile,
    nodes: Vec<f64>,
    prefix: Vec<f64>,
}

impl Cumulative {
    fn build(alpha: RadialProfile, t0: f64) -> Result<Self, CriteriaError> {
        let ratio = 2f64.powf(SPAN_DOUBLINGS / (NODES - 1) as f64);
        let nodes: Vec<f64> = (0..NODES).map(|k| t0 * ratio.powi(k as i32)).collect();
        let mut prefix = vec![0.0; NODES];
        for k in 1..NODES {
            let q = integrate(|t| alpha.value(t), nodes[k - 1], nodes[k], panel_tolerance())?;
            prefix[k] = prefix[k - 1] + q.value;
        }
        Ok(Self {
            alpha,
            nodes,
            prefix,
        })
    }

    fn value(&self, t: f64) -> f64 {
        let t0 = self.nodes[0];
        if t == t0 {
            return 0.0;
        }
        let local = |a: f64, b: f64| {
            integrate(|s| self.alpha.value(s), a, b, panel_tolerance())
                .map(|q| q.value)
                .unwrap_or(f64::NAN)
        };
        if t < t0 {
            return -local(t, t0);
        }
        let k = self.nodes.partition_point(|&s| s <= t) - 1;
        let start = self.nodes[k];
        if t == start {
            self.prefix[k]
        } else {
            self.prefix[k] + local(start, t)
        }
    }
}

/// The comparison data of the submanifold criteria: base model, intrinsic
/// dimension `n`, anchor `t0`, bound `α` and the `n`-dimensional model with
/// weight `f(t) = ∫_{t0}^t α`.
#[derive(Clone, Debug)]
pub struct ComparisonSetup {
    base: WeightedModel,
    n: usize,
    t0: f64,
    alpha: RadialProfile,
    weight: RadialProfile,
    comparison: WeightedModel,
}

impl ComparisonSetup {
    pub fn new(base: WeightedModel, n: usize, t0: f64, alpha: RadialProfile) -> Result<Self, CriteriaError> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(CriteriaError::Invalid(format!("anchor t0 must be positive, got {t0}")));
        }
        if n < 2 || n > base.dim() {
            return Err(CriteriaError::Invalid(format!(
                "submanifold dimension must satisfy 2 <= n <= {}, got {n}",
                base.dim()
            )));
        }
        let cumulative = Arc::new(Cumulative::build(alpha.clone(), t0)?);
        let a = alpha.clone();
        let weight = RadialProfile::new(format!("int_{t0}^t {}", alpha.name()), move |t| {
            let j = a.jet(t);
            Jet::new(cumulative.value(t), j.value, j.d1)
        })
        .with_t_min(alpha.t_min())
        .pole_singular();
        let comparison = base.with(n, weight.clone())?;
        Ok(Self {
            base,
            n,
            t0,
            alpha,
            weight,
            comparison,
        })
    }

    pub fn base(&self) -> &WeightedModel {
        &self.base
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn alpha(&self) -> &RadialProfile {
        &self.alpha
    }

    /// `f(t) = ∫_{t0}^t α`
    pub fn comparison_weight(&self) -> &RadialProfile {
        &self.weight
    }

    /// `M^n_w` with weight `e^f`.
    pub fn comparison_model(&self) -> &WeightedModel {
        &self.comparison
    }

    /// `nH(t) + α(t)`
    pub fn balance(&self, t: f64) -> Result<f64, CriteriaError> {
        Ok(self.n as f64 * self.base.mean_curvature(t)? + self.alpha.value(t))
    }
}
