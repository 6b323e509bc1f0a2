use serde::Serialize;

use super::{ModelError, WeightedModel};
use crate::radial::{integrate, Tolerance};

const NODES: usize = 512;
const RESIDUAL_POINTS: usize = 256;

fn panel_tolerance() -> Tolerance {
    Tolerance::new(0.0, 1e-13)
}

/// The radial potential `φ(s) = ∫_s^R dt/A_h / ∫_ρ^R dt/A_h` of the annulus
/// `ρ < r < R`, backed by a cumulative table.
#[derive(Clone, Debug)]
pub struct CapacityPotential {
    model: WeightedModel,
    nodes: Vec<f64>,
    /// `tail[k] = ∫_{nodes[k]}^R dt/A_h`
    tail: Vec<f64>,
    total: f64,
    error: f64,
}

impl CapacityPotential {
    fn build(model: WeightedModel, rho: f64, big_r: f64) -> Result<Self, ModelError> {
        let ratio = big_r / rho;
        let mut nodes: Vec<f64> = (0..NODES)
            .map(|k| rho * ratio.powf(k as f64 / (NODES - 1) as f64))
            .collect();
        nodes[0] = rho;
        nodes[NODES - 1] = big_r;
        let mut panels = Vec::with_capacity(NODES - 1);
        let mut error = 0.0;
        for pair in nodes.windows(2) {
            let q = integrate(|t| model.inverse_area(t), pair[0], pair[1], panel_tolerance())?;
            error += q.error;
            panels.push(q.value);
        }
        let mut tail = vec![0.0; NODES];
        for k in (0..NODES - 1).rev() {
            tail[k] = tail[k + 1] + panels[k];
        }
        Ok(Self {
            model,
            total: tail[0],
            nodes,
            tail,
            error,
        })
    }

    pub fn rho(&self) -> f64 {
        self.nodes[0]
    }

    pub fn outer(&self) -> f64 {
        self.nodes[NODES - 1]
    }

    /// `∫_ρ^R dt / A_h(S_t)`
    pub fn resistance(&self) -> f64 {
        self.total
    }

    /// `∫_s^R dt / A_h(S_t)` for `s` in `[ρ, R]`.
    fn tail_from(&self, s: f64) -> f64 {
        let k = self.nodes.partition_point(|&t| t <= s).clamp(1, NODES - 1);
        let next = self.nodes[k];
        let local = integrate(|t| self.model.inverse_area(t), s, next, panel_tolerance())
            .map(|q| q.value)
            .unwrap_or(f64::NAN);
        self.tail[k] + local
    }

    /// `φ(s)`; NaN outside `[ρ, R]`.
    pub fn phi(&self, s: f64) -> f64 {
        let (rho, big_r) = (self.rho(), self.outer());
        if s == rho {
            1.0
        } else if s == big_r {
            0.0
        } else if s > rho && s < big_r {
            self.tail_from(s) / self.total
        } else {
            f64::NAN
        }
    }

    /// `φ'(s) = -1 / (A_h(S_s) ∫_ρ^R dt/A_h)`.
    pub fn dphi(&self, s: f64) -> f64 {
        -self.model.inverse_area(s) / self.total
    }

    /// Max of `|φ'' + ((m-1)H + f')φ'|` at interior grid points, with both
    /// derivatives taken by five-point differences of [`Self::phi`].
    fn ode_residual(&self) -> Result<f64, ModelError> {
        let (rho, big_r) = (self.rho(), self.outer());
        let m = self.model.dim();
        let mut worst = 0.0f64;
        for i in 0..RESIDUAL_POINTS {
            let s = rho + (big_r - rho) * (i + 1) as f64 / (RESIDUAL_POINTS + 1) as f64;
            let drift = self.model.weighted_mean_curvature(m - 1, s)?;
            // φ varies on the scale 1/|drift|; steep weights need a finer step.
            let h = (1e-3 * s).min(1e-2 / drift.abs()).min(0.25 * (s - rho).min(big_r - s));
            let p = |k: f64| self.phi(s + k * h);
            let (pm2, pm1, p0, p1, p2) = (p(-2.0), p(-1.0), p(0.0), p(1.0), p(2.0));
            let d1 = (pm2 - 8.0 * pm1 + 8.0 * p1 - p2) / (12.0 * h);
            let d2 = (-pm2 + 16.0 * pm1 - 30.0 * p0 + 16.0 * p1 - p2) / (12.0 * h * h);
            worst = worst.max((d2 + drift * d1).abs());
        }
        Ok(worst)
    }
}

/// Capacity of the annulus `ρ < r < R` with its potential.
#[derive(Clone, Debug, Serialize)]
pub struct CapacityReport {
    pub rho: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub capacity: f64,
    #[serde(skip)]
    pub potential: CapacityPotential,
    pub ode_residual: f64,
    pub quadrature_error: f64,
    pub grid_nodes: usize,
}

impl CapacityReport {
    pub(super) fn build(model: WeightedModel, rho: f64, big_r: f64) -> Result<Self, ModelError> {
        let potential = CapacityPotential::build(model, rho, big_r)?;
        let capacity = 1.0 / potential.total;
        let quadrature_error = capacity * potential.error / potential.total;
        let ode_residual = potential.ode_residual()?;
        Ok(Self {
            rho,
            big_r,
            capacity,
            potential,
            ode_residual,
            quadrature_error,
            grid_nodes: NODES,
        })
    }
}
