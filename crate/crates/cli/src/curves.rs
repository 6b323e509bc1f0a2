//! Plot-ready radial curves of a model.

use wparab_core::model::{CapacityPotential, ModelError, WeightedModel};

use crate::config::CurvesParams;
use crate::ScenarioError;

#[derive(Clone, Debug, PartialEq)]
pub struct CurveTable {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl CurveTable {
    /// CSV with a header line; floats in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

fn grid(p: &CurvesParams) -> Result<Vec<f64>, ScenarioError> {
    if p.t_lo >= p.t_hi || p.t_lo.is_nan() || p.t_hi.is_nan() || p.samples < 2 {
        return Err(ScenarioError::Invalid(format!(
            "curves need t_lo < t_hi and samples >= 2, got [{}, {}] with {}",
            p.t_lo, p.t_hi, p.samples
        )));
    }
    let step = (p.t_hi - p.t_lo) / (p.samples - 1) as f64;
    let mut ts: Vec<f64> = (0..p.samples)
        .map(|i| if i + 1 == p.samples { p.t_hi } else { p.t_lo + step * i as f64 })
        .chain(p.t_extra.iter().copied())
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    Ok(ts)
}

fn phi_at(potential: &CapacityPotential, t: f64) -> f64 {
    if t <= potential.rho() {
        1.0
    } else if t >= potential.outer() {
        0.0
    } else {
        potential.phi(t)
    }
}

/// Columns `t,area,volume,H,Hh_n,phi`. `volume` is dropped for weights
/// singular at the pole and `phi` when no annulus is given.
pub fn emit_curves(model: &WeightedModel, p: &CurvesParams) -> Result<CurveTable, ScenarioError> {
    let ts = grid(p)?;
    let lo = ts[0];
    if !(lo > model.t_min() && lo > 0.0) {
        return Err(ModelError::Domain {
            t: lo,
            t_min: model.t_min(),
        }
        .into());
    }
    let n = p.n.unwrap_or(model.dim() - 1);
    let with_volume = match model.ball_volume(lo) {
        Ok(_) => true,
        Err(ModelError::Unsupported(_)) => false,
        Err(e) => return Err(e.into()),
    };
    let potential = match (p.rho, p.big_r) {
        (Some(rho), Some(big_r)) => Some(model.capacity_potential(rho, big_r)?.potential),
        (None, None) => None,
        _ => return Err(ScenarioError::Invalid("phi needs both `rho` and `R`".into())),
    };
    let mut columns = vec!["t", "area"];
    if with_volume {
        columns.push("volume");
    }
    columns.extend(["H", "Hh_n"]);
    if potential.is_some() {
        columns.push("phi");
    }
    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        let mut row = vec![t, model.sphere_area(t)?];
        if with_volume {
            row.push(model.ball_volume(t)?);
        }
        row.push(model.mean_curvature(t)?);
        row.push(model.weighted_mean_curvature(n, t)?);
        if let Some(pot) = &potential {
            row.push(phi_at(pot, t));
        }
        rows.push(row);
    }
    Ok(CurveTable { columns, rows })
}
