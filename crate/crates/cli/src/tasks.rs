//! One function per scenario task. Each returns a JSON result and, for
//! `curves`, a CSV table.

use serde_json::{json, Value};
use wparab_core::criteria::{
    balanced_anchor, classify_thm32, classify_thm33, corollary_shortcut, ComparisonSetup, ConditionA, CorollaryId,
    CorollaryRequest, Direction,
};
use wparab_core::expr::Expression;
use wparab_core::geometry::{
    angle_function_laplacian, lemma31_residual, ChartMap, ImmersedSubmanifold, ProfileSense,
};
use wparab_core::model::WeightedModel;
use wparab_core::radial::RadialProfile;
use wparab_core::stochastic::{comparison_check, generator_check, hit_probability, recurrence_probe, DiffusionSpec};
use wparab_core::verdict::Verdict;

use crate::catalog;
use crate::config::{
    CapacityParams, ClassifyParams, ConditionSpec, IdentityParams, McMode, McParams, ModelSpec,
    Scenario, Task,
};
use crate::curves::CurveTable;
use crate::ScenarioError;

type Result<T> = std::result::Result<T, ScenarioError>;

pub struct TaskOutput {
    pub result: Value,
    pub csv: Option<CurveTable>,
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn run(scenario: &Scenario, seed: u64) -> Result<TaskOutput> {
    let model = catalog::model(&scenario.model)?;
    let sub = scenario
        .submanifold
        .as_ref()
        .map(|s| catalog::submanifold(&scenario.model, &model, s))
        .transpose()?;
    let plain = |result| TaskOutput { result, csv: None };
    match &scenario.task {
        Task::Classify(p) => classify(&model, sub.as_ref(), p).map(plain),
        Task::Capacity(p) => capacity(&model, p).map(plain),
        Task::Curves(p) => {
            let table = crate::curves::emit_curves(&model, p)?;
            let result = json!({
                "columns": table.columns,
                "rows": table.rows.len(),
            });
            Ok(TaskOutput {
                result,
                csv: Some(table),
            })
        }
        Task::McVerify(p) => mc_verify(&scenario.model, &model, sub, p, seed).map(plain),
        Task::CheckIdentities(p) => {
            let sub = sub.ok_or_else(|| ScenarioError::Invalid("check-identities needs a submanifold".into()))?;
            identities(&sub, p, seed).map(plain)
        }
    }
}

fn parse_profile(src: &str, what: &str) -> Result<RadialProfile> {
    RadialProfile::parse(src).map_err(|e| ScenarioError::Invalid(format!("{what} `{src}`: {e}")))
}

fn condition_a(p: &ClassifyParams, sub: Option<&ImmersedSubmanifold>) -> Result<Option<ConditionA>> {
    let reason = || p.assert_reason.clone().unwrap_or_else(|| "asserted in the scenario".into());
    Ok(match &p.condition_a {
        None => None,
        Some(ConditionSpec::Unchecked) => Some(ConditionA::Unchecked),
        Some(ConditionSpec::Asserted) => Some(ConditionA::asserted(reason())),
        Some(ConditionSpec::Sampled) => {
            let s = sub.ok_or_else(|| ScenarioError::Invalid("sampled (A) needs a submanifold".into()))?;
            Some(ConditionA::sampled(s.clone(), s.domain().clone(), p.assert_beyond))
        }
    })
}

/// Builds the comparison setup of a theorem run, anchoring `t0` at the
/// balance crossing when it is not given.
fn theorem_setup(model: &WeightedModel, n: usize, p: &ClassifyParams, sense: ProfileSense) -> Result<ComparisonSetup> {
    let src = p
        .alpha
        .as_deref()
        .ok_or_else(|| ScenarioError::Invalid(format!("{} needs `alpha`", p.criterion)))?;
    let alpha = parse_profile(src, "alpha")?;
    let t0 = match p.t0 {
        Some(t) => t,
        None => balanced_anchor(model, n, &alpha, sense)?
            .ok_or_else(|| ScenarioError::Invalid("no t0 where condition (B) starts to hold; give `t0`".into()))?
            .max(1.0),
    };
    Ok(ComparisonSetup::new(model.clone(), n, t0, alpha)?)
}

fn classify_verdict(
    model: &WeightedModel,
    sub: Option<&ImmersedSubmanifold>,
    p: &ClassifyParams,
) -> Result<(Verdict, Option<ComparisonSetup>)> {
    let n = p.n.unwrap_or(model.dim() - 1);
    let a = condition_a(p, sub)?;
    match p.criterion.as_str() {
        "ahlfors" => Ok((model.ahlfors_classify(p.t0.unwrap_or(1.0), p.hint)?, None)),
        "thm32" | "thm33" => {
            let upper = p.criterion == "thm32";
            let sense = if upper { ProfileSense::Upper } else { ProfileSense::Lower };
            let setup = theorem_setup(model, n, p, sense)?;
            let a = a.unwrap_or_default();
            let v = if upper {
                classify_thm32(&setup, &a, p.hint)?
            } else {
                classify_thm33(&setup, &a, p.hint)?
            };
            Ok((v, Some(setup)))
        }
        name => {
            let id: CorollaryId = name.parse().map_err(|_| {
                ScenarioError::Catalog(format!(
                    "unknown criterion `{name}`; expected ahlfors, thm32, thm33, cor_useful, cor_radialcase, cor_radial2 or cor_translating"
                ))
            })?;
            let mut req = CorollaryRequest::new(id, model.clone(), n)
                .c(p.c)
                .exp_integral(p.exp_integral)
                .hint(p.hint);
            if let Some(d) = &p.direction {
                req = req.direction(match d.as_str() {
                    "parabolic" => Direction::Parabolic,
                    "hyperbolic" => Direction::Hyperbolic,
                    other => {
                        return Err(ScenarioError::Invalid(format!(
                            "direction must be parabolic or hyperbolic, got `{other}`"
                        )))
                    }
                });
            }
            if let Some(b) = &p.beta {
                req = req.beta(parse_profile(b, "beta")?);
            }
            if let Some(al) = &p.alpha {
                req = req.alpha(parse_profile(al, "alpha")?);
            }
            if let Some(k) = p.k {
                req = req.k(k);
            }
            if let Some(t) = p.t0 {
                req = req.t0(t);
            }
            if let Some(a) = a {
                req = req.condition_a(a);
            }
            Ok((corollary_shortcut(&req)?, None))
        }
    }
}

fn classify(model: &WeightedModel, sub: Option<&ImmersedSubmanifold>, p: &ClassifyParams) -> Result<Value> {
    let (verdict, setup) = classify_verdict(model, sub, p)?;
    let mut out = json!({
        "outcome": verdict.outcome,
        "verdict": to_json(&verdict),
        "sound": verdict.is_sound(),
    });
    if let Some(s) = setup {
        out["setup"] = json!({
            "n": s.n(),
            "t0": s.t0(),
            "alpha": s.alpha().name(),
        });
    }
    Ok(out)
}

fn capacity(model: &WeightedModel, p: &CapacityParams) -> Result<Value> {
    let mut out = json!({});
    if let Some(big_r) = p.big_r {
        let c = model.capacity_potential(p.rho, big_r)?;
        out["annulus"] = to_json(&c);
    }
    if p.to_infinity {
        out["to_infinity"] = to_json(&model.capacity_to_infinity(p.rho, p.hint)?);
    }
    if p.big_r.is_none() && !p.to_infinity {
        return Err(ScenarioError::Invalid("capacity needs `R` or `to_infinity`".into()));
    }
    Ok(out)
}

/// With no submanifold, Euclidean models run on ℝ^m itself.
fn diffusion_surface(
    spec: &ModelSpec,
    model: &WeightedModel,
    sub: Option<ImmersedSubmanifold>,
) -> Result<ImmersedSubmanifold> {
    match sub {
        Some(s) => Ok(s),
        None => {
            let amb = catalog::ambient(spec, model)?;
            if !amb.is_euclidean() {
                return Err(ScenarioError::Invalid("mc-verify on a non-Euclidean model needs a submanifold".into()));
            }
            Ok(wparab_core::geometry::catalog::coordinate_plane(amb, spec.m)?)
        }
    }
}

fn mc_verify(
    spec: &ModelSpec,
    model: &WeightedModel,
    sub: Option<ImmersedSubmanifold>,
    p: &McParams,
    seed: u64,
) -> Result<Value> {
    let surface = diffusion_surface(spec, model, sub)?;
    let mut diffusion = DiffusionSpec::new(surface.clone(), seed);
    if let Some(dt) = p.dt {
        diffusion = diffusion.with_step(dt);
    }
    let need_r = || p.big_r.ok_or_else(|| ScenarioError::Invalid("this mode needs `R`".into()));
    Ok(match p.mode {
        McMode::Hit => to_json(&hit_probability(&diffusion, &p.start, p.rho, need_r()?, p.paths)?),
        McMode::Recurrence => to_json(&recurrence_probe(&diffusion, &p.start, p.rho, &p.schedule, p.paths)?),
        McMode::Comparison => {
            let cp = p
                .classify
                .as_ref()
                .ok_or_else(|| ScenarioError::Invalid("comparison needs a `classify` block".into()))?;
            if !matches!(cp.criterion.as_str(), "thm32" | "thm33") {
                return Err(ScenarioError::Invalid("comparison runs use thm32 or thm33".into()));
            }
            let mut cp = cp.clone();
            cp.n = Some(surface.dim());
            let (verdict, setup) = classify_verdict(model, Some(&surface), &cp)?;
            let setup = setup.expect("theorem runs build a setup");
            let report = comparison_check(&diffusion, &setup, &verdict, &p.start, p.rho, need_r()?, p.paths)?;
            json!({ "verdict": to_json(&verdict), "comparison": to_json(&report) })
        }
        McMode::Generator => {
            let names: Vec<String> = (1..=surface.dim()).map(|i| format!("u{i}")).collect();
            let src = p.psi.clone().unwrap_or_else(|| {
                names
                    .iter()
                    .map(|v| format!("sin({v})"))
                    .chain(std::iter::once(format!("{}^2", names[0])))
                    .collect::<Vec<_>>()
                    .join(" + ")
            });
            let psi = Expression::parse(&src, &names)
                .map_err(|e| ScenarioError::Invalid(format!("psi `{src}`: {e}")))?;
            let f = |u: &[f64]| psi.eval(u).unwrap_or(f64::NAN);
            let report = generator_check(&diffusion, &p.start, &f, p.dt.unwrap_or(1e-4), p.paths)?;
            json!({ "psi": src, "generator": to_json(&report) })
        }
    })
}

fn identities(p: &ImmersedSubmanifold, params: &IdentityParams, seed: u64) -> Result<Value> {
    let psis = params
        .psi
        .iter()
        .map(|s| parse_profile(s, "psi"))
        .collect::<Result<Vec<_>>>()?;
    let points = catalog_points(p, params, seed);
    let mut rows = Vec::new();
    let mut worst = 0.0f64;
    for u in &points {
        let sample = p.geometry_at(u)?;
        for psi in &psis {
            let check = lemma31_residual(p, u, psi)?;
            worst = worst.max(check.residual);
            rows.push(json!({
                "u": u,
                "psi": psi.name(),
                "direct": check.direct,
                "formula": check.formula,
                "residual": check.residual,
                "Hh": sample.weighted_mean_curvature(),
            }));
        }
    }
    let mut out = json!({
        "submanifold": p.name(),
        "points": points.len(),
        "max_residual": worst,
        "rows": rows,
    });
    if matches!(p.chart(), ChartMap::Graph { .. }) && p.codim() == 1 {
        let angle = points
            .iter()
            .map(|u| angle_function_laplacian(p, u).map(|a| to_json(&a)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        out["angle_function"] = Value::Array(angle);
    }
    Ok(out)
}

fn catalog_points(p: &ImmersedSubmanifold, params: &IdentityParams, seed: u64) -> Vec<Vec<f64>> {
    wparab_core::geometry::catalog::interior_points(p, params.points, seed, params.pole_clearance)
}
