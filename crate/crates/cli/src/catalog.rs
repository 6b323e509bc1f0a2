//! Resolution of catalog names in scenario files.
//!
//! Models: `euclidean`, `hyperbolic(κ)`, `paraboloid(a)`, or an expression
//! in `t` for a custom warping. Weights: `zero`, `gaussian`,
//! `antigaussian`, `power(a,k)`, `logpow(k)`, or an expression in `t`.

use wparab_core::expr::Expression;
use wparab_core::geometry::catalog::{self, coordinate_names};
use wparab_core::geometry::{AmbientSpace, AmbientWeight, ImmersedSubmanifold};
use wparab_core::model::WeightedModel;
use wparab_core::radial::{weights, RadialProfile, WarpingFunction};

use crate::config::{ModelSpec, SubmanifoldSpec};
use crate::ScenarioError;

pub const MODEL_NAMES: [&str; 3] = ["euclidean", "hyperbolic", "paraboloid"];
pub const WEIGHT_NAMES: [&str; 5] = ["zero", "gaussian", "antigaussian", "power", "logpow"];

/// Splits `name(a, b)` into the name and its numeric arguments. Returns
/// `None` when `s` does not look like a catalog reference.
fn parse_call(s: &str) -> Option<Result<(String, Vec<f64>), ScenarioError>> {
    let s = s.trim();
    let (name, rest) = match s.find('(') {
        Some(i) => (&s[..i], Some(&s[i..])),
        None => (s, None),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_lowercase() || c == '_') {
        return None;
    }
    let args = match rest {
        None => Vec::new(),
        Some(r) => {
            let inner = r.strip_prefix('(')?.strip_suffix(')')?;
            let parsed: Result<Vec<f64>, _> = inner
                .split(',')
                .map(str::trim)
                .filter(|a| !a.is_empty())
                .map(str::parse::<f64>)
                .collect();
            match parsed {
                Ok(v) => v,
                // `exp(-t)` and friends are expressions, not catalog calls.
                Err(_) => return None,
            }
        }
    };
    Some(Ok((name.to_owned(), args)))
}

fn arity(name: &str, args: &[f64], allowed: &[usize]) -> Result<(), ScenarioError> {
    if allowed.contains(&args.len()) {
        Ok(())
    } else {
        Err(ScenarioError::Catalog(format!(
            "`{name}` takes {allowed:?} arguments, got {}",
            args.len()
        )))
    }
}

fn profile_expr(source: &str) -> Result<RadialProfile, ScenarioError> {
    RadialProfile::parse(source).map_err(|e| ScenarioError::Catalog(format!("expression `{source}`: {e}")))
}

pub fn warping(source: &str) -> Result<WarpingFunction, ScenarioError> {
    let bad = |e: wparab_core::radial::ProfileError| ScenarioError::Catalog(format!("warping `{source}`: {e}"));
    match parse_call(source) {
        Some(call) => {
            let (name, args) = call?;
            match name.as_str() {
                "euclidean" => {
                    arity(&name, &args, &[0])?;
                    Ok(WarpingFunction::euclidean())
                }
                "hyperbolic" => {
                    arity(&name, &args, &[0, 1])?;
                    WarpingFunction::hyperbolic(args.first().copied().unwrap_or(-1.0)).map_err(bad)
                }
                "paraboloid" => {
                    arity(&name, &args, &[0, 1])?;
                    WarpingFunction::paraboloid(args.first().copied().unwrap_or(1.0)).map_err(bad)
                }
                _ if Expression::parse(source, &["t"]).is_ok() => {
                    WarpingFunction::custom(profile_expr(source)?).map_err(bad)
                }
                _ => Err(ScenarioError::Catalog(format!(
                    "unknown model `{name}`; expected one of {MODEL_NAMES:?} or an expression in t"
                ))),
            }
        }
        None => WarpingFunction::custom(profile_expr(source)?).map_err(bad),
    }
}

pub fn weight(source: &str, w: &WarpingFunction) -> Result<RadialProfile, ScenarioError> {
    match parse_call(source) {
        Some(call) => {
            let (name, args) = call?;
            match name.as_str() {
                "zero" => arity(&name, &args, &[0]).map(|_| weights::zero()),
                "gaussian" => arity(&name, &args, &[0]).map(|_| weights::gaussian()),
                "antigaussian" => arity(&name, &args, &[0]).map(|_| weights::antigaussian()),
                "power" => arity(&name, &args, &[2]).map(|_| weights::power(args[0], args[1])),
                "logpow" => arity(&name, &args, &[1]).map(|_| weights::logpow(args[0], w)),
                _ if Expression::parse(source, &["t"]).is_ok() => profile_expr(source),
                _ => Err(ScenarioError::Catalog(format!(
                    "unknown weight `{name}`; expected one of {WEIGHT_NAMES:?} or an expression in t"
                ))),
            }
        }
        None => profile_expr(source),
    }
}

pub fn model(spec: &ModelSpec) -> Result<WeightedModel, ScenarioError> {
    let w = warping(&spec.w)?;
    let mut f = weight(&spec.f, &w)?;
    if spec.f_pole_singular {
        f = f.pole_singular();
    }
    if let Some(t) = spec.t_min {
        f = f.with_t_min(t);
    }
    Ok(WeightedModel::new(spec.m, w, f)?)
}

fn is_euclidean(spec: &ModelSpec) -> bool {
    matches!(parse_call(&spec.w), Some(Ok((name, _))) if name == "euclidean")
}

/// The ambient for submanifold tasks: weighted ℝ^m for Euclidean models,
/// the model chart otherwise.
pub fn ambient(spec: &ModelSpec, model: &WeightedModel) -> Result<AmbientSpace, ScenarioError> {
    if !is_euclidean(spec) {
        if spec.h_extra.is_some() {
            return Err(ScenarioError::Invalid("h_extra needs a Euclidean model".into()));
        }
        return Ok(AmbientSpace::model_chart(model.clone()));
    }
    let mut weight = AmbientWeight::radial(model.weight().clone());
    if let Some(src) = &spec.h_extra {
        let e = Expression::parse(src, &coordinate_names(spec.m))
            .map_err(|e| ScenarioError::Catalog(format!("h_extra `{src}`: {e}")))?;
        weight = weight.with_extra(e);
    }
    Ok(AmbientSpace::euclidean(spec.m, weight))
}

pub fn submanifold(
    spec: &ModelSpec,
    model: &WeightedModel,
    sub: &SubmanifoldSpec,
) -> Result<ImmersedSubmanifold, ScenarioError> {
    let amb = ambient(spec, model)?;
    if !amb.is_euclidean() {
        return match sub {
            SubmanifoldSpec::Sphere { a } => Ok(catalog::model_sphere(model.clone(), *a)?),
            _ => Err(ScenarioError::Invalid(
                "only `sphere` (a geodesic sphere) is available in non-Euclidean models".into(),
            )),
        };
    }
    let p = match sub {
        SubmanifoldSpec::Sphere { a } => catalog::sphere(amb, *a),
        SubmanifoldSpec::Plane { normal, offset } => catalog::hyperplane(amb, normal, *offset),
        SubmanifoldSpec::CoordinatePlane { k } => catalog::coordinate_plane(amb, *k),
        SubmanifoldSpec::Cylinder { a, k } => catalog::cylinder(amb, *k, *a),
        SubmanifoldSpec::Graph { expr, half_width } => catalog::graph(amb, expr, *half_width),
        SubmanifoldSpec::Helicoid { pitch } => catalog::helicoid(amb, *pitch),
        SubmanifoldSpec::GrimCurve => catalog::grim_curve(amb),
    }?;
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calls_and_expressions() {
        assert_eq!(parse_call("power(1, 3)").unwrap().unwrap(), ("power".into(), vec![1.0, 3.0]));
        assert_eq!(parse_call("gaussian").unwrap().unwrap(), ("gaussian".into(), vec![]));
        assert!(parse_call("exp(-t)").is_none());
        assert!(parse_call("t^2/2").is_none());
        assert!(weight("sin(t)^2", &WarpingFunction::euclidean()).is_ok());
        assert!(weight("-t^2/2", &WarpingFunction::euclidean()).is_ok());
        assert!(matches!(
            weight("gauss", &WarpingFunction::euclidean()),
            Err(ScenarioError::Catalog(_))
        ));
        assert!(warping("hyperbolic(-2)").is_ok());
        assert!(warping("sinh(t)").is_ok());
        assert!(warping("hyperbolic(1)").is_err());
    }
}
