//! Parabolicity and hyperbolicity of submanifolds in weighted manifolds by
//! comparison with rotationally symmetric models.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod expr;
pub mod radial;
pub mod model;
pub mod geometry;
pub mod verdict;
pub mod criteria;
pub mod stochastic;

pub use criteria::{ComparisonSetup, ConditionA, CorollaryId, CorollaryRequest, CriteriaError};
pub use expr::Expression;
pub use geometry::{AmbientSpace, AmbientWeight, ChartMap, GeometryError, ImmersedSubmanifold};
pub use model::{ModelError, RadiusMode, WeightedModel};
pub use radial::{AsymptoticHint, RadialProfile, WarpingFunction};
pub use stochastic::{DiffusionSpec, HitEstimate, StochasticError};
pub use verdict::{CheckName, CheckStatus, Criterion, HypothesisCheck, Outcome, Verdict, Window};
