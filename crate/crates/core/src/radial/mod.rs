//! One-dimensional numerics: radial profiles, quadrature, improper
//! integrals and root finding.

mod improper;
mod profile;
mod quadrature;
mod roots;

pub use improper::{
    classify_improper, classify_improper_with, ImproperError, ImproperSettings, IntegralOutcome,
    IntegralVerdict,
};
pub use profile::{weights, AsymptoticHint, ProfileError, RadialProfile, WarpingFunction};
pub use quadrature::{integrate, Quadrature, QuadratureError, Tolerance};
pub use roots::{expand_bracket, find_root, RootError};
