//! The genus model, named curves and their mod-2 classes, the rotation `T`
//! and the reflections.

mod catalog;
mod claims;
mod curves;
mod genus;
mod maps;
mod seeds;

use thiserror::Error;

use crate::expr::ExprError;
use crate::f2linalg::LinalgError;

pub use catalog::{build_catalog, CurveCatalog};
pub use claims::{
    infer_seed_classes, profile_claims, seed_candidates, validate_catalog, Claim, ClaimOp,
    ConstraintResult, SeedCandidate, ValidationReport,
};
pub use curves::{CurveId, Family};
pub use genus::{GenusModel, Layout, MIN_GENUS};
pub use maps::{
    check_reflection, conjugation_exponent, d_hom, reflection_permutation, solve_reflection_signs,
    standard_reflections, standard_rotation, MappingClassSpec, ReflectionConstraint, Reflections,
    MIN_REFLECTION_GENUS,
};
pub use seeds::{
    default_seed_sets, parse_seed_file, seeds_for, SeedProfile, SeedSet, SeedTemplate, Seeds,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("unsupported genus {0} (must be 5..=64)")]
    Genus(usize),
    #[error("bad curve `{name}`: {reason}")]
    Curve { name: String, reason: String },
    #[error("one-sided class: {0}")]
    OneSided(String),
    #[error("no reflection pair at g={g}: {constraint}")]
    NoReflection { g: usize, constraint: String },
    #[error("{0}")]
    Parse(String),
    #[error("no consistent catalog in search space")]
    NoCandidates,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}
