//! Cotangent lift of an almost complex structure, the ℂ-action on
//! (co)tangent vectors, and residuals of the stationary-disc conditions.

mod disc;
mod lift;

pub use disc::{
    complex_action, conormal_from_values, conormal_residual, default_tol_section, dual_action, holo_residual,
    rotated_conormal, ConormalResidual, GridResidual, LiftedDisc, VectorKind, DEFAULT_CHART_RADIUS,
};
pub use lift::{fiber_real, lifted_pair_from_real, osculating_lift_field, BaseJets, LiftedStructure, PairField};
