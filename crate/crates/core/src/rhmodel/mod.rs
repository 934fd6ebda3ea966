//! Osculating model problem: explicit stationary discs, the linearized
//! Riemann–Hilbert problem at them, and its explicit solution.

mod evaluation;
mod linear;
mod problem;

pub use evaluation::{evaluate, evaluation_map, Evaluation};
pub use linear::{
    assemble_from_holomorphic, boundary_from_real_coords, boundary_operator_matrix, boundary_real_coords,
    check_boundary_data, disc_real_coords, independence_spectrum, kernel_basis, linearized_boundary,
    linearized_interior, operator_spectrum, solve_holomorphic_parts, solve_linearized, FreeParams, HoloParts,
    OperatorSpectrum,
};
pub use problem::{
    explicit_disc, model_boundary_residual, model_pde_residual, random_antisymmetric, rotate_disc,
    unitary_with_first_column, BasePoint, BoundaryData, GCoupling, ModelProblem,
};
