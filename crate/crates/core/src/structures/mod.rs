//! Almost complex structures and strongly pseudoconvex hypersurfaces near a
//! boundary point: Levi forms, standard-form normalization, osculating pairs
//! and anisotropic dilations.

mod acs;
mod hypersurface;
mod levi;
mod normal_form;
mod samples;

pub use acs::{default_samples, validate_acs, AcsModel, AcsReport};
pub use hypersurface::{graded_weights, HypersurfaceModel, Orientation};
pub use levi::{holo_tangent, inertia, levi_correction, levi_matrix, levi_numeric, TOL_ON_SURFACE};
pub use normal_form::{
    dilate, is_standard_form, normalize_to_standard_form, osculating_pair, pair_distance, pre_align,
    pushforward_hypersurface, pushforward_structure, Normalized, OsculatingPair, StandardFormReport,
    HYPERSURFACE_DEGREE, STRUCTURE_DEGREE,
};
pub use samples::{perturbed_hypersurface, perturbed_structure};
