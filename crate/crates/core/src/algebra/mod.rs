//! Exact-coefficient polynomial arithmetic in conjugate pairs of complex
//! variables, Wirtinger calculus, and the integral operators used on the disc.

mod disc;
mod laurent;
mod linear_field;
mod poly;
mod quadrature;

pub use disc::{powers, DiscMap};
pub use laurent::{roots_of_unity, Laurent};
pub use linear_field::{apply_pair, pair_from_real, real_from_pair, LinearField};
pub use poly::{Poly, PolyBatch, PolyMap, PowerTable};
pub use quadrature::gauss_legendre;

pub use num_complex::Complex64 as C64;

/// Shorthand for a complex number.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
