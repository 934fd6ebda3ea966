//! The evaluation map fixing the `4n` free parameters of a stationary disc:
//! centre, normalized direction of `df(∂/∂x)` at the centre, and the scale of
//! the fiber component.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cotangent::{complex_action, LiftedDisc, VectorKind};
use crate::structures::AcsModel;
use crate::{Error, Result};

/// Values of the evaluation map at a disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// `f(0)`.
    pub center: Vec<C64>,
    /// `a⁻¹·u / Re (a⁻¹·u)⁰` with `u = df(∂/∂x)(0)` and the complex action of `J` at `f(0)`.
    pub direction: Vec<C64>,
    /// `Re ∂g_n/∂ζ(0)`.
    pub scale: f64,
}

impl Evaluation {
    /// The `4n` real coordinates: centre, `Im` of the first direction entry,
    /// the remaining direction entries, and the scale.
    pub fn to_real(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.center.iter().flat_map(|c| [c.re, c.im]).collect();
        v.push(self.direction[0].im);
        v.extend(self.direction[1..].iter().flat_map(|c| [c.re, c.im]));
        v.push(self.scale);
        v
    }
}

pub fn evaluate(fd: &LiftedDisc, a: C64, j: &AcsModel) -> Result<Evaluation> {
    let n = fd.n();
    if a.norm() == 0.0 {
        return Err(Error::Invalid("evaluation needs a ≠ 0".into()));
    }
    let center: Vec<C64> = (0..n).map(|c| fd.f.get(c, 0, 0)).collect();
    let u: Vec<C64> = (0..n).map(|c| fd.f.get(c, 1, 0) + fd.f.get(c, 0, 1)).collect();
    let w = complex_action(a.inv(), &u, VectorKind::Tangent, j, &center);
    let denom = w[0].re;
    if denom.abs() < 1e-12 {
        return Err(Error::Normalization(format!("first direction entry has real part {denom:.3e}")));
    }
    let direction = w.iter().map(|c| c / denom).collect();
    Ok(Evaluation { center, direction, scale: fd.g.get(n - 1, 1, 0).re })
}

/// Shorthand for `evaluate(..)?.to_real()`.
pub fn evaluation_map(fd: &LiftedDisc, a: C64, j: &AcsModel) -> Result<Vec<f64>> {
    Ok(evaluate(fd, a, j)?.to_real())
}
