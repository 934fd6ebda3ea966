//! Independent check that a lifted disc is stationary, on a grid disjoint from
//! the collocation nodes.

use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cotangent::{
    conormal_residual, default_tol_section, holo_residual, LiftedDisc, LiftedStructure, DEFAULT_CHART_RADIUS,
};
use crate::structures::{AcsModel, HypersurfaceModel};
use crate::Result;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupCheck {
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarityReport {
    /// The base disc `f` is `J`-holomorphic.
    pub base: GroupCheck,
    /// The lift `(f, g)` is holomorphic for the cotangent lift.
    pub lift: GroupCheck,
    /// `ρ∘f = 0` and `ζ⁻¹·(f, g)` lies in the conormal bundle on `∂Δ`.
    pub conormal: GroupCheck,
    /// Smallest conormal multiplier on the boundary grid; must stay away from the zero section.
    pub min_multiplier: f64,
    pub pass: bool,
}

/// Grids offset from every collocation grid: `radii` circles of `angles` points at
/// half-integer radii and angles, plus the centre, and `boundary` points at half-integer angles.
pub fn verification_grid(radii: usize, angles: usize, boundary: usize) -> (Vec<C64>, Vec<C64>) {
    let mut interior = vec![C64::default()];
    for r in 0..radii {
        let rad = (r as f64 + 0.5) / radii as f64;
        for k in 0..angles {
            interior.push(C64::from_polar(rad, TAU * (k as f64 + 0.5) / angles as f64));
        }
    }
    let bd = (0..boundary).map(|k| C64::from_polar(1.0, TAU * (k as f64 + 0.5) / boundary as f64)).collect();
    (interior, bd)
}

pub fn verify_stationary(j: &AcsModel, rho: &HypersurfaceModel, fd: &LiftedDisc, tol: f64) -> Result<StationarityReport> {
    let cap = fd.cap();
    let (interior, boundary) = verification_grid(12, 4 * cap + 3, 8 * cap + 5);
    let base = holo_residual(j, &fd.f, &interior, DEFAULT_CHART_RADIUS)?.max_norm();
    let lift = holo_residual(&LiftedStructure::new(j), &fd.stacked(), &interior, DEFAULT_CHART_RADIUS)?.max_norm();
    let tol_section = default_tol_section(fd, boundary.len()).max(f64::MIN_POSITIVE);
    let mut conormal: f64 = 0.0;
    let mut min_multiplier = f64::INFINITY;
    let mut section_ok = true;
    for &z in &boundary {
        match conormal_residual(rho, j, fd, z, tol_section) {
            Ok(c) => {
                conormal = c.r.iter().fold(conormal.max(c.r0.abs()), |m, v| m.max(v.abs()));
                min_multiplier = min_multiplier.min(c.lambda.abs());
            }
            Err(_) => {
                section_ok = false;
                min_multiplier = 0.0;
                let x = fd.f.eval(z);
                conormal = conormal.max(rho.rho().eval(&x).re.abs());
            }
        }
    }
    let check = |v: f64| GroupCheck { max_residual: v, pass: v <= tol };
    let (base, lift) = (check(base), check(lift));
    let mut conormal = check(conormal);
    conormal.pass &= section_ok;
    let pass = base.pass && lift.pass && conormal.pass;
    Ok(StationarityReport { base, lift, conormal, min_multiplier, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c64, DiscMap};
    use crate::rhmodel::{explicit_disc, random_antisymmetric, BasePoint, GCoupling, ModelProblem};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn model() -> (ModelProblem, LiftedDisc) {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let p = ModelProblem::new(random_antisymmetric(2, 1.0, &mut rng), 4, GCoupling::LiftConsistent).unwrap();
        let d = explicit_disc(&p, &BasePoint::new(c64(0.6, 0.2), 1.0).unwrap());
        (p, d)
    }

    #[test]
    fn explicit_disc_passes() {
        let (p, d) = model();
        let rep = verify_stationary(&p.structure(), &HypersurfaceModel::siegel(3), &d, 1e-12).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!((rep.min_multiplier - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_fiber_fails_conormal_group() {
        let (p, d) = model();
        let d = LiftedDisc { f: d.f.clone(), g: DiscMap::zeros(3, 4) };
        let rep = verify_stationary(&p.structure(), &HypersurfaceModel::siegel(3), &d, 1e-12).unwrap();
        assert!(rep.base.pass && rep.lift.pass && !rep.conormal.pass);
        assert_eq!(rep.min_multiplier, 0.0);
    }

    #[test]
    fn shifted_disc_fails_with_matching_defect() {
        let (p, mut d) = model();
        let v = d.f.get(2, 0, 0);
        d.f.set(2, 0, 0, v + c64(5e-4, 0.0));
        let rep = verify_stationary(&p.structure(), &HypersurfaceModel::siegel(3), &d, 1e-8).unwrap();
        assert!(!rep.conormal.pass);
        assert!((rep.conormal.max_residual - 1e-3).abs() < 1e-9, "{}", rep.conormal.max_residual);
    }
}
