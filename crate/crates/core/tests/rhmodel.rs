//! Structural properties of the model problem checked across modules.

mod common;

use num_complex::Complex64 as C64;
use proptest::prelude::*;
use rand::Rng;

use common::*;
use statdisc::algebra::{c64, DiscMap};
use statdisc::continuation::{verification_grid, verify_stationary};
use statdisc::cotangent::{holo_residual, LiftedStructure};
use statdisc::rhmodel::{
    evaluate, explicit_disc, independence_spectrum, kernel_basis, linearized_boundary, linearized_interior, model_pde_residual, random_antisymmetric, rotate_disc,
    solve_linearized, unitary_with_first_column, BasePoint, BoundaryData, FreeParams, GCoupling, ModelProblem,
};
use statdisc::structures::HypersurfaceModel;

fn setup(n: usize, cap: usize, seed: u64) -> (ModelProblem, BasePoint) {
    let mut r = rng(seed);
    let p = ModelProblem::new(random_antisymmetric(n - 1, 1.0, &mut r), cap, GCoupling::LiftConsistent).unwrap();
    (p, BasePoint::new(c64(0.8, -0.3), 0.9).unwrap())
}

fn random_free<R: Rng>(n: usize, rng: &mut R) -> FreeParams {
    FreeParams::from_real(n, &(0..4 * n).map(|_| rng.gen_range(-1.0..1.0)).collect::<Vec<_>>()).unwrap()
}

fn add_free(a: &FreeParams, b: &FreeParams, s: f64) -> FreeParams {
    let n = a.h0.len();
    let x: Vec<f64> = a.to_real().iter().zip(b.to_real()).map(|(x, y)| x + s * y).collect();
    FreeParams::from_real(n, &x).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn linear_solve_is_linear(seed in 0u64..10_000, n in 2usize..=4, s in -2.0f64..2.0) {
        let (p, bp) = setup(n, 6, seed);
        let mut r = rng(seed + 1);
        let (phi1, phi2) = (BoundaryData::random(n, 4, &mut r), BoundaryData::random(n, 4, &mut r));
        let (free1, free2) = (random_free(n, &mut r), random_free(n, &mut r));
        let d1 = solve_linearized(&p, &bp, &phi1, &free1).unwrap();
        let d2 = solve_linearized(&p, &bp, &phi2, &free2).unwrap();
        let combined = solve_linearized(&p, &bp, &phi1.add(&phi2.scale(s)), &add_free(&free1, &free2, s)).unwrap();
        prop_assert!(combined.distance(&d1.add(&d2.scale(c64(s, 0.0)))) < 1e-10);
    }

    #[test]
    fn explicit_discs_are_stationary_on_an_offset_grid(seed in 0u64..10_000, n in 2usize..=4) {
        let mut r = rng(seed);
        let p = ModelProblem::new(random_antisymmetric(n - 1, 1.0, &mut r), 3, GCoupling::LiftConsistent).unwrap();
        let a = C64::from_polar(r.gen_range(0.2..1.5), r.gen_range(0.0..6.28));
        let d = explicit_disc(&p, &BasePoint::new(a, r.gen_range(0.2..2.0)).unwrap());
        let rep = verify_stationary(&p.structure(), &HypersurfaceModel::siegel(n), &d, 1e-11).unwrap();
        prop_assert!(rep.pass, "{:?}", rep);
    }
}

#[test]
fn rotated_explicit_discs_solve_the_original_problem() {
    // A disc of the rotated problem, moved back by the rotation, is stationary for the original pair.
    let mut r = rng(71);
    for n in [3, 4] {
        let (p, bp) = setup(n, 3, 70 + n as u64);
        let v: Vec<C64> = (0..n - 1).map(|_| random_c64(&mut r, 1.0)).collect();
        let u = unitary_with_first_column(&v).unwrap();
        let d = rotate_disc(&explicit_disc(&p.rotated(&u), &bp), &u);
        let rep = verify_stationary(&p.structure(), &HypersurfaceModel::siegel(n), &d, 1e-12).unwrap();
        assert!(rep.pass, "{rep:?}");
        // The direction of the disc at its centre follows the first column of the rotation.
        let e = evaluate(&d, bp.a, &p.structure()).unwrap();
        for k in 0..n - 1 {
            assert!((e.direction[k] - v[k] / v[0].re).norm() < 1e-12, "n = {n}, entry {k}");
        }
        assert!(e.direction[n - 1].norm() < 1e-12);
    }
}

#[test]
fn model_residuals_match_the_lifted_holomorphicity_residual() {
    // With f' and g_n holomorphic, the lifted residual of the osculating structure
    // coincides pointwise with the model interior residual.
    let mut r = rng(72);
    for n in 2..=4 {
        let (p, _) = setup(n, 4, 80 + n as u64);
        let mut d = random_disc(n, 4, &mut r);
        for pp in 0..4 {
            for q in 1..=4 - pp {
                for c in 0..n - 1 {
                    d.f.set(c, pp, q, C64::default());
                }
                d.g.set(n - 1, pp, q, C64::default());
            }
        }
        let (interior, _) = verification_grid(4, 9, 0);
        let lifted = holo_residual(&LiftedStructure::new(&p.structure()), &d.stacked(), &interior, 1e3).unwrap();
        let model: Vec<DiscMap> = model_pde_residual(&p, &d);
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for (z, vals) in lifted.points.iter().zip(&lifted.values) {
            for (i, m) in model.iter().enumerate() {
                worst = worst.max((vals[i] - m.eval_scalar(*z)).norm());
                scale = scale.max(vals[i].norm());
            }
        }
        assert!(scale > 1e-2, "the test disc must not be a solution");
        assert!(worst < 1e-12 * scale, "n = {n}: {worst}");
    }
}

#[test]
fn kernel_elements_are_independent_and_annihilated() {
    for n in [2, 3] {
        let (p, bp) = setup(n, 6, 90 + n as u64);
        let kernel = kernel_basis(&p, &bp).unwrap();
        assert_eq!(kernel.len(), 4 * n);
        for d in &kernel {
            assert!(linearized_boundary(&p, &bp, d).max_abs() < 1e-12);
            assert!(linearized_interior(&p, &bp, d).iter().all(|m| m.max_abs_coeff() < 1e-12));
        }
        let spec = independence_spectrum(&kernel);
        assert!(spec.iter().copied().fold(f64::INFINITY, f64::min) > 1e-8 * spec[0].max(spec[spec.len() - 1]));
    }
    // Zero data with zero free parameters gives the zero disc.
    let (p, bp) = setup(3, 6, 99);
    let solved = solve_linearized(&p, &bp, &BoundaryData::zero(3), &FreeParams::zero(3)).unwrap();
    assert_eq!(solved.f.max_abs_coeff() + solved.g.max_abs_coeff(), 0.0);
}
