//! End-to-end continuation runs on small perturbed pairs.

mod common;

use num_complex::Complex64 as C64;

use common::*;
use statdisc::algebra::{c64, DiscMap};
use statdisc::continuation::{continue_disc_traced, verify_stationary, TraceStatus};
use statdisc::cotangent::LiftedDisc;

/// The disc `φ_t ∘ f` with its fibre rescaled so the lift stays a conormal lift.
fn push_to_scale(d: &LiftedDisc, t: f64) -> LiftedDisc {
    let n = d.n();
    let scaled = |m: &DiscMap, tangential: f64, normal: f64| {
        let parts: Vec<DiscMap> = m
            .split()
            .iter()
            .enumerate()
            .map(|(c, p)| p.scale(c64(if c + 1 == n { normal } else { tangential }, 0.0)))
            .collect();
        DiscMap::stack(&parts)
    };
    LiftedDisc { f: scaled(&d.f, 1.0 / t, 1.0 / (t * t)), g: scaled(&d.g, t, t * t) }
}

#[test]
fn tilted_direction_converges_and_is_consistent_along_the_homotopy() {
    let mut prob = perturbed_problem(2, 0.05, 10, 11);
    prob.target_direction[1] = c64(0.02, 0.0);
    let (res, trace) = continue_disc_traced(&prob);
    let res = res.expect("continuation converges");
    assert_eq!(trace.status, TraceStatus::Converged);
    let tol = prob.options.newton.residual_tol;
    for s in trace.steps.iter().filter(|s| s.accepted) {
        assert!(s.residual <= tol, "t = {}: {:.3e}", s.t, s.residual);
    }
    assert!(res.report.pass && res.center_error < 1e-8 && res.tangency_angle < 1e-6);

    // The solution at t = 1, moved by the dilation, solves the problem at smaller t
    // apart from its normalization, which is tied to a different centre.
    for t in [0.7, 0.4] {
        let pushed = push_to_scale(&res.disc, t);
        let sys = prob.system_at(t).unwrap();
        let r = sys.residual(&sys.vec_from_disc(&pushed)).unwrap();
        let [interior, boundary, _] = sys.blocks();
        let worst = r.rows(interior.start, boundary.end - interior.start).amax();
        assert!(worst < 1e-8, "t = {t}: {worst:.3e}");
        let (j, rho) = prob.pair_at(t).unwrap();
        let rep = verify_stationary(&j, &rho, &pushed, 1e-8).unwrap();
        assert!(rep.pass, "t = {t}: {rep:?}");
    }
}

#[test]
fn traces_are_deterministic() {
    let run = || {
        let prob = perturbed_problem(2, 0.05, 6, 23);
        serde_json::to_string(&continue_disc_traced(&prob).1).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn purely_normal_direction_is_rejected_before_any_step() {
    let mut prob = perturbed_problem(2, 0.05, 6, 5);
    prob.target_direction = vec![C64::default(), c64(1.0, 0.0)];
    let (res, trace) = continue_disc_traced(&prob);
    assert!(res.is_err());
    assert!(trace.steps.is_empty());
    assert_eq!(trace.status, TraceStatus::Failed);
}
