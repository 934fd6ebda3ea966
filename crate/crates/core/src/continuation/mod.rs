//! Homotopy from the osculating model to a general standard-form pair along
//! the anisotropic dilations, tracking the stationary disc through a fixed
//! point with a fixed tangent direction.

mod newton;
mod system;
mod verify;

pub use newton::{gauss_newton_step, newton_solve, NewtonOptions, NewtonOutcome};
pub use system::{Collocation, Normalization, StepSystem};
pub use verify::{verification_grid, verify_stationary, GroupCheck, StationarityReport};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::cotangent::{complex_action, LiftedDisc, VectorKind, DEFAULT_CHART_RADIUS};
use crate::rhmodel::{explicit_disc, rotate_disc, unitary_with_first_column, BasePoint, Evaluation, GCoupling, ModelProblem};
use crate::structures::{dilate, is_standard_form, osculating_pair, AcsModel, HypersurfaceModel};
use crate::{Error, Result};

/// Default homotopy schedule.
pub const DEFAULT_SCHEDULE: [f64; 6] = [0.05, 0.1, 0.2, 0.4, 0.7, 1.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationOptions {
    pub newton: NewtonOptions,
    /// Bisection stops below this step in `t`.
    pub min_step: f64,
    pub chart_radius: f64,
    /// Tolerance of the final stationarity check.
    pub verify_tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions {
            newton: NewtonOptions::default(),
            min_step: 1e-3,
            chart_radius: DEFAULT_CHART_RADIUS,
            verify_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ContinuationProblem {
    pub structure: AcsModel,
    pub hypersurface: HypersurfaceModel,
    /// `z_o = (0, …, 0, x)` with `x > 0`.
    pub target_point: Vec<C64>,
    /// Tangent direction `v`; its tangential part must not vanish.
    pub target_direction: Vec<C64>,
    pub cap: usize,
    pub schedule: Vec<f64>,
    pub options: ContinuationOptions,
}

impl ContinuationProblem {
    pub fn new(
        structure: AcsModel,
        hypersurface: HypersurfaceModel,
        target_point: Vec<C64>,
        target_direction: Vec<C64>,
        cap: usize,
    ) -> Self {
        ContinuationProblem {
            structure,
            hypersurface,
            target_point,
            target_direction,
            cap,
            schedule: DEFAULT_SCHEDULE.to_vec(),
            options: ContinuationOptions::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.structure.n()
    }

    /// Checks every precondition and returns the model matrix `A`.
    pub fn validate(&self) -> Result<nalgebra::DMatrix<C64>> {
        let n = self.n();
        if self.hypersurface.n() != n || self.target_point.len() != n || self.target_direction.len() != n {
            return Err(Error::Invalid("dimensions of pair, point and direction disagree".into()));
        }
        let rep = is_standard_form(&self.structure, &self.hypersurface, 1e-12);
        if !rep.standard {
            return Err(Error::NotStandard(rep.violations.join("; ")));
        }
        let x = self.target_point[n - 1];
        let off_axis = self.target_point[..n - 1].iter().map(|c| c.norm()).fold(x.im.abs(), f64::max);
        if off_axis > 1e-14 || !(x.re > 0.0) {
            return Err(Error::Precondition("target point must be (0, …, 0, x) with x > 0".into()));
        }
        if self.target_point.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt() > self.options.chart_radius {
            return Err(Error::Precondition("target point lies outside the chart".into()));
        }
        let tangential = self.target_direction[..n - 1].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if tangential == 0.0 {
            return Err(Error::Precondition(
                "target direction is purely normal; its complex line meets the boundary in a real curve".into(),
            ));
        }
        if self.target_direction[0].norm() < 1e-6 * tangential {
            return Err(Error::Normalization("first component of the target direction vanishes".into()));
        }
        let s = &self.schedule;
        let increasing = s.windows(2).all(|w| w[0] < w[1]);
        if s.is_empty() || !increasing || !(s[0] > 0.0 && s[0] <= 0.1) || s[s.len() - 1] != 1.0 {
            return Err(Error::Invalid("schedule must increase from (0, 0.1] to exactly 1".into()));
        }
        if self.cap < 2 {
            return Err(Error::Invalid("degree cap must be at least 2".into()));
        }
        Ok(osculating_pair(&self.structure, &self.hypersurface)?.a)
    }

    /// The pair at homotopy parameter `t`; the osculating pair at `t = 0`.
    pub fn pair_at(&self, t: f64) -> Result<(AcsModel, HypersurfaceModel)> {
        if t == 0.0 {
            let osc = osculating_pair(&self.structure, &self.hypersurface)?;
            Ok((osc.structure(), osc.hypersurface()))
        } else {
            dilate(&self.structure, &self.hypersurface, t)
        }
    }

    /// Direction target at parameter `t`: the normal component is switched on linearly.
    fn direction_at(&self, t: f64) -> Vec<C64> {
        let n = self.n();
        let mut v = self.target_direction.clone();
        v[n - 1] *= t;
        v
    }

    /// Scalar used by the ratio block of the evaluation map.
    pub fn eval_scalar(&self) -> C64 {
        let n = self.n();
        let v = &self.target_direction;
        let norm = v[..n - 1].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        self.model_radius() * v[0] / norm
    }

    /// `|a|` with `|a|²/2 = x`.
    pub fn model_radius(&self) -> f64 {
        (2.0 * self.target_point[self.n() - 1].re).sqrt()
    }

    /// Evaluation target at parameter `t` for the structure `j` of that step.
    pub fn normalization_at(&self, t: f64, j: &AcsModel) -> Result<Normalization> {
        let eval_a = self.eval_scalar();
        let v = self.direction_at(t);
        let w = complex_action(eval_a.inv(), &v, VectorKind::Tangent, j, &self.target_point);
        let denom = w[0].re;
        if denom.abs() < 1e-12 {
            return Err(Error::Normalization(format!("target direction gives ratio denominator {denom:.3e}")));
        }
        let e = Evaluation {
            center: self.target_point.clone(),
            direction: w.iter().map(|c| c / denom).collect(),
            scale: 1.0,
        };
        Ok(Normalization { eval_a, target: e.to_real() })
    }

    /// Explicit model disc through `z_o` tangent to the tangential part of `v`, with `λ = 1`.
    pub fn initial_disc(&self) -> Result<LiftedDisc> {
        let a = self.validate()?;
        let n = self.n();
        let u = unitary_with_first_column(&self.target_direction[..n - 1])?;
        let p = ModelProblem::new(a, self.cap, GCoupling::LiftConsistent)?.rotated(&u);
        let d = explicit_disc(&p, &BasePoint::new(C64::new(self.model_radius(), 0.0), 1.0)?);
        Ok(rotate_disc(&d, &u))
    }

    pub fn system_at(&self, t: f64) -> Result<StepSystem> {
        let (j, rho) = self.pair_at(t)?;
        let norm = self.normalization_at(t, &j)?;
        StepSystem::new(&j, &rho, norm, self.cap, self.options.chart_radius)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub t: f64,
    pub accepted: bool,
    pub iterations: usize,
    pub residual: f64,
    pub condition: f64,
    /// Why a rejected step failed.
    pub message: Option<String>,
    /// Disc at an accepted step.
    pub disc: Option<LiftedDisc>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceStatus {
    Converged,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationTrace {
    pub steps: Vec<StepRecord>,
    pub status: TraceStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuationResult {
    pub disc: LiftedDisc,
    pub trace: ContinuationTrace,
    pub report: StationarityReport,
    /// `|f(0) − z_o|`.
    pub center_error: f64,
    /// Angle in radians between `df(∂/∂x)(0)` and the real line through `v`.
    pub tangency_angle: f64,
}

/// Angle between the real vector `u` and the real line `ℝv` in `ℂⁿ = ℝ²ⁿ`.
pub fn angle_to_real_line(u: &[C64], v: &[C64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| (a * b.conj()).re).sum();
    let nu = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nv = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let perp: f64 = u.iter().zip(v).map(|(a, b)| (a - b * (dot / (nv * nv))).norm_sqr()).sum::<f64>().sqrt();
    perp.atan2(dot.abs()) * if nu == 0.0 { f64::NAN } else { 1.0 }
}

/// Runs the homotopy. On failure the trace is returned inside the error message
/// and also through [`continue_disc_traced`].
pub fn continue_disc(prob: &ContinuationProblem) -> Result<(LiftedDisc, ContinuationTrace)> {
    let (res, trace) = continue_disc_traced(prob);
    res.map(|r| (r.disc, trace))
}

/// Runs the homotopy and always returns the trace.
pub fn continue_disc_traced(prob: &ContinuationProblem) -> (Result<ContinuationResult>, ContinuationTrace) {
    let mut trace = ContinuationTrace { steps: Vec::new(), status: TraceStatus::Failed };
    let res = run(prob, &mut trace);
    if res.is_ok() {
        trace.status = TraceStatus::Converged;
    }
    (res.map(|mut r| {
        r.trace = trace.clone();
        r
    }), trace)
}

fn run(prob: &ContinuationProblem, trace: &mut ContinuationTrace) -> Result<ContinuationResult> {
    let opts = &prob.options;
    let init = prob.initial_disc()?;
    let sys0 = prob.system_at(0.0)?;
    let mut x = sys0.vec_from_disc(&init);
    let sol0 = newton_solve(&sys0, &x, &opts.newton)?;
    x = sol0.x;
    trace.steps.push(StepRecord {
        t: 0.0,
        accepted: true,
        iterations: sol0.iterations,
        residual: sol0.history.last().copied().unwrap_or(0.0),
        condition: sol0.condition,
        message: None,
        disc: Some(sys0.disc_from_vec(&x)),
    });
    let mut t_done = 0.0;
    let mut idx = 0;
    let mut t_next = prob.schedule[0];
    while t_done < 1.0 {
        let attempt = prob.system_at(t_next).and_then(|sys| {
            let out = newton_solve(&sys, &x, &opts.newton)?;
            Ok((sys, out))
        });
        match attempt {
            Ok((sys, out)) => {
                x = out.x.clone();
                trace.steps.push(StepRecord {
                    t: t_next,
                    accepted: true,
                    iterations: out.iterations,
                    residual: out.residual(),
                    condition: out.condition,
                    message: None,
                    disc: Some(sys.disc_from_vec(&x)),
                });
                t_done = t_next;
                while idx < prob.schedule.len() && prob.schedule[idx] <= t_done {
                    idx += 1;
                }
                if idx < prob.schedule.len() {
                    t_next = prob.schedule[idx];
                }
            }
            Err(e) => {
                trace.steps.push(StepRecord {
                    t: t_next,
                    accepted: false,
                    iterations: 0,
                    residual: f64::NAN,
                    condition: f64::NAN,
                    message: Some(e.to_string()),
                    disc: None,
                });
                let mid = 0.5 * (t_done + t_next);
                if mid - t_done < opts.min_step {
                    return Err(Error::NoConvergence(format!("step rejected at t = {t_next} below the minimum step: {e}")));
                }
                t_next = mid;
            }
        }
    }
    let (j, rho) = prob.pair_at(1.0)?;
    let sys = prob.system_at(1.0)?;
    let disc = sys.disc_from_vec(&x);
    let report = verify_stationary(&j, &rho, &disc, opts.verify_tol)?;
    let n = prob.n();
    let center_error = (0..n).map(|c| (disc.f.get(c, 0, 0) - prob.target_point[c]).norm_sqr()).sum::<f64>().sqrt();
    let u: Vec<C64> = (0..n).map(|c| disc.f.get(c, 1, 0) + disc.f.get(c, 0, 1)).collect();
    let tangency_angle = angle_to_real_line(&u, &prob.target_direction);
    Ok(ContinuationResult {
        disc,
        trace: ContinuationTrace { steps: Vec::new(), status: TraceStatus::Converged },
        report,
        center_error,
        tangency_angle,
    })
}
