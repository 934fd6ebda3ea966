//! Damped Gauss–Newton on the collocated system.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::system::StepSystem;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonOptions {
    /// Stop when the max-norm residual is below this.
    pub newton_tol: f64,
    /// A stagnating iteration is accepted when its residual is below this.
    pub residual_tol: f64,
    pub max_iterations: usize,
    /// Largest acceptable condition number of the column-scaled normal matrix.
    pub max_condition: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { newton_tol: 1e-11, residual_tol: 1e-8, max_iterations: 12, max_condition: 1e15 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Max-norm residual after each iteration, starting with the initial guess.
    pub history: Vec<f64>,
    /// Condition estimate of the last normal matrix (1 if no step was taken).
    pub condition: f64,
}

impl NewtonOutcome {
    pub fn residual(&self) -> f64 {
        *self.history.last().expect("history is never empty")
    }
}

/// Solves `(JᵀJ) δ = −Jᵀr` after scaling columns to unit norm.
///
/// Cholesky is tried first; when it fails the symmetric eigendecomposition is
/// used with small eigenvalues discarded. Returns the step and a condition estimate.
pub fn gauss_newton_step(jac: &DMatrix<f64>, r: &DVector<f64>, max_condition: f64) -> Result<(DVector<f64>, f64)> {
    let scale: Vec<f64> = jac.column_iter().map(|c| c.norm().max(1e-300)).collect();
    let mut js = jac.clone();
    for (j, s) in scale.iter().enumerate() {
        js.column_mut(j).scale_mut(1.0 / s);
    }
    // An explicit transpose routes the product through the blocked matrix kernel.
    let jt = js.transpose();
    let g = &jt * &js;
    let rhs = -(&jt * r);
    let (ds, cond) = match g.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let d = l.diagonal();
            let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
            let cond = (hi / lo).powi(2);
            if cond > max_condition {
                eigen_solve(g, &rhs, max_condition)?
            } else {
                (ch.solve(&rhs), cond)
            }
        }
        None => eigen_solve(g, &rhs, max_condition)?,
    };
    let step = DVector::from_iterator(ds.len(), ds.iter().zip(&scale).map(|(d, s)| d / s));
    Ok((step, cond))
}

fn eigen_solve(g: DMatrix<f64>, rhs: &DVector<f64>, max_condition: f64) -> Result<(DVector<f64>, f64)> {
    let eig = SymmetricEigen::new(g);
    let vmax = eig.eigenvalues.amax();
    let vmin = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let cond = if vmin > 0.0 { vmax / vmin } else { f64::INFINITY };
    if !(vmax > 0.0) {
        return Err(Error::Degenerate("normal matrix vanishes".into()));
    }
    if cond > 1e3 * max_condition {
        return Err(Error::Degenerate(format!("Jacobian is rank deficient (condition estimate {cond:.3e})")));
    }
    let cut = vmax / max_condition;
    let proj = eig.eigenvectors.tr_mul(rhs);
    let scaled = DVector::from_iterator(
        proj.len(),
        proj.iter().zip(eig.eigenvalues.iter()).map(|(p, &l)| if l > cut { p / l } else { 0.0 }),
    );
    Ok((&eig.eigenvectors * scaled, cond))
}

/// Damped Gauss–Newton from `x0`.
pub fn newton_solve(sys: &StepSystem, x0: &[f64], opts: &NewtonOptions) -> Result<NewtonOutcome> {
    let mut x = DVector::from_column_slice(x0);
    let mut r = sys.residual(x.as_slice())?;
    let mut history = vec![r.amax()];
    let mut condition = 1.0;
    let mut iterations = 0;
    while r.amax() > opts.newton_tol {
        if iterations == opts.max_iterations {
            if r.amax() <= opts.residual_tol {
                break;
            }
            return Err(Error::NoConvergence(format!(
                "{} iterations, residual {:.3e} (condition estimate {condition:.3e})",
                iterations,
                r.amax()
            )));
        }
        let jac = sys.jacobian(x.as_slice())?;
        let (step, cond) = gauss_newton_step(&jac, &r, opts.max_condition)?;
        condition = cond;
        let base = r.norm();
        let mut alpha = 1.0;
        let accepted = loop {
            let trial = &x + &step * alpha;
            match sys.residual(trial.as_slice()) {
                Ok(rt) if rt.norm() < base * (1.0 - 1e-4 * alpha) => break Some((trial, rt)),
                Ok(_) | Err(Error::ChartExit { .. }) if alpha > 1.0 / 64.0 => alpha *= 0.5,
                Ok(_) | Err(Error::ChartExit { .. }) => break None,
                Err(e) => return Err(e),
            }
        };
        iterations += 1;
        match accepted {
            Some((xn, rn)) => {
                let stagnating = rn.norm() > 0.5 * base;
                x = xn;
                r = rn;
                history.push(r.amax());
                // Least-squares floor of the truncated system.
                if stagnating && r.amax() <= opts.residual_tol {
                    break;
                }
            }
            None => {
                if r.amax() <= opts.residual_tol {
                    break;
                }
                return Err(Error::NoConvergence(format!(
                    "line search failed at residual {:.3e} (condition estimate {condition:.3e})",
                    r.amax()
                )));
            }
        }
    }
    Ok(NewtonOutcome { x: x.as_slice().to_vec(), iterations, history, condition })
}
