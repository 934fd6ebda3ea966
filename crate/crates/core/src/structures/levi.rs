//! The `J`-invariant tangent distribution of a hypersurface and its Levi form.
//!
//! With `θ = dρ∘J` the Levi form is `𝓛(v) = −dθ(v, Jv)`. Everything is
//! computed in the real coordinates `(x¹..xⁿ, y¹..yⁿ)`, with `dθ` obtained by
//! exact differentiation of the polynomial coefficients of `θ`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::acs::AcsModel;
use super::hypersurface::HypersurfaceModel;
use crate::algebra::{Poly, PowerTable};
use crate::{Error, Result};

/// Tolerance for `|ρ(x)|` when `x` is required to lie on the hypersurface.
pub const TOL_ON_SURFACE: f64 = 1e-10;

fn to_real(w: &[C64]) -> DVector<f64> {
    let n = w.len();
    DVector::from_fn(2 * n, |r, _| if r < n { w[r].re } else { w[r - n].im })
}

fn to_complex(v: &DVector<f64>) -> Vec<C64> {
    let n = v.len() / 2;
    (0..n).map(|k| C64::new(v[k], v[k + n])).collect()
}

/// Real gradient of `ρ` at `x` in `(x, y)` order.
fn gradient(rho: &Poly, x: &[C64]) -> DVector<f64> {
    let n = x.len();
    DVector::from_fn(2 * n, |r, _| rho.d_real(r).eval(x).re)
}

/// Real basis of `𝒟_x = ker dρ ∩ ker (dρ∘J)`, as complex vectors.
pub fn holo_tangent(j: &AcsModel, rho: &HypersurfaceModel, x: &[C64]) -> Result<Vec<Vec<C64>>> {
    let n = j.n();
    let r = rho.rho();
    let val = r.eval(x).re;
    if val.abs() > TOL_ON_SURFACE {
        return Err(Error::Precondition(format!("point is off the hypersurface: ρ = {val:e}")));
    }
    let g = gradient(&r, x);
    if g.norm() < 1e-12 {
        return Err(Error::Degenerate("dρ vanishes at the point".into()));
    }
    let jm = j.real_matrix(x);
    let gj = jm.transpose() * &g;
    let mut m = DMatrix::zeros(2, 2 * n);
    m.row_mut(0).copy_from(&g.transpose());
    m.row_mut(1).copy_from(&gj.transpose());
    let eig = SymmetricEigen::new(m.transpose() * &m);
    let mut idx: Vec<usize> = (0..2 * n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let top = eig.eigenvalues[idx[2 * n - 2]];
    if top < 1e-24 * g.norm_squared() {
        return Err(Error::Degenerate("dρ and dρ∘J are dependent".into()));
    }
    Ok(idx[..2 * n - 2].iter().map(|&k| to_complex(&eig.eigenvectors.column(k).into_owned())).collect())
}

/// Components of `θ = dρ∘J` as real polynomials, `θ_B = Σ_A ∂_Aρ J^A_B`.
fn theta(j: &AcsModel, rho: &Poly) -> Vec<Poly> {
    let n = j.n();
    let jr = j.real_matrix_polys();
    let grad: Vec<Poly> = (0..2 * n).map(|a| rho.d_real(a)).collect();
    (0..2 * n)
        .map(|b| {
            let mut acc = Poly::zero(n);
            for (a, ga) in grad.iter().enumerate() {
                acc = &acc + &ga.mul_truncated(&jr[a * 2 * n + b], None);
            }
            acc
        })
        .collect()
}

/// Matrix `(∂_A θ_B)` at `x`.
fn dtheta_matrix(j: &AcsModel, rho: &Poly, x: &[C64]) -> DMatrix<f64> {
    let n = j.n();
    let th = theta(j, rho);
    let deg = th.iter().map(Poly::max_exponent).max().unwrap_or(0);
    let table = PowerTable::new(x, deg);
    DMatrix::from_fn(2 * n, 2 * n, |a, b| th[b].d_real(a).eval_with(&table).re)
}

/// `𝓛_x(v) = −dθ_x(v, Jv)` for `v ∈ 𝒟_x` given in complex form.
pub fn levi_numeric(j: &AcsModel, rho: &HypersurfaceModel, x: &[C64], v: &[C64]) -> Result<f64> {
    let r = rho.rho();
    let g = gradient(&r, x);
    let jm = j.real_matrix(x);
    let xv = to_real(v);
    let yv = &jm * &xv;
    let scale = g.norm() * xv.norm();
    let tol = 1e-9 * scale.max(1e-300);
    if g.dot(&xv).abs() > tol || g.dot(&yv).abs() > tol {
        return Err(Error::Precondition("vector is not in the J-invariant tangent distribution".into()));
    }
    let d = dtheta_matrix(j, &r, x);
    Ok(-(xv.dot(&(&d * &yv)) - yv.dot(&(&d * &xv))))
}

/// Symmetric matrix of the Levi form on the basis returned by [`holo_tangent`].
pub fn levi_matrix(j: &AcsModel, rho: &HypersurfaceModel, x: &[C64]) -> Result<DMatrix<f64>> {
    let basis = holo_tangent(j, rho, x)?;
    let r = rho.rho();
    let d = dtheta_matrix(j, &r, x);
    let jm = j.real_matrix(x);
    let q = |v: &DVector<f64>| {
        let y = &jm * v;
        -(v.dot(&(&d * &y)) - y.dot(&(&d * v)))
    };
    let vs: Vec<DVector<f64>> = basis.iter().map(|b| to_real(b)).collect();
    let m = vs.len();
    Ok(DMatrix::from_fn(m, m, |a, b| {
        if a == b {
            q(&vs[a])
        } else {
            (q(&(&vs[a] + &vs[b])) - q(&vs[a]) - q(&vs[b])) / 2.0
        }
    }))
}

/// Counts of (positive, negative) eigenvalues of a symmetric matrix, ignoring those below `tol`.
pub fn inertia(m: &DMatrix<f64>, tol: f64) -> (usize, usize) {
    let ev = SymmetricEigen::new(m.clone()).eigenvalues;
    (ev.iter().filter(|&&e| e > tol).count(), ev.iter().filter(|&&e| e < -tol).count())
}

/// Difference between the Levi form at the origin under `J` and under `J_st`:
/// `2i v̄^α v^β (L^n_{ᾱβ} − conj(L^n_{β̄α}))`.
pub fn levi_correction(j: &AcsModel, v: &[C64]) -> f64 {
    let n = j.n();
    assert_eq!(v.len(), n - 1, "expected a vector in the first n−1 coordinates");
    let mut s = C64::default();
    for a in 0..n - 1 {
        for b in 0..n - 1 {
            s += v[a].conj() * v[b] * (j.l_mixed(n - 1, a, b) - j.l_mixed(n - 1, b, a).conj());
        }
    }
    (C64::new(0.0, 2.0) * s).re
}
