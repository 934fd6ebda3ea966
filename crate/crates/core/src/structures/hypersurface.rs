//! Real hypersurfaces `{ρ = 0}` through the origin in graded form
//! `ρ = 2Re zⁿ − Re(K_{αβ} z^α z^β) − H_{αβ̄} z^α z̄^β + O(3)`,
//! where `O(3)` is measured with weight 1 on `z^α` and weight 2 on `zⁿ`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::algebra::Poly;
use crate::{Error, Result};

/// Which side of the hypersurface is the domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// Domain is `{ρ > 0}`, so `dρ` is negative on outward vectors.
    #[default]
    PositiveInside,
    NegativeInside,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypersurfaceModel {
    n: usize,
    k: DMatrix<C64>,
    h: DMatrix<C64>,
    remainder: Poly,
    orientation: Orientation,
}

/// Weights `(1, …, 1, 2)` of the anisotropic grading.
pub fn graded_weights(n: usize) -> Vec<usize> {
    (0..n).map(|i| if i + 1 == n { 2 } else { 1 }).collect()
}

impl HypersurfaceModel {
    pub fn new(n: usize, k: DMatrix<C64>, h: DMatrix<C64>, remainder: Poly) -> Result<Self> {
        if n < 2 {
            return Err(Error::Invalid("dimension must be at least 2".into()));
        }
        let m = n - 1;
        if k.shape() != (m, m) || h.shape() != (m, m) {
            return Err(Error::Invalid(format!("K and H must be {m}×{m}")));
        }
        if remainder.nvars() != n {
            return Err(Error::Invalid("remainder has the wrong number of variables".into()));
        }
        let scale = 1.0 + k.norm() + h.norm();
        if (&k - k.transpose()).norm() > 1e-13 * scale {
            return Err(Error::Invalid("K is not symmetric".into()));
        }
        if (&h - h.adjoint()).norm() > 1e-13 * scale {
            return Err(Error::Invalid("H is not Hermitian".into()));
        }
        if !remainder.is_real(1e-13 * (1.0 + remainder.max_abs_coeff())) {
            return Err(Error::Invalid("remainder is not real-valued".into()));
        }
        if let Some(w) = remainder.weighted_order(&graded_weights(n)) {
            if w < 3 {
                return Err(Error::Invalid(format!("remainder has weighted order {w} < 3")));
            }
        }
        Ok(HypersurfaceModel { n, k, h, remainder, orientation: Orientation::PositiveInside })
    }

    /// Model boundary `2Re zⁿ − Σ|z^α|²`.
    pub fn siegel(n: usize) -> Self {
        HypersurfaceModel::new(n, DMatrix::zeros(n - 1, n - 1), DMatrix::identity(n - 1, n - 1), Poly::zero(n))
            .expect("model data is valid")
    }

    /// Splits a real defining polynomial into graded parts. The linear part must be exactly `2Re zⁿ`.
    pub fn from_poly(n: usize, rho: &Poly) -> Result<Self> {
        if !rho.is_real(1e-13 * (1.0 + rho.max_abs_coeff())) {
            return Err(Error::Invalid("defining function is not real-valued".into()));
        }
        let m = n - 1;
        let mut k = DMatrix::zeros(m, m);
        let mut h = DMatrix::zeros(m, m);
        let mut rest = Poly::zero(n);
        for (e, c) in rho.terms() {
            let deg: usize = e.iter().map(|&x| x as usize).sum();
            let touches_normal = e[n - 1] > 0 || e[2 * n - 1] > 0;
            // Constant and linear terms are only checked: rounding below 1e-12 is discarded.
            match deg {
                0 if c.norm() > 1e-12 => {
                    return Err(Error::Precondition("origin is not on the hypersurface".into()))
                }
                0 => {}
                1 => {
                    let target = if touches_normal { C64::new(1.0, 0.0) } else { C64::default() };
                    if (c - target).norm() > 1e-12 {
                        return Err(Error::Precondition("tangent plane is not {Re zⁿ = 0}".into()));
                    }
                }
                2 if !touches_normal => {
                    let hol: Vec<usize> = (0..m).flat_map(|i| std::iter::repeat(i).take(e[i] as usize)).collect();
                    let anti: Vec<usize> =
                        (0..m).flat_map(|i| std::iter::repeat(i).take(e[n + i] as usize)).collect();
                    match (hol.len(), anti.len()) {
                        (2, 0) if hol[0] == hol[1] => k[(hol[0], hol[0])] = -c * 2.0,
                        (2, 0) => {
                            k[(hol[0], hol[1])] = -c;
                            k[(hol[1], hol[0])] = -c;
                        }
                        (1, 1) => h[(hol[0], anti[0])] = -c,
                        _ => {}
                    }
                }
                _ => rest.add_term(e.to_vec(), c),
            }
        }
        let mut en = vec![0u8; 2 * n];
        en[n - 1] = 1;
        if rho.coeff(&en).norm() < 0.5 {
            return Err(Error::Precondition("tangent plane is not {Re zⁿ = 0}".into()));
        }
        HypersurfaceModel::new(n, k, h, rest)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> &DMatrix<C64> {
        &self.k
    }

    pub fn h(&self) -> &DMatrix<C64> {
        &self.h
    }

    pub fn remainder(&self) -> &Poly {
        &self.remainder
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn with_orientation(mut self, o: Orientation) -> Self {
        self.orientation = o;
        self
    }

    /// The assembled defining polynomial.
    pub fn rho(&self) -> Poly {
        let n = self.n;
        let m = n - 1;
        let mut p = &Poly::var(n, n - 1) + &Poly::conj_var(n, n - 1);
        for a in 0..m {
            for b in 0..m {
                let mut e = vec![0u8; 2 * n];
                e[a] += 1;
                e[b] += 1;
                p.add_term(e, -self.k[(a, b)] * 0.5);
                let mut e = vec![0u8; 2 * n];
                e[n + a] += 1;
                e[n + b] += 1;
                p.add_term(e, -self.k[(a, b)].conj() * 0.5);
                let mut e = vec![0u8; 2 * n];
                e[a] += 1;
                e[n + b] += 1;
                p.add_term(e, -self.h[(a, b)]);
            }
        }
        &p + &self.remainder
    }

    pub fn eval(&self, z: &[C64]) -> f64 {
        self.rho().eval(z).re
    }

    /// `+1` when the domain is `{ρ > 0}`.
    pub fn inside_sign(&self) -> f64 {
        match self.orientation {
            Orientation::PositiveInside => 1.0,
            Orientation::NegativeInside => -1.0,
        }
    }

    /// Largest coefficient difference between the assembled defining polynomials.
    pub fn distance(&self, other: &HypersurfaceModel) -> f64 {
        self.rho().distance(&other.rho())
    }
}
