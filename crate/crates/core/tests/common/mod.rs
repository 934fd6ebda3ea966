//! Independent oracles and sample builders shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use statdisc::algebra::{c64, gauss_legendre, DiscMap, Poly};
use statdisc::continuation::ContinuationProblem;
use statdisc::cotangent::LiftedDisc;
use statdisc::rhmodel::{
    boundary_real_coords, linearized_boundary, linearized_interior, model_boundary_residual, model_pde_residual,
    random_antisymmetric, BasePoint, BoundaryData, FreeParams, ModelProblem,
};
use statdisc::structures::{perturbed_hypersurface, perturbed_structure, AcsModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_c64<R: Rng>(rng: &mut R, bound: f64) -> C64 {
    c64(rng.gen_range(-bound..bound), rng.gen_range(-bound..bound))
}

/// `(1/π)∬_Δ η^p η̄^q / (ζ − η) dA(η)` by polar quadrature centred at `ζ`.
///
/// With `η = ζ + r e^{iθ}` the kernel `r dr dθ / (ζ − η)` becomes `−e^{−iθ} dr dθ`,
/// which is smooth; the radial limit is the distance to the unit circle along `θ`.
pub fn cauchy_green_quadrature(p: u32, q: u32, zeta: C64, radial: usize, angular: usize) -> C64 {
    let (nodes, weights) = gauss_legendre(radial, 0.0, 1.0);
    let mut acc = C64::default();
    for k in 0..angular {
        let th = 2.0 * PI * k as f64 / angular as f64;
        let e = C64::from_polar(1.0, th);
        let b = (zeta.conj() * e).re;
        let reach = -b + (b * b + 1.0 - zeta.norm_sqr()).sqrt();
        let mut inner = C64::default();
        for (x, w) in nodes.iter().zip(&weights) {
            let eta = zeta + e * (reach * x);
            inner += eta.powu(p) * eta.conj().powu(q) * (w * reach);
        }
        acc -= inner * e.conj();
    }
    acc * (2.0 * PI / angular as f64) / PI
}

/// The linearized model problem as one dense least-squares system over every
/// coefficient of `(h, k)`: interior equations, boundary equations, and the free
/// parameters read directly off the coefficients. Shares nothing with the coefficient recursion.
pub struct DenseLinearized {
    n: usize,
    cap: usize,
    interior_rows: usize,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl DenseLinearized {
    pub fn new(p: &ModelProblem, bp: &BasePoint) -> Self {
        let (n, cap) = (p.n(), p.cap());
        let mut x = vec![0.0; 4 * n * (cap + 1) * (cap + 1)];
        let mut cols = Vec::with_capacity(x.len());
        let mut interior_rows = 0;
        for k in 0..x.len() {
            x[k] = 1.0;
            let d = Self::disc_of(n, cap, &x);
            let mut r: Vec<f64> = linearized_interior(p, bp, &d)
                .iter()
                .flat_map(|m| m.coeffs().iter().flat_map(|c| [c.re, c.im]).collect::<Vec<_>>())
                .collect();
            interior_rows = r.len();
            r.extend(boundary_real_coords(&linearized_boundary(p, bp, &d), Self::max_mode(cap)));
            let (f, g) = (&d.f, &d.g);
            for c in 0..n {
                r.extend([f.get(c, 0, 0).re, f.get(c, 0, 0).im]);
            }
            for c in 1..n {
                r.extend([f.get(c, 1, 0).re, f.get(c, 1, 0).im]);
            }
            r.push((bp.a.conj() * f.get(0, 1, 0)).im);
            r.push(g.get(n - 1, 1, 0).re);
            cols.push(DVector::from_vec(r));
            x[k] = 0.0;
        }
        // Householder QR; the system has full column rank when the free parameters are included.
        let qr = DMatrix::from_columns(&cols).qr();
        DenseLinearized { n, cap, interior_rows, q: qr.q(), r: qr.r() }
    }

    fn max_mode(cap: usize) -> i64 {
        cap as i64 + 2
    }

    fn disc_of(n: usize, cap: usize, x: &[f64]) -> LiftedDisc {
        let c: Vec<C64> = x.chunks(2).map(|v| c64(v[0], v[1])).collect();
        let width = n * (cap + 1) * (cap + 1);
        LiftedDisc {
            f: DiscMap::from_flat(n, cap, c[..width].to_vec()),
            g: DiscMap::from_flat(n, cap, c[width..].to_vec()),
        }
    }

    /// Smallest over largest diagonal entry of the triangular factor.
    pub fn diagonal_ratio(&self) -> f64 {
        let d = self.r.diagonal().map(f64::abs);
        d.min() / d.max()
    }

    pub fn solve(&self, phi: &BoundaryData, free: &FreeParams) -> LiftedDisc {
        let mut rhs = vec![0.0; self.interior_rows];
        rhs.extend(boundary_real_coords(phi, Self::max_mode(self.cap)));
        rhs.extend(free.to_real());
        let qtb = self.q.transpose() * DVector::from_vec(rhs);
        let sol = self.r.solve_upper_triangular(&qtb).expect("nonsingular triangular factor");
        Self::disc_of(self.n, self.cap, sol.as_slice())
    }
}

/// Central differences of the nonlinear model residuals at `base` along `dir`.
pub fn fd_linearization(p: &ModelProblem, base: &LiftedDisc, dir: &LiftedDisc, eps: f64) -> (Vec<DiscMap>, BoundaryData) {
    let plus = base.add(&dir.scale(c64(eps, 0.0)));
    let minus = base.add(&dir.scale(c64(-eps, 0.0)));
    let (rp, rm) = (model_pde_residual(p, &plus), model_pde_residual(p, &minus));
    let interior = rp.iter().zip(&rm).map(|(a, b)| a.sub(b).scale(c64(0.5 / eps, 0.0))).collect();
    let boundary = model_boundary_residual(p, &plus).sub(&model_boundary_residual(p, &minus)).scale(0.5 / eps);
    (interior, boundary)
}

/// Random lifted disc with all coefficients of total degree `≤ deg` in `[-1, 1]²`.
pub fn random_disc<R: Rng>(n: usize, deg: usize, rng: &mut R) -> LiftedDisc {
    let mut f = DiscMap::zeros(n, deg);
    let mut g = DiscMap::zeros(n, deg);
    for c in 0..n {
        for p in 0..=deg {
            for q in 0..=deg - p {
                f.set(c, p, q, random_c64(rng, 1.0));
                g.set(c, p, q, random_c64(rng, 1.0));
            }
        }
    }
    LiftedDisc { f, g }
}

/// Pair form of the lifted osculating structure written out by hand at `(z, P)`.
pub fn osculating_lift_by_hand(a: &DMatrix<C64>, point: &[C64]) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = a.nrows() + 1;
    let d = 2 * n;
    let pm = DMatrix::from_diagonal_element(d, d, c64(0.0, 1.0));
    let mut qm = DMatrix::zeros(d, d);
    for al in 0..n - 1 {
        for be in 0..n - 1 {
            qm[(n - 1, al)] += a[(al, be)] * point[be].conj();
            qm[(n + al, d - 1)] += a[(al, be)].conj() * point[be];
        }
    }
    (pm, qm)
}

/// Structure `J_st + O(|z|)` from a random linear seed with entries of modulus `≤ scale`.
pub fn random_graded_structure<R: Rng>(n: usize, scale: f64, rng: &mut R) -> AcsModel {
    let mut seed = vec![Poly::zero(n); n * n];
    for s in seed.iter_mut() {
        for k in 0..n {
            *s = &(&*s + &Poly::var(n, k).scale(random_c64(rng, scale)))
                + &Poly::conj_var(n, k).scale(random_c64(rng, scale));
        }
    }
    AcsModel::from_seed(n, &seed)
}

/// Standard-form pair with higher-order terms of size `scale`, target point on the
/// normal axis at height 1/8 and a direction with a small normal component.
pub fn perturbed_problem(n: usize, scale: f64, cap: usize, seed: u64) -> ContinuationProblem {
    let mut r = rng(seed);
    let a = random_antisymmetric(n - 1, 1.0, &mut r);
    let j = perturbed_structure(&a, scale, &mut r);
    let rho = perturbed_hypersurface(n, scale, &mut r);
    let mut z = vec![C64::default(); n];
    z[n - 1] = c64(0.125, 0.0);
    let mut v = vec![C64::default(); n];
    v[0] = c64(1.0, 0.0);
    if n > 2 {
        v[1] = c64(0.2, 0.1);
    }
    v[n - 1] = c64(0.01, -0.004);
    ContinuationProblem::new(j, rho, z, v, cap)
}
