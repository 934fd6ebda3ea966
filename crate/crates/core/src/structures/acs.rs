//! Almost complex structures on a chart of `ℂⁿ`.
//!
//! A structure acts on a real tangent vector, written as `w ∈ ℂⁿ`, by
//! `J(z)w = P(z)w + Q(z)w̄`. The standard structure has `P = i·Id`, `Q = 0`.
//! The first-order part of `Q` is carried by two tensors,
//! `Q^i_j = L^i_{j̄k} z^k + L^i_{j̄k̄} z̄^k + …`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{apply_pair, real_from_pair, LinearField, Poly};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct AcsModel {
    n: usize,
    /// `L^i_{j̄k}` at flat index `(i·n + j)·n + k`.
    l_mixed: Vec<C64>,
    /// `L^i_{j̄k̄}` at flat index `(i·n + j)·n + k`.
    l_anti: Vec<C64>,
    /// Everything else beyond `J_st` and the two linear tensors.
    higher: LinearField,
    /// Assembled `(P, Q)`, kept in sync with the parts above.
    field: LinearField,
}

impl AcsModel {
    pub fn standard(n: usize) -> Self {
        AcsModel {
            n,
            l_mixed: vec![C64::default(); n * n * n],
            l_anti: vec![C64::default(); n * n * n],
            higher: LinearField::zero(n, n),
            field: LinearField::scalar(n, n, I),
        }
    }

    /// Model structure `J_st + A_{ᾱβ̄} z̄^β ∂/∂zⁿ ⊗ dz̄^α` for an `(n−1)×(n−1)` matrix `A`.
    pub fn osculating(a: &DMatrix<C64>) -> Self {
        let n = a.nrows() + 1;
        let mut j = AcsModel::standard(n);
        for al in 0..n - 1 {
            for be in 0..n - 1 {
                j.set_l_anti(n - 1, al, be, a[(al, be)]);
            }
        }
        j
    }

    pub fn from_tensors(n: usize, l_mixed: Vec<C64>, l_anti: Vec<C64>, higher: LinearField) -> Self {
        assert!(l_mixed.len() == n * n * n && l_anti.len() == n * n * n, "tensor size mismatch");
        assert_eq!(higher.dim(), n, "higher-order field dimension mismatch");
        let mut j = AcsModel { n, l_mixed, l_anti, higher, field: LinearField::zero(n, n) };
        j.refresh();
        j
    }

    fn refresh(&mut self) {
        self.field = LinearField::scalar(self.n, self.n, I).add(&self.linear_part()).add(&self.higher);
    }

    /// Splits a full field `(P, Q)` into `J_st`, linear tensors and the rest.
    pub fn from_field(field: &LinearField) -> Self {
        let n = field.dim();
        let mut j = AcsModel::standard(n);
        let mut lin = field.lin.clone();
        for i in 0..n {
            lin[i * n + i] = &lin[i * n + i] - &Poly::constant(n, I);
        }
        let mut anti = field.anti.clone();
        for i in 0..n {
            for jj in 0..n {
                let q = &mut anti[i * n + jj];
                for k in 0..n {
                    let ek = unit_exp(n, k, false);
                    let ekb = unit_exp(n, k, true);
                    let cm = q.coeff(&ek);
                    let ca = q.coeff(&ekb);
                    j.l_mixed[(i * n + jj) * n + k] = cm;
                    j.l_anti[(i * n + jj) * n + k] = ca;
                    q.add_term(ek, -cm);
                    q.add_term(ekb, -ca);
                }
            }
        }
        j.higher = LinearField::new(n, lin, anti);
        j.refresh();
        j
    }

    /// Exact structure `Φ J_st Φ⁻¹` whose first-order antilinear part equals `seed`.
    ///
    /// `Φ = (Id + N₁)(Id + N₂)` with `N_k(w) = e^{iθ_k} C_k(z) Im(e^{−iθ_k} w)`,
    /// `θ₁ = 0`, `θ₂ = π/4`, `C₁ = Re(seed)`, `C₂ = Im(seed)`. Each `N_k` squares to
    /// zero, so the inverse is the reversed product with signs flipped and `J² = −Id`
    /// holds identically.
    pub fn from_seed(n: usize, seed: &[Poly]) -> Self {
        assert_eq!(seed.len(), n * n, "seed must be an n×n matrix");
        let c1: Vec<Poly> = seed.iter().map(Poly::real_part).collect();
        let c2: Vec<Poly> = seed.iter().map(Poly::imag_part).collect();
        let inv2i = C64::new(0.0, -0.5);
        let n1 = LinearField::new(
            n,
            c1.iter().map(|p| p.scale(inv2i)).collect(),
            c1.iter().map(|p| p.scale(-inv2i)).collect(),
        );
        let n2 = LinearField::new(
            n,
            c2.iter().map(|p| p.scale(inv2i)).collect(),
            c2.iter().map(|p| p.scale_re(-0.5)).collect(),
        );
        let id = LinearField::scalar(n, n, C64::new(1.0, 0.0));
        let phi = id.add(&n1).compose(&id.add(&n2), None);
        let phi_inv = id.sub(&n2).compose(&id.sub(&n1), None);
        let jst = LinearField::scalar(n, n, I);
        let field = phi.compose(&jst, None).compose(&phi_inv, None);
        AcsModel::from_field(&field)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l_mixed(&self, i: usize, j: usize, k: usize) -> C64 {
        self.l_mixed[(i * self.n + j) * self.n + k]
    }

    pub fn l_anti(&self, i: usize, j: usize, k: usize) -> C64 {
        self.l_anti[(i * self.n + j) * self.n + k]
    }

    pub fn set_l_mixed(&mut self, i: usize, j: usize, k: usize, v: C64) {
        let n = self.n;
        self.l_mixed[(i * n + j) * n + k] = v;
        self.refresh();
    }

    pub fn set_l_anti(&mut self, i: usize, j: usize, k: usize, v: C64) {
        let n = self.n;
        self.l_anti[(i * n + j) * n + k] = v;
        self.refresh();
    }

    pub fn l_mixed_flat(&self) -> &[C64] {
        &self.l_mixed
    }

    pub fn l_anti_flat(&self) -> &[C64] {
        &self.l_anti
    }

    pub fn higher(&self) -> &LinearField {
        &self.higher
    }

    pub fn set_higher(&mut self, higher: LinearField) {
        assert_eq!(higher.dim(), self.n, "higher-order field dimension mismatch");
        self.higher = higher;
        self.refresh();
    }

    /// Antilinear part of first order, `Q_lin^i_j = L^i_{j̄k} z^k + L^i_{j̄k̄} z̄^k`.
    pub fn linear_part(&self) -> LinearField {
        let n = self.n;
        let mut f = LinearField::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut q = Poly::zero(n);
                for k in 0..n {
                    q.add_term(unit_exp(n, k, false), self.l_mixed(i, j, k));
                    q.add_term(unit_exp(n, k, true), self.l_anti(i, j, k));
                }
                f.anti[i * n + j] = q;
            }
        }
        f
    }

    /// The assembled field `(P, Q)`.
    pub fn field(&self) -> &LinearField {
        &self.field
    }

    pub fn eval(&self, z: &[C64]) -> (DMatrix<C64>, DMatrix<C64>) {
        self.field.eval(z)
    }

    /// `J(z)` applied to the real tangent vector `w`.
    pub fn apply(&self, z: &[C64], w: &[C64]) -> Vec<C64> {
        let (p, q) = self.eval(z);
        apply_pair(&p, &q, w)
    }

    /// Real `2n×2n` matrix of `J(z)` in the coordinates `(x¹..xⁿ, y¹..yⁿ)`.
    pub fn real_matrix(&self, z: &[C64]) -> DMatrix<f64> {
        let (p, q) = self.eval(z);
        real_from_pair(&p, &q)
    }

    /// Real matrix entries as real-valued polynomials, row-major `2n×2n`.
    pub fn real_matrix_polys(&self) -> Vec<Poly> {
        let n = self.n;
        let f = self.field();
        let mut out = vec![Poly::zero(n); 4 * n * n];
        for r in 0..n {
            for k in 0..n {
                let m1 = f.lin_at(r, k) + f.anti_at(r, k);
                let m2 = (f.lin_at(r, k) - f.anti_at(r, k)).scale(I);
                out[r * 2 * n + k] = m1.real_part();
                out[r * 2 * n + k + n] = m2.real_part();
                out[(r + n) * 2 * n + k] = m1.imag_part();
                out[(r + n) * 2 * n + k + n] = m2.imag_part();
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        let f = self.field();
        f.lin.iter().chain(&f.anti).filter_map(Poly::degree).max().unwrap_or(0)
    }

    /// Largest coefficient difference between the assembled fields.
    pub fn distance(&self, other: &AcsModel) -> f64 {
        self.field.distance(&other.field)
    }
}

pub(crate) fn unit_exp(n: usize, k: usize, conjugated: bool) -> Vec<u8> {
    let mut e = vec![0u8; 2 * n];
    e[if conjugated { n + k } else { k }] = 1;
    e
}

#[derive(Clone, Debug, Serialize)]
pub struct AcsReport {
    pub max_residual: f64,
    pub worst_point: Vec<C64>,
    pub pass: bool,
}

/// Largest operator norm of `J(z)² + Id` over the sample points.
pub fn validate_acs(j: &AcsModel, samples: &[Vec<C64>], tol: f64) -> AcsReport {
    let n = j.n();
    let field = j.field();
    let mut worst = (f64::NEG_INFINITY, vec![C64::default(); n]);
    for z in samples {
        let (p, q) = field.eval(z);
        let r = real_from_pair(&p, &q);
        let e = &r * &r + DMatrix::<f64>::identity(2 * n, 2 * n);
        let norm = e.singular_values().max();
        if norm > worst.0 {
            worst = (norm, z.clone());
        }
    }
    worst.0 = worst.0.max(0.0);
    AcsReport { max_residual: worst.0, worst_point: worst.1, pass: worst.0 <= tol }
}

/// Fixed set of 100 points in the polydisc of radius 0.5.
pub fn default_samples(n: usize) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    (0..100)
        .map(|_| {
            (0..n)
                .map(|_| C64::from_polar(0.5 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c64;

    fn antisym(c: C64) -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[C64::default(), c, -c, C64::default()])
    }

    #[test]
    fn standard_structure_squares_to_minus_identity() {
        let r = validate_acs(&AcsModel::standard(3), &default_samples(3), 1e-14);
        assert_eq!(r.max_residual, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn osculating_structure_is_exact() {
        let j = AcsModel::osculating(&antisym(c64(0.7, -1.2)));
        let r = validate_acs(&j, &default_samples(3), 1e-14);
        assert!(r.max_residual < 1e-15, "{}", r.max_residual);
    }

    #[test]
    fn broken_block_structure_is_reported() {
        let mut j = AcsModel::standard(2);
        let mut higher = LinearField::zero(2, 2);
        higher.lin[1] = Poly::var(2, 0);
        j.set_higher(higher);
        let r = validate_acs(&j, &default_samples(2), 1e-10);
        assert!(!r.pass && r.max_residual > 1e-3);
    }

    #[test]
    fn seeded_structure_is_exact_and_keeps_first_order_seed() {
        let n = 3;
        let mut seed = vec![Poly::zero(n); n * n];
        seed[1] = &Poly::var(n, 0).scale(c64(0.3, 0.2)) + &Poly::conj_var(n, 2).scale(c64(-0.5, 0.1));
        seed[5] = Poly::conj_var(n, 1).scale(c64(0.4, -0.7));
        seed[7] = &Poly::var(n, 2).scale(c64(0.1, 0.9)) + &Poly::conj_var(n, 0).scale(c64(0.2, 0.0));
        let j = AcsModel::from_seed(n, &seed);
        let r = validate_acs(&j, &default_samples(n), 1e-12);
        assert!(r.pass, "{}", r.max_residual);
        assert_eq!(j.l_mixed(0, 1, 0), c64(0.3, 0.2));
        assert_eq!(j.l_anti(0, 1, 2), c64(-0.5, 0.1));
        assert!((j.l_anti(1, 2, 1) - c64(0.4, -0.7)).norm() < 1e-15);
        assert!(j.max_degree() <= 4);
        let z = [c64(0.0, 0.0); 3];
        let (p, q) = j.eval(&z);
        assert!((p - DMatrix::identity(3, 3) * I).norm() < 1e-15 && q.norm() < 1e-15);
    }

    #[test]
    fn seeded_osculating_structure_is_itself() {
        let a = DMatrix::from_row_slice(2, 2, &[C64::default(), c64(0.3, 0.4), c64(-0.3, -0.4), C64::default()]);
        let j0 = AcsModel::osculating(&a);
        let seed = j0.linear_part().anti;
        let j = AcsModel::from_seed(3, &seed);
        assert!(j.distance(&j0) < 1e-16);
    }

    #[test]
    fn real_matrix_polys_match_numeric_matrix() {
        let n = 2;
        let mut seed = vec![Poly::zero(n); n * n];
        seed[2] = Poly::conj_var(n, 0).scale(c64(0.4, 0.3));
        seed[1] = Poly::var(n, 1).scale(c64(-0.2, 0.5));
        let j = AcsModel::from_seed(n, &seed);
        let z = [c64(0.1, -0.3), c64(0.25, 0.05)];
        let r = j.real_matrix(&z);
        let polys = j.real_matrix_polys();
        for a in 0..4 {
            for b in 0..4 {
                let v = polys[a * 4 + b].eval(&z);
                assert!((v.re - r[(a, b)]).abs() < 1e-14 && v.im.abs() < 1e-14);
            }
        }
    }
}
