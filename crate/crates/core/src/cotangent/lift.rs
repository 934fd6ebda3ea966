//! Canonical lift of an almost complex structure to the cotangent bundle.
//!
//! In real coordinates `(x, y, u, v)` with fiber coordinates `p = (u, v)` the
//! lift is `𝕁 = [[J, 0], [B(p), Jᵀ]]` where, with `J^a_{i,j} = ∂_j J^a_i`,
//!
//! `B_{ji} = ½ Σ_a p_a (−J^a_{i,j} + J^a_{j,i} + J^a_ℓ (J^ℓ_{i,m} J^m_j − J^ℓ_{j,m} J^m_i))`.
//!
//! The complex fiber coordinate is `P = (u − iv)/2`, so a covector reads
//! `P_j dz^j + P̄_j dz̄^j`. The complex pair form of `𝕁` acts on `(z, P) ∈ ℂ^{2n}`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::algebra::{pair_from_real, LinearField, Poly, PolyBatch};
use crate::structures::AcsModel;

/// A field of real-linear maps `w ↦ P̂w + Q̂w̄` on a coordinate space.
pub trait PairField {
    /// Dimension of the space the maps act on.
    fn value_dim(&self) -> usize;
    /// Number of leading coordinates that are base (chart) coordinates.
    fn base_dim(&self) -> usize;
    fn pair_at(&self, point: &[C64]) -> (DMatrix<C64>, DMatrix<C64>);
}

impl PairField for AcsModel {
    fn value_dim(&self) -> usize {
        self.n()
    }

    fn base_dim(&self) -> usize {
        self.n()
    }

    fn pair_at(&self, point: &[C64]) -> (DMatrix<C64>, DMatrix<C64>) {
        self.eval(point)
    }
}

#[derive(Clone, Debug)]
pub struct LiftedStructure {
    n: usize,
    /// Real matrix of `J`, row-major `2n×2n`, row = output index.
    jr: Vec<Poly>,
    /// `∂_c J^a_b` at index `(c·2n + a)·2n + b`.
    djr: Vec<Poly>,
    /// `jr` followed by `djr`, for evaluation.
    batch: PolyBatch,
}

/// `J` and its first derivatives `D_c = ∂_c J` at a base point.
#[derive(Clone, Debug)]
pub struct BaseJets {
    jm: DMatrix<f64>,
    dm: Vec<DMatrix<f64>>,
}

impl LiftedStructure {
    pub fn new(j: &AcsModel) -> Self {
        let n = j.n();
        let d = 2 * n;
        let jr = j.real_matrix_polys();
        let mut djr = Vec::with_capacity(d * d * d);
        for c in 0..d {
            for p in &jr {
                djr.push(p.d_real(c));
            }
        }
        let all: Vec<Poly> = jr.iter().chain(&djr).cloned().collect();
        LiftedStructure { n, jr, djr, batch: PolyBatch::new(&all) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_jets(&self, z: &[C64]) -> BaseJets {
        let d = 2 * self.n;
        let v = self.batch.eval(z);
        let jm = DMatrix::from_fn(d, d, |a, b| v[a * d + b].re);
        let dm = (0..d).map(|c| DMatrix::from_fn(d, d, |a, b| v[d * d + (c * d + a) * d + b].re)).collect();
        BaseJets { jm, dm }
    }

    /// Pair form of `𝕁` at a base point with precomputed jets and complex fiber `P`.
    ///
    /// The result is affine in `P`, so callers may reuse one set of jets across fiber perturbations.
    pub fn pair_from_jets(&self, jets: &BaseJets, big_p: &[C64]) -> (DMatrix<C64>, DMatrix<C64>) {
        lifted_pair_from_real(&Self::assemble(jets, &fiber_real(big_p)))
    }

    fn assemble(jets: &BaseJets, p: &[f64]) -> DMatrix<f64> {
        let d = jets.jm.nrows();
        let b = Self::fiber_block(&jets.jm, &jets.dm, p);
        let mut out = DMatrix::zeros(2 * d, 2 * d);
        out.view_mut((0, 0), (d, d)).copy_from(&jets.jm);
        out.view_mut((d, 0), (d, d)).copy_from(&b);
        out.view_mut((d, d), (d, d)).copy_from(&jets.jm.transpose());
        out
    }

    /// `B(p)` from a base jet; linear in `p`.
    fn fiber_block(jm: &DMatrix<f64>, dm: &[DMatrix<f64>], p: &[f64]) -> DMatrix<f64> {
        let d = jm.nrows();
        // w[l][(i, j)] = Σ_m ∂_m J^l_i J^m_j
        let w: Vec<DMatrix<f64>> = (0..d)
            .map(|l| DMatrix::from_fn(d, d, |i, j| (0..d).map(|m| dm[m][(l, i)] * jm[(m, j)]).sum()))
            .collect();
        // c[(i, j)] = Σ_a p_a J^a_ℓ (w_ℓ[i,j] − w_ℓ[j,i])
        let pj: Vec<f64> = (0..d).map(|l| (0..d).map(|a| p[a] * jm[(a, l)]).sum()).collect();
        let mut b = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                let mut s = 0.0;
                for a in 0..d {
                    s += p[a] * (-dm[j][(a, i)] + dm[i][(a, j)]);
                }
                for l in 0..d {
                    s += pj[l] * (w[l][(i, j)] - w[l][(j, i)]);
                }
                b[(j, i)] = 0.5 * s;
            }
        }
        b
    }

    /// Real `4n×4n` matrix of `𝕁` at `(z, p)` in the order `(x, y, u, v)`.
    pub fn real_matrix(&self, z: &[C64], p: &[f64]) -> DMatrix<f64> {
        Self::assemble(&self.base_jets(z), p)
    }
}

/// Real fiber coordinates `(u, v)` of complex `P = (u − iv)/2`.
pub fn fiber_real(big_p: &[C64]) -> Vec<f64> {
    let n = big_p.len();
    (0..2 * n).map(|a| if a < n { 2.0 * big_p[a].re } else { -2.0 * big_p[a - n].im }).collect()
}

/// Change from `(x, y, u, v)` to `(Re z, Re P, Im z, Im P)`.
fn to_standard(n: usize) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(4 * n, 4 * n);
    for k in 0..n {
        t[(k, k)] = 1.0;
        t[(n + k, 2 * n + k)] = 0.5;
        t[(2 * n + k, n + k)] = 1.0;
        t[(3 * n + k, 3 * n + k)] = -0.5;
    }
    t
}

fn from_standard(n: usize) -> DMatrix<f64> {
    let mut t = DMatrix::zeros(4 * n, 4 * n);
    for k in 0..n {
        t[(k, k)] = 1.0;
        t[(2 * n + k, n + k)] = 2.0;
        t[(n + k, 2 * n + k)] = 1.0;
        t[(3 * n + k, 3 * n + k)] = -2.0;
    }
    t
}

/// Complex pair of a real `4n×4n` map given in `(x, y, u, v)` coordinates, acting on `(z, P)`.
pub fn lifted_pair_from_real(r: &DMatrix<f64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = r.nrows() / 4;
    pair_from_real(&(to_standard(n) * r * from_standard(n)))
}

impl PairField for LiftedStructure {
    fn value_dim(&self) -> usize {
        2 * self.n
    }

    fn base_dim(&self) -> usize {
        self.n
    }

    fn pair_at(&self, point: &[C64]) -> (DMatrix<C64>, DMatrix<C64>) {
        let n = self.n;
        self.pair_from_jets(&self.base_jets(&point[..n]), &point[n..])
    }
}

impl LiftedStructure {
    /// Exact polynomial pair `(P̂, Q̂)` in the variables `(z, P)`.
    ///
    /// Cost grows quickly with the degree of `J`; meant for low-degree structures.
    pub fn exact_field(&self) -> LinearField {
        let n = self.n;
        let d = 2 * n;
        let nv = 2 * n;
        let embed: Vec<Poly> = (0..n).map(|k| Poly::var(nv, k)).collect();
        let jr: Vec<Poly> = self.jr.iter().map(|p| p.compose(&embed, None)).collect();
        let djr: Vec<Poly> = self.djr.iter().map(|p| p.compose(&embed, None)).collect();
        let dm = |c: usize, a: usize, b: usize| &djr[(c * d + a) * d + b];
        let jm = |a: usize, b: usize| &jr[a * d + b];
        let i = C64::new(0.0, 1.0);
        let p: Vec<Poly> = (0..d)
            .map(|a| {
                let (pk, pkb) = (Poly::var(nv, n + a % n), Poly::conj_var(nv, n + a % n));
                if a < n { &pk + &pkb } else { (&pk - &pkb).scale(i) }
            })
            .collect();
        let zero = Poly::zero(nv);
        let mut real = vec![zero.clone(); 4 * d * d];
        let at = |r: usize, c: usize| r * 2 * d + c;
        for a in 0..d {
            for b in 0..d {
                real[at(a, b)] = jm(a, b).clone();
                real[at(d + a, d + b)] = jm(b, a).clone();
            }
        }
        for i_ in 0..d {
            for j_ in 0..d {
                let mut s = zero.clone();
                for a in 0..d {
                    let mut t = dm(i_, a, j_) - dm(j_, a, i_);
                    for l in 0..d {
                        let mut inner = zero.clone();
                        for m in 0..d {
                            inner = &inner + &(&(dm(m, l, i_) * jm(m, j_)) - &(dm(m, l, j_) * jm(m, i_)));
                        }
                        t = &t + &(jm(a, l) * &inner);
                    }
                    s = &s + &(&p[a] * &t);
                }
                real[at(d + j_, i_)] = s.scale_re(0.5);
            }
        }
        // Conjugate by the constant change of coordinates, then split into a complex pair.
        let ts = to_standard(n);
        let tf = from_standard(n);
        let dd = 2 * d;
        let mut std = vec![zero.clone(); dd * dd];
        for r in 0..dd {
            for c in 0..dd {
                let mut acc = zero.clone();
                for k in 0..dd {
                    if ts[(r, k)] == 0.0 {
                        continue;
                    }
                    for l in 0..dd {
                        if tf[(l, c)] != 0.0 && !real[at(k, l)].is_zero() {
                            acc = &acc + &real[at(k, l)].scale_re(ts[(r, k)] * tf[(l, c)]);
                        }
                    }
                }
                std[r * dd + c] = acc;
            }
        }
        let mut lin = vec![zero.clone(); d * d];
        let mut anti = vec![zero.clone(); d * d];
        for k in 0..d {
            for row in 0..d {
                let ge = &std[row * dd + k] + &std[(row + d) * dd + k].scale(i);
                let gi = &std[row * dd + k + d] + &std[(row + d) * dd + k + d].scale(i);
                lin[row * d + k] = (&ge - &gi.scale(i)).scale_re(0.5);
                anti[row * d + k] = (&ge + &gi.scale(i)).scale_re(0.5);
            }
        }
        LinearField::new(d, lin, anti)
    }
}

/// Closed form of the lift of the osculating structure with matrix `A`:
/// `P̂ = i·Id`; `Q̂` has `Q^{zⁿ}_{z^α} = A_{αβ} z̄^β` and `Q^{P_α}_{P_n} = Ā_{αβ} z^β`; all other entries vanish.
pub fn osculating_lift_field(a: &DMatrix<C64>) -> LinearField {
    let n = a.nrows() + 1;
    let d = 2 * n;
    let mut f = LinearField::scalar(d, d, C64::new(0.0, 1.0));
    for al in 0..n - 1 {
        let mut q = Poly::zero(d);
        let mut qf = Poly::zero(d);
        for be in 0..n - 1 {
            q = &q + &Poly::conj_var(d, be).scale(a[(al, be)]);
            qf = &qf + &Poly::var(d, be).scale(a[(al, be)].conj());
        }
        f.anti[(n - 1) * d + al] = q;
        f.anti[(n + al) * d + (2 * n - 1)] = qf;
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{c64, real_from_pair};
    use crate::structures::default_samples;

    fn antisym3(c: C64) -> DMatrix<C64> {
        DMatrix::from_row_slice(2, 2, &[C64::default(), c, -c, C64::default()])
    }

    #[test]
    fn standard_lift_is_standard() {
        let l = LiftedStructure::new(&AcsModel::standard(2));
        let pt = [c64(0.1, 0.2), c64(-0.3, 0.0), c64(1.0, -2.0), c64(0.5, 0.5)];
        let (p, q) = l.pair_at(&pt);
        assert!((p - DMatrix::identity(4, 4) * C64::new(0.0, 1.0)).norm() < 1e-15);
        assert!(q.norm() < 1e-15);
    }

    #[test]
    fn osculating_lift_matches_closed_form() {
        let a = antisym3(c64(0.8, -0.35));
        let l = LiftedStructure::new(&AcsModel::osculating(&a));
        let exact = l.exact_field();
        assert!(exact.distance(&osculating_lift_field(&a)) < 1e-15);
    }

    #[test]
    fn seeded_lift_squares_to_minus_identity() {
        let n = 2;
        let mut seed = vec![Poly::zero(n); n * n];
        seed[1] = Poly::conj_var(n, 1).scale(c64(0.4, 0.2));
        seed[2] = &Poly::var(n, 0).scale(c64(-0.3, 0.5)) + &Poly::conj_var(n, 0).scale(c64(0.2, 0.1));
        let l = LiftedStructure::new(&AcsModel::from_seed(n, &seed));
        for (k, z) in default_samples(n).iter().take(20).enumerate() {
            let pt: Vec<C64> = z.iter().copied().chain([c64(k as f64 * 0.1, 1.0), c64(-0.7, 0.3)]).collect();
            let (p, q) = l.pair_at(&pt);
            let r = real_from_pair(&p, &q);
            let e = &r * &r + DMatrix::identity(8, 8);
            assert!(e.norm() < 1e-12, "{}", e.norm());
        }
    }

    #[test]
    fn numeric_and_exact_routes_agree() {
        let n = 2;
        let mut seed = vec![Poly::zero(n); n * n];
        seed[2] = Poly::conj_var(n, 0).scale(c64(0.3, -0.2));
        seed[3] = Poly::var(n, 1).scale(c64(0.1, 0.25));
        let l = LiftedStructure::new(&AcsModel::from_seed(n, &seed));
        let exact = l.exact_field();
        let pt = [c64(0.2, -0.1), c64(0.05, 0.3), c64(0.4, 0.9), c64(-1.1, 0.2)];
        let (p1, q1) = l.pair_at(&pt);
        let (p2, q2) = exact.eval(&pt);
        assert!((p1 - p2).norm() < 1e-13 && (q1 - q2).norm() < 1e-13);
    }
}
