//! The collocated nonlinear system for one value of the homotopy parameter.
//!
//! Unknowns are the real and imaginary parts of every coefficient `ζ^p ζ̄^q`
//! (`p, q ≤ N`) of the stacked lift `(f, g)`. Rows are ordered interior block,
//! boundary block, normalization block.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::algebra::{gauss_legendre, powers, roots_of_unity, DiscMap, Poly};
use crate::cotangent::{complex_action, conormal_from_values, LiftedDisc, LiftedStructure, PairField, VectorKind};
use crate::rhmodel::evaluation_map;
use crate::structures::{AcsModel, HypersurfaceModel};
use crate::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);
const HALF_OVER_I: C64 = C64::new(0.0, -0.5);

/// Collocation nodes: a polar tensor grid inside the disc and roots of unity on the boundary.
#[derive(Clone, Debug)]
pub struct Collocation {
    pub interior: Vec<C64>,
    pub boundary: Vec<C64>,
}

impl Collocation {
    /// `max(8, N+2)` Gauss radii on `[0, 1]` times `2N+1` angles, and `4N+1` boundary nodes.
    pub fn for_cap(cap: usize) -> Self {
        let (radii, _) = gauss_legendre(8.max(cap + 2), 0.0, 1.0);
        let k = 2 * cap + 1;
        let angles = roots_of_unity(k);
        let interior = radii.iter().flat_map(|&r| angles.iter().map(move |z| z * r)).collect();
        Collocation { interior, boundary: roots_of_unity(4 * cap + 1) }
    }
}

/// `ζ^p ζ̄^q` and its two Wirtinger derivatives at a node, flattened in `(p, q)` order.
struct NodeBasis {
    val: Vec<C64>,
    dbar: Vec<C64>,
    dz: Vec<C64>,
}

impl NodeBasis {
    fn new(zeta: C64, cap: usize) -> Self {
        let (zp, zq) = powers(zeta, cap);
        let w = cap + 1;
        let mut val = vec![C64::default(); w * w];
        let mut dbar = vec![C64::default(); w * w];
        let mut dz = vec![C64::default(); w * w];
        for p in 0..=cap {
            for q in 0..=cap {
                val[p * w + q] = zp[p] * zq[q];
                if q > 0 {
                    dbar[p * w + q] = zp[p] * zq[q - 1] * q as f64;
                }
                if p > 0 {
                    dz[p * w + q] = zp[p - 1] * zq[q] * p as f64;
                }
            }
        }
        NodeBasis { val, dbar, dz }
    }
}

/// Target values of the evaluation map.
#[derive(Clone, Debug)]
pub struct Normalization {
    /// Scalar used in the ratio block of the evaluation map.
    pub eval_a: C64,
    /// Target real vector of length `4n`.
    pub target: Vec<f64>,
}

/// The collocated system for a fixed pair `(J, ρ)`.
pub struct StepSystem {
    n: usize,
    cap: usize,
    structure: AcsModel,
    lift: LiftedStructure,
    rho: Poly,
    drho: Vec<Poly>,
    normalization: Normalization,
    colloc: Collocation,
    interior: Vec<NodeBasis>,
    boundary: Vec<Vec<C64>>,
    chart_radius: f64,
    fd_step: f64,
}

/// Per-node structure data for the chain rule.
struct InteriorJet {
    p: DMatrix<C64>,
    q: DMatrix<C64>,
    /// For each coordinate `c` of `(f, g)`: derivative of `(1/2i)(P̂ F_x + Q̂ conj F_x)`
    /// along `Re` and `Im` of that coordinate.
    d_re: Vec<Vec<C64>>,
    d_im: Vec<Vec<C64>>,
}

impl StepSystem {
    pub fn new(
        structure: &AcsModel,
        hypersurface: &HypersurfaceModel,
        normalization: Normalization,
        cap: usize,
        chart_radius: f64,
    ) -> Result<Self> {
        let n = structure.n();
        if hypersurface.n() != n {
            return Err(Error::Invalid("structure and hypersurface dimensions differ".into()));
        }
        if normalization.target.len() != 4 * n {
            return Err(Error::Invalid("normalization target must have 4n entries".into()));
        }
        let rho = hypersurface.rho();
        let drho = (0..n).map(|k| rho.wirtinger(k, false)).collect();
        let colloc = Collocation::for_cap(cap);
        let interior = colloc.interior.iter().map(|&z| NodeBasis::new(z, cap)).collect();
        let boundary = colloc.boundary.iter().map(|&z| NodeBasis::new(z, cap).val).collect();
        Ok(StepSystem {
            n,
            cap,
            structure: structure.clone(),
            lift: LiftedStructure::new(structure),
            rho,
            drho,
            normalization,
            colloc,
            interior,
            boundary,
            chart_radius,
            fd_step: 1e-6,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn collocation(&self) -> &Collocation {
        &self.colloc
    }

    pub fn structure(&self) -> &AcsModel {
        &self.structure
    }

    fn block(&self) -> usize {
        (self.cap + 1) * (self.cap + 1)
    }

    pub fn unknowns(&self) -> usize {
        4 * self.n * self.block()
    }

    pub fn rows(&self) -> usize {
        4 * self.n * self.colloc.interior.len() + 2 * self.n * self.colloc.boundary.len() + 4 * self.n
    }

    pub fn vec_from_disc(&self, fd: &LiftedDisc) -> Vec<f64> {
        let fd = fd.with_cap(self.cap);
        fd.f.coeffs().iter().chain(fd.g.coeffs()).flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn disc_from_vec(&self, x: &[f64]) -> LiftedDisc {
        let c = complex_coeffs(x);
        let half = self.n * self.block();
        LiftedDisc {
            f: DiscMap::from_flat(self.n, self.cap, c[..half].to_vec()),
            g: DiscMap::from_flat(self.n, self.cap, c[half..].to_vec()),
        }
    }

    fn point_values(&self, coeffs: &[C64], basis: &[C64]) -> Vec<C64> {
        let b = self.block();
        (0..2 * self.n).map(|c| coeffs[c * b..(c + 1) * b].iter().zip(basis).map(|(a, v)| a * v).sum()).collect()
    }

    fn check_chart(&self, x: &[C64], zeta: C64) -> Result<()> {
        let r = x[..self.n].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(r <= self.chart_radius) {
            return Err(Error::ChartExit { zeta: format!("{zeta}"), radius: r });
        }
        Ok(())
    }

    fn interior_residual(&self, fzb: &[C64], fx: &[C64], p: &DMatrix<C64>, q: &DMatrix<C64>) -> Vec<C64> {
        let d = 2 * self.n;
        (0..d)
            .map(|i| {
                let mut acc = C64::default();
                for k in 0..d {
                    let pt = if i == k { p[(i, k)] - I } else { p[(i, k)] };
                    acc += pt * fx[k] + q[(i, k)] * fx[k].conj();
                }
                fzb[i] + HALF_OVER_I * acc
            })
            .collect()
    }

    fn boundary_values(&self, zeta: C64, x: &[C64], g: &[C64]) -> Result<Vec<f64>> {
        let r0 = self.rho.eval(x).re;
        let drho: Vec<C64> = self.drho.iter().map(|p| p.eval(x)).collect();
        let w = complex_action(zeta, &drho, VectorKind::Cotangent, &self.structure, x);
        let c = conormal_from_values(r0, g, &w, 0.0)?;
        let mut out = Vec::with_capacity(2 * self.n);
        out.push(r0);
        out.extend(c.r);
        Ok(out)
    }

    fn normalization_values(&self, coeffs: &[C64]) -> Result<Vec<f64>> {
        let n = self.n;
        let b = self.block();
        let w = self.cap + 1;
        let mut f = DiscMap::zeros(n, 1);
        let mut g = DiscMap::zeros(n, 1);
        for c in 0..n {
            f.set(c, 0, 0, coeffs[c * b]);
            f.set(c, 1, 0, coeffs[c * b + w]);
            f.set(c, 0, 1, coeffs[c * b + 1]);
        }
        g.set(n - 1, 1, 0, coeffs[(2 * n - 1) * b + w]);
        let e = evaluation_map(&LiftedDisc { f, g }, self.normalization.eval_a, &self.structure)?;
        Ok(e.iter().zip(&self.normalization.target).map(|(a, b)| a - b).collect())
    }

    /// Stacked real residual.
    pub fn residual(&self, x: &[f64]) -> Result<DVector<f64>> {
        let coeffs = complex_coeffs(x);
        let mut out = Vec::with_capacity(self.rows());
        for (nb, &zeta) in self.interior.iter().zip(&self.colloc.interior) {
            let f = self.point_values(&coeffs, &nb.val);
            self.check_chart(&f, zeta)?;
            let fzb = self.point_values(&coeffs, &nb.dbar);
            let fz = self.point_values(&coeffs, &nb.dz);
            let fx: Vec<C64> = fz.iter().zip(&fzb).map(|(a, b)| a + b).collect();
            let (p, q) = self.lift.pair_at(&f);
            for r in self.interior_residual(&fzb, &fx, &p, &q) {
                out.extend([r.re, r.im]);
            }
        }
        for (basis, &zeta) in self.boundary.iter().zip(&self.colloc.boundary) {
            let v = self.point_values(&coeffs, basis);
            self.check_chart(&v, zeta)?;
            out.extend(self.boundary_values(zeta, &v[..self.n], &v[self.n..])?);
        }
        out.extend(self.normalization_values(&coeffs)?);
        Ok(DVector::from_vec(out))
    }

    fn interior_jet(&self, f: &[C64], fx: &[C64]) -> InteriorJet {
        let d = 2 * self.n;
        let n = self.n;
        let centre = self.lift.base_jets(&f[..n]);
        let (p, q) = self.lift.pair_from_jets(&centre, &f[n..]);
        let apply = |p: &DMatrix<C64>, q: &DMatrix<C64>| -> Vec<C64> {
            (0..d).map(|i| HALF_OVER_I * (0..d).map(|k| p[(i, k)] * fx[k] + q[(i, k)] * fx[k].conj()).sum::<C64>()).collect()
        };
        let mut d_re = Vec::with_capacity(d);
        let mut d_im = Vec::with_capacity(d);
        for c in 0..d {
            for (dir, store) in [(C64::new(1.0, 0.0), &mut d_re), (I, &mut d_im)] {
                let h = self.fd_step * (1.0 + f[c].norm());
                let mut xp = f.to_vec();
                let mut xm = f.to_vec();
                xp[c] += dir * h;
                xm[c] -= dir * h;
                // Fiber moves keep the base jets.
                let ((pp, qp), (pm, qm)) = if c < n {
                    (self.lift.pair_at(&xp), self.lift.pair_at(&xm))
                } else {
                    (self.lift.pair_from_jets(&centre, &xp[n..]), self.lift.pair_from_jets(&centre, &xm[n..]))
                };
                let vp = apply(&pp, &qp);
                let vm = apply(&pm, &qm);
                store.push(vp.iter().zip(&vm).map(|(a, b)| (a - b) / (2.0 * h)).collect());
            }
        }
        InteriorJet { p, q, d_re, d_im }
    }

    /// Jacobian of [`StepSystem::residual`] by the pointwise chain rule.
    ///
    /// The structure enters only through its values at node images; those
    /// derivatives are central differences, everything else is exact.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let coeffs = complex_coeffs(x);
        let d = 2 * self.n;
        let b = self.block();
        let mut jac = DMatrix::zeros(self.rows(), self.unknowns());
        let mut row = 0;
        for (nb, &zeta) in self.interior.iter().zip(&self.colloc.interior) {
            let f = self.point_values(&coeffs, &nb.val);
            self.check_chart(&f, zeta)?;
            let fzb = self.point_values(&coeffs, &nb.dbar);
            let fz = self.point_values(&coeffs, &nb.dz);
            let fx: Vec<C64> = fz.iter().zip(&fzb).map(|(a, b)| a + b).collect();
            let jet = self.interior_jet(&f, &fx);
            for c in 0..d {
                for k in 0..b {
                    let (v, vb) = (nb.val[k], nb.dbar[k]);
                    let vx = nb.dz[k] + vb;
                    for (part, eps) in [(0, C64::new(1.0, 0.0)), (1, I)] {
                        let col = 2 * (c * b + k) + part;
                        let dv = eps * v;
                        let dxv = eps * vx;
                        for i in 0..d {
                            let pt = if i == c { jet.p[(i, c)] - I } else { jet.p[(i, c)] };
                            let mut r = HALF_OVER_I * (pt * dxv + jet.q[(i, c)] * dxv.conj())
                                + jet.d_re[c][i] * dv.re
                                + jet.d_im[c][i] * dv.im;
                            if i == c {
                                r += eps * vb;
                            }
                            jac[(row + 2 * i, col)] = r.re;
                            jac[(row + 2 * i + 1, col)] = r.im;
                        }
                    }
                }
            }
            row += 2 * d;
        }
        for (basis, &zeta) in self.boundary.iter().zip(&self.colloc.boundary) {
            let v = self.point_values(&coeffs, basis);
            self.check_chart(&v, zeta)?;
            let mut grads = Vec::with_capacity(2 * d);
            for c in 0..d {
                for dir in [C64::new(1.0, 0.0), I] {
                    let h = self.fd_step * (1.0 + v[c].norm());
                    let mut vp = v.clone();
                    let mut vm = v.clone();
                    vp[c] += dir * h;
                    vm[c] -= dir * h;
                    let rp = self.boundary_values(zeta, &vp[..self.n], &vp[self.n..])?;
                    let rm = self.boundary_values(zeta, &vm[..self.n], &vm[self.n..])?;
                    grads.push(rp.iter().zip(&rm).map(|(a, b)| (a - b) / (2.0 * h)).collect::<Vec<f64>>());
                }
            }
            for c in 0..d {
                for k in 0..b {
                    for (part, eps) in [(0, C64::new(1.0, 0.0)), (1, I)] {
                        let col = 2 * (c * b + k) + part;
                        let dv = eps * basis[k];
                        for i in 0..d {
                            jac[(row + i, col)] = grads[2 * c][i] * dv.re + grads[2 * c + 1][i] * dv.im;
                        }
                    }
                }
            }
            row += d;
        }
        // The evaluation map reads four coefficient slots only.
        let w = self.cap + 1;
        let mut cols: Vec<usize> = Vec::new();
        for c in 0..self.n {
            for k in [0, w, 1] {
                cols.extend([2 * (c * b + k), 2 * (c * b + k) + 1]);
            }
        }
        cols.extend([2 * ((d - 1) * b + w), 2 * ((d - 1) * b + w) + 1]);
        for col in cols {
            let h = self.fd_step * (1.0 + x[col].abs());
            let mut cp = coeffs.clone();
            let mut cm = coeffs.clone();
            let dir = if col % 2 == 0 { C64::new(h, 0.0) } else { C64::new(0.0, h) };
            cp[col / 2] += dir;
            cm[col / 2] -= dir;
            let rp = self.normalization_values(&cp)?;
            let rm = self.normalization_values(&cm)?;
            for i in 0..4 * self.n {
                jac[(row + i, col)] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        Ok(jac)
    }

    /// Central-difference Jacobian over every unknown; slow, used to validate [`StepSystem::jacobian`].
    pub fn jacobian_fd(&self, x: &[f64], step: f64) -> Result<DMatrix<f64>> {
        let mut jac = DMatrix::zeros(self.rows(), x.len());
        let mut xp = x.to_vec();
        for j in 0..x.len() {
            let h = step * (1.0 + x[j].abs());
            xp[j] = x[j] + h;
            let rp = self.residual(&xp)?;
            xp[j] = x[j] - h;
            let rm = self.residual(&xp)?;
            xp[j] = x[j];
            jac.set_column(j, &((rp - rm) / (2.0 * h)));
        }
        Ok(jac)
    }

    /// Row ranges of the three blocks.
    pub fn blocks(&self) -> [std::ops::Range<usize>; 3] {
        let a = 4 * self.n * self.colloc.interior.len();
        let b = a + 2 * self.n * self.colloc.boundary.len();
        [0..a, a..b, b..b + 4 * self.n]
    }
}

fn complex_coeffs(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|v| C64::new(v[0], v[1])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::c64;
    use crate::rhmodel::{explicit_disc, BasePoint, GCoupling, ModelProblem};

    fn model_system(cap: usize) -> (StepSystem, LiftedDisc) {
        let a = DMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(0.3, -0.4), c64(-0.3, 0.4), c64(0.0, 0.0)]);
        let p = ModelProblem::new(a.clone(), cap, GCoupling::LiftConsistent).unwrap();
        let a0 = c64(0.5, 0.0);
        let d = explicit_disc(&p, &BasePoint::new(a0, 1.0).unwrap());
        let j = AcsModel::osculating(&a);
        let rho = HypersurfaceModel::siegel(3);
        let target = evaluation_map(&d, a0, &j).unwrap();
        let sys = StepSystem::new(&j, &rho, Normalization { eval_a: a0, target }, cap, 10.0).unwrap();
        (sys, d)
    }

    #[test]
    fn explicit_disc_has_zero_residual() {
        let (sys, d) = model_system(3);
        let r = sys.residual(&sys.vec_from_disc(&d)).unwrap();
        assert_eq!(r.len(), sys.rows());
        assert!(r.amax() < 1e-13, "{}", r.amax());
    }

    #[test]
    fn chain_rule_jacobian_matches_differences() {
        let (sys, d) = model_system(2);
        let mut x = sys.vec_from_disc(&d);
        for (i, v) in x.iter_mut().enumerate() {
            *v += 1e-2 * ((i as f64) * 0.37).sin();
        }
        let ja = sys.jacobian(&x).unwrap();
        let jf = sys.jacobian_fd(&x, 1e-6).unwrap();
        let err = (&ja - &jf).amax();
        assert!(err < 1e-7 * (1.0 + jf.amax()), "{err}");
    }
}
