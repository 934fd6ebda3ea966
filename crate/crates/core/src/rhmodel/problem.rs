//! The osculating model problem: explicit stationary discs and the nonlinear
//! interior and boundary residuals.
//!
//! Indices are 0-based: components `0..n−1` are the tangential directions
//! (`0` is the direction of the disc) and `n−1` is the normal direction.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{DiscMap, Laurent};
use crate::cotangent::LiftedDisc;
use crate::structures::AcsModel;
use crate::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);

/// Sign of the `Ā f conj(g_n,ζ)` coupling in the fiber equations.
///
/// `LiftConsistent` is the sign produced by the canonical cotangent lift of the
/// model structure. `AsPrinted` keeps the opposite sign, under which the explicit
/// fiber components carry `−|ζ|² + 2` instead of `+|ζ|²`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GCoupling {
    #[default]
    LiftConsistent,
    AsPrinted,
}

impl GCoupling {
    pub fn sigma(self) -> f64 {
        match self {
            GCoupling::LiftConsistent => -1.0,
            GCoupling::AsPrinted => 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelProblem {
    n: usize,
    /// `A_{αβ}` with `Q^n_α = A_{αβ} z̄^β` in the model structure.
    a: DMatrix<C64>,
    cap: usize,
    coupling: GCoupling,
}

impl ModelProblem {
    pub fn new(a: DMatrix<C64>, cap: usize, coupling: GCoupling) -> Result<Self> {
        let m = a.nrows();
        if m == 0 || a.ncols() != m {
            return Err(Error::Invalid("A must be a nonempty square matrix".into()));
        }
        let defect = (&a + a.transpose()).norm();
        if defect > 1e-14 * (1.0 + a.norm()) {
            return Err(Error::Invalid(format!("A is not antisymmetric (‖A + Aᵀ‖ = {defect:.3e})")));
        }
        if cap < 2 {
            return Err(Error::Invalid("degree cap must be at least 2".into()));
        }
        Ok(ModelProblem { n: m + 1, a, cap, coupling })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &DMatrix<C64> {
        &self.a
    }

    /// `Ā`.
    pub fn abar(&self) -> DMatrix<C64> {
        self.a.map(|c| c.conj())
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn coupling(&self) -> GCoupling {
        self.coupling
    }

    pub fn sigma(&self) -> f64 {
        self.coupling.sigma()
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        ModelProblem { cap, ..self.clone() }
    }

    pub fn with_coupling(&self, coupling: GCoupling) -> Self {
        ModelProblem { coupling, ..self.clone() }
    }

    /// The model structure.
    pub fn structure(&self) -> AcsModel {
        AcsModel::osculating(&self.a)
    }

    /// Problem in coordinates `z = (U w', wⁿ)` for unitary `U`: `A ↦ U* A Ū`.
    pub fn rotated(&self, u: &DMatrix<C64>) -> Self {
        let ub = u.map(|c| c.conj());
        ModelProblem { a: u.adjoint() * &self.a * ub, ..self.clone() }
    }
}

/// Random antisymmetric matrix with entries of modulus at most `bound`.
pub fn random_antisymmetric<R: Rng>(m: usize, bound: f64, rng: &mut R) -> DMatrix<C64> {
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i + 1..m {
            let c = C64::from_polar(bound * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU));
            a[(i, j)] = c;
            a[(j, i)] = -c;
        }
    }
    a
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasePoint {
    pub a: C64,
    pub lambda: f64,
}

impl BasePoint {
    pub fn new(a: C64, lambda: f64) -> Result<Self> {
        if a.norm() == 0.0 || !a.norm().is_finite() {
            return Err(Error::Invalid("base point needs a ≠ 0".into()));
        }
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::Invalid("base point needs λ ≠ 0".into()));
        }
        Ok(BasePoint { a, lambda })
    }
}

/// The explicit lifted disc:
/// `f = (aζ, 0, …, 0, |a|²/2)`, `g = (−λā, g_α, λζ)` with
/// `g_α = (iλ/2) Ā_{α0} a (−ζ² − σ|ζ|² + 1 + σ)`.
pub fn explicit_disc(p: &ModelProblem, b: &BasePoint) -> LiftedDisc {
    let n = p.n();
    let s = p.sigma();
    let cap = p.cap();
    let abar = p.abar();
    let mut f = DiscMap::zeros(n, cap);
    f.set(0, 1, 0, b.a);
    f.set(n - 1, 0, 0, C64::new(b.a.norm_sqr() / 2.0, 0.0));
    let mut g = DiscMap::zeros(n, cap);
    g.set(0, 0, 0, -b.a.conj() * b.lambda);
    g.set(n - 1, 1, 0, C64::new(b.lambda, 0.0));
    for al in 1..n - 1 {
        let c = I * (b.lambda / 2.0) * abar[(al, 0)] * b.a;
        g.set(al, 2, 0, -c);
        g.set(al, 1, 1, -c * s);
        g.set(al, 0, 0, c * (1.0 + s));
    }
    LiftedDisc { f, g }
}

/// Interior residuals: `∂f^α/∂ζ̄`,
/// `∂fⁿ/∂ζ̄ − (i/2) A_{αβ} f̄^β conj(∂f^α/∂ζ)`,
/// `∂g_α/∂ζ̄ + σ(i/2) Ā_{αβ} f^β conj(∂g_n/∂ζ)` and `∂g_n/∂ζ̄`, in that order.
pub fn model_pde_residual(p: &ModelProblem, fd: &LiftedDisc) -> Vec<DiscMap> {
    let n = p.n();
    let a = p.a();
    let abar = p.abar();
    let f = fd.f.split();
    let g = fd.g.split();
    let mut out = Vec::with_capacity(2 * n);
    for fa in f.iter().take(n - 1) {
        out.push(fa.d_zetabar());
    }
    let mut rn = f[n - 1].d_zetabar();
    for al in 0..n - 1 {
        let dfa = f[al].d_zeta().conj();
        for be in 0..n - 1 {
            if a[(al, be)] != C64::default() {
                rn = rn.sub(&f[be].conj().mul(&dfa).scale(I * 0.5 * a[(al, be)]));
            }
        }
    }
    out.push(rn);
    let dgn = g[n - 1].d_zeta().conj();
    for al in 0..n - 1 {
        let mut r = g[al].d_zetabar();
        for be in 0..n - 1 {
            if abar[(al, be)] != C64::default() {
                r = r.add(&f[be].mul(&dgn).scale(I * 0.5 * p.sigma() * abar[(al, be)]));
            }
        }
        out.push(r);
    }
    out.push(g[n - 1].d_zetabar());
    out
}

/// Boundary tables: a real table for the defining-function slot, complex tables
/// for the tangential slots, and the normal slot stored divided by `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub phi0: Laurent,
    pub phi_mid: Vec<Laurent>,
    pub phin: Laurent,
}

impl BoundaryData {
    pub fn zero(n: usize) -> Self {
        BoundaryData {
            phi0: Laurent::zeros(0, 0),
            phi_mid: vec![Laurent::zeros(0, 0); n - 1],
            phin: Laurent::zeros(0, 0),
        }
    }

    /// Random data with modes `|m| ≤ deg`, real where required.
    pub fn random<R: Rng>(n: usize, deg: usize, rng: &mut R) -> Self {
        let d = deg as i64;
        let cplx = |rng: &mut R| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let real_table = |rng: &mut R| {
            let mut l = Laurent::zeros(-d, d);
            l.set(0, C64::new(rng.gen_range(-1.0..1.0), 0.0));
            for m in 1..=d {
                let c = cplx(rng);
                l.set(m, c);
                l.set(-m, c.conj());
            }
            l
        };
        let phi0 = real_table(rng);
        let phin = real_table(rng);
        let phi_mid = (0..n - 1)
            .map(|_| {
                let mut l = Laurent::zeros(-d, d);
                for m in -d..=d {
                    l.set(m, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                }
                l
            })
            .collect();
        BoundaryData { phi0, phi_mid, phin }
    }

    pub fn n(&self) -> usize {
        self.phi_mid.len() + 1
    }

    pub fn tables(&self) -> impl Iterator<Item = &Laurent> {
        std::iter::once(&self.phi0).chain(&self.phi_mid).chain(std::iter::once(&self.phin))
    }

    pub fn max_abs(&self) -> f64 {
        self.tables().map(Laurent::max_abs).fold(0.0, f64::max)
    }

    pub fn sub(&self, other: &BoundaryData) -> BoundaryData {
        BoundaryData {
            phi0: self.phi0.sub(&other.phi0),
            phi_mid: self.phi_mid.iter().zip(&other.phi_mid).map(|(a, b)| a.sub(b)).collect(),
            phin: self.phin.sub(&other.phin),
        }
    }

    pub fn add(&self, other: &BoundaryData) -> BoundaryData {
        BoundaryData {
            phi0: self.phi0.add(&other.phi0),
            phi_mid: self.phi_mid.iter().zip(&other.phi_mid).map(|(a, b)| a.add(b)).collect(),
            phin: self.phin.add(&other.phin),
        }
    }

    pub fn scale(&self, s: f64) -> BoundaryData {
        let c = C64::new(s, 0.0);
        BoundaryData {
            phi0: self.phi0.scale(c),
            phi_mid: self.phi_mid.iter().map(|l| l.scale(c)).collect(),
            phin: self.phin.scale(c),
        }
    }

    /// Largest deviation from reality of the real slots.
    pub fn reality_defect(&self) -> f64 {
        self.phi0.reality_defect().max(self.phin.reality_defect())
    }

    /// Nonzero modes with `|m| > max_mode`, as `(slot, m)` pairs.
    pub fn modes_beyond(&self, max_mode: i64) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for (slot, t) in self.tables().enumerate() {
            for m in t.lo()..=t.hi() {
                if m.abs() > max_mode && t.get(m) != C64::default() {
                    out.push((slot, m));
                }
            }
        }
        out
    }
}

/// Nonlinear boundary residuals on `∂Δ`:
/// `2Re fⁿ − Σ|f^α|²`,
/// `g_α + (f̄^α + (i/2)Ā_{αβ}f^β) g_n − (i/2)Ā_{αβ} f^β ḡ_n`,
/// and `(ζ̄g_n − ζḡ_n)/i`.
pub fn model_boundary_residual(p: &ModelProblem, fd: &LiftedDisc) -> BoundaryData {
    let n = p.n();
    let abar = p.abar();
    let f = fd.f.boundary_fourier();
    let g = fd.g.boundary_fourier();
    let mut b0 = f[n - 1].add(&f[n - 1].conj());
    for fa in f.iter().take(n - 1) {
        b0 = b0.sub(&fa.mul(&fa.conj()));
    }
    let gn = &g[n - 1];
    let gnc = gn.conj();
    let mid = (0..n - 1)
        .map(|al| {
            let mut af = Laurent::zeros(0, 0);
            for be in 0..n - 1 {
                af = af.add(&f[be].scale(abar[(al, be)]));
            }
            let half_i_af = af.scale(I * 0.5);
            g[al].add(&f[al].conj().add(&half_i_af).mul(gn)).sub(&half_i_af.mul(&gnc))
        })
        .collect();
    let bn = gn.shift(-1).sub(&gnc.shift(1)).scale(-I);
    BoundaryData { phi0: b0, phi_mid: mid, phin: bn }
}

/// Lifted disc in coordinates `z = (U w', wⁿ)` from one in `w`: `f ↦ (U f', fⁿ)`, `g ↦ (Ū g', g_n)`.
pub fn rotate_disc(fd: &LiftedDisc, u: &DMatrix<C64>) -> LiftedDisc {
    let n = fd.n();
    let fs = fd.f.split();
    let gs = fd.g.split();
    let cap = fd.cap();
    let mut f = Vec::with_capacity(n);
    let mut g = Vec::with_capacity(n);
    for i in 0..n - 1 {
        let mut fi = DiscMap::zeros(1, cap);
        let mut gi = DiscMap::zeros(1, cap);
        for k in 0..n - 1 {
            fi = fi.add(&fs[k].scale(u[(i, k)]));
            gi = gi.add(&gs[k].scale(u[(i, k)].conj()));
        }
        f.push(fi);
        g.push(gi);
    }
    f.push(fs[n - 1].clone());
    g.push(gs[n - 1].clone());
    LiftedDisc { f: DiscMap::stack(&f), g: DiscMap::stack(&g) }
}

/// A unitary matrix whose first column is `v / |v|`.
pub fn unitary_with_first_column(v: &[C64]) -> Result<DMatrix<C64>> {
    let m = v.len();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Invalid("direction vector vanishes".into()));
    }
    // Householder-free construction: QR of [v | Id].
    let mut mat = DMatrix::zeros(m, m + 1);
    for i in 0..m {
        mat[(i, 0)] = v[i] / norm;
        mat[(i, i + 1)] = C64::new(1.0, 0.0);
    }
    let q = mat.qr().q();
    let mut u = q.columns(0, m).into_owned();
    // Fix the phase of the first column so it equals v/|v| exactly up to rounding.
    let phase = (0..m).map(|i| u[(i, 0)].conj() * v[i] / norm).sum::<C64>();
    let phase = phase / phase.norm();
    for i in 0..m {
        u[(i, 0)] *= phase;
    }
    Ok(u)
}
