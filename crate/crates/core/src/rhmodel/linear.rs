//! Linearization of the model problem at an explicit disc, and its solution by
//! Laurent-coefficient recursion.
//!
//! Variations are written `(h, k)` for `(δf, δg)`. The interior equations are
//! solved once and for all by a representation in terms of holomorphic parts;
//! the boundary equations then become a triangular system on coefficients.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::problem::{BasePoint, BoundaryData, ModelProblem};
use crate::algebra::{DiscMap, Laurent};
use crate::cotangent::LiftedDisc;
use crate::{Error, Result};

const I: C64 = C64::new(0.0, 1.0);
const ZERO: C64 = C64::new(0.0, 0.0);

/// Coefficients shared by the linear operators at a base point.
struct Coefficients {
    n: usize,
    sigma: f64,
    a: C64,
    lambda: f64,
    /// `A_{0α}`.
    c: Vec<C64>,
    /// `Ā_{α0}`.
    b: Vec<C64>,
    /// `Ā`.
    bm: DMatrix<C64>,
}

impl Coefficients {
    fn new(p: &ModelProblem, bp: &BasePoint) -> Self {
        let m = p.n() - 1;
        let bm = p.abar();
        Coefficients {
            n: p.n(),
            sigma: p.sigma(),
            a: bp.a,
            lambda: bp.lambda,
            c: (0..m).map(|al| p.a()[(0, al)]).collect(),
            b: (0..m).map(|al| bm[(al, 0)]).collect(),
            bm,
        }
    }
}

/// Interior linearization, in the same order as the nonlinear residual.
pub fn linearized_interior(p: &ModelProblem, bp: &BasePoint, hk: &LiftedDisc) -> Vec<DiscMap> {
    let co = Coefficients::new(p, bp);
    let n = co.n;
    let h = hk.f.split();
    let k = hk.g.split();
    let mut out = Vec::with_capacity(2 * n);
    for ha in h.iter().take(n - 1) {
        out.push(ha.d_zetabar());
    }
    let mut rn = h[n - 1].d_zetabar();
    let ia2 = I * co.a.conj() * 0.5;
    for al in 0..n - 1 {
        let hb = h[al].conj();
        rn = rn.sub(&hb.scale(ia2 * co.c[al]));
        rn = rn.add(&h[al].d_zeta().conj().times_monomial(0, 1).scale(ia2 * co.c[al]));
    }
    out.push(rn);
    let dkn = k[n - 1].d_zeta().conj().times_monomial(1, 0);
    for al in 0..n - 1 {
        let mut r = k[al].d_zetabar();
        r = r.add(&dkn.scale(I * co.a * 0.5 * co.b[al] * co.sigma));
        for be in 0..n - 1 {
            r = r.add(&h[be].scale(I * co.lambda * 0.5 * co.bm[(al, be)] * co.sigma));
        }
        out.push(r);
    }
    out.push(k[n - 1].d_zetabar());
    out
}

/// Boundary linearization, with the normal slot divided by `i` as in [`BoundaryData`].
pub fn linearized_boundary(p: &ModelProblem, bp: &BasePoint, hk: &LiftedDisc) -> BoundaryData {
    let co = Coefficients::new(p, bp);
    let n = co.n;
    let h = hk.f.boundary_fourier();
    let k = hk.g.boundary_fourier();
    let (a, ab, lam) = (co.a, co.a.conj(), co.lambda);
    let phi0 = h[n - 1]
        .add(&h[n - 1].conj())
        .sub(&h[0].shift(-1).scale(ab))
        .sub(&h[0].conj().shift(1).scale(a));
    let kn = &k[n - 1];
    let kn_im = kn.sub(&kn.conj());
    let phi_mid = (0..n - 1)
        .map(|al| {
            let mut bh = Laurent::zeros(0, 0);
            for be in 0..n - 1 {
                bh = bh.add(&h[be].scale(co.bm[(al, be)]));
            }
            let mut r = k[al].clone();
            if al == 0 {
                r = r.add(&kn.shift(-1).scale(ab));
            }
            r = r.add(&kn_im.shift(1).scale(I * a * 0.5 * co.b[al]));
            r = r.add(&h[al].conj().add(&bh.scale(I * 0.5)).shift(1).scale(C64::new(lam, 0.0)));
            r.sub(&bh.shift(-1).scale(I * lam * 0.5))
        })
        .collect();
    let phin = kn.shift(-1).sub(&kn.conj().shift(1)).scale(-I);
    BoundaryData { phi0, phi_mid, phin }
}

/// Holomorphic parts determining a solution of the interior linearized equations.
///
/// `h_mid[α]` and `kn` are the holomorphic tangential and normal-fiber parts;
/// `hn` and `k_mid[α]` are the holomorphic corrections added to the particular
/// solutions of the remaining two equations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HoloParts {
    pub h_mid: Vec<Vec<C64>>,
    pub hn: Vec<C64>,
    pub kn: Vec<C64>,
    pub k_mid: Vec<Vec<C64>>,
}

impl HoloParts {
    /// Zero parts sized for degree cap `cap`: `h_mid`, `kn` of degree `cap−1`, the rest of degree `cap`.
    pub fn zeros(n: usize, cap: usize) -> Self {
        HoloParts {
            h_mid: vec![vec![ZERO; cap]; n - 1],
            hn: vec![ZERO; cap + 1],
            kn: vec![ZERO; cap],
            k_mid: vec![vec![ZERO; cap + 1]; n - 1],
        }
    }

    fn slots(&self) -> impl Iterator<Item = &Vec<C64>> {
        self.h_mid.iter().chain(std::iter::once(&self.hn)).chain(std::iter::once(&self.kn)).chain(&self.k_mid)
    }

    fn slots_mut(&mut self) -> impl Iterator<Item = &mut Vec<C64>> {
        self.h_mid
            .iter_mut()
            .chain(std::iter::once(&mut self.hn))
            .chain(std::iter::once(&mut self.kn))
            .chain(self.k_mid.iter_mut())
    }

    pub fn real_len(&self) -> usize {
        2 * self.slots().map(Vec::len).sum::<usize>()
    }

    /// Real coordinates `(Re, Im)` of every coefficient, slot by slot.
    pub fn to_real(&self) -> Vec<f64> {
        self.slots().flat_map(|s| s.iter().flat_map(|c| [c.re, c.im])).collect()
    }

    /// Inverse of [`HoloParts::to_real`] for the layout of `self`.
    pub fn set_real(&mut self, x: &[f64]) {
        let mut it = x.chunks(2);
        for s in self.slots_mut() {
            for c in s.iter_mut() {
                let v = it.next().expect("real vector has the wrong length");
                *c = C64::new(v[0], v[1]);
            }
        }
    }
}

fn holomorphic(coeffs: &[C64], cap: usize) -> DiscMap {
    let mut d = DiscMap::zeros(1, cap.max(coeffs.len()));
    for (m, c) in coeffs.iter().enumerate() {
        d.set(0, m, 0, *c);
    }
    d
}

/// The interior solution with the given holomorphic parts:
/// `hⁿ = −(iā/2) c_α h̄^α ζ̄ + iā c_α conj(∫h^α) + h̃ⁿ` and
/// `k_α = −σ(ia/2) b_α ζ k̄_n − σ(iλ/2)(Ā h)_α ζ̄ + k̃_α`.
pub fn assemble_from_holomorphic(p: &ModelProblem, bp: &BasePoint, parts: &HoloParts) -> Result<LiftedDisc> {
    let co = Coefficients::new(p, bp);
    let n = co.n;
    let cap = p.cap();
    let h: Vec<DiscMap> = parts.h_mid.iter().map(|c| holomorphic(c, cap)).collect();
    let kn = holomorphic(&parts.kn, cap);
    let ia = I * co.a.conj();
    let mut hn = holomorphic(&parts.hn, cap);
    for al in 0..n - 1 {
        let hbar = h[al].conj();
        hn = hn.sub(&hbar.times_monomial(0, 1).scale(ia * 0.5 * co.c[al]));
        hn = hn.add(&h[al].antiderivative()?.conj().scale(ia * co.c[al]));
    }
    let knbar_z = kn.conj().times_monomial(1, 0);
    let mut k = Vec::with_capacity(n);
    for al in 0..n - 1 {
        let mut r = holomorphic(&parts.k_mid[al], cap);
        r = r.sub(&knbar_z.scale(I * co.a * 0.5 * co.b[al] * co.sigma));
        for be in 0..n - 1 {
            r = r.sub(&h[be].times_monomial(0, 1).scale(I * co.lambda * 0.5 * co.bm[(al, be)] * co.sigma));
        }
        k.push(r);
    }
    k.push(kn);
    let mut f = h;
    f.push(hn);
    let f = DiscMap::stack(&f);
    let g = DiscMap::stack(&k);
    if f.tail_above(cap) > 0.0 || g.tail_above(cap) > 0.0 {
        return Err(Error::Invalid(format!("holomorphic parts exceed degree cap {cap}")));
    }
    Ok(LiftedDisc { f: f.with_cap(cap), g: g.with_cap(cap) })
}

/// The `4n` real parameters left free by the boundary equations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreeParams {
    /// Constant terms of `h^α` and of `h̃ⁿ` (last entry).
    pub h0: Vec<C64>,
    /// Linear terms of `h^α` for `α ≥ 1`, then of `h̃ⁿ` (last entry).
    pub h1: Vec<C64>,
    /// `Im(ā h⁰₁)`.
    pub im_ah1: f64,
    /// `Re k_{n,1}`.
    pub re_kn1: f64,
}

impl FreeParams {
    pub fn zero(n: usize) -> Self {
        FreeParams { h0: vec![ZERO; n], h1: vec![ZERO; n - 1], im_ah1: 0.0, re_kn1: 0.0 }
    }

    pub fn dim(n: usize) -> usize {
        4 * n
    }

    pub fn to_real(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.h0.iter().chain(&self.h1).flat_map(|c| [c.re, c.im]).collect();
        v.push(self.im_ah1);
        v.push(self.re_kn1);
        v
    }

    pub fn from_real(n: usize, x: &[f64]) -> Result<Self> {
        if x.len() != 4 * n {
            return Err(Error::Invalid(format!("expected {} free parameters, got {}", 4 * n, x.len())));
        }
        let c = |i: usize| C64::new(x[2 * i], x[2 * i + 1]);
        Ok(FreeParams {
            h0: (0..n).map(c).collect(),
            h1: (n..2 * n - 1).map(c).collect(),
            im_ah1: x[4 * n - 2],
            re_kn1: x[4 * n - 1],
        })
    }

    /// The `k`-th unit vector in the real layout.
    pub fn canonical(n: usize, k: usize) -> Self {
        let mut x = vec![0.0; 4 * n];
        x[k] = 1.0;
        FreeParams::from_real(n, &x).expect("length matches")
    }

    /// Reads the free parameters off a solution.
    pub fn of_solution(bp: &BasePoint, parts: &HoloParts) -> Self {
        let get = |v: &Vec<C64>, m: usize| v.get(m).copied().unwrap_or(ZERO);
        let mut h0: Vec<C64> = parts.h_mid.iter().map(|v| get(v, 0)).collect();
        h0.push(get(&parts.hn, 0));
        let mut h1: Vec<C64> = parts.h_mid.iter().skip(1).map(|v| get(v, 1)).collect();
        h1.push(get(&parts.hn, 1));
        FreeParams {
            h0,
            h1,
            im_ah1: (bp.a.conj() * get(&parts.h_mid[0], 1)).im,
            re_kn1: get(&parts.kn, 1).re,
        }
    }
}

/// Checks that data are admissible for cap `N`: real slots real, modes within `|m| ≤ N−2`.
pub fn check_boundary_data(p: &ModelProblem, phi: &BoundaryData) -> Result<()> {
    if phi.n() != p.n() {
        return Err(Error::Invalid("boundary data have the wrong dimension".into()));
    }
    let defect = phi.reality_defect();
    if defect > 1e-12 * (1.0 + phi.max_abs()) {
        return Err(Error::Invalid(format!("real boundary slots are not real (defect {defect:.3e})")));
    }
    let max_mode = p.cap() as i64 - 2;
    let beyond = phi.modes_beyond(max_mode);
    if !beyond.is_empty() {
        let list: Vec<String> = beyond.iter().map(|(s, m)| format!("slot {s} mode {m}")).collect();
        return Err(Error::Invalid(format!(
            "boundary data exceed |m| ≤ {max_mode} for cap {}: {}",
            p.cap(),
            list.join(", ")
        )));
    }
    Ok(())
}

/// Solves the boundary equations for the holomorphic parts, coefficient by coefficient.
pub fn solve_holomorphic_parts(
    p: &ModelProblem,
    bp: &BasePoint,
    phi: &BoundaryData,
    free: &FreeParams,
) -> Result<HoloParts> {
    check_boundary_data(p, phi)?;
    let co = Coefficients::new(p, bp);
    let n = co.n;
    let m = n - 1;
    let cap = p.cap();
    if free.h0.len() != n || free.h1.len() != n - 1 {
        return Err(Error::Invalid("free parameters have the wrong dimension".into()));
    }
    let (a, ab, lam) = (co.a, co.a.conj(), co.lambda);
    let s1 = 1.0 + co.sigma;
    let top = cap + 2;
    let mut h = vec![vec![ZERO; top + 1]; m];
    let mut ht = vec![ZERO; top + 1];
    let mut kn = vec![ZERO; top + 1];
    let mut kt = vec![vec![ZERO; top + 1]; m];
    let p0 = |j: i64| phi.phi0.get(j);
    let pa = |al: usize, j: i64| phi.phi_mid[al].get(j);
    let pn = |j: i64| phi.phin.get(j);
    let bh = |h: &Vec<Vec<C64>>, al: usize, j: usize| -> C64 {
        (0..m).map(|be| co.bm[(al, be)] * h[be].get(j).copied().unwrap_or(ZERO)).sum()
    };

    for al in 0..m {
        h[al][0] = free.h0[al];
    }
    ht[0] = free.h0[m];
    for al in 1..m {
        h[al][1] = free.h1[al - 1];
    }
    ht[1] = free.h1[m - 1];

    // Modes 0 and 1 of the defining-function equation fix ā h⁰₁ (real part) and h⁰₂.
    let re_part = (2.0 * ht[0].re - p0(0).re) / 2.0;
    h[0][1] = C64::new(re_part, free.im_ah1) / ab;
    let mut rhs = ht[1] - a * h[0][0].conj() - p0(1);
    for al in 0..m {
        rhs -= I * a * 0.5 * co.c[al].conj() * h[al][0];
    }
    h[0][2] = rhs / ab;

    // Mode −1 of the first tangential equation fixes k_{n,0}.
    kn[0] = (pa(0, -1) - lam * h[0][2].conj() + s1 * I * lam * 0.5 * bh(&h, 0, 0)) / ab;
    kn[1] = C64::new(free.re_kn1, pn(0).re / 2.0);
    kn[2] = I * pn(1) + kn[0].conj();
    for j in 3..=top {
        kn[j] = I * pn(j as i64 - 1);
    }

    // Negative modes of the tangential equations give h^α_m for m ≥ 2.
    for al in 1..m {
        let v = pa(al, -1) + s1 * I * a * 0.5 * co.b[al] * kn[2].conj() + s1 * I * lam * 0.5 * bh(&h, al, 0);
        h[al][2] = (v / lam).conj();
    }
    for j in 3..=top {
        for al in 0..m {
            let v = pa(al, 1 - j as i64) + s1 * I * a * 0.5 * co.b[al] * kn[j].conj();
            h[al][j] = (v / lam).conj();
        }
    }

    // Remaining modes of the defining-function equation give h̃ⁿ_j, j ≥ 2.
    for j in 2..top {
        let w = 1.0 / j as f64 - 0.5;
        let mut v = p0(j as i64) + ab * h[0][j + 1];
        for al in 0..m {
            v += I * a * co.c[al].conj() * h[al][j - 1] * w;
        }
        ht[j] = v;
    }

    // Nonnegative modes of the tangential equations give k̃_α.
    for al in 0..m {
        let b = co.b[al];
        let d = if al == 0 { ab } else { ZERO };
        let ia2 = I * a * 0.5 * b;
        let il2 = I * lam * 0.5;
        kt[al][0] = pa(al, 0) - d * kn[1] + s1 * ia2 * kn[1].conj() - lam * h[al][1].conj() + s1 * il2 * bh(&h, al, 1);
        kt[al][1] = pa(al, 1) - d * kn[2] - ia2 * kn[0] + s1 * ia2 * kn[0].conj() - lam * h[al][0].conj()
            - il2 * bh(&h, al, 0)
            + s1 * il2 * bh(&h, al, 2);
        for j in 2..top {
            kt[al][j] = pa(al, j as i64) - d * kn[j + 1] - ia2 * kn[j - 1] - il2 * bh(&h, al, j - 1)
                + s1 * il2 * bh(&h, al, j + 1);
        }
    }

    // Everything above the cap vanishes by the mode bound on the data.
    let trim = |v: &[C64], len: usize| -> Result<Vec<C64>> {
        let tail = v[len..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if tail > 1e-12 * (1.0 + phi.max_abs()) {
            return Err(Error::Invalid(format!("recursion left nonzero coefficients above the cap ({tail:.3e})")));
        }
        Ok(v[..len].to_vec())
    };
    Ok(HoloParts {
        h_mid: h.iter().map(|v| trim(v, cap)).collect::<Result<_>>()?,
        hn: trim(&ht, cap + 1)?,
        kn: trim(&kn, cap)?,
        k_mid: kt.iter().map(|v| trim(v, cap + 1)).collect::<Result<_>>()?,
    })
}

/// Solution of the linearized problem with boundary data `phi` and free parameters `free`.
pub fn solve_linearized(p: &ModelProblem, bp: &BasePoint, phi: &BoundaryData, free: &FreeParams) -> Result<LiftedDisc> {
    let parts = solve_holomorphic_parts(p, bp, phi, free)?;
    assemble_from_holomorphic(p, bp, &parts)
}

/// Kernel elements for the `4n` canonical free parameters.
pub fn kernel_basis(p: &ModelProblem, bp: &BasePoint) -> Result<Vec<LiftedDisc>> {
    let n = p.n();
    let zero = BoundaryData::zero(n);
    (0..FreeParams::dim(n)).map(|k| solve_linearized(p, bp, &zero, &FreeParams::canonical(n, k))).collect()
}

/// Real coordinates of all `(ζ^p ζ̄^q)` coefficients of a lifted disc.
pub fn disc_real_coords(d: &LiftedDisc) -> Vec<f64> {
    d.f.coeffs().iter().chain(d.g.coeffs()).flat_map(|c| [c.re, c.im]).collect()
}

/// Singular values (ascending) of the matrix whose columns are the given discs.
pub fn independence_spectrum(discs: &[LiftedDisc]) -> Vec<f64> {
    if discs.is_empty() {
        return Vec::new();
    }
    let cols: Vec<DVector<f64>> = discs.iter().map(|d| DVector::from_vec(disc_real_coords(d))).collect();
    let m = DMatrix::from_columns(&cols);
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Real coordinates of boundary data over modes `|m| ≤ max_mode`:
/// real slots use `Re c₀` and `(Re, Im) c_m` for `m ≥ 1`, complex slots use `(Re, Im) c_m` for every `m`.
pub fn boundary_real_coords(phi: &BoundaryData, max_mode: i64) -> Vec<f64> {
    let mut out = Vec::new();
    let real_slot = |l: &Laurent, out: &mut Vec<f64>| {
        out.push(l.get(0).re);
        for m in 1..=max_mode {
            out.extend([l.get(m).re, l.get(m).im]);
        }
    };
    real_slot(&phi.phi0, &mut out);
    for l in &phi.phi_mid {
        for m in -max_mode..=max_mode {
            out.extend([l.get(m).re, l.get(m).im]);
        }
    }
    real_slot(&phi.phin, &mut out);
    out
}

/// Inverse of [`boundary_real_coords`].
pub fn boundary_from_real_coords(n: usize, max_mode: i64, x: &[f64]) -> BoundaryData {
    let mut it = x.iter().copied();
    let mut next = || it.next().expect("coordinate vector has the wrong length");
    let real_slot = |next: &mut dyn FnMut() -> f64| {
        let mut l = Laurent::zeros(-max_mode, max_mode);
        l.set(0, C64::new(next(), 0.0));
        for m in 1..=max_mode {
            let c = C64::new(next(), next());
            l.set(m, c);
            l.set(-m, c.conj());
        }
        l
    };
    let phi0 = real_slot(&mut next);
    let phi_mid = (0..n - 1)
        .map(|_| {
            let mut l = Laurent::zeros(-max_mode, max_mode);
            for m in -max_mode..=max_mode {
                l.set(m, C64::new(next(), next()));
            }
            l
        })
        .collect();
    let phin = real_slot(&mut next);
    BoundaryData { phi0, phi_mid, phin }
}

/// Matrix of the boundary operator from holomorphic parts (sized by [`HoloParts::zeros`])
/// to boundary coordinates over all modes `|m| ≤ cap + 1`.
pub fn boundary_operator_matrix(p: &ModelProblem, bp: &BasePoint) -> Result<DMatrix<f64>> {
    let n = p.n();
    let max_mode = p.cap() as i64 + 1;
    let mut parts = HoloParts::zeros(n, p.cap());
    let dim = parts.real_len();
    let mut cols = Vec::with_capacity(dim);
    for k in 0..dim {
        let mut x = vec![0.0; dim];
        x[k] = 1.0;
        parts.set_real(&x);
        let d = assemble_from_holomorphic(p, bp, &parts)?;
        cols.push(DVector::from_vec(boundary_real_coords(&linearized_boundary(p, bp, &d), max_mode)));
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Rank summary of the boundary operator.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OperatorSpectrum {
    /// Singular values in ascending order.
    pub singular_values: Vec<f64>,
    /// Number of columns minus numerical rank.
    pub nullity: usize,
    /// `s_{k+1}/s_k` at the expected nullity `k = 4n`.
    pub gap_ratio: f64,
    /// Largest least-squares residual over unit boundary data with `|m| ≤ cap − 2`.
    pub surjectivity_defect: f64,
}

pub fn operator_spectrum(p: &ModelProblem, bp: &BasePoint) -> Result<OperatorSpectrum> {
    let n = p.n();
    let mat = boundary_operator_matrix(p, bp)?;
    let svd = mat.clone().svd(true, true);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(f64::total_cmp);
    let cols = mat.ncols();
    // Columns beyond the row count are kernel directions with no singular value.
    let mut padded = vec![0.0; cols.saturating_sub(s.len())];
    padded.extend(&s);
    let smax = padded.last().copied().unwrap_or(0.0);
    let nullity = padded.iter().filter(|&&v| v <= 1e-10 * smax).count();
    let k = FreeParams::dim(n);
    let gap_ratio = match (padded.get(k), padded[k - 1]) {
        (Some(&above), below) if below > 0.0 => above / below,
        _ => f64::INFINITY,
    };

    let max_mode = p.cap() as i64 + 1;
    let target_mode = p.cap() as i64 - 2;
    let tdim = boundary_real_coords(&BoundaryData::zero(n), target_mode).len();
    let mut defect: f64 = 0.0;
    for t in 0..tdim {
        let mut x = vec![0.0; tdim];
        x[t] = 1.0;
        let phi = boundary_from_real_coords(n, target_mode, &x);
        let rhs = DVector::from_vec(boundary_real_coords(&phi, max_mode));
        let sol = svd.solve(&rhs, 1e-10 * smax).map_err(|e| Error::Degenerate(e.to_string()))?;
        defect = defect.max((&mat * sol - rhs).amax());
    }
    Ok(OperatorSpectrum { singular_values: padded, nullity, gap_ratio, surjectivity_defect: defect })
}
