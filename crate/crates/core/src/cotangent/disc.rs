//! Lifted discs, the ℂ-action on (co)tangent vectors, and the residuals of the
//! stationary-disc conditions.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::lift::PairField;
use crate::algebra::DiscMap;
use crate::structures::{AcsModel, HypersurfaceModel};
use crate::{Error, Result};

/// Default bound on `|f(ζ)|` for discs to count as inside the chart.
pub const DEFAULT_CHART_RADIUS: f64 = 10.0;

/// A disc `f` together with the fiber part `g` of its cotangent lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedDisc {
    pub f: DiscMap,
    pub g: DiscMap,
}

impl LiftedDisc {
    pub fn new(f: DiscMap, g: DiscMap) -> Result<Self> {
        if f.cap() != g.cap() {
            return Err(Error::Invalid(format!("degree caps differ: {} vs {}", f.cap(), g.cap())));
        }
        if f.dim() != g.dim() {
            return Err(Error::Invalid("base and fiber dimensions differ".into()));
        }
        Ok(LiftedDisc { f, g })
    }

    pub fn n(&self) -> usize {
        self.f.dim()
    }

    pub fn cap(&self) -> usize {
        self.f.cap()
    }

    /// `(f, g)` as one map into `ℂ^{2n}`.
    pub fn stacked(&self) -> DiscMap {
        DiscMap::stack(&[self.f.clone(), self.g.clone()])
    }

    pub fn from_stacked(d: &DiscMap) -> Result<Self> {
        let n = d.dim() / 2;
        let parts = d.split();
        LiftedDisc::new(DiscMap::stack(&parts[..n]), DiscMap::stack(&parts[n..]))
    }

    pub fn with_cap(&self, cap: usize) -> Self {
        LiftedDisc { f: self.f.with_cap(cap), g: self.g.with_cap(cap) }
    }

    pub fn add(&self, other: &LiftedDisc) -> LiftedDisc {
        LiftedDisc { f: self.f.add(&other.f), g: self.g.add(&other.g) }
    }

    pub fn scale(&self, s: C64) -> LiftedDisc {
        LiftedDisc { f: self.f.scale(s), g: self.g.scale(s) }
    }

    pub fn distance(&self, other: &LiftedDisc) -> f64 {
        self.f.distance(&other.f).max(self.g.distance(&other.g))
    }
}

/// What kind of vector the ℂ-action is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VectorKind {
    /// Real tangent vector written as `w ∈ ℂⁿ`.
    Tangent,
    /// Real covector written by its `dz` components `α_j` (`α = α_j dz^j + ᾱ_j dz̄^j`).
    Cotangent,
}

/// `J*α = α∘J` in `dz` components: `Pᵀα + Q̄ᵀᾱ`.
pub fn dual_action(j: &AcsModel, x: &[C64], alpha: &[C64]) -> Vec<C64> {
    let (p, q) = j.eval(x);
    let n = alpha.len();
    (0..n)
        .map(|k| (0..n).map(|i| p[(i, k)] * alpha[i] + q[(i, k)].conj() * alpha[i].conj()).sum())
        .collect()
}

/// `(a + ib)·w = a w + b J(w)` on tangent vectors and `a α + b J*(α)` on covectors, at the point `x`.
pub fn complex_action(zeta: C64, w: &[C64], kind: VectorKind, j: &AcsModel, x: &[C64]) -> Vec<C64> {
    let jw = match kind {
        VectorKind::Tangent => j.apply(x, w),
        VectorKind::Cotangent => dual_action(j, x, w),
    };
    w.iter().zip(jw).map(|(a, b)| a * zeta.re + b * zeta.im).collect()
}

/// Values of a residual on a set of points of the disc.
#[derive(Clone, Debug, Serialize)]
pub struct GridResidual {
    pub points: Vec<C64>,
    pub values: Vec<Vec<C64>>,
}

impl GridResidual {
    pub fn max_norm(&self) -> f64 {
        self.values.iter().flat_map(|v| v.iter().map(|c| c.norm())).fold(0.0, f64::max)
    }
}

fn check_chart(base: &[C64], zeta: C64, radius: f64) -> Result<()> {
    let r = base.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if !(r <= radius) {
        return Err(Error::ChartExit { zeta: format!("{zeta}"), radius: r });
    }
    Ok(())
}

/// Pointwise residual of `J`-holomorphicity,
/// `F_ζ̄ + (1/2i)((P̂ − i)F_x + Q̂ conj(F_x))` with `F_x = F_ζ + F_ζ̄`.
///
/// For the standard structure this is exactly `∂F/∂ζ̄`; in general it is the
/// holomorphicity condition multiplied by an invertible factor.
pub fn holo_residual<S: PairField>(s: &S, disc: &DiscMap, points: &[C64], chart_radius: f64) -> Result<GridResidual> {
    let dim = s.value_dim();
    if disc.dim() != dim {
        return Err(Error::Invalid(format!("disc has dimension {} but structure acts on {}", disc.dim(), dim)));
    }
    let dz = disc.d_zeta();
    let dzb = disc.d_zetabar();
    let half_over_i = C64::new(0.0, -0.5);
    let mut values = Vec::with_capacity(points.len());
    for &zeta in points {
        let val = disc.eval(zeta);
        check_chart(&val[..s.base_dim()], zeta, chart_radius)?;
        let fz = dz.eval(zeta);
        let fzb = dzb.eval(zeta);
        let fx: Vec<C64> = fz.iter().zip(&fzb).map(|(a, b)| a + b).collect();
        let (p, q) = s.pair_at(&val);
        let r = (0..dim)
            .map(|i| {
                let mut acc = C64::default();
                for k in 0..dim {
                    let pt = if i == k { p[(i, k)] - C64::new(0.0, 1.0) } else { p[(i, k)] };
                    acc += pt * fx[k] + q[(i, k)] * fx[k].conj();
                }
                fzb[i] + half_over_i * acc
            })
            .collect();
        values.push(r);
    }
    Ok(GridResidual { points: points.to_vec(), values })
}

/// Boundary residual of the conormal condition at one boundary point.
#[derive(Clone, Debug, Serialize)]
pub struct ConormalResidual {
    /// `ρ(f(ζ))`.
    pub r0: f64,
    /// `Re/Im (g_α − λ w_α)` for `α < n`, then `Im(g_n w̄_n)/|w_n|`.
    pub r: Vec<f64>,
    /// Multiplier with `g ≈ λ·(ζ·dρ)`.
    pub lambda: f64,
}

/// Covector `ζ·dρ` at `x` in `dz` components.
pub fn rotated_conormal(rho: &crate::algebra::Poly, j: &AcsModel, x: &[C64], zeta: C64) -> Vec<C64> {
    let n = x.len();
    let drho: Vec<C64> = (0..n).map(|k| rho.wirtinger(k, false).eval(x)).collect();
    complex_action(zeta, &drho, VectorKind::Cotangent, j, x)
}

/// Core of the conormal residual given `f(ζ)`, `g(ζ)` and the covector `w = ζ·dρ(f(ζ))`.
pub fn conormal_from_values(r0: f64, g: &[C64], w: &[C64], tol_section: f64) -> Result<ConormalResidual> {
    let n = g.len();
    let wn2 = w[n - 1].norm_sqr();
    if wn2 == 0.0 {
        return Err(Error::Degenerate("conormal has no normal component".into()));
    }
    let prod = g[n - 1] * w[n - 1].conj();
    let lambda = prod.re / wn2;
    if lambda.abs() < tol_section {
        return Err(Error::Degenerate(format!("lift hits the zero section (λ = {lambda:e})")));
    }
    let mut r = Vec::with_capacity(2 * n - 1);
    for a in 0..n - 1 {
        let d = g[a] - w[a] * lambda;
        r.push(d.re);
        r.push(d.im);
    }
    r.push(prod.im / wn2.sqrt());
    Ok(ConormalResidual { r0, r, lambda })
}

/// Conormal residual of `ζ⁻¹·f̂(ζ) ∈ 𝒩*(Γ)` at a boundary point, with `λ` eliminated.
pub fn conormal_residual(
    rho: &HypersurfaceModel,
    j: &AcsModel,
    fd: &LiftedDisc,
    zeta: C64,
    tol_section: f64,
) -> Result<ConormalResidual> {
    if (zeta.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("ζ = {zeta} is not on the unit circle")));
    }
    let rp = rho.rho();
    let x = fd.f.eval(zeta);
    let g = fd.g.eval(zeta);
    let w = rotated_conormal(&rp, j, &x, zeta);
    conormal_from_values(rp.eval(&x).re, &g, &w, tol_section)
}

/// `1e-8·max|g|` over `k` boundary points.
pub fn default_tol_section(fd: &LiftedDisc, k: usize) -> f64 {
    crate::algebra::roots_of_unity(k)
        .into_iter()
        .map(|z| fd.g.eval(z).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max)
        * 1e-8
}
