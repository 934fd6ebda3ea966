//! Maps from the closed unit disc, stored as dense polynomials in `(ζ, ζ̄)`.
//!
//! Coefficient `(c, p, q)` multiplies `ζ^p ζ̄^q` in component `c`, with
//! `0 ≤ p, q ≤ cap`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::laurent::Laurent;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscMap {
    dim: usize,
    cap: usize,
    coeffs: Vec<C64>,
}

const ZERO: C64 = C64::new(0.0, 0.0);

impl DiscMap {
    pub fn zeros(dim: usize, cap: usize) -> Self {
        DiscMap { dim, cap, coeffs: vec![ZERO; dim * (cap + 1) * (cap + 1)] }
    }

    /// Scalar map with a single monomial `c ζ^p ζ̄^q`.
    pub fn monomial(cap: usize, p: usize, q: usize, c: C64) -> Self {
        let mut d = DiscMap::zeros(1, cap.max(p).max(q));
        d.set(0, p, q, c);
        d
    }

    pub fn constant(value: &[C64]) -> Self {
        let mut d = DiscMap::zeros(value.len(), 0);
        for (c, v) in value.iter().enumerate() {
            d.set(c, 0, 0, *v);
        }
        d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    fn idx(&self, c: usize, p: usize, q: usize) -> usize {
        (c * (self.cap + 1) + p) * (self.cap + 1) + q
    }

    pub fn get(&self, c: usize, p: usize, q: usize) -> C64 {
        if p > self.cap || q > self.cap {
            return ZERO;
        }
        self.coeffs[self.idx(c, p, q)]
    }

    pub fn set(&mut self, c: usize, p: usize, q: usize, v: C64) {
        assert!(p <= self.cap && q <= self.cap, "exponent beyond degree cap");
        let i = self.idx(c, p, q);
        self.coeffs[i] = v;
    }

    pub fn add_at(&mut self, c: usize, p: usize, q: usize, v: C64) {
        let i = self.idx(c, p, q);
        self.coeffs[i] += v;
    }

    /// Flat coefficient slice in `(c, p, q)` order.
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [C64] {
        &mut self.coeffs
    }

    pub fn from_flat(dim: usize, cap: usize, coeffs: Vec<C64>) -> Self {
        assert_eq!(coeffs.len(), dim * (cap + 1) * (cap + 1), "coefficient count mismatch");
        DiscMap { dim, cap, coeffs }
    }

    /// Copy with a different degree cap; exponents above the new cap are dropped.
    pub fn with_cap(&self, cap: usize) -> DiscMap {
        let mut out = DiscMap::zeros(self.dim, cap);
        let m = cap.min(self.cap);
        for c in 0..self.dim {
            for p in 0..=m {
                for q in 0..=m {
                    out.set(c, p, q, self.get(c, p, q));
                }
            }
        }
        out
    }

    /// Largest coefficient with `p` or `q` above `cap`.
    pub fn tail_above(&self, cap: usize) -> f64 {
        let mut t: f64 = 0.0;
        for c in 0..self.dim {
            for p in 0..=self.cap {
                for q in 0..=self.cap {
                    if p > cap || q > cap {
                        t = t.max(self.get(c, p, q).norm());
                    }
                }
            }
        }
        t
    }

    pub fn component(&self, c: usize) -> DiscMap {
        let mut out = DiscMap::zeros(1, self.cap);
        for p in 0..=self.cap {
            for q in 0..=self.cap {
                out.set(0, p, q, self.get(c, p, q));
            }
        }
        out
    }

    /// Stacks scalar or vector maps; the cap of the result is the largest cap.
    pub fn stack(parts: &[DiscMap]) -> DiscMap {
        let cap = parts.iter().map(|d| d.cap).max().unwrap_or(0);
        let dim = parts.iter().map(|d| d.dim).sum();
        let mut out = DiscMap::zeros(dim, cap);
        let mut base = 0;
        for d in parts {
            for c in 0..d.dim {
                for p in 0..=d.cap {
                    for q in 0..=d.cap {
                        out.set(base + c, p, q, d.get(c, p, q));
                    }
                }
            }
            base += d.dim;
        }
        out
    }

    pub fn split(&self) -> Vec<DiscMap> {
        (0..self.dim).map(|c| self.component(c)).collect()
    }

    fn zip(&self, other: &DiscMap, f: impl Fn(C64, C64) -> C64) -> DiscMap {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let cap = self.cap.max(other.cap);
        let mut out = DiscMap::zeros(self.dim, cap);
        for c in 0..self.dim {
            for p in 0..=cap {
                for q in 0..=cap {
                    out.set(c, p, q, f(self.get(c, p, q), other.get(c, p, q)));
                }
            }
        }
        out
    }

    pub fn add(&self, other: &DiscMap) -> DiscMap {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DiscMap) -> DiscMap {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, s: C64) -> DiscMap {
        DiscMap { dim: self.dim, cap: self.cap, coeffs: self.coeffs.iter().map(|v| v * s).collect() }
    }

    /// Product of two scalar maps; the cap grows to the sum of caps.
    pub fn mul(&self, other: &DiscMap) -> DiscMap {
        assert!(self.dim == 1 && other.dim == 1, "mul expects scalar maps");
        let cap = self.cap + other.cap;
        let mut out = DiscMap::zeros(1, cap);
        for p1 in 0..=self.cap {
            for q1 in 0..=self.cap {
                let a = self.get(0, p1, q1);
                if a == ZERO {
                    continue;
                }
                for p2 in 0..=other.cap {
                    for q2 in 0..=other.cap {
                        let b = other.get(0, p2, q2);
                        if b != ZERO {
                            out.add_at(0, p1 + p2, q1 + q2, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    /// Multiplication of a scalar map by `ζ^p ζ̄^q`.
    pub fn times_monomial(&self, p: usize, q: usize) -> DiscMap {
        let mut out = DiscMap::zeros(self.dim, self.cap + p.max(q));
        for c in 0..self.dim {
            for a in 0..=self.cap {
                for b in 0..=self.cap {
                    out.set(c, a + p, b + q, self.get(c, a, b));
                }
            }
        }
        out
    }

    /// Complex conjugate map, `ζ^p ζ̄^q ↦ ζ^q ζ̄^p`.
    pub fn conj(&self) -> DiscMap {
        let mut out = DiscMap::zeros(self.dim, self.cap);
        for c in 0..self.dim {
            for p in 0..=self.cap {
                for q in 0..=self.cap {
                    out.set(c, q, p, self.get(c, p, q).conj());
                }
            }
        }
        out
    }

    /// Wirtinger derivative `∂/∂ζ` or, when `conjugated`, `∂/∂ζ̄`.
    pub fn wirtinger(&self, conjugated: bool) -> DiscMap {
        let mut out = DiscMap::zeros(self.dim, self.cap);
        for c in 0..self.dim {
            for p in 0..=self.cap {
                for q in 0..=self.cap {
                    let v = self.get(c, p, q);
                    if conjugated && q > 0 {
                        out.set(c, p, q - 1, v * q as f64);
                    }
                    if !conjugated && p > 0 {
                        out.set(c, p - 1, q, v * p as f64);
                    }
                }
            }
        }
        out
    }

    pub fn d_zeta(&self) -> DiscMap {
        self.wirtinger(false)
    }

    pub fn d_zetabar(&self) -> DiscMap {
        self.wirtinger(true)
    }

    pub fn eval(&self, zeta: C64) -> Vec<C64> {
        let (zp, zq) = powers(zeta, self.cap);
        (0..self.dim)
            .map(|c| {
                let mut acc = ZERO;
                for p in 0..=self.cap {
                    for q in 0..=self.cap {
                        acc += self.get(c, p, q) * zp[p] * zq[q];
                    }
                }
                acc
            })
            .collect()
    }

    pub fn eval_scalar(&self, zeta: C64) -> C64 {
        self.eval(zeta)[0]
    }

    /// Boundary restriction per component: coefficient of `ζ^m` is `Σ_{p-q=m} coeffs(p,q)`.
    pub fn boundary_fourier(&self) -> Vec<Laurent> {
        let n = self.cap as i64;
        (0..self.dim)
            .map(|c| {
                let mut l = Laurent::zeros(-n, n);
                for p in 0..=self.cap {
                    for q in 0..=self.cap {
                        l.add_at(p as i64 - q as i64, self.get(c, p, q));
                    }
                }
                l
            })
            .collect()
    }

    pub fn is_holomorphic(&self) -> bool {
        (0..self.dim).all(|c| (0..=self.cap).all(|p| (1..=self.cap).all(|q| self.get(c, p, q) == ZERO)))
    }

    /// Cauchy–Green transform `T(φ)(ζ) = (1/π)∬_Δ φ(η)/(ζ−η) dA(η)` of a scalar map,
    /// in closed form: `T(ζ^p ζ̄^q) = (ζ^p ζ̄^{q+1} − [p>q] ζ^{p−q−1})/(q+1)`.
    pub fn cauchy_green(&self) -> DiscMap {
        let mut out = DiscMap::zeros(self.dim, self.cap + 1);
        for c in 0..self.dim {
            for p in 0..=self.cap {
                for q in 0..=self.cap {
                    let v = self.get(c, p, q);
                    if v == ZERO {
                        continue;
                    }
                    let w = v / (q as f64 + 1.0);
                    out.add_at(c, p, q + 1, w);
                    if p > q {
                        out.add_at(c, p - q - 1, 0, -w);
                    }
                }
            }
        }
        out
    }

    /// Holomorphic antiderivative vanishing at the origin.
    pub fn antiderivative(&self) -> Result<DiscMap> {
        if !self.is_holomorphic() {
            return Err(Error::Precondition("antiderivative needs a holomorphic map".into()));
        }
        let mut out = DiscMap::zeros(self.dim, self.cap + 1);
        for c in 0..self.dim {
            for p in 0..=self.cap {
                out.set(c, p + 1, 0, self.get(c, p, 0) / (p as f64 + 1.0));
            }
        }
        Ok(out)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &DiscMap) -> f64 {
        self.sub(other).max_abs_coeff()
    }
}

/// Powers `ζ^k` and `ζ̄^k` for `k ≤ cap`.
pub fn powers(zeta: C64, cap: usize) -> (Vec<C64>, Vec<C64>) {
    let mut zp = Vec::with_capacity(cap + 1);
    let mut zq = Vec::with_capacity(cap + 1);
    let (mut a, mut b) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    for _ in 0..=cap {
        zp.push(a);
        zq.push(b);
        a *= zeta;
        b *= zeta.conj();
    }
    (zp, zq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn arb_scalar(cap: usize) -> impl Strategy<Value = DiscMap> {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), (cap + 1) * (cap + 1))
            .prop_map(move |v| DiscMap::from_flat(1, cap, v.into_iter().map(|(a, b)| c(a, b)).collect()))
    }

    #[test]
    fn dbar_of_model_extension() {
        // −ζ² − ζζ̄ + 2 has ∂/∂ζ̄ equal to −ζ
        let mut d = DiscMap::zeros(1, 2);
        d.set(0, 2, 0, c(-1.0, 0.0));
        d.set(0, 1, 1, c(-1.0, 0.0));
        d.set(0, 0, 0, c(2.0, 0.0));
        let db = d.d_zetabar();
        assert_eq!(db.get(0, 1, 0), c(-1.0, 0.0));
        assert!(db.sub(&DiscMap::monomial(2, 1, 0, c(-1.0, 0.0))).max_abs_coeff() == 0.0);
        let l = &d.boundary_fourier()[0];
        assert_eq!(l.get(2), c(-1.0, 0.0));
        assert_eq!(l.get(0), c(1.0, 0.0));
        assert_eq!(l.get(1), c(0.0, 0.0));
    }

    #[test]
    fn modulus_squared_restricts_to_one() {
        let d = DiscMap::monomial(1, 1, 1, c(1.0, 0.0));
        let l = &d.boundary_fourier()[0];
        assert_eq!(l.get(0), c(1.0, 0.0));
        assert_eq!(l.max_abs(), 1.0);
    }

    #[test]
    fn cauchy_green_of_constant_is_conjugate_variable() {
        let one = DiscMap::monomial(0, 0, 0, c(1.0, 0.0));
        let t = one.cauchy_green();
        assert_eq!(t.get(0, 0, 1), c(1.0, 0.0));
        assert_eq!(t.max_abs_coeff(), 1.0);
        assert_eq!(DiscMap::zeros(1, 3).cauchy_green().max_abs_coeff(), 0.0);
    }

    #[test]
    fn cauchy_green_is_right_inverse_of_dbar_on_monomials() {
        for p in 0..=8 {
            for q in 0..=8 {
                let m = DiscMap::monomial(8, p, q, c(1.0, 0.0));
                let back = m.cauchy_green().d_zetabar().with_cap(8);
                assert_eq!(back, m, "monomial ({p},{q})");
            }
        }
    }

    #[test]
    fn antiderivative_examples() {
        let one = DiscMap::monomial(0, 0, 0, c(1.0, 0.0));
        let i1 = one.antiderivative().unwrap();
        assert_eq!(i1.get(0, 1, 0), c(1.0, 0.0));
        let z4 = DiscMap::monomial(4, 4, 0, c(1.0, 0.0));
        assert_eq!(z4.antiderivative().unwrap().get(0, 5, 0), c(0.2, 0.0));
        assert!(DiscMap::monomial(1, 0, 1, c(1.0, 0.0)).antiderivative().is_err());
        assert_eq!(DiscMap::zeros(1, 2).antiderivative().unwrap().max_abs_coeff(), 0.0);
    }

    proptest! {
        #[test]
        fn boundary_fourier_is_multiplicative(a in arb_scalar(3), b in arb_scalar(2)) {
            let lhs = a.mul(&b).boundary_fourier().remove(0);
            let rhs = a.boundary_fourier()[0].mul(&b.boundary_fourier()[0]);
            prop_assert!(lhs.distance(&rhs) < 1e-12);
        }

        #[test]
        fn boundary_table_resamples_values(a in arb_scalar(4)) {
            let l = a.boundary_fourier().remove(0);
            let roots = super::super::laurent::roots_of_unity(17);
            let vals: Vec<C64> = roots.iter().map(|z| a.eval_scalar(*z)).collect();
            let back = Laurent::from_samples(&vals, -4, 4);
            prop_assert!(back.distance(&l) < 1e-12);
        }

        #[test]
        fn wirtinger_derivatives_commute(a in arb_scalar(4)) {
            prop_assert_eq!(a.d_zeta().d_zetabar(), a.d_zetabar().d_zeta());
        }

        #[test]
        fn dbar_inverts_cauchy_green(a in arb_scalar(5)) {
            let back = a.cauchy_green().d_zetabar().with_cap(5);
            prop_assert!(back.distance(&a) < 1e-14);
        }

        #[test]
        fn eval_of_derivative_matches_differences(a in arb_scalar(4), r in 0.0f64..0.9, th in 0.0f64..6.28) {
            let z = C64::from_polar(r, th);
            let h = 1e-5;
            let fx = (a.eval_scalar(z + h) - a.eval_scalar(z - h)) / (2.0 * h);
            let fy = (a.eval_scalar(z + c(0.0, h)) - a.eval_scalar(z - c(0.0, h))) / (2.0 * h);
            let dz = (fx - c(0.0, 1.0) * fy) * 0.5;
            let exact = a.d_zeta().eval_scalar(z);
            prop_assert!((dz - exact).norm() <= 1e-6 * (1.0 + exact.norm()));
        }
    }
}
