//! Sparse polynomials in `n` complex variables and their conjugates.
//!
//! A monomial is stored as an exponent vector of length `2n`: the first `n`
//! slots are powers of `z^1..z^n`, the last `n` are powers of `z̄^1..z̄^n`.
//! Zero coefficients are dropped only when they are exactly zero.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, C64>,
}

/// Cached powers `z_k^e` and `z̄_k^e` at one point.
pub struct PowerTable {
    pow: Vec<Vec<C64>>,
    cpow: Vec<Vec<C64>>,
}

impl PowerTable {
    pub fn new(point: &[C64], max_degree: usize) -> Self {
        let build = |w: C64| {
            let mut v = Vec::with_capacity(max_degree + 1);
            let mut acc = C64::new(1.0, 0.0);
            for _ in 0..=max_degree {
                v.push(acc);
                acc *= w;
            }
            v
        };
        PowerTable {
            pow: point.iter().map(|&w| build(w)).collect(),
            cpow: point.iter().map(|&w| build(w.conj())).collect(),
        }
    }

    fn factor(&self, slot: usize, e: u8) -> C64 {
        let n = self.pow.len();
        if slot < n {
            self.pow[slot][e as usize]
        } else {
            self.cpow[slot - n][e as usize]
        }
    }
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C64) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(vec![0; 2 * nvars], c);
        p
    }

    /// The coordinate function `z^k`.
    pub fn var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; 2 * nvars];
        e[k] = 1;
        Poly::from_terms(nvars, [(e, C64::new(1.0, 0.0))])
    }

    /// The coordinate function `z̄^k`.
    pub fn conj_var(nvars: usize, k: usize) -> Self {
        let mut e = vec![0; 2 * nvars];
        e[nvars + k] = 1;
        Poly::from_terms(nvars, [(e, C64::new(1.0, 0.0))])
    }

    pub fn monomial(nvars: usize, hol: &[u8], anti: &[u8], c: C64) -> Self {
        assert!(hol.len() == nvars && anti.len() == nvars, "exponent length mismatch");
        let mut e = hol.to_vec();
        e.extend_from_slice(anti);
        Poly::from_terms(nvars, [(e, c)])
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u8>, C64)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), 2 * nvars, "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], C64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn coeff(&self, exps: &[u8]) -> C64 {
        self.terms.get(exps).copied().unwrap_or_default()
    }

    /// Adds `c` to the coefficient of `e`, removing the entry if it becomes exactly zero.
    pub fn add_term(&mut self, e: Vec<u8>, c: C64) {
        if c == C64::new(0.0, 0.0) {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == C64::new(0.0, 0.0) {
                    o.remove();
                }
            }
        }
    }

    /// Total degree of the highest monomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| total(e)).max()
    }

    /// Lowest total degree present (vanishing order at the origin).
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().map(|e| total(e)).min()
    }

    /// Lowest weighted degree, where `weights[k]` applies to both `z^k` and `z̄^k`.
    pub fn weighted_order(&self, weights: &[usize]) -> Option<usize> {
        self.terms.keys().map(|e| weighted(e, weights)).min()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: C64) -> Poly {
        if c == C64::new(0.0, 0.0) {
            return Poly::zero(self.nvars);
        }
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, v)| (e.clone(), v * c)))
    }

    pub fn scale_re(&self, s: f64) -> Poly {
        self.scale(C64::new(s, 0.0))
    }

    /// Applies `f` to every (exponent, coefficient) pair.
    pub fn map_terms(&self, f: impl Fn(&[u8], C64) -> C64) -> Poly {
        Poly::from_terms(self.nvars, self.terms.iter().map(|(e, c)| (e.clone(), f(e, *c))))
    }

    /// Complex conjugate function: swaps holomorphic and antiholomorphic exponents.
    pub fn conj(&self) -> Poly {
        let n = self.nvars;
        Poly::from_terms(
            n,
            self.terms.iter().map(|(e, c)| {
                let mut s = e[n..].to_vec();
                s.extend_from_slice(&e[..n]);
                (s, c.conj())
            }),
        )
    }

    pub fn real_part(&self) -> Poly {
        (self + &self.conj()).scale_re(0.5)
    }

    pub fn imag_part(&self) -> Poly {
        (self - &self.conj()).scale(C64::new(0.0, -0.5))
    }

    /// True when the polynomial is real-valued, i.e. coeff(p,q) = conj(coeff(q,p)).
    pub fn is_real(&self, tol: f64) -> bool {
        (self - &self.conj()).max_abs_coeff() <= tol
    }

    /// Wirtinger derivative in `z^k` (or `z̄^k` when `conjugated`).
    pub fn wirtinger(&self, k: usize, conjugated: bool) -> Poly {
        let slot = if conjugated { self.nvars + k } else { k };
        let mut out = Poly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[slot] > 0 {
                let mut d = e.clone();
                d[slot] -= 1;
                out.add_term(d, c * e[slot] as f64);
            }
        }
        out
    }

    /// Real partial derivative in coordinate `r` of `(x^1..x^n, y^1..y^n)`.
    pub fn d_real(&self, r: usize) -> Poly {
        let n = self.nvars;
        if r < n {
            &self.wirtinger(r, false) + &self.wirtinger(r, true)
        } else {
            let k = r - n;
            (&self.wirtinger(k, false) - &self.wirtinger(k, true)).scale(C64::new(0.0, 1.0))
        }
    }

    pub fn eval(&self, point: &[C64]) -> C64 {
        assert_eq!(point.len(), self.nvars, "point dimension mismatch");
        let d = self.max_exponent();
        self.eval_with(&PowerTable::new(point, d))
    }

    pub fn eval_with(&self, table: &PowerTable) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = *c;
            for (slot, &p) in e.iter().enumerate() {
                if p > 0 {
                    m *= table.factor(slot, p);
                }
            }
            acc += m;
        }
        acc
    }

    /// Largest single exponent, the size needed for a [`PowerTable`].
    pub fn max_exponent(&self) -> usize {
        self.terms.keys().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize
    }

    /// Drops monomials of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: usize) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| total(e) <= max_degree).map(|(e, c)| (e.clone(), *c)),
        )
    }

    /// Homogeneous part of total degree `d`.
    pub fn homogeneous(&self, d: usize) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| total(e) == d).map(|(e, c)| (e.clone(), *c)),
        )
    }

    pub fn mul_truncated(&self, other: &Poly, max_degree: Option<usize>) -> Poly {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            let d1 = total(e1);
            for (e2, c2) in &other.terms {
                if let Some(m) = max_degree {
                    if d1 + total(e2) > m {
                        continue;
                    }
                }
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Substitutes `z^k ↦ subs[k]` (and `z̄^k ↦ conj(subs[k])`), keeping total degree ≤ `max_degree`.
    pub fn compose(&self, subs: &[Poly], max_degree: Option<usize>) -> Poly {
        assert_eq!(subs.len(), self.nvars, "substitution arity mismatch");
        let m = subs[0].nvars;
        let top = self.max_exponent();
        let powers = |base: &Poly| {
            let mut v = vec![Poly::constant(m, C64::new(1.0, 0.0))];
            for i in 1..=top {
                let next = v[i - 1].mul_truncated(base, max_degree);
                v.push(next);
            }
            v
        };
        let hol: Vec<Vec<Poly>> = subs.iter().map(powers).collect();
        let anti: Vec<Vec<Poly>> = subs.iter().map(|s| powers(&s.conj())).collect();
        let mut out = Poly::zero(m);
        for (e, c) in &self.terms {
            let mut term = Poly::constant(m, *c);
            for k in 0..self.nvars {
                if e[k] > 0 {
                    term = term.mul_truncated(&hol[k][e[k] as usize], max_degree);
                }
                if e[self.nvars + k] > 0 {
                    term = term.mul_truncated(&anti[k][e[self.nvars + k] as usize], max_degree);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Largest coefficient difference between two polynomials.
    pub fn distance(&self, other: &Poly) -> f64 {
        (self - other).max_abs_coeff()
    }
}

fn total(e: &[u8]) -> usize {
    e.iter().map(|&x| x as usize).sum()
}

fn weighted(e: &[u8], weights: &[usize]) -> usize {
    let n = weights.len();
    e.iter().enumerate().map(|(s, &x)| x as usize * weights[s % n]).sum()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "variable count mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.mul_truncated(rhs, None)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale_re(-1.0)
    }
}

/// A vector-valued polynomial map, one [`Poly`] per component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyMap {
    pub comps: Vec<Poly>,
}

impl PolyMap {
    pub fn new(comps: Vec<Poly>) -> Self {
        assert!(!comps.is_empty(), "PolyMap needs at least one component");
        let n = comps[0].nvars();
        assert!(comps.iter().all(|p| p.nvars() == n), "component variable counts differ");
        PolyMap { comps }
    }

    pub fn value_dim(&self) -> usize {
        self.comps.len()
    }

    pub fn num_vars(&self) -> usize {
        self.comps[0].nvars()
    }

    pub fn eval(&self, point: &[C64]) -> Vec<C64> {
        let d = self.comps.iter().map(Poly::max_exponent).max().unwrap_or(0);
        let t = PowerTable::new(point, d);
        self.comps.iter().map(|p| p.eval_with(&t)).collect()
    }

    pub fn wirtinger(&self, k: usize, conjugated: bool) -> PolyMap {
        PolyMap::new(self.comps.iter().map(|p| p.wirtinger(k, conjugated)).collect())
    }

    pub fn compose(&self, subs: &[Poly], max_degree: Option<usize>) -> PolyMap {
        PolyMap::new(self.comps.iter().map(|p| p.compose(subs, max_degree)).collect())
    }
}

/// Several polynomials evaluated together, each distinct monomial computed once per point.
#[derive(Clone, Debug)]
pub struct PolyBatch {
    nvars: usize,
    max_exp: usize,
    /// Nonzero `(slot, exponent)` factors of each distinct monomial.
    monomials: Vec<Vec<(usize, u8)>>,
    /// `(monomial index, coefficient)` lists, one per polynomial.
    rows: Vec<Vec<(usize, C64)>>,
}

impl PolyBatch {
    pub fn new(polys: &[Poly]) -> Self {
        let nvars = polys.first().map_or(0, |p| p.nvars);
        let mut index: BTreeMap<&[u8], usize> = BTreeMap::new();
        let mut monomials = Vec::new();
        let mut rows = Vec::with_capacity(polys.len());
        for p in polys {
            assert_eq!(p.nvars, nvars, "batched polynomials must share variables");
            let row = p
                .terms
                .iter()
                .map(|(e, c)| {
                    let k = *index.entry(e.as_slice()).or_insert_with(|| {
                        monomials.push(e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(s, &x)| (s, x)).collect());
                        monomials.len() - 1
                    });
                    (k, *c)
                })
                .collect();
            rows.push(row);
        }
        let max_exp = polys.iter().map(Poly::max_exponent).max().unwrap_or(0);
        PolyBatch { nvars, max_exp, monomials, rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn eval(&self, point: &[C64]) -> Vec<C64> {
        assert_eq!(point.len(), self.nvars, "point dimension");
        let t = PowerTable::new(point, self.max_exp);
        let mono: Vec<C64> = self
            .monomials
            .iter()
            .map(|m| m.iter().fold(C64::new(1.0, 0.0), |acc, &(s, e)| acc * t.factor(s, e)))
            .collect();
        self.rows.iter().map(|r| r.iter().map(|&(k, c)| c * mono[k]).sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = Poly> {
        prop::collection::vec(
            (prop::collection::vec(0u8..3, 2 * nvars), -1.0f64..1.0, -1.0f64..1.0),
            1..8,
        )
        .prop_map(move |ts| Poly::from_terms(nvars, ts.into_iter().map(|(e, a, b)| (e, c(a, b)))))
    }

    fn arb_point(nvars: usize) -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-0.8f64..0.8, -0.8f64..0.8).prop_map(|(a, b)| c(a, b)), nvars)
    }

    #[test]
    fn derivative_of_holomorphic_monomial_in_conjugate_is_zero() {
        let z = Poly::var(1, 0);
        assert!(z.wirtinger(0, true).is_zero());
    }

    #[test]
    fn power_rule_in_conjugate_slot() {
        let p = Poly::monomial(1, &[3], &[2], c(1.0, 0.0));
        let d = p.wirtinger(0, true);
        assert_eq!(d, Poly::monomial(1, &[3], &[1], c(2.0, 0.0)));
    }

    #[test]
    fn siegel_function_value_on_normal_axis() {
        let n = 3;
        let mut rho = (&Poly::var(n, 2) + &Poly::conj_var(n, 2)).clone();
        for a in 0..n - 1 {
            rho = &rho - &(&Poly::var(n, a) * &Poly::conj_var(n, a));
        }
        let v = rho.eval(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!((v - c(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(Poly::var(n, 2).eval(&[c(0.0, 0.0); 3]), c(0.0, 0.0));
    }

    #[test]
    fn exact_cancellation_drops_terms() {
        let p = Poly::var(2, 1);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn compose_with_identity_is_identity() {
        let n = 2;
        let p = Poly::from_terms(
            n,
            [(vec![1, 0, 0, 2], c(0.3, -1.0)), (vec![0, 1, 1, 0], c(2.0, 0.5))],
        );
        let id: Vec<Poly> = (0..n).map(|k| Poly::var(n, k)).collect();
        assert_eq!(p.compose(&id, None), p);
    }

    #[test]
    fn real_and_imaginary_parts_are_real() {
        let p = Poly::from_terms(2, [(vec![1, 0, 0, 1], c(0.3, -1.0)), (vec![2, 0, 0, 0], c(0.0, 1.0))]);
        assert!(p.real_part().is_real(0.0));
        assert!(p.imag_part().is_real(0.0));
        let z = [c(0.2, 0.1), c(-0.4, 0.3)];
        let v = p.eval(&z);
        assert!((p.real_part().eval(&z).re - v.re).abs() < 1e-15);
        assert!((p.imag_part().eval(&z).re - v.im).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn mixed_wirtinger_derivatives_commute(p in arb_poly(2), k in 0usize..2, l in 0usize..2) {
            let a = p.wirtinger(k, false).wirtinger(l, true);
            let b = p.wirtinger(l, true).wirtinger(k, false);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn wirtinger_matches_central_differences(p in arb_poly(2), z in arb_point(2), k in 0usize..2) {
            let h = 1e-5;
            let shift = |dx: f64, dy: f64| {
                let mut w = z.clone();
                w[k] += c(dx, dy);
                p.eval(&w)
            };
            let fx = (shift(h, 0.0) - shift(-h, 0.0)) / (2.0 * h);
            let fy = (shift(0.0, h) - shift(0.0, -h)) / (2.0 * h);
            let dz = (fx - c(0.0, 1.0) * fy) * 0.5;
            let dzb = (fx + c(0.0, 1.0) * fy) * 0.5;
            let ez = p.wirtinger(k, false).eval(&z);
            let ezb = p.wirtinger(k, true).eval(&z);
            let scale = 1.0 + ez.norm().max(ezb.norm());
            prop_assert!((dz - ez).norm() <= 1e-6 * scale);
            prop_assert!((dzb - ezb).norm() <= 1e-6 * scale);
        }

        #[test]
        fn eval_is_multiplicative(p in arb_poly(2), q in arb_poly(2), z in arb_point(2)) {
            let lhs = (&p * &q).eval(&z);
            let rhs = p.eval(&z) * q.eval(&z);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        }

        #[test]
        fn composition_commutes_with_evaluation(p in arb_poly(2), s0 in arb_poly(2), s1 in arb_poly(2), z in arb_point(2)) {
            let subs = vec![s0.clone(), s1.clone()];
            let lhs = p.compose(&subs, None).eval(&z);
            let inner = vec![s0.eval(&z), s1.eval(&z)];
            let rhs = p.eval(&inner);
            prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
        }

        #[test]
        fn conjugation_conjugates_values(p in arb_poly(2), z in arb_point(2)) {
            prop_assert!((p.conj().eval(&z) - p.eval(&z).conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn batch_matches_individual_evaluation() {
        let x = Poly::var(2, 0);
        let yb = Poly::conj_var(2, 1);
        let p = &(&x * &yb) + &x.scale(c(0.0, 2.0));
        let q = &(&yb * &yb) * &x;
        let batch = PolyBatch::new(&[p.clone(), q.clone(), Poly::zero(2)]);
        let z = [c(0.3, -0.7), c(1.1, 0.4)];
        let v = batch.eval(&z);
        assert_eq!(batch.len(), 3);
        assert!((v[0] - p.eval(&z)).norm() < 1e-15);
        assert!((v[1] - q.eval(&z)).norm() < 1e-15);
        assert_eq!(v[2], c(0.0, 0.0));
    }
}
