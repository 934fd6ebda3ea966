//! Fields of real-linear endomorphisms of `ℂⁿ` written as `w ↦ M(z)w + N(z)w̄`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::poly::{Poly, PowerTable};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearField {
    n: usize,
    /// Complex-linear part, row-major `n×n`.
    pub lin: Vec<Poly>,
    /// Antilinear part, row-major `n×n`.
    pub anti: Vec<Poly>,
}

impl LinearField {
    pub fn new(n: usize, lin: Vec<Poly>, anti: Vec<Poly>) -> Self {
        assert!(lin.len() == n * n && anti.len() == n * n, "matrix size mismatch");
        LinearField { n, lin, anti }
    }

    pub fn zero(n: usize, nvars: usize) -> Self {
        LinearField { n, lin: vec![Poly::zero(nvars); n * n], anti: vec![Poly::zero(nvars); n * n] }
    }

    /// `c·Id` as a constant field.
    pub fn scalar(n: usize, nvars: usize, c: C64) -> Self {
        let mut f = LinearField::zero(n, nvars);
        for i in 0..n {
            f.lin[i * n + i] = Poly::constant(nvars, c);
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nvars(&self) -> usize {
        self.lin[0].nvars()
    }

    pub fn lin_at(&self, i: usize, j: usize) -> &Poly {
        &self.lin[i * self.n + j]
    }

    pub fn anti_at(&self, i: usize, j: usize) -> &Poly {
        &self.anti[i * self.n + j]
    }

    pub fn add(&self, other: &LinearField) -> LinearField {
        LinearField {
            n: self.n,
            lin: self.lin.iter().zip(&other.lin).map(|(a, b)| a + b).collect(),
            anti: self.anti.iter().zip(&other.anti).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &LinearField) -> LinearField {
        LinearField {
            n: self.n,
            lin: self.lin.iter().zip(&other.lin).map(|(a, b)| a - b).collect(),
            anti: self.anti.iter().zip(&other.anti).map(|(a, b)| a - b).collect(),
        }
    }

    /// Pointwise composition `self ∘ other`:
    /// `(M₁,N₁)∘(M₂,N₂) = (M₁M₂ + N₁N̄₂, M₁N₂ + N₁M̄₂)`.
    pub fn compose(&self, other: &LinearField, max_degree: Option<usize>) -> LinearField {
        let n = self.n;
        let nv = self.nvars();
        let olin_c: Vec<Poly> = other.lin.iter().map(Poly::conj).collect();
        let oanti_c: Vec<Poly> = other.anti.iter().map(Poly::conj).collect();
        let mut lin = vec![Poly::zero(nv); n * n];
        let mut anti = vec![Poly::zero(nv); n * n];
        for i in 0..n {
            for j in 0..n {
                let mut l = Poly::zero(nv);
                let mut a = Poly::zero(nv);
                for k in 0..n {
                    let m1 = &self.lin[i * n + k];
                    let n1 = &self.anti[i * n + k];
                    l = &l + &m1.mul_truncated(&other.lin[k * n + j], max_degree);
                    l = &l + &n1.mul_truncated(&oanti_c[k * n + j], max_degree);
                    a = &a + &m1.mul_truncated(&other.anti[k * n + j], max_degree);
                    a = &a + &n1.mul_truncated(&olin_c[k * n + j], max_degree);
                }
                lin[i * n + j] = l;
                anti[i * n + j] = a;
            }
        }
        LinearField { n, lin, anti }
    }

    /// Substitutes a polynomial chart into every entry.
    pub fn compose_chart(&self, chart: &[Poly], max_degree: Option<usize>) -> LinearField {
        LinearField {
            n: self.n,
            lin: self.lin.iter().map(|p| p.compose(chart, max_degree)).collect(),
            anti: self.anti.iter().map(|p| p.compose(chart, max_degree)).collect(),
        }
    }

    pub fn truncate(&self, max_degree: usize) -> LinearField {
        LinearField {
            n: self.n,
            lin: self.lin.iter().map(|p| p.truncate(max_degree)).collect(),
            anti: self.anti.iter().map(|p| p.truncate(max_degree)).collect(),
        }
    }

    pub fn map_polys(&self, f: impl Fn(usize, usize, bool, &Poly) -> Poly) -> LinearField {
        let n = self.n;
        LinearField {
            n,
            lin: self.lin.iter().enumerate().map(|(k, p)| f(k / n, k % n, false, p)).collect(),
            anti: self.anti.iter().enumerate().map(|(k, p)| f(k / n, k % n, true, p)).collect(),
        }
    }

    pub fn max_exponent(&self) -> usize {
        self.lin.iter().chain(&self.anti).map(Poly::max_exponent).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[C64]) -> (DMatrix<C64>, DMatrix<C64>) {
        let t = PowerTable::new(z, self.max_exponent());
        self.eval_with(&t)
    }

    pub fn eval_with(&self, t: &PowerTable) -> (DMatrix<C64>, DMatrix<C64>) {
        let n = self.n;
        let m = DMatrix::from_fn(n, n, |i, j| self.lin[i * n + j].eval_with(t));
        let a = DMatrix::from_fn(n, n, |i, j| self.anti[i * n + j].eval_with(t));
        (m, a)
    }

    /// Largest coefficient difference over all entries.
    pub fn distance(&self, other: &LinearField) -> f64 {
        self.lin
            .iter()
            .zip(&other.lin)
            .chain(self.anti.iter().zip(&other.anti))
            .map(|(a, b)| a.distance(b))
            .fold(0.0, f64::max)
    }
}

/// Applies `(M, N)` to `w`.
pub fn apply_pair(m: &DMatrix<C64>, a: &DMatrix<C64>, w: &[C64]) -> Vec<C64> {
    let n = w.len();
    (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)] * w[j] + a[(i, j)] * w[j].conj()).sum())
        .collect()
}

/// Complex-pair form of a real-linear map given by its real matrix on `(Re w, Im w)`.
pub fn pair_from_real(r: &DMatrix<f64>) -> (DMatrix<C64>, DMatrix<C64>) {
    let n = r.nrows() / 2;
    let i = C64::new(0.0, 1.0);
    let col = |k: usize| -> Vec<C64> { (0..n).map(|a| C64::new(r[(a, k)], r[(a + n, k)])).collect() };
    let mut m = DMatrix::zeros(n, n);
    let mut a = DMatrix::zeros(n, n);
    for k in 0..n {
        let ge = col(k);
        let gi = col(k + n);
        for row in 0..n {
            m[(row, k)] = (ge[row] - i * gi[row]) * 0.5;
            a[(row, k)] = (ge[row] + i * gi[row]) * 0.5;
        }
    }
    (m, a)
}

/// Real `2n×2n` matrix on `(Re w, Im w)` of the map `w ↦ Mw + Nw̄`.
pub fn real_from_pair(m: &DMatrix<C64>, a: &DMatrix<C64>) -> DMatrix<f64> {
    let n = m.nrows();
    let i = C64::new(0.0, 1.0);
    let mut r = DMatrix::zeros(2 * n, 2 * n);
    for row in 0..n {
        for k in 0..n {
            let m1 = m[(row, k)] + a[(row, k)];
            let m2 = i * (m[(row, k)] - a[(row, k)]);
            r[(row, k)] = m1.re;
            r[(row, k + n)] = m2.re;
            r[(row + n, k)] = m1.im;
            r[(row + n, k + n)] = m2.im;
        }
    }
    r
}
