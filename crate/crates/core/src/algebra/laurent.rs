//! Finite Laurent series on the unit circle, `Σ_{m=lo}^{hi} c_m ζ^m`.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Laurent {
    lo: i64,
    coeffs: Vec<C64>,
}

impl Laurent {
    /// Zero table covering exponents `lo..=hi`.
    pub fn zeros(lo: i64, hi: i64) -> Self {
        assert!(hi >= lo, "empty exponent range");
        Laurent { lo, coeffs: vec![C64::new(0.0, 0.0); (hi - lo + 1) as usize] }
    }

    pub fn from_coeffs(lo: i64, coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "empty Laurent table");
        Laurent { lo, coeffs }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of `ζ^m`; zero outside the stored range.
    pub fn get(&self, m: i64) -> C64 {
        if m < self.lo || m > self.hi() {
            C64::new(0.0, 0.0)
        } else {
            self.coeffs[(m - self.lo) as usize]
        }
    }

    /// Sets the coefficient of `ζ^m`, widening the range when needed.
    pub fn set(&mut self, m: i64, c: C64) {
        self.widen(m.min(self.lo), m.max(self.hi()));
        let lo = self.lo;
        self.coeffs[(m - lo) as usize] = c;
    }

    pub fn add_at(&mut self, m: i64, c: C64) {
        let v = self.get(m);
        self.set(m, v + c);
    }

    fn widen(&mut self, lo: i64, hi: i64) {
        if lo >= self.lo && hi <= self.hi() {
            return;
        }
        let mut out = Laurent::zeros(lo.min(self.lo), hi.max(self.hi()));
        for m in self.lo..=self.hi() {
            let idx = (m - out.lo) as usize;
            out.coeffs[idx] = self.get(m);
        }
        *self = out;
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zeros(self.lo.min(other.lo), self.hi().max(other.hi()));
        for m in out.lo..=out.hi() {
            let idx = (m - out.lo) as usize;
            out.coeffs[idx] = self.get(m) + other.get(m);
        }
        out
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Laurent {
        Laurent { lo: self.lo, coeffs: self.coeffs.iter().map(|v| v * c).collect() }
    }

    /// Product of boundary functions: convolution of coefficient tables.
    pub fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zeros(self.lo + other.lo, self.hi() + other.hi());
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out.coeffs[i + j] += a * b;
            }
        }
        out
    }

    /// Table of the conjugate boundary function: `c_m ↦ conj(c_{-m})`.
    pub fn conj(&self) -> Laurent {
        let mut coeffs: Vec<C64> = self.coeffs.iter().map(|c| c.conj()).collect();
        coeffs.reverse();
        Laurent { lo: -self.hi(), coeffs }
    }

    /// Multiplication by `ζ^k`.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent { lo: self.lo + k, coeffs: self.coeffs.clone() }
    }

    pub fn eval(&self, zeta: C64) -> C64 {
        (self.lo..=self.hi()).map(|m| self.get(m) * zeta.powi(m as i32)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient of `self - other` over the union of ranges.
    pub fn distance(&self, other: &Laurent) -> f64 {
        self.sub(other).max_abs()
    }

    /// Keeps only exponents in `lo..=hi`.
    pub fn restrict(&self, lo: i64, hi: i64) -> Laurent {
        let mut out = Laurent::zeros(lo, hi);
        for m in lo..=hi {
            out.coeffs[(m - lo) as usize] = self.get(m);
        }
        out
    }

    /// Largest coefficient with exponent outside `lo..=hi`.
    pub fn tail_outside(&self, lo: i64, hi: i64) -> f64 {
        (self.lo..=self.hi())
            .filter(|m| *m < lo || *m > hi)
            .map(|m| self.get(m).norm())
            .fold(0.0, f64::max)
    }

    /// Distance from the coefficients of a real-valued boundary function (`c_{-m} = conj c_m`).
    pub fn reality_defect(&self) -> f64 {
        self.distance(&self.conj())
    }

    /// Values at the `k` roots of unity `e^{2πij/k}`.
    pub fn sample(&self, k: usize) -> Vec<C64> {
        roots_of_unity(k).into_iter().map(|z| self.eval(z)).collect()
    }

    /// Recovers exponents `lo..=hi` from values at `k ≥ hi-lo+1` roots of unity by a discrete Fourier sum.
    pub fn from_samples(values: &[C64], lo: i64, hi: i64) -> Laurent {
        let k = values.len();
        assert!(k as i64 >= hi - lo + 1, "too few samples for the requested range");
        let mut out = Laurent::zeros(lo, hi);
        for m in lo..=hi {
            let mut acc = C64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let ang = -2.0 * PI * (m as f64) * (j as f64) / k as f64;
                acc += v * C64::from_polar(1.0, ang);
            }
            out.coeffs[(m - lo) as usize] = acc / k as f64;
        }
        out
    }
}

pub fn roots_of_unity(k: usize) -> Vec<C64> {
    (0..k).map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / k as f64)).collect()
}
