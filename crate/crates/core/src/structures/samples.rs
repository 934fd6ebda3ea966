//! Random standard-form pairs near an osculating model, for tests and demos.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;

use super::acs::AcsModel;
use super::hypersurface::HypersurfaceModel;
use crate::algebra::Poly;

fn unit<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Exact structure in standard form with normal-slice matrix `a` and every other
/// first-order coefficient of modulus at most `scale`.
///
/// The first-order antilinear part is the seed: `A_{αβ} z̄^β` in the normal row,
/// random linear terms elsewhere, except that holomorphic tangential variables are
/// kept out of the normal row. Products of the seed give the quadratic to quartic terms.
pub fn perturbed_structure<R: Rng>(a: &DMatrix<C64>, scale: f64, rng: &mut R) -> AcsModel {
    let n = a.nrows() + 1;
    let mut seed = vec![Poly::zero(n); n * n];
    for i in 0..n {
        for k in 0..n {
            let mut p = Poly::zero(n);
            for v in 0..n {
                if i == n - 1 && k < n - 1 && v < n - 1 {
                    p = &p + &Poly::conj_var(n, v).scale(a[(k, v)]);
                    continue;
                }
                if !(i == n - 1 && v < n - 1) {
                    p = &p + &Poly::var(n, v).scale(unit(rng) * scale);
                }
                p = &p + &Poly::conj_var(n, v).scale(unit(rng) * scale);
            }
            seed[i * n + k] = p;
        }
    }
    AcsModel::from_seed(n, &seed)
}

/// `2Re zⁿ − |z'|²` plus real terms of weighted order 3 and 4 with coefficients of modulus at most `scale`.
pub fn perturbed_hypersurface<R: Rng>(n: usize, scale: f64, rng: &mut R) -> HypersurfaceModel {
    let m = n - 1;
    let mut rem = Poly::zero(n);
    let add_real = |rem: &mut Poly, e: Vec<u8>, c: C64| {
        let mut ec = vec![0u8; 2 * n];
        ec[..n].copy_from_slice(&e[n..]);
        ec[n..].copy_from_slice(&e[..n]);
        rem.add_term(e, c);
        rem.add_term(ec, c.conj());
    };
    for a in 0..m {
        for b in a..m {
            for g in 0..m {
                let mut e = vec![0u8; 2 * n];
                e[a] += 1;
                e[b] += 1;
                e[n + g] += 1;
                add_real(&mut rem, e, unit(rng) * (0.5 * scale));
            }
        }
        let mut e = vec![0u8; 2 * n];
        e[n - 1] = 1;
        e[n + a] = 1;
        add_real(&mut rem, e, unit(rng) * (0.5 * scale));
    }
    let mut e = vec![0u8; 2 * n];
    e[n - 1] = 1;
    e[2 * n - 1] = 1;
    rem.add_term(e, C64::new(scale * rng.gen_range(-1.0..1.0), 0.0));
    HypersurfaceModel::new(n, DMatrix::zeros(m, m), DMatrix::identity(m, m), rem).expect("generated data are graded")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{default_samples, is_standard_form, osculating_pair, validate_acs};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_standard_and_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 2..=3 {
            let a = crate::rhmodel::random_antisymmetric(n - 1, 1.0, &mut rng);
            let j = perturbed_structure(&a, 0.05, &mut rng);
            let rho = perturbed_hypersurface(n, 0.05, &mut rng);
            assert!(is_standard_form(&j, &rho, 1e-13).standard);
            assert!(validate_acs(&j, &default_samples(n), 1e-12).pass);
            assert!((osculating_pair(&j, &rho).unwrap().a - a).norm() < 1e-15);
            assert!(j.max_degree() <= 4);
        }
    }
}
