//! Scenario configuration documents.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows. The
//! tensors `l_mixed[i][j][k]` and `l_anti[i][j][k]` are the coefficients of `z^k`
//! and `z̄^k` in entry `(i, j)` of the antilinear part of the structure. Monomials
//! are given by exponent vectors `z` and `zbar` of length `n`.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{LinearField, Poly};
use crate::continuation::DEFAULT_SCHEDULE;
use crate::rhmodel::random_antisymmetric;
use crate::structures::{perturbed_hypersurface, perturbed_structure, AcsModel, HypersurfaceModel};

use super::Command;

pub type Cx = [f64; 2];
pub type CMatrix = Vec<Vec<Cx>>;

fn cx(v: Cx) -> C64 {
    C64::new(v[0], v[1])
}

fn to_cx(c: C64) -> Cx {
    [c.re, c.im]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_n")]
    pub n: usize,
    /// Seed for randomized pairs and property trials.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub pair: PairSpec,
    /// Levi command: base point on the hypersurface. Continue command: target point.
    #[serde(default)]
    pub point: Option<Vec<Cx>>,
    /// Continue command: target direction.
    #[serde(default)]
    pub direction: Option<Vec<Cx>>,
    /// Model and kernel commands.
    #[serde(default)]
    pub base_points: Option<Vec<BasePointSpec>>,
    /// Degree cap of the disc coefficients.
    #[serde(default)]
    pub cap: Option<usize>,
    /// Levi command: number of random directions for the correction identity.
    #[serde(default)]
    pub trials: Option<usize>,
    #[serde(default)]
    pub schedule: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub samples: SampleGrid,
}

fn default_n() -> usize {
    2
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("empty document is a valid config")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSpec {
    /// The model pair of an antisymmetric `(n−1)×(n−1)` matrix `A` (zero when omitted).
    Osculating {
        #[serde(default)]
        a: Option<CMatrix>,
    },
    /// Standard-form pair with random higher-order terms of the given size.
    /// `A` is drawn from the seed when omitted.
    Perturbed {
        #[serde(default)]
        a: Option<CMatrix>,
        scale: f64,
    },
    /// Explicit structure tensors and hypersurface data `ρ = 2Re zⁿ − Re K(z', z') − H(z', z') + …`.
    Explicit {
        #[serde(default)]
        l_mixed: Option<Vec<CMatrix>>,
        #[serde(default)]
        l_anti: Option<Vec<CMatrix>>,
        #[serde(default)]
        k: Option<CMatrix>,
        #[serde(default)]
        h: Option<CMatrix>,
        #[serde(default)]
        structure_terms: Vec<StructureTerm>,
        #[serde(default)]
        hypersurface_terms: Vec<Term>,
    },
}

impl Default for PairSpec {
    fn default() -> Self {
        PairSpec::Osculating { a: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub z: Vec<u8>,
    pub zbar: Vec<u8>,
    pub coeff: Cx,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldPart {
    Linear,
    Antilinear,
}

/// A monomial added to entry `(row, col)` of one part of the structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureTerm {
    pub part: FieldPart,
    pub row: usize,
    pub col: usize,
    pub z: Vec<u8>,
    pub zbar: Vec<u8>,
    pub coeff: Cx,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasePointSpec {
    pub a: Cx,
    pub lambda: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub involution: f64,
    pub levi: f64,
    pub model: f64,
    pub rank: f64,
    pub surjectivity: f64,
    pub newton: f64,
    pub residual: f64,
    pub verify: f64,
    pub center: f64,
    pub angle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            involution: 1e-10,
            levi: 1e-10,
            model: 1e-12,
            rank: 1e-10,
            surjectivity: 1e-9,
            newton: 1e-11,
            residual: 1e-8,
            verify: 1e-8,
            center: 1e-8,
            angle: 1e-6,
        }
    }
}

/// Sample grid: `boundary` points on the unit circle, and `radii × rays` interior points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleGrid {
    pub boundary: usize,
    pub radii: usize,
    pub rays: usize,
}

impl Default for SampleGrid {
    fn default() -> Self {
        SampleGrid { boundary: 64, radii: 4, rays: 16 }
    }
}

/// A config that fails validation; the message names the offending entry.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

fn matrix(name: &str, m: &CMatrix, size: usize) -> Result<DMatrix<C64>, ConfigError> {
    if m.len() != size || m.iter().any(|r| r.len() != size) {
        return Err(bad(format!("{name} must be {size}×{size}")));
    }
    Ok(DMatrix::from_fn(size, size, |i, j| cx(m[i][j])))
}

fn from_matrix(m: &DMatrix<C64>) -> CMatrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| to_cx(m[(i, j)])).collect()).collect()
}

fn antisymmetric(name: &str, m: &CMatrix, size: usize) -> Result<DMatrix<C64>, ConfigError> {
    let a = matrix(name, m, size)?;
    let tol = 1e-14 * (1.0 + a.norm());
    for i in 0..size {
        for j in i..size {
            if (a[(i, j)] + a[(j, i)]).norm() > tol {
                return Err(bad(format!(
                    "{name} is not antisymmetric: {name}[{i}][{j}] = {} but {name}[{j}][{i}] = {}",
                    a[(i, j)],
                    a[(j, i)]
                )));
            }
        }
    }
    Ok(a)
}

fn tensor(name: &str, t: &[CMatrix], n: usize) -> Result<Vec<C64>, ConfigError> {
    if t.len() != n || t.iter().any(|m| m.len() != n || m.iter().any(|r| r.len() != n)) {
        return Err(bad(format!("{name} must be {n}×{n}×{n}")));
    }
    Ok(t.iter().flat_map(|m| m.iter().flat_map(|r| r.iter().map(|&v| cx(v)))).collect())
}

fn from_tensor(flat: &[C64], n: usize) -> Vec<CMatrix> {
    flat.chunks(n * n).map(|m| m.chunks(n).map(|r| r.iter().map(|&c| to_cx(c)).collect()).collect()).collect()
}

fn monomial(name: &str, n: usize, z: &[u8], zbar: &[u8], coeff: Cx) -> Result<Poly, ConfigError> {
    if z.len() != n || zbar.len() != n {
        return Err(bad(format!("{name}: exponent vectors must have length {n}")));
    }
    Ok(Poly::monomial(n, z, zbar, cx(coeff)))
}

/// Monomials of a polynomial in config syntax.
pub fn terms_of(p: &Poly) -> Vec<Term> {
    let n = p.nvars();
    p.terms().map(|(e, c)| Term { z: e[..n].to_vec(), zbar: e[n..].to_vec(), coeff: to_cx(c) }).collect()
}

/// Pair spec reproducing a structure and hypersurface exactly.
pub fn explicit_spec(j: &AcsModel, rho: &HypersurfaceModel) -> PairSpec {
    let n = j.n();
    let mut structure_terms = Vec::new();
    let higher = j.higher();
    for (part, polys) in [(FieldPart::Linear, &higher.lin), (FieldPart::Antilinear, &higher.anti)] {
        for (idx, p) in polys.iter().enumerate() {
            structure_terms.extend(terms_of(p).into_iter().map(|t| StructureTerm {
                part,
                row: idx / n,
                col: idx % n,
                z: t.z,
                zbar: t.zbar,
                coeff: t.coeff,
            }));
        }
    }
    PairSpec::Explicit {
        l_mixed: Some(from_tensor(j.l_mixed_flat(), n)),
        l_anti: Some(from_tensor(j.l_anti_flat(), n)),
        k: Some(from_matrix(rho.k())),
        h: Some(from_matrix(rho.h())),
        structure_terms,
        hypersurface_terms: terms_of(rho.remainder()),
    }
}

fn resolve_a(a: &Option<CMatrix>, n: usize, seed: Option<u64>) -> Result<CMatrix, ConfigError> {
    match (a, seed) {
        (Some(a), _) => antisymmetric("pair.a", a, n - 1).map(|m| from_matrix(&m)),
        (None, Some(seed)) => Ok(from_matrix(&random_antisymmetric(n - 1, 1.0, &mut ChaCha8Rng::seed_from_u64(seed)))),
        (None, None) => Ok(vec![vec![[0.0, 0.0]; n - 1]; n - 1]),
    }
}

impl ScenarioConfig {
    /// Checks dimensions and fills every default the command uses, so the result
    /// reproduces the run on its own.
    pub fn resolve(&self, command: Command) -> Result<ScenarioConfig, ConfigError> {
        let n = self.n;
        if n < 2 {
            return Err(bad("n must be at least 2"));
        }
        let mut out = self.clone();
        out.pair = match &self.pair {
            PairSpec::Osculating { a } => PairSpec::Osculating { a: Some(resolve_a(a, n, None)?) },
            PairSpec::Perturbed { a, scale } => {
                if !(scale.is_finite() && *scale >= 0.0) {
                    return Err(bad("pair.scale must be a nonnegative number"));
                }
                PairSpec::Perturbed { a: Some(resolve_a(a, n, Some(self.seed))?), scale: *scale }
            }
            PairSpec::Explicit { l_mixed, l_anti, k, h, structure_terms, hypersurface_terms } => {
                let zero_t = vec![vec![vec![[0.0, 0.0]; n]; n]; n];
                let (lm, la) = (l_mixed.clone().unwrap_or(zero_t.clone()), l_anti.clone().unwrap_or(zero_t));
                tensor("pair.l_mixed", &lm, n)?;
                tensor("pair.l_anti", &la, n)?;
                let k = k.clone().unwrap_or(from_matrix(&DMatrix::zeros(n - 1, n - 1)));
                let h = h.clone().unwrap_or(from_matrix(&DMatrix::identity(n - 1, n - 1)));
                matrix("pair.k", &k, n - 1)?;
                matrix("pair.h", &h, n - 1)?;
                for (i, t) in structure_terms.iter().enumerate() {
                    let name = format!("pair.structure_terms[{i}]");
                    monomial(&name, n, &t.z, &t.zbar, t.coeff)?;
                    if t.row >= n || t.col >= n {
                        return Err(bad(format!("{name}: entry ({}, {}) outside {n}×{n}", t.row, t.col)));
                    }
                    let deg: usize = t.z.iter().chain(&t.zbar).map(|&e| e as usize).sum();
                    if deg < 2 {
                        return Err(bad(format!("{name}: degree {deg} < 2; linear terms belong in l_mixed and l_anti")));
                    }
                }
                for (i, t) in hypersurface_terms.iter().enumerate() {
                    monomial(&format!("pair.hypersurface_terms[{i}]"), n, &t.z, &t.zbar, t.coeff)?;
                }
                PairSpec::Explicit {
                    l_mixed: Some(lm),
                    l_anti: Some(la),
                    k: Some(k),
                    h: Some(h),
                    structure_terms: structure_terms.clone(),
                    hypersurface_terms: hypersurface_terms.clone(),
                }
            }
        };
        let vector = |name: &str, v: &Option<Vec<Cx>>, default: Vec<Cx>| -> Result<Option<Vec<Cx>>, ConfigError> {
            let v = v.clone().unwrap_or(default);
            if v.len() != n {
                return Err(bad(format!("{name} must have {n} entries")));
            }
            Ok(Some(v))
        };
        let mut target = vec![[0.0, 0.0]; n];
        match command {
            Command::Levi => {
                out.point = vector("point", &self.point, target)?;
                out.trials = Some(self.trials.unwrap_or(20));
            }
            Command::Continue => {
                target[n - 1] = [0.125, 0.0];
                out.point = vector("point", &self.point, target)?;
                let mut dir = vec![[0.0, 0.0]; n];
                dir[0] = [1.0, 0.0];
                out.direction = vector("direction", &self.direction, dir)?;
                out.cap = Some(self.cap.unwrap_or(10));
                out.schedule = Some(self.schedule.clone().unwrap_or(DEFAULT_SCHEDULE.to_vec()));
            }
            Command::Model | Command::Kernel => {
                let bps = self.base_points.clone().unwrap_or(vec![BasePointSpec { a: [1.0, 0.0], lambda: 1.0 }]);
                for (i, b) in bps.iter().enumerate() {
                    if cx(b.a).norm() == 0.0 || b.lambda == 0.0 {
                        return Err(bad(format!("base_points[{i}] needs a ≠ 0 and λ ≠ 0")));
                    }
                }
                out.base_points = Some(bps);
                out.cap = Some(self.cap.unwrap_or(if command == Command::Model { 3 } else { 8 }));
            }
            Command::Validate | Command::Normalize => {}
        }
        if out.cap.is_some_and(|c| c < 2) {
            return Err(bad("cap must be at least 2"));
        }
        Ok(out)
    }

    /// The structure and hypersurface of a resolved config.
    pub fn build_pair(&self) -> crate::Result<(AcsModel, HypersurfaceModel)> {
        let n = self.n;
        let err = |e: ConfigError| crate::Error::Invalid(e.0);
        match &self.pair {
            PairSpec::Osculating { a } => {
                let a = resolve_a(a, n, None).map_err(err)?;
                let a = matrix("pair.a", &a, n - 1).map_err(err)?;
                Ok((AcsModel::osculating(&a), HypersurfaceModel::siegel(n)))
            }
            PairSpec::Perturbed { a, scale } => {
                let a = resolve_a(a, n, Some(self.seed)).map_err(err)?;
                let a = matrix("pair.a", &a, n - 1).map_err(err)?;
                // A separate stream keeps the perturbation independent of whether `A` was drawn.
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                rng.set_stream(1);
                let j = perturbed_structure(&a, *scale, &mut rng);
                Ok((j, perturbed_hypersurface(n, *scale, &mut rng)))
            }
            PairSpec::Explicit { l_mixed, l_anti, k, h, structure_terms, hypersurface_terms } => {
                let zero_t = vec![vec![vec![[0.0, 0.0]; n]; n]; n];
                let lm = tensor("pair.l_mixed", l_mixed.as_ref().unwrap_or(&zero_t), n).map_err(err)?;
                let la = tensor("pair.l_anti", l_anti.as_ref().unwrap_or(&zero_t), n).map_err(err)?;
                let mut higher = LinearField::zero(n, n);
                for t in structure_terms {
                    let p = monomial("pair.structure_terms", n, &t.z, &t.zbar, t.coeff).map_err(err)?;
                    let idx = t.row * n + t.col;
                    match t.part {
                        FieldPart::Linear => higher.lin[idx] = &higher.lin[idx] + &p,
                        FieldPart::Antilinear => higher.anti[idx] = &higher.anti[idx] + &p,
                    }
                }
                let k = match k {
                    Some(k) => matrix("pair.k", k, n - 1).map_err(err)?,
                    None => DMatrix::zeros(n - 1, n - 1),
                };
                let h = match h {
                    Some(h) => matrix("pair.h", h, n - 1).map_err(err)?,
                    None => DMatrix::identity(n - 1, n - 1),
                };
                let mut rem = Poly::zero(n);
                for t in hypersurface_terms {
                    rem = &rem + &monomial("pair.hypersurface_terms", n, &t.z, &t.zbar, t.coeff).map_err(err)?;
                }
                Ok((AcsModel::from_tensors(n, lm, la, higher), HypersurfaceModel::new(n, k, h, rem)?))
            }
        }
    }

    pub fn point_c64(&self) -> Vec<C64> {
        self.point.iter().flatten().map(|&v| cx(v)).collect()
    }

    pub fn direction_c64(&self) -> Vec<C64> {
        self.direction.iter().flatten().map(|&v| cx(v)).collect()
    }

    pub fn base_points_c64(&self) -> Vec<(C64, f64)> {
        self.base_points.iter().flatten().map(|b| (cx(b.a), b.lambda)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_resolves_to_defaults() {
        let cfg: ScenarioConfig = serde_json::from_str("{}").unwrap();
        let r = cfg.resolve(Command::Model).unwrap();
        assert_eq!(r.n, 2);
        assert_eq!(r.pair, PairSpec::Osculating { a: Some(vec![vec![[0.0, 0.0]]]) });
        assert_eq!(r.cap, Some(3));
        assert_eq!(r.base_points.unwrap().len(), 1);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"n": 2, "bogus": 1}"#).is_err());
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"pair": {"kind": "osculating", "b": []}}"#).is_err());
    }

    #[test]
    fn antisymmetry_violation_names_the_entry() {
        let cfg: ScenarioConfig =
            serde_json::from_str(r#"{"n": 3, "pair": {"kind": "osculating", "a": [[[0,0],[1,0]],[[0.5,0],[0,0]]]}}"#)
                .unwrap();
        let e = cfg.resolve(Command::Validate).unwrap_err().to_string();
        assert!(e.contains("pair.a[0][1]") && e.contains("pair.a[1][0]"), "{e}");
    }

    #[test]
    fn explicit_spec_round_trips_a_perturbed_pair() {
        let cfg: ScenarioConfig =
            serde_json::from_str(r#"{"n": 3, "seed": 5, "pair": {"kind": "perturbed", "scale": 0.1}}"#).unwrap();
        let (j, rho) = cfg.resolve(Command::Validate).unwrap().build_pair().unwrap();
        let again = ScenarioConfig { pair: explicit_spec(&j, &rho), ..cfg };
        let (j2, rho2) = again.resolve(Command::Validate).unwrap().build_pair().unwrap();
        assert_eq!(j2.distance(&j), 0.0);
        assert_eq!(rho2.distance(&rho), 0.0);
    }

    #[test]
    fn resolving_is_idempotent() {
        let cfg: ScenarioConfig =
            serde_json::from_str(r#"{"n": 3, "seed": 9, "pair": {"kind": "perturbed", "scale": 0.05}}"#).unwrap();
        let once = cfg.resolve(Command::Continue).unwrap();
        assert_eq!(once.resolve(Command::Continue).unwrap(), once);
        assert_eq!(once.build_pair().unwrap().0.distance(&cfg.build_pair().unwrap().0), 0.0);
    }
}
