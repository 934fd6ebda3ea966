//! Batch front-end: resolves a scenario config, dispatches to the library and
//! collects a machine-readable report.
//!
//! Exit codes: [`EXIT_PASS`] when every check passes, [`EXIT_FAIL`] for failed
//! checks or invalid input, [`EXIT_PARSE`] for unreadable configs and
//! [`EXIT_RUNTIME`] for numerical breakdowns.

mod config;
mod samples;

pub use config::{
    explicit_spec, terms_of, BasePointSpec, CMatrix, ConfigError, Cx, FieldPart, PairSpec, SampleGrid, ScenarioConfig,
    StructureTerm, Term, Tolerances,
};
pub use samples::{emit_samples, sample_header, sample_points, write_samples};

use std::path::Path;

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::continuation::{continue_disc_traced, verify_stationary, ContinuationProblem, StationarityReport};
use crate::cotangent::LiftedDisc;
use crate::rhmodel::{
    explicit_disc, independence_spectrum, kernel_basis, model_boundary_residual, model_pde_residual,
    operator_spectrum, BasePoint, GCoupling, ModelProblem,
};
use crate::structures::{
    default_samples, is_standard_form, levi_correction, levi_matrix, levi_numeric, normalize_to_standard_form,
    osculating_pair, validate_acs, AcsModel, HypersurfaceModel,
};
use crate::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Check `J² = −Id`, standard form and Levi definiteness of the pair.
    Validate,
    /// Levi form at a point and the first-order correction identity at the origin.
    Levi,
    /// Bring the pair to standard form.
    Normalize,
    /// Residuals of the explicit model discs.
    Model,
    /// Kernel and surjectivity of the linearized model problem.
    Kernel,
    /// Deform a model disc into a disc of the configured pair.
    Continue,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    Above,
    Equals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: Relation,
    pub limit: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: Relation, limit: f64) -> Self {
        let pass = match relation {
            Relation::AtMost => value <= limit,
            Relation::Above => value > limit,
            Relation::Equals => value == limit,
        };
        Check { name: name.into(), value, relation, limit, pass }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: Command,
    pub pass: bool,
    pub exit_code: i32,
    pub error: Option<String>,
    pub checks: Vec<Check>,
    pub details: Value,
    /// The resolved config; absent only when resolution itself failed.
    pub config: Option<ScenarioConfig>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// The checks as a CSV table.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,value,relation,limit,pass\n");
        for c in &self.checks {
            let rel = serde_json::to_value(c.relation).expect("relation serializes");
            s += &format!("{},{:.16e},{},{:.16e},{}\n", c.name, c.value, rel.as_str().unwrap_or(""), c.limit, c.pass);
        }
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Parses a config document; failures map to [`EXIT_PARSE`].
pub fn parse_config(text: &str) -> serde_json::Result<ScenarioConfig> {
    serde_json::from_str(text)
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Invalid(_)
        | Error::Precondition(_)
        | Error::NotStandard(_)
        | Error::NotPseudoconvex(_)
        | Error::Normalization(_) => EXIT_FAIL,
        Error::Degenerate(_) | Error::ChartExit { .. } | Error::NoConvergence(_) => EXIT_RUNTIME,
    }
}

struct Outcome {
    checks: Vec<Check>,
    details: Value,
    error: Option<(i32, String)>,
}

impl Outcome {
    fn ok(checks: Vec<Check>, details: Value) -> Self {
        Outcome { checks, details, error: None }
    }
}

/// Runs one scenario. When `samples_path` is given, the model and continue
/// commands also write disc samples there.
pub fn run_scenario(command: Command, cfg: &ScenarioConfig, samples_path: Option<&Path>) -> Report {
    let resolved = match cfg.resolve(command) {
        Ok(r) => r,
        Err(e) => {
            return Report {
                command,
                pass: false,
                exit_code: EXIT_FAIL,
                error: Some(e.to_string()),
                checks: Vec::new(),
                details: Value::Null,
                config: None,
            }
        }
    };
    let outcome = match dispatch(command, &resolved, samples_path) {
        Ok(o) => o,
        Err(e) => Outcome { checks: Vec::new(), details: Value::Null, error: Some((exit_code_for(&e), e.to_string())) },
    };
    let pass = outcome.error.is_none() && outcome.checks.iter().all(|c| c.pass);
    let (exit_code, error) = match outcome.error {
        Some((code, msg)) => (code, Some(msg)),
        None if pass => (EXIT_PASS, None),
        None => (EXIT_FAIL, None),
    };
    Report { command, pass, exit_code, error, checks: outcome.checks, details: outcome.details, config: Some(resolved) }
}

fn dispatch(command: Command, cfg: &ScenarioConfig, samples_path: Option<&Path>) -> crate::Result<Outcome> {
    let (j, rho) = cfg.build_pair()?;
    match command {
        Command::Validate => validate(cfg, &j, &rho),
        Command::Levi => levi(cfg, &j, &rho),
        Command::Normalize => normalize(cfg, &j, &rho),
        Command::Model => model(cfg, &j, &rho, samples_path),
        Command::Kernel => kernel(cfg, &j, &rho),
        Command::Continue => continuation(cfg, j, rho, samples_path),
    }
}

/// Smallest eigenvalue of the Levi form with the sign that is positive on strongly
/// pseudoconvex points for the hypersurface's orientation.
fn pseudoconvexity_margin(j: &AcsModel, rho: &HypersurfaceModel, x: &[C64]) -> crate::Result<(f64, Vec<f64>)> {
    let m = levi_matrix(j, rho, x)?;
    let ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    let margin = ev.iter().map(|e| -rho.inside_sign() * e).fold(f64::INFINITY, f64::min);
    Ok((margin, ev))
}

fn osculating_matrix(j: &AcsModel, rho: &HypersurfaceModel) -> Value {
    osculating_pair(j, rho).map(|o| json!(o.a)).unwrap_or(Value::Null)
}

fn validate(cfg: &ScenarioConfig, j: &AcsModel, rho: &HypersurfaceModel) -> crate::Result<Outcome> {
    let acs = validate_acs(j, &default_samples(cfg.n), cfg.tolerances.involution);
    let (margin, ev) = pseudoconvexity_margin(j, rho, &vec![C64::default(); cfg.n])?;
    let sf = is_standard_form(j, rho, 1e-12);
    Ok(Outcome::ok(
        vec![
            Check::new("involution", acs.max_residual, Relation::AtMost, cfg.tolerances.involution),
            Check::new("pseudoconvexity_margin", margin, Relation::Above, 0.0),
        ],
        json!({
            "worst_point": acs.worst_point,
            "levi_eigenvalues": ev,
            "standard_form": sf.standard,
            "violations": sf.violations,
            "osculating_a": osculating_matrix(j, rho),
        }),
    ))
}

fn levi(cfg: &ScenarioConfig, j: &AcsModel, rho: &HypersurfaceModel) -> crate::Result<Outcome> {
    let n = cfg.n;
    let (margin, ev) = pseudoconvexity_margin(j, rho, &cfg.point_c64())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let zero = vec![C64::default(); n];
    let standard = AcsModel::standard(n);
    let mut defect: f64 = 0.0;
    for _ in 0..cfg.trials.unwrap_or(0) {
        let v: Vec<C64> = (0..n - 1).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut w = v.clone();
        w.push(C64::default());
        let diff = levi_numeric(j, rho, &zero, &w)? - levi_numeric(&standard, rho, &zero, &w)?;
        defect = defect.max((diff - levi_correction(j, &v)).abs());
    }
    Ok(Outcome::ok(
        vec![
            Check::new("pseudoconvexity_margin", margin, Relation::Above, 0.0),
            Check::new("correction_identity", defect, Relation::AtMost, cfg.tolerances.levi),
        ],
        json!({ "levi_eigenvalues": ev }),
    ))
}

fn normalize(cfg: &ScenarioConfig, j: &AcsModel, rho: &HypersurfaceModel) -> crate::Result<Outcome> {
    let zero = vec![C64::default(); cfg.n];
    let (before, _) = pseudoconvexity_margin(j, rho, &zero)?;
    let out = normalize_to_standard_form(j, rho)?;
    let (after, ev) = pseudoconvexity_margin(&out.structure, &out.hypersurface, &zero)?;
    let sf = is_standard_form(&out.structure, &out.hypersurface, 1e-12);
    Ok(Outcome::ok(
        vec![
            Check::new("standard_form_violations", sf.violations.len() as f64, Relation::Equals, 0.0),
            Check::new("pseudoconvexity_margin_before", before, Relation::Above, 0.0),
            Check::new("pseudoconvexity_margin_after", after, Relation::Above, 0.0),
        ],
        json!({
            "violations": sf.violations,
            "levi_eigenvalues": ev,
            "osculating_a": osculating_matrix(&out.structure, &out.hypersurface),
            "pair": explicit_spec(&out.structure, &out.hypersurface),
            "chart": out.chart.iter().map(terms_of).collect::<Vec<_>>(),
        }),
    ))
}

fn model_problem(cfg: &ScenarioConfig, j: &AcsModel, rho: &HypersurfaceModel) -> crate::Result<ModelProblem> {
    let a = osculating_pair(j, rho)?.a;
    ModelProblem::new(a, cfg.cap.unwrap_or(3), GCoupling::LiftConsistent)
}

fn stationarity(rep: &StationarityReport) -> f64 {
    rep.base.max_residual.max(rep.lift.max_residual).max(rep.conormal.max_residual)
}

fn write_disc_samples(
    path: Option<&Path>,
    fd: &LiftedDisc,
    j: &AcsModel,
    rho: &HypersurfaceModel,
    grid: &SampleGrid,
) -> crate::Result<Value> {
    match path {
        Some(p) => {
            let rows = emit_samples(fd, j, rho, grid, p)
                .map_err(|e| Error::Degenerate(format!("writing {}: {e}", p.display())))?;
            Ok(json!({ "path": p, "rows": rows }))
        }
        None => Ok(Value::Null),
    }
}

fn model(cfg: &ScenarioConfig, j: &AcsModel, rho: &HypersurfaceModel, samples: Option<&Path>) -> crate::Result<Outcome> {
    let p = model_problem(cfg, j, rho)?;
    let (jm, rm) = (p.structure(), HypersurfaceModel::siegel(cfg.n));
    let tol = cfg.tolerances.model;
    let mut checks = Vec::new();
    let mut discs = Vec::new();
    for (i, (a, lambda)) in cfg.base_points_c64().into_iter().enumerate() {
        let d = explicit_disc(&p, &BasePoint::new(a, lambda)?);
        let interior = model_pde_residual(&p, &d).iter().map(|m| m.max_abs_coeff()).fold(0.0, f64::max);
        let boundary = model_boundary_residual(&p, &d).max_abs();
        let rep = verify_stationary(&jm, &rm, &d, tol)?;
        checks.push(Check::new(format!("interior[{i}]"), interior, Relation::AtMost, tol));
        checks.push(Check::new(format!("boundary[{i}]"), boundary, Relation::AtMost, tol));
        checks.push(Check::new(format!("stationarity[{i}]"), stationarity(&rep), Relation::AtMost, tol));
        checks.push(Check::new(format!("multiplier[{i}]"), rep.min_multiplier, Relation::Above, 0.0));
        discs.push(d);
    }
    let written = match discs.first() {
        Some(d) => write_disc_samples(samples, d, &jm, &rm, &cfg.samples)?,
        None => Value::Null,
    };
    Ok(Outcome::ok(checks, json!({ "osculating_a": p.a(), "discs": discs, "samples": written })))
}

fn kernel(cfg: &ScenarioConfig, j: &AcsModel, rho: &HypersurfaceModel) -> crate::Result<Outcome> {
    let p = model_problem(cfg, j, rho)?;
    let expected = (4 * cfg.n) as f64;
    let mut checks = Vec::new();
    let mut details = Vec::new();
    for (i, (a, lambda)) in cfg.base_points_c64().into_iter().enumerate() {
        let bp = BasePoint::new(a, lambda)?;
        let s = independence_spectrum(&kernel_basis(&p, &bp)?);
        let smax = s.iter().copied().fold(0.0, f64::max);
        let rank = s.iter().filter(|&&v| v > cfg.tolerances.rank * smax).count();
        let op = operator_spectrum(&p, &bp)?;
        checks.push(Check::new(format!("rank[{i}]"), rank as f64, Relation::Equals, expected));
        checks.push(Check::new(format!("nullity[{i}]"), op.nullity as f64, Relation::Equals, expected));
        checks.push(Check::new(
            format!("surjectivity[{i}]"),
            op.surjectivity_defect,
            Relation::AtMost,
            cfg.tolerances.surjectivity,
        ));
        details.push(json!({
            "rank": rank,
            "kernel_spectrum": s,
            "nullity": op.nullity,
            "gap_ratio": op.gap_ratio,
            "surjectivity_defect": op.surjectivity_defect,
        }));
    }
    Ok(Outcome::ok(checks, json!({ "base_points": details })))
}

fn continuation(
    cfg: &ScenarioConfig,
    j: AcsModel,
    rho: HypersurfaceModel,
    samples: Option<&Path>,
) -> crate::Result<Outcome> {
    let tol = &cfg.tolerances;
    let mut prob = ContinuationProblem::new(j, rho, cfg.point_c64(), cfg.direction_c64(), cfg.cap.unwrap_or(10));
    prob.schedule = cfg.schedule.clone().unwrap_or_default();
    prob.options.newton.newton_tol = tol.newton;
    prob.options.newton.residual_tol = tol.residual;
    prob.options.verify_tol = tol.verify;
    let (res, mut trace) = continue_disc_traced(&prob);
    // Intermediate discs are large; the final one is reported separately.
    for s in &mut trace.steps {
        s.disc = None;
    }
    match res {
        Ok(r) => {
            let checks = vec![
                Check::new("stationarity", stationarity(&r.report), Relation::AtMost, tol.verify),
                Check::new("multiplier", r.report.min_multiplier, Relation::Above, 0.0),
                Check::new("center_error", r.center_error, Relation::AtMost, tol.center),
                Check::new("tangency_angle", r.tangency_angle, Relation::AtMost, tol.angle),
            ];
            let written = write_disc_samples(samples, &r.disc, &prob.structure, &prob.hypersurface, &cfg.samples)?;
            Ok(Outcome::ok(
                checks,
                json!({ "trace": trace, "stationarity": r.report, "disc": r.disc, "samples": written }),
            ))
        }
        Err(e) => Ok(Outcome {
            checks: Vec::new(),
            details: json!({ "trace": trace }),
            error: Some((exit_code_for(&e), e.to_string())),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ScenarioConfig {
        parse_config(text).unwrap()
    }

    #[test]
    fn model_command_on_the_plane_model() {
        let r = run_scenario(Command::Model, &cfg(r#"{"n": 2}"#), None);
        assert!(r.pass, "{}", r.to_json());
        assert_eq!(r.exit_code, EXIT_PASS);
        for c in r.checks.iter().filter(|c| c.relation == Relation::AtMost) {
            assert!(c.value <= 1e-12, "{c:?}");
        }
    }

    #[test]
    fn kernel_command_reports_rank_twelve_in_dimension_three() {
        let r = run_scenario(Command::Kernel, &cfg(r#"{"n": 3, "seed": 2, "pair": {"kind": "perturbed", "scale": 0.1}}"#), None);
        assert!(r.pass, "{}", r.to_json());
        assert_eq!(r.details["base_points"][0]["rank"], 12);
    }

    #[test]
    fn malformed_matrix_is_a_validation_failure() {
        let r = run_scenario(
            Command::Model,
            &cfg(r#"{"n": 3, "pair": {"kind": "osculating", "a": [[[0,0],[1,0]],[[1,0],[0,0]]]}}"#),
            None,
        );
        assert_eq!(r.exit_code, EXIT_FAIL);
        assert!(r.error.unwrap().contains("not antisymmetric"));
        assert!(r.config.is_none());
    }

    #[test]
    fn non_standard_pair_is_rejected_by_the_model_command() {
        let text = r#"{"n": 2, "pair": {"kind": "explicit", "k": [[[0.5, 0]]]}}"#;
        let v = run_scenario(Command::Validate, &cfg(text), None);
        assert!(v.pass, "{}", v.to_json());
        assert_eq!(v.details["standard_form"], false);
        let m = run_scenario(Command::Model, &cfg(text), None);
        assert_eq!(m.exit_code, EXIT_FAIL);
        assert!(m.error.unwrap().contains("standard form"));
    }

    #[test]
    fn normalize_output_feeds_back_as_a_standard_pair() {
        let text = r#"{"n": 3, "pair": {"kind": "explicit", "k": [[[0.3, 0.1], [0, 0]], [[0, 0], [0, 0]]],
            "h": [[[2, 0], [0, 0]], [[0, 0], [1, 0]]],
            "l_mixed": [[[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]],
                        [[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]],
                        [[[0.2,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]],[[0,0],[0,0],[0,0]]]]}}"#;
        let r = run_scenario(Command::Normalize, &cfg(text), None);
        assert!(r.pass, "{}", r.to_json());
        let pair: PairSpec = serde_json::from_value(r.details["pair"].clone()).unwrap();
        let again = ScenarioConfig { n: 3, pair, ..ScenarioConfig::default() };
        let v = run_scenario(Command::Validate, &again, None);
        assert_eq!(v.details["standard_form"], true, "{}", v.to_json());
    }

    #[test]
    fn csv_report_has_one_row_per_check() {
        let r = run_scenario(Command::Levi, &cfg(r#"{"n": 3, "seed": 4, "pair": {"kind": "perturbed", "scale": 0.2}}"#), None);
        assert!(r.pass, "{}", r.to_json());
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 1 + r.checks.len());
        assert!(csv.lines().nth(2).unwrap().starts_with("correction_identity,"));
    }
}
