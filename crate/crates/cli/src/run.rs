use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use tcurv_core::analysis::{
    phi_sectional_consistency, ricci_semisym_residual, scan_matrix, semisym_residual, theorem_master_identity_check,
    xi_flat_residual, AnalysisError, DerivationResidual, RicciTarget, TheoremCheckResult, TOL_RICCI, TOL_SEMISYM,
};
use tcurv_core::curvature::{GeometryAtPoint, GeometryError};
use tcurv_core::manifold::{builtin, load_spec, sample_points, ManifoldSpec, SampleSet, SpecError, Strategy};
use tcurv_core::nullity::{
    geometries, lemma_gct_check, nullity_check, structure_gate, structure_identity_check, verify_nullity, working_k,
    hypothesis_holds, NullityReport,
};
use tcurv_core::report::{CheckReport, NOTE_IMPLEMENTATION_DEFECT, NOTE_PAPER_REFUTED, TOL_EXACT};
use tcurv_core::tfamily::{preset_coeffs_default, PresetError, PresetId, TCoeffs};

use crate::config::{Command, MatrixArgs, RunArgs, Suite, VerifyArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PresetError> for CliError {
    fn from(e: PresetError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::Input(format!("geometry evaluation failed: {e}"))
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Geometry(g) => g.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

fn internal(e: impl std::fmt::Display) -> CliError {
    CliError::Internal(e.to_string())
}

/// A finished report and whether every check in it passed.
pub struct Outcome {
    pub report: Value,
    pub pass: bool,
}

pub fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::ListPresets { dim, .. } => list_presets(*dim),
        Command::Verify(args) => verify(args),
        Command::Matrix(args) => matrix(args),
        Command::Describe { builtin: name, dim, .. } => {
            let spec = builtin(name, *dim)?;
            let mut report = serde_json::Map::new();
            report.insert("command".into(), "describe".into());
            report.insert("spec".into(), spec.to_json());
            Ok(Outcome {
                report: Value::Object(report),
                pass: true,
            })
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct PresetRow {
    name: &'static str,
    title: &'static str,
    formulas: [&'static str; 8],
    /// Coefficients at the requested dimension.
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<TCoeffs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    /// Free parameters filled with the built-in defaults.
    default_free: bool,
}

fn list_presets(n: usize) -> Result<Outcome, CliError> {
    let rows: Vec<PresetRow> = PresetId::ALL
        .iter()
        .map(|&id| {
            let (values, error) = match preset_coeffs_default(id, n) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            };
            PresetRow {
                name: id.name(),
                title: id.title(),
                formulas: id.formulas(),
                values,
                error,
                default_free: id.has_free_params(),
            }
        })
        .collect();
    let report = serde_json::json!({ "command": "list-presets", "dimension": n, "presets": rows });
    Ok(Outcome { report, pass: true })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ManifoldInfo {
    name: String,
    dimension: usize,
    epsilon: i8,
    declared_k: Option<f64>,
    working_k: f64,
    k_estimated: bool,
    /// Structure gate and nullity at the working `k` hold at every sample.
    hypothesis_satisfied: bool,
}

#[derive(Serialize)]
struct Selection {
    preset: Option<&'static str>,
    coeffs: TCoeffs,
}

#[derive(Serialize)]
struct DerivationCheck {
    id: String,
    tol: f64,
    pass: bool,
    residual: DerivationResidual,
}

impl DerivationCheck {
    fn new(id: impl Into<String>, residual: DerivationResidual, tol: f64) -> Self {
        DerivationCheck {
            id: id.into(),
            tol,
            pass: residual.passes(tol),
            residual,
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct VerifyReport {
    command: &'static str,
    suite: &'static str,
    manifold: ManifoldInfo,
    samples: SampleSet,
    preset_a: Selection,
    preset_b: Selection,
    structure_gate: CheckReport,
    nullity: NullityReport,
    checks: Vec<CheckReport>,
    derivations: Vec<DerivationCheck>,
    theorems: Vec<TheoremCheckResult>,
    pass: bool,
}

struct Loaded {
    spec: ManifoldSpec,
    samples: SampleSet,
    geos: Vec<GeometryAtPoint>,
}

fn load(run: &RunArgs) -> Result<Loaded, CliError> {
    if let Some(t) = run.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Input(format!("--tol must be a positive number, got {t}")));
        }
    }
    let spec = match (&run.builtin, &run.spec) {
        (Some(name), None) => builtin(name, run.dim)?,
        (None, Some(path)) => load_spec(&read(path)?)?,
        _ => return Err(CliError::Input("exactly one of --builtin and --spec is required".into())),
    };
    let samples = sample_points(&spec, run.samples, Strategy::Random, run.seed)?;
    let gate = structure_gate(&spec, &samples.points);
    if !gate.pass {
        return Err(CliError::Input(format!(
            "structure gate failed (eq-cond: g(xi,xi) = epsilon, eta(xi) = 1): max residual {:e} at the sampled points",
            gate.max_residual
        )));
    }
    let geos = geometries(&spec, &samples.points)?;
    Ok(Loaded { spec, samples, geos })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn select(preset: Option<&str>, coeffs: Option<&str>, n: usize) -> Result<Selection, CliError> {
    if let Some(list) = coeffs {
        return Ok(Selection {
            preset: None,
            coeffs: TCoeffs::parse_list(list)?,
        });
    }
    let id: PresetId = preset.unwrap_or("R").parse()?;
    Ok(Selection {
        preset: Some(id.name()),
        coeffs: preset_coeffs_default(id, n)?,
    })
}

/// Re-evaluates `rep` against `tol`, dropping failure notes that no longer apply.
fn retol(rep: &mut CheckReport, tol: f64) {
    rep.tol = tol;
    rep.pass = rep.max_residual < tol;
    let failure_note = matches!(rep.note.as_deref(), Some(NOTE_IMPLEMENTATION_DEFECT | NOTE_PAPER_REFUTED));
    if rep.pass && failure_note {
        rep.note = None;
    }
}

fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let (suite, pa, pb) = match &args.semisym {
        Some(pair) => (Suite::Semisym, Some(pair[0].as_str()), Some(pair[1].as_str())),
        None => (args.suite, args.preset_a.as_deref(), args.preset_b.as_deref()),
    };
    let Loaded { spec, samples, geos } = load(&args.run)?;
    let n = spec.dim;
    let a = select(pa, args.coeffs_a.as_deref(), n)?;
    let b = select(pb, args.coeffs_b.as_deref(), n)?;
    let (k, k_estimated) = working_k(&spec, &geos)?;
    let hypothesis = hypothesis_holds(&spec, &geos)?;
    let gate = structure_gate(&spec, &samples.points);
    let nullity = verify_nullity(&spec, &geos)?;

    let mut checks = Vec::new();
    let mut derivations = Vec::new();
    let mut theorems = Vec::new();
    if suite.includes(Suite::Structure) {
        checks.push(nullity_check(&spec, &geos)?);
        checks.extend(structure_identity_check(&spec, &geos)?);
    }
    if suite.includes(Suite::Lemma) {
        checks.extend(lemma_gct_check(&spec, &geos, &a.coeffs)?);
    }
    if suite.includes(Suite::Flatness) {
        let (res, th) = xi_flat_residual(&spec, &geos, &a.coeffs)?;
        derivations.push(DerivationCheck::new("xi-flat", res, TOL_EXACT));
        theorems.extend(th);
        if spec.phi.is_some() {
            theorems.push(phi_sectional_consistency(&spec, &geos)?);
        }
    }
    if suite.includes(Suite::Semisym) {
        let res = semisym_residual(&spec, &geos, &a.coeffs, &b.coeffs);
        derivations.push(DerivationCheck::new("semisym", res, TOL_SEMISYM));
        theorems.extend(theorem_master_identity_check(&spec, &geos, &a.coeffs, &b.coeffs)?);
    }
    if suite.includes(Suite::Ricci) {
        for target in [RicciTarget::S, RicciTarget::STb(b.coeffs)] {
            let id = match target {
                RicciTarget::S => "ricci-semisym-S",
                RicciTarget::STb(_) => "ricci-semisym-STb",
            };
            let (res, th) = ricci_semisym_residual(&spec, &geos, &a.coeffs, &target)?;
            derivations.push(DerivationCheck::new(id, res, TOL_RICCI));
            theorems.extend(th);
        }
    }

    if let Some(tol) = args.run.tol {
        checks.iter_mut().for_each(|c| retol(c, tol));
        for d in &mut derivations {
            d.tol = tol;
            d.pass = d.residual.passes(tol);
        }
        for th in &mut theorems {
            th.checks.iter_mut().for_each(|c| retol(c, tol));
        }
    }

    let pass = gate.pass
        && checks.iter().all(|c| c.pass)
        && derivations.iter().all(|d| d.pass)
        && theorems.iter().all(|t| t.verdict() != Some(false));
    let report = VerifyReport {
        command: "verify",
        suite: suite.name(),
        manifold: ManifoldInfo {
            name: spec.name.clone(),
            dimension: n,
            epsilon: spec.epsilon,
            declared_k: spec.k,
            working_k: k,
            k_estimated,
            hypothesis_satisfied: hypothesis,
        },
        samples,
        preset_a: a,
        preset_b: b,
        structure_gate: gate,
        nullity,
        checks,
        derivations,
        theorems,
        pass,
    };
    Ok(Outcome {
        report: serde_json::to_value(&report).map_err(internal)?,
        pass,
    })
}

fn matrix(args: &MatrixArgs) -> Result<Outcome, CliError> {
    let Loaded { spec, samples, geos } = load(&args.run)?;
    let m = scan_matrix(&spec, &geos, args.run.tol)?;
    let pass = m.passed == m.cells;
    let report = serde_json::json!({
        "command": "matrix",
        "samples": samples,
        "matrix": m,
        "pass": pass,
    });
    Ok(Outcome { report, pass })
}
