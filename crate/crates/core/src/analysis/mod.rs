//! Flatness, semisymmetry, Ricci-semisymmetry, recurrence and the
//! theorem-level identities built on them.

mod derivation;
mod flatness;
mod master;
mod matrix;
mod phi;
mod recurrence;
mod ricci;

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::curvature::{GeometryAtPoint, GeometryError};
use crate::manifold::ManifoldSpec;
use crate::nullity::{hypothesis_holds, structure_at, working_k};
use crate::report::CheckReport;
use crate::tfamily::TCoeffs;

pub use derivation::{
    bracket_derivation, derivation_apply, max_bracket_residual, max_slot_residual, operator_at, operator_derivation,
    operator_on_basis,
};
pub use flatness::{xi_flat_residual, FlatnessCase};
pub use master::{semisym_residual, theorem_master_identity_check, TOL_MASTER, TOL_SEMISYM};
pub use matrix::{presets_for, scan_matrix, MatrixCell, MatrixReport};
pub use phi::phi_sectional_consistency;
pub use recurrence::{recurrence_fit, RecurrenceFit};
pub use ricci::{ricci_semisym_residual, RicciTarget, TOL_RICCI};

/// Denominator guard for theorem constants.
pub const DENOM_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("rank mismatch: {0}")]
    Rank(String),
    #[error("{0}")]
    Missing(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase", tag = "type")]
pub enum DerivationKind {
    XiFlat,
    Semisym,
    RicciSemisym { target: String },
    Symmetric,
    Recurrent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DerivationResidual {
    pub kind: DerivationKind,
    pub max_residual: f64,
    pub per_point: Vec<f64>,
    pub a: TCoeffs,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<TCoeffs>,
}

impl DerivationResidual {
    fn new(kind: DerivationKind, per_point: Vec<f64>, a: &TCoeffs, b: Option<&TCoeffs>) -> Self {
        DerivationResidual {
            kind,
            max_residual: crate::report::max_residual(&per_point),
            per_point,
            a: *a,
            b: b.cloned(),
        }
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual < tol
    }
}

/// Conclusion checks of one theorem. `checks` is empty and `withheld`
/// lists the skipped identities when the hypothesis fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TheoremCheckResult {
    pub theorem_id: String,
    pub hypothesis_satisfied: bool,
    pub hypothesis_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
    /// Per point values of the derived constants.
    pub constants: BTreeMap<String, Vec<f64>>,
    pub checks: Vec<CheckReport>,
    pub withheld: Vec<String>,
}

impl TheoremCheckResult {
    fn new(id: &str, hypothesis_satisfied: bool, hypothesis_residual: f64) -> Self {
        TheoremCheckResult {
            theorem_id: id.to_string(),
            hypothesis_satisfied,
            hypothesis_residual,
            case: None,
            constants: BTreeMap::new(),
            checks: Vec::new(),
            withheld: Vec::new(),
        }
    }

    /// Adds `report` when the hypothesis holds, else records it as withheld.
    fn gated(&mut self, report: CheckReport) {
        if self.hypothesis_satisfied {
            self.checks.push(report);
        } else {
            self.withheld.push(report.paper_eq);
        }
    }

    /// `None` when the hypothesis fails.
    pub fn verdict(&self) -> Option<bool> {
        self.hypothesis_satisfied.then(|| self.checks.iter().all(|c| c.pass))
    }

    pub fn check(&self, paper_eq: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.paper_eq == paper_eq)
    }
}

/// Component arrays at one point, flattened row-major.
pub(crate) struct Local {
    pub n: usize,
    pub eps: f64,
    pub k: f64,
    pub r: f64,
    pub g: Vec<f64>,
    pub s: Vec<f64>,
    pub s2: Vec<f64>,
    pub ee: Vec<f64>,
    pub eta: Vec<f64>,
    pub xi: Vec<f64>,
}

impl Local {
    pub fn new(spec: &ManifoldSpec, geo: &GeometryAtPoint, k: f64) -> Result<Self, GeometryError> {
        let n = geo.dim();
        let st = structure_at(spec, geo)?;
        let s2 = crate::curvature::s_power(geo, 2).data;
        Ok(Local {
            n,
            eps: st.epsilon,
            k,
            r: geo.scalar,
            g: geo.metric.g.transpose().as_slice().to_vec(),
            s: geo.ricci.data.clone(),
            s2,
            ee: (0..n * n).map(|i| st.eta[i / n] * st.eta[i % n]).collect(),
            eta: st.eta,
            xi: st.xi,
        })
    }
}

/// Slots of a rank-4 array indexed `[U,V,W,X]`.
pub(crate) const U: usize = 0;
pub(crate) const V: usize = 1;
pub(crate) const W: usize = 2;
pub(crate) const X: usize = 3;

/// `out[U,V,W,X] += c · m1[i1,j1] · m2[i2,j2]` with slot indices into `[U,V,W,X]`.
pub(crate) fn add_pair(out: &mut [f64], n: usize, c: f64, m1: &[f64], (i1, j1): (usize, usize), m2: &[f64], (i2, j2): (usize, usize)) {
    if c == 0.0 {
        return;
    }
    let mut idx = [0usize; 4];
    for (k, o) in out.iter_mut().enumerate() {
        idx[0] = k / (n * n * n);
        idx[1] = (k / (n * n)) % n;
        idx[2] = (k / n) % n;
        idx[3] = k % n;
        *o += c * m1[idx[i1] * n + idx[j1]] * m2[idx[i2] * n + idx[j2]];
    }
}

pub(crate) fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn ratf(c: &TCoeffs, f: impl Fn(&TCoeffs) -> num_rational::Rational64) -> f64 {
    f(c).to_f64().unwrap_or(f64::NAN)
}

/// `(k, standing hypothesis)` for a sample.
pub(crate) fn standing(spec: &ManifoldSpec, geos: &[GeometryAtPoint]) -> Result<(f64, bool), GeometryError> {
    Ok((working_k(spec, geos)?.0, hypothesis_holds(spec, geos)?))
}
