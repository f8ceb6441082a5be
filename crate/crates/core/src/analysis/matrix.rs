//! Full `(T_a,T_b)`, `(T_a,S)` and `(T_a,S_{T_b})` scans over the presets.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::GeometryAtPoint;
use crate::manifold::ManifoldSpec;
use crate::report::max_residual;
use crate::tensor::DenseTensor;
use crate::tfamily::{preset_coeffs_default, t_from_geometry, t_ricci, PresetId, TCoeffs};

use super::derivation::{max_bracket_residual, max_slot_residual};
use super::master::{master_displayed_residual, TOL_SEMISYM};
use super::ricci::{ricci_ts_display, TOL_RICCI};
use super::{standing, AnalysisError, Local};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MatrixCell {
    pub residual: f64,
    pub pass: bool,
    pub hypothesis_satisfied: bool,
    /// Residual of the identity the cell's semisymmetry implies; `None`
    /// when the cell does not pass.
    pub identity_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MatrixReport {
    pub manifold: String,
    pub dim: usize,
    pub presets: Vec<String>,
    pub tensor_tol: f64,
    pub ricci_tol: f64,
    /// Rows `a`, columns `b`.
    pub tensor: Vec<Vec<MatrixCell>>,
    /// `(T_a, S)` per row.
    pub ricci: Vec<MatrixCell>,
    /// Rows `a`, columns `b` of `(T_a, S_{T_b})`.
    pub ricci_t: Vec<Vec<MatrixCell>>,
    pub cells: usize,
    pub passed: usize,
}

impl MatrixReport {
    pub fn all_cells(&self) -> impl Iterator<Item = &MatrixCell> {
        self.tensor.iter().flatten().chain(&self.ricci).chain(self.ricci_t.iter().flatten())
    }

    pub fn tensor_cell(&self, a: PresetId, b: PresetId) -> Option<&MatrixCell> {
        let i = self.presets.iter().position(|p| p == a.name())?;
        let j = self.presets.iter().position(|p| p == b.name())?;
        Some(&self.tensor[i][j])
    }
}

/// Presets defined in dimension `n`, in table order.
pub fn presets_for(n: usize) -> Vec<(PresetId, TCoeffs)> {
    PresetId::ALL
        .iter()
        .filter_map(|&p| preset_coeffs_default(p, n).ok().map(|c| (p, c)))
        .collect()
}

struct PointData<'a> {
    geo: &'a GeometryAtPoint,
    local: Local,
    t: Vec<DenseTensor>,
    st: Vec<DenseTensor>,
}

enum Cell {
    Tensor(usize, usize),
    Ricci(usize),
    RicciT(usize, usize),
}

/// Runs every cell. `tol` overrides both cell tolerances.
pub fn scan_matrix(spec: &ManifoldSpec, geos: &[GeometryAtPoint], tol: Option<f64>) -> Result<MatrixReport, AnalysisError> {
    let (k, standing_ok) = standing(spec, geos)?;
    let n = spec.dim;
    let presets = presets_for(n);
    let coeffs: Vec<TCoeffs> = presets.iter().map(|p| p.1).collect();
    let r_coeffs = TCoeffs::from_ints([1, 0, 0, 0, 0, 0, 0, 0]);
    let data: Vec<PointData> = geos
        .par_iter()
        .map(|geo| {
            Ok(PointData {
                geo,
                local: Local::new(spec, geo, k)?,
                t: coeffs.iter().map(|c| t_from_geometry(geo, c)).collect(),
                st: coeffs.iter().map(|c| t_ricci(geo, c)).collect(),
            })
        })
        .collect::<Result<_, AnalysisError>>()?;
    let (tensor_tol, ricci_tol) = (tol.unwrap_or(TOL_SEMISYM), tol.unwrap_or(TOL_RICCI));
    let m = presets.len();
    let mut jobs = Vec::with_capacity(2 * m * m + m);
    jobs.extend((0..m * m).map(|i| Cell::Tensor(i / m, i % m)));
    jobs.extend((0..m).map(Cell::Ricci));
    jobs.extend((0..m * m).map(|i| Cell::RicciT(i / m, i % m)));

    let cells: Vec<MatrixCell> = jobs
        .par_iter()
        .map(|job| {
            let (per, cell_tol): (Vec<f64>, f64) = match *job {
                Cell::Tensor(i, j) => (data.iter().map(|d| max_bracket_residual(&d.t[i], &d.t[j])).collect(), tensor_tol),
                Cell::Ricci(i) => (data.iter().map(|d| max_slot_residual(&d.t[i], &d.geo.ricci)).collect(), ricci_tol),
                Cell::RicciT(i, j) => (data.iter().map(|d| max_slot_residual(&d.t[i], &d.st[j])).collect(), ricci_tol),
            };
            let residual = max_residual(&per);
            let pass = residual < cell_tol;
            let identity_residual = (pass && standing_ok).then(|| {
                let vals: Vec<f64> = data
                    .iter()
                    .map(|d| match *job {
                        Cell::Tensor(i, j) => master_displayed_residual(d.geo, &d.local, &coeffs[i], &coeffs[j]),
                        Cell::Ricci(i) => norm(&ricci_ts_display(&d.local, &coeffs[i].as_f64(), &r_coeffs.as_f64())),
                        Cell::RicciT(i, j) => norm(&ricci_ts_display(&d.local, &coeffs[i].as_f64(), &coeffs[j].as_f64())),
                    })
                    .collect();
                max_residual(&vals)
            });
            MatrixCell {
                residual,
                pass,
                hypothesis_satisfied: standing_ok,
                identity_residual,
            }
        })
        .collect();

    let mut it = cells.into_iter();
    let tensor: Vec<Vec<MatrixCell>> = (0..m).map(|_| it.by_ref().take(m).collect()).collect();
    let ricci: Vec<MatrixCell> = it.by_ref().take(m).collect();
    let ricci_t: Vec<Vec<MatrixCell>> = (0..m).map(|_| it.by_ref().take(m).collect()).collect();
    let mut report = MatrixReport {
        manifold: spec.name.clone(),
        dim: n,
        presets: presets.iter().map(|p| p.0.name().to_string()).collect(),
        tensor_tol,
        ricci_tol,
        tensor,
        ricci,
        ricci_t,
        cells: 0,
        passed: 0,
    };
    report.cells = report.all_cells().count();
    report.passed = report.all_cells().filter(|c| c.pass).count();
    Ok(report)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
