//! `T(X,Y)ξ = 0` and its consequences for the Ricci tensor.

use serde::Serialize;

use crate::curvature::GeometryAtPoint;
use crate::manifold::ManifoldSpec;
use crate::nullity::{eta_einstein_fit, structure_at, RicciClass};
use crate::report::{CheckReport, NOTE_PAPER_REFUTED, TOL_EXACT};
use crate::tfamily::{preset_coeffs_default, t_from_geometry, t_lowered, PresetId, TCoeffs};

use super::{diff_norm, ratf, standing, AnalysisError, DerivationKind, DerivationResidual, Local, TheoremCheckResult, DENOM_TOL};

/// Which branch of the flatness theorem a coefficient vector falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum FlatnessCase {
    /// `a4 != 0` and `a4 + (n-1)a7 != 0`
    EtaEinstein,
    /// `a4 = 0`, `a7 != 0`
    ScalarFixed,
    /// `a4 = a7 = 0`
    Degenerate,
    /// `a4 != 0` and `a4 + (n-1)a7 = 0`
    Indeterminate,
}

impl FlatnessCase {
    pub fn of(c: &TCoeffs, n: usize) -> Self {
        let [_, _, _, _, a4, _, _, a7] = c.as_f64();
        let m = n as f64 - 1.0;
        match (a4.abs() > DENOM_TOL, a7.abs() > DENOM_TOL) {
            (true, _) if (a4 + m * a7).abs() > DENOM_TOL => FlatnessCase::EtaEinstein,
            (true, _) => FlatnessCase::Indeterminate,
            (false, true) => FlatnessCase::ScalarFixed,
            (false, false) => FlatnessCase::Degenerate,
        }
    }

    fn label(self) -> &'static str {
        match self {
            FlatnessCase::EtaEinstein => "case 1",
            FlatnessCase::ScalarFixed => "case 2",
            FlatnessCase::Degenerate => "case 3",
            FlatnessCase::Indeterminate => "indeterminate",
        }
    }
}

/// `T(X,Y)ξ` as `[d,a,b]`.
fn t_xi(geo: &GeometryAtPoint, xi: &[f64], c: &TCoeffs) -> Vec<f64> {
    let n = geo.dim();
    let t = t_from_geometry(geo, c);
    let mut out = vec![0.0; n * n * n];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..n).map(|cc| t.data[i * n + cc] * xi[cc]).sum();
    }
    out
}

struct Constants {
    d1: Option<f64>,
    d2: Vec<f64>,
    d3: Vec<f64>,
}

fn constants(c: &TCoeffs, locals: &[Local]) -> Constants {
    let [a0, a1, a2, a3, a4, a5, a6, a7] = c.as_f64();
    let Some(l0) = locals.first() else {
        return Constants { d1: None, d2: vec![], d3: vec![] };
    };
    let n = l0.n;
    let m = n as f64 - 1.0;
    let sigma = ratf(c, |c| c.ricci_sum(n));
    let den1 = a4 + m * a7;
    let d1 = (den1.abs() > DENOM_TOL).then(|| -l0.k * m * sigma / den1);
    let (d2, d3) = if a4.abs() > DENOM_TOL {
        (
            locals.iter().map(|l| -(l.k * a0 + l.k * m * a1 + a7 * l.r) / a4).collect(),
            locals
                .iter()
                .map(|l| (l.k * a0 - m * l.k * (a2 + a3 + a5 + a6) + a7 * l.r) / (l.eps * a4))
                .collect(),
        )
    } else {
        (vec![], vec![])
    };
    Constants { d1, d2, d3 }
}

/// Residual of `T_a(X,Y)ξ` and the theorem checks it unlocks: the flatness
/// theorem (per case), the reconstruction of `T(X,Y)ξ` from an η-Einstein
/// Ricci tensor of the theorem's form, the η-Einstein form of
/// `T(X,Y,ξ,V)`, and the Ricci tensor of the ξ-conformally flat case.
pub fn xi_flat_residual(
    spec: &ManifoldSpec,
    geos: &[GeometryAtPoint],
    c: &TCoeffs,
) -> Result<(DerivationResidual, Vec<TheoremCheckResult>), AnalysisError> {
    let (k, standing_ok) = standing(spec, geos)?;
    let n = spec.dim;
    let m = n as f64 - 1.0;
    let locals: Vec<Local> = geos.iter().map(|g| Local::new(spec, g, k)).collect::<Result<_, _>>()?;
    let per_point: Vec<f64> = geos
        .iter()
        .zip(&locals)
        .map(|(geo, l)| t_xi(geo, &l.xi, c).iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    let residual = DerivationResidual::new(DerivationKind::XiFlat, per_point.clone(), c, None);
    let flat = standing_ok && residual.passes(TOL_EXACT);
    let case = FlatnessCase::of(c, n);
    let consts = constants(c, &locals);
    let sigma = ratf(c, |c| c.ricci_sum(n));
    let [a0, a1, a2, a3, a4, a5, a6, a7] = c.as_f64();
    let mut results = Vec::new();

    // flatness theorem
    let mut th = TheoremCheckResult::new("th-11", flat, residual.max_residual);
    th.case = Some(case.label().to_string());
    if let Some(d1) = consts.d1 {
        th.constants.insert("D1".into(), vec![d1; locals.len()]);
    }
    if !consts.d2.is_empty() {
        th.constants.insert("D2".into(), consts.d2.clone());
        th.constants.insert("D3".into(), consts.d3.clone());
    }
    match case {
        FlatnessCase::EtaEinstein => {
            let d1 = consts.d1.unwrap_or(f64::NAN);
            let s_res = locals
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let fit: Vec<f64> = (0..n * n).map(|j| consts.d2[i] * l.g[j] + consts.d3[i] * l.ee[j]).collect();
                    diff_norm(&l.s, &fit)
                })
                .collect();
            th.gated(CheckReport::new("S = D2 g + D3 eta x eta", "eq-xi-Tflat-6-11", s_res, TOL_EXACT));
            th.gated(CheckReport::new(
                "r = D1",
                "eq-r-11",
                locals.iter().map(|l| (l.r - d1).abs()).collect(),
                TOL_EXACT,
            ));
        }
        FlatnessCase::ScalarFixed => {
            let r_want = -k * sigma / a7;
            th.constants.insert("r".into(), vec![r_want; locals.len()]);
            th.gated(CheckReport::new(
                "r = -k(sum)/a7",
                "eq-T-r11-11",
                locals.iter().map(|l| (l.r - r_want).abs()).collect(),
                TOL_EXACT,
            ));
        }
        FlatnessCase::Degenerate => {
            th.gated(CheckReport::new(
                "k = 0 or coefficient sum = 0",
                "eq-T-r12-11",
                vec![(k * sigma).abs(); locals.len()],
                TOL_EXACT,
            ));
        }
        FlatnessCase::Indeterminate => {}
    }
    results.push(th);

    // reconstruction of T(X,Y)ξ from S = D2 g + D3 η⊗η
    if case == FlatnessCase::EtaEinstein {
        let d1 = consts.d1.unwrap_or(f64::NAN);
        let fit_res: Vec<f64> = locals
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let fit: Vec<f64> = (0..n * n).map(|j| consts.d2[i] * l.g[j] + consts.d3[i] * l.ee[j]).collect();
                diff_norm(&l.s, &fit)
            })
            .collect();
        let fit_max = crate::report::max_residual(&fit_res);
        let mut th = TheoremCheckResult::new("th-xi", standing_ok && fit_max < TOL_EXACT, fit_max);
        let res = geos
            .iter()
            .zip(&locals)
            .enumerate()
            .map(|(i, (geo, l))| {
                let (d2, d3) = (consts.d2[i], consts.d3[i]);
                let e = l.eps;
                let lhs = t_xi(geo, &l.xi, c);
                let cx = e * (k * a0 + k * m * a1 + a4 * d2 + a7 * d1);
                let cy = e * (-k * a0 + k * m * a2 + a5 * d2 - a7 * d1);
                let cg = k * m * a6 + a3 * d2;
                let cee = (a3 + a4 + a5) * d3;
                let rhs: Vec<f64> = (0..n * n * n)
                    .map(|idx| {
                        let (d, a, b) = (idx / (n * n), (idx / n) % n, idx % n);
                        let dl = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                        cx * l.eta[b] * dl(d, a)
                            + cy * l.eta[a] * dl(d, b)
                            + cg * l.g[a * n + b] * l.xi[d]
                            + cee * l.eta[a] * l.eta[b] * l.xi[d]
                    })
                    .collect();
                diff_norm(&lhs, &rhs)
            })
            .collect();
        th.gated(CheckReport::new("T(X,Y)xi from D1, D2, D3", "eq-RRR", res, TOL_EXACT));
        results.push(th);
    }

    // T(X,Y,ξ,V) on an η-Einstein manifold
    let fits: Vec<_> = geos
        .iter()
        .map(|geo| Ok(eta_einstein_fit(geo, &structure_at(spec, geo)?, Some(k))))
        .collect::<Result<_, AnalysisError>>()?;
    let eta_einstein = fits.iter().all(|f| f.classification != RicciClass::Neither);
    let fit_max = crate::report::max_residual(&fits.iter().map(|f| f.residual).collect::<Vec<_>>());
    let mut th = TheoremCheckResult::new("eta-einstein", standing_ok && eta_einstein, fit_max);
    th.constants.insert("alpha".into(), fits.iter().map(|f| f.alpha).collect());
    th.constants.insert("beta".into(), fits.iter().map(|f| f.beta).collect());
    let mut eq = [Vec::new(), Vec::new(), Vec::new(), Vec::new()];
    for ((geo, l), f) in geos.iter().zip(&locals).zip(&fits) {
        let (al, be, e) = (f.alpha, f.beta, l.eps);
        eq[0].push(f.scalar_consistency.abs());
        eq[1].push(f.k_consistency.unwrap_or(f64::NAN).abs());
        eq[2].push(f.scalar_k_consistency.unwrap_or(f64::NAN).abs());
        let t04 = t_lowered(geo, c);
        let c_y = e * (k * a0 + (al + be) * a1 + al * a4 + (k + al) * m * a7);
        let c_x = e * (-k * a0 + (al + be) * a2 + al * a5 - (k + al) * m * a7);
        let c_v = e * (al * a3 + (al + be) * a6);
        let c_e = e * be * (a3 + a4 + a5);
        let mut acc = 0.0;
        for x in 0..n {
            for y in 0..n {
                for v in 0..n {
                    let lhs: f64 = (0..n).map(|z| t04.get(&[x, y, z, v]) * l.xi[z]).sum();
                    let rhs = c_y * l.eta[y] * l.g[x * n + v]
                        + c_x * l.eta[x] * l.g[y * n + v]
                        + c_v * l.eta[v] * l.g[x * n + y]
                        + c_e * l.eta[x] * l.eta[y] * l.eta[v];
                    acc += (lhs - rhs).powi(2);
                }
            }
        }
        eq[3].push(acc.sqrt());
    }
    let [e1, e2, e3, exyxi] = eq;
    th.gated(CheckReport::new("r = alpha n + beta eps", "eq-1", e1, TOL_EXACT));
    th.gated(CheckReport::new("k(n-1) = alpha + beta eps", "eq-2", e2, TOL_EXACT));
    th.gated(CheckReport::new("r = (k + alpha)(n-1)", "eq-3", e3, TOL_EXACT));
    th.gated(CheckReport::new("T(X,Y,xi,V), eta-Einstein", "eq-T-XYxi", exyxi, TOL_EXACT).note_on_failure(NOTE_PAPER_REFUTED));
    results.push(th);

    // Ricci tensor of a ξ-conformally flat manifold
    if n >= 3 && preset_coeffs_default(PresetId::C, n).ok().as_ref() == Some(c) {
        let mut th = TheoremCheckResult::new("cor-c", flat, residual.max_residual);
        let res = locals
            .iter()
            .map(|l| {
                let p = l.r / m;
                let want: Vec<f64> = (0..n * n).map(|j| (p - k) * l.g[j] + l.eps * (n as f64 * k - p) * l.ee[j]).collect();
                diff_norm(&l.s, &want)
            })
            .collect();
        th.gated(CheckReport::new(
            "S = (r/(n-1) - k) g + eps (nk - r/(n-1)) eta x eta",
            "cor-c",
            res,
            TOL_EXACT,
        ));
        results.push(th);
    }
    Ok((residual, results))
}
