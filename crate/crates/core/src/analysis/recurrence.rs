//! Least-squares fit of `∇T = α ⊗ T`.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::Stencil;
use crate::manifold::ManifoldSpec;
use crate::tfamily::{t_from_geometry, TCoeffs};

use super::AnalysisError;

/// `|T|` below this counts as `T = 0`.
const T_ZERO: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RecurrenceFit {
    /// Fitted `α(e_u)` per point.
    pub alpha_form: Vec<Vec<f64>>,
    /// `|∇T - α ⊗ T|` per point (`|∇T|` where `T = 0`).
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub nabla_norms: Vec<f64>,
    pub t_norms: Vec<f64>,
    /// `|∇T| < 1e-6 (1 + |T|)` at every point.
    pub is_symmetric: bool,
    /// `T = 0` at some point.
    pub undefined: bool,
    /// Max spread of each component of `α` across points.
    pub alpha_variation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub fn recurrence_fit(spec: &ManifoldSpec, points: &[Vec<f64>], c: &TCoeffs) -> Result<RecurrenceFit, AnalysisError> {
    let n = spec.dim;
    let per: Vec<(Vec<f64>, f64, f64, f64)> = points
        .par_iter()
        .map(|p| {
            let st = Stencil::new(spec, p)?;
            let t = t_from_geometry(&st.center, c);
            let nabla = st.covariant_derivative(|geo| t_from_geometry(geo, c));
            let block = t.data.len();
            let tt: f64 = t.data.iter().map(|x| x * x).sum();
            let t_norm = tt.sqrt();
            let nabla_norm = nabla.residual_norm();
            if t_norm < T_ZERO {
                return Ok((vec![0.0; n], nabla_norm, nabla_norm, t_norm));
            }
            let alpha: Vec<f64> = (0..n)
                .map(|u| nabla.data[u * block..(u + 1) * block].iter().zip(&t.data).map(|(x, y)| x * y).sum::<f64>() / tt)
                .collect();
            let res = (0..n)
                .flat_map(|u| {
                    let (nabla, t, alpha) = (&nabla, &t, &alpha);
                    (0..block).map(move |i| (nabla.data[u * block + i] - alpha[u] * t.data[i]).powi(2))
                })
                .sum::<f64>()
                .sqrt();
            Ok((alpha, res, nabla_norm, t_norm))
        })
        .collect::<Result<_, AnalysisError>>()?;
    let alpha_form: Vec<Vec<f64>> = per.iter().map(|x| x.0.clone()).collect();
    let residuals: Vec<f64> = per.iter().map(|x| x.1).collect();
    let nabla_norms: Vec<f64> = per.iter().map(|x| x.2).collect();
    let t_norms: Vec<f64> = per.iter().map(|x| x.3).collect();
    let is_symmetric = nabla_norms.iter().zip(&t_norms).all(|(d, t)| *d < 1e-6 * (1.0 + t));
    let undefined = t_norms.iter().any(|t| *t < T_ZERO);
    let alpha_variation = (0..n)
        .map(|u| {
            let vals = alpha_form.iter().map(|a| a[u]);
            let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if alpha_form.is_empty() {
                0.0
            } else {
                hi - lo
            }
        })
        .fold(0.0, f64::max);
    Ok(RecurrenceFit {
        max_residual: crate::report::max_residual(&residuals),
        alpha_form,
        residuals,
        nabla_norms,
        t_norms,
        is_symmetric,
        undefined,
        alpha_variation,
        note: undefined.then(|| "recurrence undefined".to_string()),
    })
}
