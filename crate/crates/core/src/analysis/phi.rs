//! Constant φ-sectional curvature of a contact metric fixture.

use crate::curvature::GeometryAtPoint;
use crate::manifold::ManifoldSpec;
use crate::nullity::{eta_einstein_fit, structure_at};
use crate::report::{CheckReport, TOL_EXACT};

use super::{diff_norm, standing, AnalysisError, TheoremCheckResult};

/// `4R(X,Y)Z` split as `A + c B` with `A`, `B` independent of `c`, `[d,a,b,cc]`.
fn h1_parts(geo: &GeometryAtPoint, xi: &[f64], eta: &[f64], phi: &[f64], k: f64) -> (Vec<f64>, Vec<f64>) {
    let n = geo.dim();
    let g = |a: usize, b: usize| geo.metric.g[(a, b)];
    let dl = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    // g(e_a, φ e_b)
    let gphi = |a: usize, b: usize| (0..n).map(|d| g(a, d) * phi[d * n + b]).sum::<f64>();
    let size = n * n * n * n;
    let (mut base, mut slope) = (vec![0.0; size], vec![0.0; size]);
    for d in 0..n {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let i = ((d * n + a) * n + b) * n + c;
                    let t1 = g(b, c) * dl(d, a) - g(a, c) * dl(d, b);
                    let t2 = eta[a] * eta[c] * dl(d, b) - eta[b] * eta[c] * dl(d, a) + g(a, c) * eta[b] * xi[d]
                        - g(b, c) * eta[a] * xi[d];
                    let t3 = 2.0 * gphi(a, b) * phi[d * n + c] + gphi(a, c) * phi[d * n + b] - gphi(b, c) * phi[d * n + a];
                    // (c+3) t1 + (c+3-4k) t2 + (c-1) t3
                    base[i] = 3.0 * t1 + (3.0 - 4.0 * k) * t2 - t3;
                    slope[i] = t1 + t2 + t3;
                }
            }
        }
    }
    (base, slope)
}

/// Fits `c` from `R`, then checks the curvature formula, the Ricci tensor
/// `4S = E1 g - E2 η⊗η` and `r = α n + β ε`.
pub fn phi_sectional_consistency(spec: &ManifoldSpec, geos: &[GeometryAtPoint]) -> Result<TheoremCheckResult, AnalysisError> {
    let (k, standing_ok) = standing(spec, geos)?;
    let n = spec.dim;
    let nf = n as f64;
    let mut parts = Vec::new();
    let (mut num, mut den) = (0.0, 0.0);
    for geo in geos {
        let st = structure_at(spec, geo)?;
        let phi = spec
            .phi_at(&geo.point)
            .map_err(crate::curvature::GeometryError::from)?
            .ok_or_else(|| AnalysisError::Missing(format!("{} has no phi", spec.name)))?;
        let phi: Vec<f64> = phi.transpose().as_slice().to_vec();
        let (base, slope) = h1_parts(geo, &st.xi, &st.eta, &phi, k);
        let four_r: Vec<f64> = geo.riemann13.data.iter().map(|x| 4.0 * x).collect();
        for i in 0..four_r.len() {
            num += (four_r[i] - base[i]) * slope[i];
            den += slope[i] * slope[i];
        }
        parts.push((st, base, slope, four_r));
    }
    let c = if den > 0.0 { num / den } else { f64::NAN };
    let e1 = (nf - 1.0) * (c + 3.0) - (c + 3.0 - 4.0 * k) + 3.0 * (c - 1.0);
    let e2 = (nf - 2.0) * (c + 3.0 - 4.0 * k) + 3.0 * (c - 1.0);
    let c_semisym = (4.0 * k * nf * nf - 12.0 * nf * k - 3.0 * nf * nf + 8.0 * k + 12.0 * nf - 9.0) / (nf * nf - 1.0);

    let mut th = TheoremCheckResult::new("phi-sectional", standing_ok, 0.0);
    let count = geos.len();
    th.constants.insert("c".into(), vec![c; count]);
    th.constants.insert("E1".into(), vec![e1; count]);
    th.constants.insert("E2".into(), vec![e2; count]);
    th.constants.insert("cSemisymmetric".into(), vec![c_semisym; count]);
    let (mut h1, mut h2, mut r1) = (vec![], vec![], vec![]);
    for (geo, (st, base, slope, four_r)) in geos.iter().zip(&parts) {
        let want: Vec<f64> = base.iter().zip(slope).map(|(b, s)| b + c * s).collect();
        h1.push(diff_norm(four_r, &want));
        let s4: Vec<f64> = geo.ricci.data.iter().map(|x| 4.0 * x).collect();
        let want: Vec<f64> = (0..n * n)
            .map(|i| e1 * geo.metric.g[(i / n, i % n)] - e2 * st.eta[i / n] * st.eta[i % n])
            .collect();
        h2.push(diff_norm(&s4, &want));
        let fit = eta_einstein_fit(geo, st, Some(k));
        r1.push(fit.scalar_consistency.abs());
    }
    th.gated(CheckReport::new("4R from phi-sectional curvature c", "eq-H-1", h1, TOL_EXACT));
    th.gated(CheckReport::new("4S = E1 g - E2 eta x eta", "eq-H-2", h2, TOL_EXACT));
    th.gated(CheckReport::new("r = alpha n + beta eps", "eq-1", r1, TOL_EXACT));
    Ok(th)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{builtin, sample_points, Strategy};
    use crate::nullity::geometries;

    #[test]
    fn sasakian_c_is_minus_three() {
        let s = builtin("sasakianR3", 3).unwrap();
        let pts = sample_points(&s, 4, Strategy::Random, 2).unwrap();
        let g = geometries(&s, &pts.points).unwrap();
        let th = phi_sectional_consistency(&s, &g).unwrap();
        assert!((th.constants["c"][0] + 3.0).abs() < 1e-8);
        assert!((th.constants["E1"][0] + 8.0).abs() < 1e-7);
        assert!((th.constants["E2"][0] + 16.0).abs() < 1e-7);
        assert_eq!(th.verdict(), Some(true), "{th:?}");
    }

    #[test]
    fn missing_phi_is_an_error() {
        let s = builtin("sphereStereo", 3).unwrap();
        let pts = sample_points(&s, 1, Strategy::Random, 2).unwrap();
        let g = geometries(&s, &pts.points).unwrap();
        assert!(phi_sectional_consistency(&s, &g).is_err());
    }
}
