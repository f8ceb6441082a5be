//! Derivation actions of a (1,1) operator on tensors.

use crate::tensor::{DenseTensor, Variance};

use super::AnalysisError;

/// `B(X,Y)` of a `[d,a,b,c]` tensor as an operator matrix `op[d*n + c]`.
pub fn operator_at(b13: &DenseTensor, x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = b13.dim;
    let mut op = vec![0.0; n * n];
    for d in 0..n {
        for a in 0..n {
            for b in 0..n {
                let w = x[a] * y[b];
                if w == 0.0 {
                    continue;
                }
                for c in 0..n {
                    op[d * n + c] += w * b13.data[((d * n + a) * n + b) * n + c];
                }
            }
        }
    }
    op
}

/// `B(e_a,e_b)` read directly from the components.
pub fn operator_on_basis(b13: &DenseTensor, a: usize, b: usize) -> Vec<f64> {
    let n = b13.dim;
    let mut op = vec![0.0; n * n];
    for d in 0..n {
        for c in 0..n {
            op[d * n + c] = b13.data[((d * n + a) * n + b) * n + c];
        }
    }
    op
}

/// `(B(X,Y)·K)(X_1..X_s) = -Σ_j K(.., B(X,Y)X_j, ..)` for a covariant `K`.
pub fn derivation_apply(b13: &DenseTensor, x: &[f64], y: &[f64], k: &DenseTensor) -> Result<DenseTensor, AnalysisError> {
    if b13.variance != [Variance::Contravariant, Variance::Covariant, Variance::Covariant, Variance::Covariant] {
        return Err(AnalysisError::Rank("operator must be a (1,3) tensor".into()));
    }
    if k.rank() == 0 || k.variance.iter().any(|v| *v != Variance::Covariant) {
        return Err(AnalysisError::Rank("target must be a covariant tensor of rank at least 1".into()));
    }
    if k.dim != b13.dim || x.len() != b13.dim || y.len() != b13.dim {
        return Err(AnalysisError::Rank("dimension mismatch".into()));
    }
    Ok(operator_derivation(&operator_at(b13, x, y), k))
}

/// Slot rule for an operator matrix acting on a covariant tensor.
pub fn operator_derivation(op: &[f64], k: &DenseTensor) -> DenseTensor {
    let n = k.dim;
    let s = k.rank();
    let mut src = vec![0usize; s];
    DenseTensor::from_fn(n, k.variance.clone(), |idx| {
        let mut v = 0.0;
        for j in 0..s {
            src.copy_from_slice(idx);
            for e in 0..n {
                let w = op[e * n + idx[j]];
                if w != 0.0 {
                    src[j] = e;
                    v -= w * k.get(&src);
                }
            }
        }
        v
    })
}

/// Action on a `[d,u,v,w]` tensor `T`:
/// `A T(U,V)W - T(AU,V)W - T(U,AV)W - T(U,V)AW`.
pub fn bracket_derivation(op: &[f64], t13: &DenseTensor) -> DenseTensor {
    let n = t13.dim;
    let t = |d: usize, u: usize, v: usize, w: usize| t13.data[((d * n + u) * n + v) * n + w];
    DenseTensor::from_fn(n, t13.variance.clone(), |i| {
        let (d, u, v, w) = (i[0], i[1], i[2], i[3]);
        (0..n)
            .map(|e| {
                op[d * n + e] * t(e, u, v, w)
                    - t(d, e, v, w) * op[e * n + u]
                    - t(d, u, e, w) * op[e * n + v]
                    - t(d, u, v, e) * op[e * n + w]
            })
            .sum()
    })
}

/// Max over basis pairs `(e_a,e_b)` of `|B(e_a,e_b)·T|` for a `(1,3)` target.
pub fn max_bracket_residual(b13: &DenseTensor, t13: &DenseTensor) -> f64 {
    let n = b13.dim;
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let r = bracket_derivation(&operator_on_basis(b13, a, b), t13).residual_norm();
            worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
        }
    }
    worst
}

/// Max over basis pairs of `|B(e_a,e_b)·K|` for a covariant target.
pub fn max_slot_residual(b13: &DenseTensor, k: &DenseTensor) -> f64 {
    let n = b13.dim;
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            let r = operator_derivation(&operator_on_basis(b13, a, b), k).residual_norm();
            worst = if r.is_nan() { f64::NAN } else { worst.max(r) };
        }
    }
    worst
}
