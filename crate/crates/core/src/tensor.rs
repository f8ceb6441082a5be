//! Dense component tensors with per-slot variance, and metric values.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    fn flipped(self) -> Variance {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("slot {slot} out of range for a rank-{rank} tensor")]
    SlotOutOfRange { slot: usize, rank: usize },
    #[error("cannot contract slot {0} with itself")]
    SameSlot(usize),
    #[error("slot {slot} is already {variance:?}")]
    AlreadyVariance { slot: usize, variance: Variance },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("metric is not symmetric (deviation {0:e})")]
    NotSymmetric(f64),
    #[error("degenerate metric: |det g| = {0:e}")]
    Degenerate(f64),
}

/// Row-major array of `dim^rank` components.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DenseTensor {
    pub dim: usize,
    pub variance: Vec<Variance>,
    pub data: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(dim: usize, variance: Vec<Variance>) -> Self {
        let len = dim.pow(variance.len() as u32);
        DenseTensor {
            dim,
            variance,
            data: vec![0.0; len],
        }
    }

    pub fn scalar(v: f64) -> Self {
        DenseTensor {
            dim: 0,
            variance: Vec::new(),
            data: vec![v],
        }
    }

    /// Rank-0 tensors carry no dimension of their own; this attaches one.
    pub fn with_dim(mut self, dim: usize) -> Self {
        self.dim = dim;
        self
    }

    pub fn from_data(dim: usize, variance: Vec<Variance>, data: Vec<f64>) -> Result<Self, TensorError> {
        let want = dim.pow(variance.len() as u32);
        if data.len() != want {
            return Err(TensorError::Shape(format!(
                "{} components given, {want} expected",
                data.len()
            )));
        }
        Ok(DenseTensor { dim, variance, data })
    }

    pub fn from_fn(dim: usize, variance: Vec<Variance>, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let mut t = DenseTensor::zeros(dim, variance);
        let mut idx = vec![0usize; t.rank()];
        for k in 0..t.data.len() {
            t.decode(k, &mut idx);
            t.data[k] = f(&idx);
        }
        t
    }

    pub fn covariant(dim: usize, rank: usize) -> Self {
        DenseTensor::zeros(dim, vec![Variance::Covariant; rank])
    }

    pub fn rank(&self) -> usize {
        self.variance.len()
    }

    pub fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn decode(&self, mut k: usize, idx: &mut [usize]) {
        for slot in (0..idx.len()).rev() {
            idx[slot] = k % self.dim;
            k /= self.dim;
        }
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let k = self.offset(idx);
        self.data[k] = v;
    }

    fn check_slot(&self, slot: usize) -> Result<(), TensorError> {
        if slot >= self.rank() {
            Err(TensorError::SlotOutOfRange {
                slot,
                rank: self.rank(),
            })
        } else {
            Ok(())
        }
    }

    fn check_same_shape(&self, other: &DenseTensor) -> Result<(), TensorError> {
        if self.dim != other.dim || self.variance != other.variance {
            return Err(TensorError::Shape(format!(
                "dim {} {:?} vs dim {} {:?}",
                self.dim, self.variance, other.dim, other.variance
            )));
        }
        Ok(())
    }

    /// Trace over two slots. Mixed variance is a plain trace; equal variance
    /// inserts `g^{ab}` (both covariant) or `g_{ab}` (both contravariant).
    pub fn contract(&self, slot_a: usize, slot_b: usize, m: &MetricValue) -> Result<DenseTensor, TensorError> {
        self.check_slot(slot_a)?;
        self.check_slot(slot_b)?;
        if slot_a == slot_b {
            return Err(TensorError::SameSlot(slot_a));
        }
        let (lo, hi) = (slot_a.min(slot_b), slot_a.max(slot_b));
        let weight = |i: usize, j: usize| -> f64 {
            match (self.variance[lo], self.variance[hi]) {
                (Variance::Covariant, Variance::Covariant) => m.g_inv[(i, j)],
                (Variance::Contravariant, Variance::Contravariant) => m.g[(i, j)],
                _ => {
                    if i == j {
                        1.0
                    } else {
                        0.0
                    }
                }
            }
        };
        let mixed = self.variance[lo] != self.variance[hi];
        let variance: Vec<Variance> = self
            .variance
            .iter()
            .enumerate()
            .filter(|(s, _)| *s != lo && *s != hi)
            .map(|(_, v)| *v)
            .collect();
        let n = self.dim;
        let mut full = vec![0usize; self.rank()];
        let out = DenseTensor::from_fn(n, variance, |rest| {
            let mut r = 0;
            for (s, slot) in full.iter_mut().enumerate() {
                if s != lo && s != hi {
                    *slot = rest[r];
                    r += 1;
                }
            }
            let mut acc = 0.0;
            for i in 0..n {
                full[lo] = i;
                if mixed {
                    full[hi] = i;
                    acc += self.get(&full);
                } else {
                    for j in 0..n {
                        full[hi] = j;
                        acc += weight(i, j) * self.get(&full);
                    }
                }
            }
            acc
        });
        Ok(out)
    }

    fn move_index(&self, slot: usize, target: Variance, mat: &DMatrix<f64>) -> Result<DenseTensor, TensorError> {
        self.check_slot(slot)?;
        if self.variance[slot] == target {
            return Err(TensorError::AlreadyVariance { slot, variance: target });
        }
        let mut variance = self.variance.clone();
        variance[slot] = variance[slot].flipped();
        let mut src = vec![0usize; self.rank()];
        Ok(DenseTensor::from_fn(self.dim, variance, |idx| {
            src.copy_from_slice(idx);
            let mut acc = 0.0;
            for j in 0..self.dim {
                src[slot] = j;
                acc += mat[(idx[slot], j)] * self.get(&src);
            }
            acc
        }))
    }

    /// Raises a covariant slot with `g^{ab}`.
    pub fn raise(&self, slot: usize, m: &MetricValue) -> Result<DenseTensor, TensorError> {
        self.move_index(slot, Variance::Contravariant, &m.g_inv)
    }

    /// Lowers a contravariant slot with `g_{ab}`.
    pub fn lower(&self, slot: usize, m: &MetricValue) -> Result<DenseTensor, TensorError> {
        self.move_index(slot, Variance::Covariant, &m.g)
    }

    /// Euclidean norm of the components in the chart.
    pub fn residual_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor, TensorError> {
        self.check_same_shape(other)?;
        Ok(self.zip(other, |a, b| a - b))
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor, TensorError> {
        self.check_same_shape(other)?;
        Ok(self.zip(other, |a, b| a + b))
    }

    fn zip(&self, other: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> DenseTensor {
        DenseTensor {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> DenseTensor {
        DenseTensor {
            dim: self.dim,
            variance: self.variance.clone(),
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn tensor_product(&self, other: &DenseTensor) -> DenseTensor {
        let dim = self.dim.max(other.dim);
        let mut variance = self.variance.clone();
        variance.extend_from_slice(&other.variance);
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        DenseTensor { dim, variance, data }
    }

    /// Reorders slots: output slot `i` is input slot `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<DenseTensor, TensorError> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true)) {
            return Err(TensorError::Shape(format!("{perm:?} is not a permutation of {r} slots")));
        }
        let variance = perm.iter().map(|&p| self.variance[p]).collect();
        let mut src = vec![0usize; r];
        Ok(DenseTensor::from_fn(self.dim, variance, |idx| {
            for (i, &p) in perm.iter().enumerate() {
                src[p] = idx[i];
            }
            self.get(&src)
        }))
    }
}

/// Metric at a point: `g`, its inverse and the signs of its eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricValue {
    pub g: DMatrix<f64>,
    pub g_inv: DMatrix<f64>,
    pub signature: Vec<i8>,
}

pub const DET_THRESHOLD: f64 = 1e-10;

impl MetricValue {
    pub fn new(g: DMatrix<f64>) -> Result<Self, TensorError> {
        let n = g.nrows();
        if g.ncols() != n {
            return Err(TensorError::Shape(format!("{}x{} metric", n, g.ncols())));
        }
        let scale = g.amax().max(1.0);
        let asym = (&g - g.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(TensorError::NotSymmetric(asym));
        }
        let g = (&g + g.transpose()) * 0.5;
        let det = g.determinant();
        if det.is_nan() || det.abs() <= DET_THRESHOLD {
            return Err(TensorError::Degenerate(det.abs()));
        }
        let g_inv = g.clone().try_inverse().ok_or(TensorError::Degenerate(det.abs()))?;
        let eig = SymmetricEigen::new(g.clone());
        let mut signature: Vec<i8> = eig.eigenvalues.iter().map(|&l| if l < 0.0 { -1 } else { 1 }).collect();
        signature.sort_unstable();
        Ok(MetricValue { g, g_inv, signature })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn negative_count(&self) -> usize {
        self.signature.iter().filter(|&&s| s < 0).count()
    }

    pub fn as_tensor(&self) -> DenseTensor {
        let n = self.dim();
        DenseTensor::from_fn(n, vec![Variance::Covariant; 2], |i| self.g[(i[0], i[1])])
    }

    pub fn inverse_tensor(&self) -> DenseTensor {
        let n = self.dim();
        DenseTensor::from_fn(n, vec![Variance::Contravariant; 2], |i| self.g_inv[(i[0], i[1])])
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.g[(i, j)] * u[i] * v[j];
            }
        }
        acc
    }

    pub fn lower_vector(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.g[(i, j)] * v[j]).sum()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Variance::*;

    fn minkowski() -> MetricValue {
        MetricValue::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, 1.0, 1.0, 1.0]))).unwrap()
    }

    fn skewed_metric() -> MetricValue {
        MetricValue::new(DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, -0.2, 0.1, -0.2, 1.0])).unwrap()
    }

    #[test]
    fn trace_of_identity_is_dimension() {
        let m = skewed_metric();
        let delta = DenseTensor::from_fn(3, vec![Contravariant, Covariant], |i| (i[0] == i[1]) as u8 as f64);
        assert_eq!(delta.contract(0, 1, &m).unwrap().data, vec![3.0]);
    }

    #[test]
    fn inverse_times_metric_is_delta() {
        let m = skewed_metric();
        let prod = m.inverse_tensor().tensor_product(&m.as_tensor());
        let mixed = prod.contract(1, 2, &m).unwrap();
        for a in 0..3 {
            for c in 0..3 {
                let want = if a == c { 1.0 } else { 0.0 };
                assert!((mixed.get(&[a, c]) - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lowering_on_minkowski() {
        let m = minkowski();
        let e0 = DenseTensor::from_data(4, vec![Contravariant], vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        assert_eq!(e0.lower(0, &m).unwrap().data, vec![-1.0, 0.0, 0.0, 0.0]);
        assert_eq!(m.negative_count(), 1);
    }

    #[test]
    fn raise_lower_round_trip() {
        let m = skewed_metric();
        let v = DenseTensor::from_data(3, vec![Contravariant], vec![0.4, -1.0, 2.5]).unwrap();
        let back = v.lower(0, &m).unwrap().raise(0, &m).unwrap();
        assert!(back.sub(&v).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn residual_norm_examples() {
        assert_eq!(DenseTensor::covariant(3, 2).residual_norm(), 0.0);
        let v = DenseTensor::from_data(2, vec![Covariant], vec![3.0, 4.0]).unwrap();
        assert_eq!(v.residual_norm(), 5.0);
    }

    #[test]
    fn slot_errors() {
        let m = skewed_metric();
        let t = DenseTensor::covariant(3, 2);
        assert!(matches!(t.contract(0, 2, &m), Err(TensorError::SlotOutOfRange { .. })));
        assert!(matches!(t.contract(1, 1, &m), Err(TensorError::SameSlot(1))));
        assert!(matches!(t.raise(5, &m), Err(TensorError::SlotOutOfRange { .. })));
        assert!(matches!(t.lower(0, &m), Err(TensorError::AlreadyVariance { .. })));
    }

    #[test]
    fn degenerate_and_asymmetric_metrics_rejected() {
        let sing = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(MetricValue::new(sing), Err(TensorError::Degenerate(_))));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(MetricValue::new(asym), Err(TensorError::NotSymmetric(_))));
    }

    #[test]
    fn signature_counts_negative_eigenvalues() {
        let m = MetricValue::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap();
        assert_eq!(m.signature, vec![-1, 1]);
    }

    #[test]
    fn permute_transposes() {
        let t = DenseTensor::from_fn(2, vec![Covariant, Contravariant], |i| (10 * i[0] + i[1]) as f64);
        let p = t.permute(&[1, 0]).unwrap();
        assert_eq!(p.get(&[1, 0]), t.get(&[0, 1]));
        assert_eq!(p.variance, vec![Contravariant, Covariant]);
        assert!(t.permute(&[0, 0]).is_err());
    }
}
