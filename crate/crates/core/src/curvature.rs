//! Levi-Civita pipeline: Christoffel symbols, Riemann, Ricci, scalar
//! curvature, Ricci powers and covariant derivatives of computed fields.
//!
//! Conventions: `R(X,Y)Z = [∇_X, ∇_Y]Z - ∇_[X,Y] Z`, stored as
//! `riemann13[d,a,b,c] = (R(e_a,e_b)e_c)^d`; `riemann04[a,b,c,v] =
//! g(R(e_a,e_b)e_c, e_v)`; `S(Y,Z) = R^a_{aYZ}`, so the unit sphere has
//! `S = (n-1)g`.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::expr::ExprError;
use crate::manifold::ManifoldSpec;
use crate::tensor::{DenseTensor, MetricValue, TensorError, Variance};

use Variance::{Contravariant as Up, Covariant as Down};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error("point has {got} coordinates, manifold dimension is {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("field evaluation failed near {point:?}: {message}")]
    Field { point: Vec<f64>, message: String },
}

/// Every curvature object at one point.
#[derive(Debug, Clone)]
pub struct GeometryAtPoint {
    pub point: Vec<f64>,
    pub metric: MetricValue,
    /// `gamma[a,b,c] = Γ^a_{bc}`
    pub gamma: DenseTensor,
    pub riemann13: DenseTensor,
    pub riemann04: DenseTensor,
    pub ricci: DenseTensor,
    /// `ricci_op[a,b] = Q^a_b`
    pub ricci_op: DenseTensor,
    pub scalar: f64,
    /// `s_powers[l] = S^l`, computed at construction.
    pub s_powers: Vec<DenseTensor>,
}

impl GeometryAtPoint {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.metric.g[(a, b)]
    }
}

pub fn geometry_at(spec: &ManifoldSpec, point: &[f64]) -> Result<GeometryAtPoint, GeometryError> {
    geometry_at_with_powers(spec, point, 1)
}

/// Like [`geometry_at`], also caching `S^l` for `l <= max_power`.
pub fn geometry_at_with_powers(
    spec: &ManifoldSpec,
    point: &[f64],
    max_power: usize,
) -> Result<GeometryAtPoint, GeometryError> {
    let n = spec.dim;
    if point.len() != n {
        return Err(GeometryError::Dimension {
            expected: n,
            got: point.len(),
        });
    }
    let jet = spec.metric_jet(point)?;
    let metric = MetricValue::new(jet.g.clone())?;
    let gi = &metric.g_inv;
    let dg = |e: usize, i: usize, j: usize| jet.dg[(e * n + i) * n + j];
    let ddg = |e: usize, f: usize, i: usize, j: usize| jet.ddg[((e * n + f) * n + i) * n + j];

    // lowered Christoffel symbols Γ_{dbc} and their derivatives
    let mut low = vec![0.0; n * n * n];
    let mut dlow = vec![0.0; n * n * n * n];
    for d in 0..n {
        for b in 0..n {
            for c in 0..n {
                low[(d * n + b) * n + c] = 0.5 * (dg(b, d, c) + dg(c, d, b) - dg(d, b, c));
                for e in 0..n {
                    dlow[((e * n + d) * n + b) * n + c] =
                        0.5 * (ddg(e, b, d, c) + ddg(e, c, d, b) - ddg(e, d, b, c));
                }
            }
        }
    }
    // d_e g^{ad} = -g^{ap} d_e g_pq g^{qd}
    let mut dginv = vec![0.0; n * n * n];
    for e in 0..n {
        for a in 0..n {
            for d in 0..n {
                let mut acc = 0.0;
                for p in 0..n {
                    for q in 0..n {
                        acc += gi[(a, p)] * dg(e, p, q) * gi[(q, d)];
                    }
                }
                dginv[(e * n + a) * n + d] = -acc;
            }
        }
    }
    let mut gamma = DenseTensor::zeros(n, vec![Up, Down, Down]);
    // dgamma[e][a][b][c] = d_e Γ^a_{bc}
    let mut dgamma = vec![0.0; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in b..n {
                let mut v = 0.0;
                for d in 0..n {
                    v += gi[(a, d)] * low[(d * n + b) * n + c];
                }
                gamma.set(&[a, b, c], v);
                gamma.set(&[a, c, b], v);
                for e in 0..n {
                    let mut dv = 0.0;
                    for d in 0..n {
                        dv += dginv[(e * n + a) * n + d] * low[(d * n + b) * n + c]
                            + gi[(a, d)] * dlow[((e * n + d) * n + b) * n + c];
                    }
                    dgamma[((e * n + a) * n + b) * n + c] = dv;
                    dgamma[((e * n + a) * n + c) * n + b] = dv;
                }
            }
        }
    }
    let gam = |a: usize, b: usize, c: usize| gamma.data[(a * n + b) * n + c];
    let dgam = |e: usize, a: usize, b: usize, c: usize| dgamma[((e * n + a) * n + b) * n + c];

    let mut riemann13 = DenseTensor::zeros(n, vec![Up, Down, Down, Down]);
    for d in 0..n {
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                for c in 0..n {
                    let mut v = dgam(a, d, b, c) - dgam(b, d, a, c);
                    for e in 0..n {
                        v += gam(d, a, e) * gam(e, b, c) - gam(d, b, e) * gam(e, a, c);
                    }
                    riemann13.set(&[d, a, b, c], v);
                }
            }
        }
    }
    let riemann04 = DenseTensor::from_fn(n, vec![Down; 4], |i| {
        (0..n)
            .map(|d| metric.g[(d, i[3])] * riemann13.get(&[d, i[0], i[1], i[2]]))
            .sum()
    });
    let ricci = riemann13.contract(0, 1, &metric)?;
    let ricci_op = ricci.raise(0, &metric)?;
    let scalar = (0..n).map(|a| ricci_op.get(&[a, a])).sum();

    let mut geo = GeometryAtPoint {
        point: point.to_vec(),
        metric,
        gamma,
        riemann13,
        riemann04,
        ricci,
        ricci_op,
        scalar,
        s_powers: Vec::new(),
    };
    geo.s_powers = (0..=max_power.max(1)).map(|l| s_power(&geo, l)).collect();
    Ok(geo)
}

/// `S^l(X,Y) = g(Q^l X, Y)`, with `S^0 = g`.
pub fn s_power(geo: &GeometryAtPoint, l: usize) -> DenseTensor {
    if let Some(t) = geo.s_powers.get(l) {
        return t.clone();
    }
    let n = geo.dim();
    let q = DMatrix::from_fn(n, n, |a, b| geo.ricci_op.get(&[a, b]));
    let ql = q.pow(l as u32);
    // (Q^l)^a_x g_ay
    let s = ql.transpose() * &geo.metric.g;
    DenseTensor::from_fn(n, vec![Down, Down], |i| s[(i[0], i[1])])
}

/// Five-point stencil geometries around a point, shared by every field
/// whose covariant derivative is needed there.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub center: GeometryAtPoint,
    /// Per axis: geometries at `-2h, -h, +h, +2h`.
    pub neighbors: Vec<[GeometryAtPoint; 4]>,
    pub steps: Vec<f64>,
}

/// Relative finite-difference step for a coordinate value.
pub fn fd_step(x: f64) -> f64 {
    1e-5 * x.abs().max(1.0)
}

impl Stencil {
    pub fn new(spec: &ManifoldSpec, point: &[f64]) -> Result<Self, GeometryError> {
        let center = geometry_at(spec, point)?;
        let mut neighbors = Vec::with_capacity(spec.dim);
        let mut steps = Vec::with_capacity(spec.dim);
        for e in 0..spec.dim {
            let h = fd_step(point[e]);
            let at = |m: f64| {
                let mut p = point.to_vec();
                p[e] += m * h;
                geometry_at(spec, &p)
            };
            neighbors.push([at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?]);
            steps.push(h);
        }
        Ok(Stencil {
            center,
            neighbors,
            steps,
        })
    }

    /// `∇f` with the derivative slot first. `f` must return tensors of one
    /// fixed shape.
    pub fn covariant_derivative<F>(&self, f: F) -> DenseTensor
    where
        F: Fn(&GeometryAtPoint) -> DenseTensor,
    {
        let value = f(&self.center);
        let partials: Vec<DenseTensor> = self
            .neighbors
            .iter()
            .zip(&self.steps)
            .map(|(nb, &h)| {
                let [m2, m1, p1, p2] = [f(&nb[0]), f(&nb[1]), f(&nb[2]), f(&nb[3])];
                let data = (0..value.data.len())
                    .map(|k| (-p2.data[k] + 8.0 * p1.data[k] - 8.0 * m1.data[k] + m2.data[k]) / (12.0 * h))
                    .collect();
                DenseTensor {
                    dim: value.dim,
                    variance: value.variance.clone(),
                    data,
                }
            })
            .collect();
        connection_correction(&self.center, &value, &partials)
    }

    /// Divergence of a (1,3) field: trace of the derivative slot against
    /// the output slot of `∇T`.
    pub fn divergence<F>(&self, f: F) -> DenseTensor
    where
        F: Fn(&GeometryAtPoint) -> DenseTensor,
    {
        let nabla = self.covariant_derivative(f);
        trace_derivative_output(&nabla)
    }
}

fn trace_derivative_output(nabla: &DenseTensor) -> DenseTensor {
    let n = nabla.dim;
    DenseTensor::from_fn(n, vec![Down; 3], |i| {
        (0..n).map(|e| nabla.get(&[e, e, i[0], i[1], i[2]])).sum()
    })
}

/// Adds the Christoffel terms to coordinate partials `partials[e] = d_e T`.
fn connection_correction(geo: &GeometryAtPoint, value: &DenseTensor, partials: &[DenseTensor]) -> DenseTensor {
    let n = value.dim;
    let mut variance = vec![Down];
    variance.extend_from_slice(&value.variance);
    let mut src = vec![0usize; value.rank()];
    DenseTensor::from_fn(n, variance, |idx| {
        let e = idx[0];
        let rest = &idx[1..];
        let mut v = partials[e].get(rest);
        for (slot, var) in value.variance.iter().enumerate() {
            src.copy_from_slice(rest);
            for p in 0..n {
                src[slot] = p;
                match var {
                    Down => v -= geo.gamma.get(&[p, e, rest[slot]]) * value.get(&src),
                    Up => v += geo.gamma.get(&[rest[slot], e, p]) * value.get(&src),
                }
            }
        }
        v
    })
}

/// `∇field` at `point` for a field given on coordinates. Partials use the
/// five-point central stencil with step `1e-5 * max(1, |x_e|)`.
pub fn covariant_derivative<F>(spec: &ManifoldSpec, point: &[f64], field: F) -> Result<DenseTensor, GeometryError>
where
    F: Fn(&[f64]) -> Result<DenseTensor, GeometryError>,
{
    let geo = geometry_at(spec, point)?;
    let value = field(point)?;
    let mut partials = Vec::with_capacity(spec.dim);
    for e in 0..spec.dim {
        let h = fd_step(point[e]);
        let eval = |m: f64| -> Result<DenseTensor, GeometryError> {
            let mut p = point.to_vec();
            p[e] += m * h;
            let t = field(&p).map_err(|err| GeometryError::Field {
                point: p.clone(),
                message: err.to_string(),
            })?;
            if t.variance != value.variance || t.dim != value.dim {
                return Err(GeometryError::Field {
                    point: p,
                    message: "field changed shape".into(),
                });
            }
            Ok(t)
        };
        let (m2, m1, p1, p2) = (eval(-2.0)?, eval(-1.0)?, eval(1.0)?, eval(2.0)?);
        let data = (0..value.data.len())
            .map(|k| (-p2.data[k] + 8.0 * p1.data[k] - 8.0 * m1.data[k] + m2.data[k]) / (12.0 * h))
            .collect();
        partials.push(DenseTensor {
            dim: value.dim,
            variance: value.variance.clone(),
            data,
        });
    }
    Ok(connection_correction(&geo, &value, &partials))
}

/// `(div T)(X,Y,Z)` for a (1,3) field stored output-index first.
pub fn divergence_numeric<F>(spec: &ManifoldSpec, point: &[f64], field13: F) -> Result<DenseTensor, GeometryError>
where
    F: Fn(&[f64]) -> Result<DenseTensor, GeometryError>,
{
    let nabla = covariant_derivative(spec, point, field13)?;
    if nabla.rank() != 5 {
        return Err(GeometryError::Field {
            point: point.to_vec(),
            message: format!("divergence needs a rank-4 field, got rank {}", nabla.rank() - 1),
        });
    }
    Ok(trace_derivative_output(&nabla))
}

/// `(∇_e ξ)^a` with exact partials of the structure field.
pub fn nabla_xi(spec: &ManifoldSpec, geo: &GeometryAtPoint) -> Result<DenseTensor, GeometryError> {
    let n = spec.dim;
    let xi = spec.xi_at(&geo.point)?;
    let dxi = spec.xi_jacobian(&geo.point)?;
    Ok(DenseTensor::from_fn(n, vec![Down, Up], |i| {
        let (e, a) = (i[0], i[1]);
        dxi[e][a] + (0..n).map(|b| geo.gamma.get(&[a, e, b]) * xi[b]).sum::<f64>()
    }))
}
