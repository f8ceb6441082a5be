//! The eight-parameter T-curvature family and its named members.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::curvature::{GeometryAtPoint, Stencil};
use crate::tensor::{DenseTensor, Variance};

use Variance::{Contravariant as Up, Covariant as Down};

/// Coefficients `a0..a7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TCoeffs(pub [Rational64; 8]);

impl TCoeffs {
    pub fn from_ints(v: [i64; 8]) -> Self {
        TCoeffs(v.map(Rational64::from_integer))
    }

    pub fn zero() -> Self {
        TCoeffs([Rational64::zero(); 8])
    }

    pub fn as_f64(&self) -> [f64; 8] {
        self.0.map(|r| r.to_f64().unwrap_or(f64::NAN))
    }

    pub fn get(&self, i: usize) -> Rational64 {
        self.0[i]
    }

    /// `a0 + n a1 + a2 + a3 + a5 + a6`, the factor of `S` in `S_T`.
    pub fn ricci_sum(&self, n: usize) -> Rational64 {
        let a = &self.0;
        a[0] + a[1] * Rational64::from_integer(n as i64) + a[2] + a[3] + a[5] + a[6]
    }

    /// `a4 + (n-1) a7`, the factor of `r g` in `S_T`.
    pub fn scalar_sum(&self, n: usize) -> Rational64 {
        self.0[4] + self.0[7] * Rational64::from_integer(n as i64 - 1)
    }

    /// Parses `a0,...,a7`; entries may be integers, `p/q` or decimals.
    pub fn parse_list(s: &str) -> Result<Self, PresetError> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 8 {
            return Err(PresetError::Coefficients(format!(
                "expected 8 comma-separated values, found {}",
                parts.len()
            )));
        }
        let mut out = [Rational64::zero(); 8];
        for (slot, part) in out.iter_mut().zip(&parts) {
            *slot = parse_rational(part)?;
        }
        Ok(TCoeffs(out))
    }
}

pub fn parse_rational(s: &str) -> Result<Rational64, PresetError> {
    let bad = || PresetError::Coefficients(format!("`{s}` is not a number"));
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(PresetError::Coefficients(format!("`{s}` has a zero denominator")));
        }
        return Ok(Rational64::new(p, q));
    }
    if let Ok(i) = s.parse::<i64>() {
        return Ok(Rational64::from_integer(i));
    }
    // decimals are converted exactly from their digits
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').ok_or_else(bad)?;
    if frac.len() > 15 || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || int.len() + frac.len() == 0 {
        return Err(bad());
    }
    let digits: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let r = Rational64::new(digits, 10i64.pow(frac.len() as u32));
    Ok(if neg { -r } else { r })
}

fn fmt_rational(r: &Rational64) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for TCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_rational).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl Serialize for TCoeffs {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let parts: Vec<String> = self.0.iter().map(fmt_rational).collect();
        parts.serialize(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PresetError {
    #[error("unknown preset `{0}`")]
    Unknown(String),
    #[error("n too small: preset {preset} needs n >= {min}, got {n}")]
    DimensionTooSmall { preset: PresetId, n: usize, min: usize },
    #[error("preset {0} requires free parameters (a0, a1)")]
    MissingFree(PresetId),
    #[error("preset {0} takes no free parameters")]
    UnexpectedFree(PresetId),
    #[error("invalid coefficients: {0}")]
    Coefficients(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PresetId {
    R,
    Cstar,
    C,
    L,
    V,
    Pstar,
    P,
    M,
    W0,
    W0star,
    W1,
    W1star,
    W2,
    W3,
    W4,
    W5,
    W6,
    W7,
    W8,
    W9,
}

impl PresetId {
    pub const ALL: [PresetId; 20] = [
        PresetId::R,
        PresetId::Cstar,
        PresetId::C,
        PresetId::L,
        PresetId::V,
        PresetId::Pstar,
        PresetId::P,
        PresetId::M,
        PresetId::W0,
        PresetId::W0star,
        PresetId::W1,
        PresetId::W1star,
        PresetId::W2,
        PresetId::W3,
        PresetId::W4,
        PresetId::W5,
        PresetId::W6,
        PresetId::W7,
        PresetId::W8,
        PresetId::W9,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PresetId::R => "R",
            PresetId::Cstar => "Cstar",
            PresetId::C => "C",
            PresetId::L => "L",
            PresetId::V => "V",
            PresetId::Pstar => "Pstar",
            PresetId::P => "P",
            PresetId::M => "M",
            PresetId::W0 => "W0",
            PresetId::W0star => "W0star",
            PresetId::W1 => "W1",
            PresetId::W1star => "W1star",
            PresetId::W2 => "W2",
            PresetId::W3 => "W3",
            PresetId::W4 => "W4",
            PresetId::W5 => "W5",
            PresetId::W6 => "W6",
            PresetId::W7 => "W7",
            PresetId::W8 => "W8",
            PresetId::W9 => "W9",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            PresetId::R => "curvature tensor",
            PresetId::Cstar => "quasi-conformal curvature tensor",
            PresetId::C => "conformal curvature tensor",
            PresetId::L => "conharmonic curvature tensor",
            PresetId::V => "concircular curvature tensor",
            PresetId::Pstar => "pseudo-projective curvature tensor",
            PresetId::P => "projective curvature tensor",
            PresetId::M => "M-projective curvature tensor",
            PresetId::W0 => "W0-curvature tensor",
            PresetId::W0star => "W0*-curvature tensor",
            PresetId::W1 => "W1-curvature tensor",
            PresetId::W1star => "W1*-curvature tensor",
            PresetId::W2 => "W2-curvature tensor",
            PresetId::W3 => "W3-curvature tensor",
            PresetId::W4 => "W4-curvature tensor",
            PresetId::W5 => "W5-curvature tensor",
            PresetId::W6 => "W6-curvature tensor",
            PresetId::W7 => "W7-curvature tensor",
            PresetId::W8 => "W8-curvature tensor",
            PresetId::W9 => "W9-curvature tensor",
        }
    }

    pub fn has_free_params(self) -> bool {
        matches!(self, PresetId::Cstar | PresetId::Pstar)
    }

    pub fn min_dim(self) -> usize {
        match self {
            PresetId::C | PresetId::L => 3,
            _ => 2,
        }
    }

    /// Convenience `(a0, a1)` for the presets with free parameters. These
    /// are not fixed by the definition: `Cstar` defaults to the conformal
    /// tensor and `Pstar` to the projective one.
    pub fn default_free(self, n: usize) -> Option<(Rational64, Rational64)> {
        let n = n as i64;
        match self {
            PresetId::Cstar if n > 2 => Some((Rational64::from_integer(1), Rational64::new(-1, n - 2))),
            PresetId::Pstar if n > 1 => Some((Rational64::from_integer(1), Rational64::new(-1, n - 1))),
            _ => None,
        }
    }

    /// Coefficient formulas in terms of `n` (and `a0`, `a1` when free).
    pub fn formulas(self) -> [&'static str; 8] {
        match self {
            PresetId::R => ["1", "0", "0", "0", "0", "0", "0", "0"],
            PresetId::Cstar => ["a0", "a1", "-a1", "0", "a1", "-a1", "0", "-(a0/(n-1) + 2a1)/n"],
            PresetId::C => ["1", "-1/(n-2)", "1/(n-2)", "0", "-1/(n-2)", "1/(n-2)", "0", "1/((n-1)(n-2))"],
            PresetId::L => ["1", "-1/(n-2)", "1/(n-2)", "0", "-1/(n-2)", "1/(n-2)", "0", "0"],
            PresetId::V => ["1", "0", "0", "0", "0", "0", "0", "-1/(n(n-1))"],
            PresetId::Pstar => ["a0", "a1", "-a1", "0", "0", "0", "0", "-(a0/(n-1) + a1)/n"],
            PresetId::P => ["1", "-1/(n-1)", "1/(n-1)", "0", "0", "0", "0", "0"],
            PresetId::M => ["1", "-1/(2(n-1))", "1/(2(n-1))", "0", "-1/(2(n-1))", "1/(2(n-1))", "0", "0"],
            PresetId::W0 => ["1", "-1/(n-1)", "0", "0", "0", "1/(n-1)", "0", "0"],
            PresetId::W0star => ["1", "1/(n-1)", "0", "0", "0", "-1/(n-1)", "0", "0"],
            PresetId::W1 => ["1", "1/(n-1)", "-1/(n-1)", "0", "0", "0", "0", "0"],
            PresetId::W1star => ["1", "-1/(n-1)", "1/(n-1)", "0", "0", "0", "0", "0"],
            PresetId::W2 => ["1", "0", "0", "0", "-1/(n-1)", "1/(n-1)", "0", "0"],
            PresetId::W3 => ["1", "0", "-1/(n-1)", "0", "1/(n-1)", "0", "0", "0"],
            PresetId::W4 => ["1", "0", "0", "0", "0", "1/(n-1)", "-1/(n-1)", "0"],
            PresetId::W5 => ["1", "0", "-1/(n-1)", "0", "0", "1/(n-1)", "0", "0"],
            PresetId::W6 => ["1", "-1/(n-1)", "0", "0", "0", "0", "1/(n-1)", "0"],
            PresetId::W7 => ["1", "-1/(n-1)", "0", "0", "1/(n-1)", "0", "0", "0"],
            PresetId::W8 => ["1", "-1/(n-1)", "0", "1/(n-1)", "0", "0", "0", "0"],
            PresetId::W9 => ["1", "0", "0", "1/(n-1)", "-1/(n-1)", "0", "0", "0"],
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PresetId {
    type Err = PresetError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PresetId::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| PresetError::Unknown(s.to_string()))
    }
}

impl Serialize for PresetId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Exact coefficients of a named preset in dimension `n`.
pub fn preset_coeffs(
    id: PresetId,
    n: usize,
    free: Option<(Rational64, Rational64)>,
) -> Result<TCoeffs, PresetError> {
    if n < id.min_dim() {
        return Err(PresetError::DimensionTooSmall {
            preset: id,
            n,
            min: id.min_dim(),
        });
    }
    match (id.has_free_params(), free) {
        (true, None) => return Err(PresetError::MissingFree(id)),
        (false, Some(_)) => return Err(PresetError::UnexpectedFree(id)),
        _ => {}
    }
    let ni = n as i64;
    let r = |p: i64, q: i64| Rational64::new(p, q);
    let z = Rational64::zero();
    let one = Rational64::from_integer(1);
    let d = r(1, ni - 1);
    let nr = Rational64::from_integer(ni);
    let c = match id {
        PresetId::R => [one, z, z, z, z, z, z, z],
        PresetId::Cstar => {
            let (a0, a1) = free.expect("checked above");
            let a7 = -(a0 / Rational64::from_integer(ni - 1) + a1 * 2) / nr;
            [a0, a1, -a1, z, a1, -a1, z, a7]
        }
        PresetId::C | PresetId::L => {
            let e = r(1, ni - 2);
            let a7 = if id == PresetId::C { r(1, (ni - 1) * (ni - 2)) } else { z };
            [one, -e, e, z, -e, e, z, a7]
        }
        PresetId::V => [one, z, z, z, z, z, z, r(-1, ni * (ni - 1))],
        PresetId::Pstar => {
            let (a0, a1) = free.expect("checked above");
            let a7 = -(a0 / Rational64::from_integer(ni - 1) + a1) / nr;
            [a0, a1, -a1, z, z, z, z, a7]
        }
        PresetId::P => [one, -d, d, z, z, z, z, z],
        PresetId::M => {
            let h = r(1, 2 * (ni - 1));
            [one, -h, h, z, -h, h, z, z]
        }
        PresetId::W0 => [one, -d, z, z, z, d, z, z],
        PresetId::W0star => [one, d, z, z, z, -d, z, z],
        PresetId::W1 => [one, d, -d, z, z, z, z, z],
        PresetId::W1star => [one, -d, d, z, z, z, z, z],
        PresetId::W2 => [one, z, z, z, -d, d, z, z],
        PresetId::W3 => [one, z, -d, z, d, z, z, z],
        PresetId::W4 => [one, z, z, z, z, d, -d, z],
        PresetId::W5 => [one, z, -d, z, z, d, z, z],
        PresetId::W6 => [one, -d, z, z, z, z, d, z],
        PresetId::W7 => [one, -d, z, z, d, z, z, z],
        PresetId::W8 => [one, -d, z, d, z, z, z, z],
        PresetId::W9 => [one, z, z, d, -d, z, z, z],
    };
    Ok(TCoeffs(c))
}

/// Preset coefficients with the documented defaults for free parameters.
pub fn preset_coeffs_default(id: PresetId, n: usize) -> Result<TCoeffs, PresetError> {
    if n < id.min_dim() {
        return Err(PresetError::DimensionTooSmall {
            preset: id,
            n,
            min: id.min_dim(),
        });
    }
    preset_coeffs(id, n, id.default_free(n))
}

/// `T(e_a,e_b)e_c`, stored output index first: `t[d,a,b,c]`.
pub fn t_from_geometry(geo: &GeometryAtPoint, c: &TCoeffs) -> DenseTensor {
    let n = geo.dim();
    let [a0, a1, a2, a3, a4, a5, a6, a7] = c.as_f64();
    let g = |i: usize, j: usize| geo.metric.g[(i, j)];
    let s = |i: usize, j: usize| geo.ricci.data[i * n + j];
    let q = |i: usize, j: usize| geo.ricci_op.data[i * n + j];
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let r = geo.scalar;
    DenseTensor::from_fn(n, vec![Up, Down, Down, Down], |i| {
        let (d, x, y, z) = (i[0], i[1], i[2], i[3]);
        a0 * geo.riemann13.data[((d * n + x) * n + y) * n + z]
            + a1 * s(y, z) * delta(d, x)
            + a2 * s(x, z) * delta(d, y)
            + a3 * s(x, y) * delta(d, z)
            + a4 * g(y, z) * q(d, x)
            + a5 * g(x, z) * q(d, y)
            + a6 * g(x, y) * q(d, z)
            + a7 * r * (g(y, z) * delta(d, x) - g(x, z) * delta(d, y))
    })
}

/// `g(T(e_a,e_b)e_c, e_v)` as `t[a,b,c,v]`.
pub fn t_lowered(geo: &GeometryAtPoint, c: &TCoeffs) -> DenseTensor {
    lower_output(geo, &t_from_geometry(geo, c))
}

/// Lowers the output index of a `[d,a,b,c]` tensor into the last slot.
pub fn lower_output(geo: &GeometryAtPoint, t13: &DenseTensor) -> DenseTensor {
    let n = geo.dim();
    DenseTensor::from_fn(n, vec![Down; 4], |i| {
        (0..n)
            .map(|d| geo.metric.g[(d, i[3])] * t13.data[((d * n + i[0]) * n + i[1]) * n + i[2]])
            .sum()
    })
}

/// Closed-form Ricci contraction of `T`.
pub fn t_ricci(geo: &GeometryAtPoint, c: &TCoeffs) -> DenseTensor {
    let n = geo.dim();
    let sigma = c.ricci_sum(n).to_f64().unwrap_or(f64::NAN);
    let tau = c.scalar_sum(n).to_f64().unwrap_or(f64::NAN) * geo.scalar;
    DenseTensor::from_fn(n, vec![Down, Down], |i| {
        sigma * geo.ricci.get(i) + tau * geo.metric.g[(i[0], i[1])]
    })
}

/// Covariant derivatives of the Ricci tensor and scalar curvature.
#[derive(Debug, Clone)]
pub struct RicciJet {
    /// `nabla_s[e,a,b] = (∇_e S)(e_a, e_b)`
    pub nabla_s: DenseTensor,
    pub nabla_r: Vec<f64>,
}

impl RicciJet {
    pub fn from_stencil(st: &Stencil) -> Self {
        let nabla_s = st.covariant_derivative(|g| g.ricci.clone());
        let nr = st.covariant_derivative(|g| DenseTensor::scalar(g.scalar).with_dim(g.dim()));
        RicciJet {
            nabla_s,
            nabla_r: nr.data,
        }
    }
}

/// Closed-form divergence of `T` from `∇S` and `∇r`.
pub fn div_t_closed(geo: &GeometryAtPoint, jet: &RicciJet, c: &TCoeffs) -> DenseTensor {
    let n = geo.dim();
    let [a0, a1, a2, a3, a4, a5, a6, a7] = c.as_f64();
    let ds = |e: usize, a: usize, b: usize| jet.nabla_s.data[(e * n + a) * n + b];
    let dr = &jet.nabla_r;
    let g = |i: usize, j: usize| geo.metric.g[(i, j)];
    DenseTensor::from_fn(n, vec![Down; 3], |i| {
        let (x, y, z) = (i[0], i[1], i[2]);
        (a0 + a1) * ds(x, y, z)
            + (-a0 + a2) * ds(y, x, z)
            + a3 * ds(z, x, y)
            + (a4 / 2.0 + a7) * dr[x] * g(y, z)
            + (a5 / 2.0 - a7) * dr[y] * g(x, z)
            + a6 / 2.0 * dr[z] * g(x, y)
    })
}

/// Max residual of the closed-form divergence over precomputed stencils.
pub fn is_conservative(stencils: &[Stencil], c: &TCoeffs, tol: f64) -> (bool, f64) {
    let max = stencils
        .iter()
        .map(|st| div_t_closed(&st.center, &RicciJet::from_stencil(st), c).residual_norm())
        .fold(0.0, f64::max);
    (max < tol, max)
}
