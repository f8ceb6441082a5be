//! Chart-level manifold descriptions: built-in examples, the JSON spec
//! format, and sample-point generation.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::curvature::GeometryError;
use crate::expr::{parse, Expr, ExprError};
use crate::tensor::MetricValue;

pub const STRUCTURE_TOL: f64 = 1e-9;
const PROBE_COUNT: usize = 5;
const PROBE_SEED: u64 = 0;

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{path}: {message}")]
    Schema { path: String, message: String },
    #[error("{path}: {source}")]
    Expr {
        path: String,
        #[source]
        source: ExprError,
    },
    #[error(
        "structure gate failed (eq-cond: g(xi,xi) = epsilon, eta(xi) = 1) at {point:?}: g(xi,xi) = {value}, expected {expected}"
    )]
    StructureGate {
        point: Vec<f64>,
        value: f64,
        expected: f64,
    },
    #[error("structure gate could not be evaluated at {point:?}: {source}")]
    GateEvaluation {
        point: Vec<f64>,
        #[source]
        source: GeometryError,
    },
    #[error("unknown built-in manifold `{0}`")]
    UnknownBuiltin(String),
    #[error("{name} does not support dimension {dim}: {reason}")]
    BadDimension {
        name: String,
        dim: usize,
        reason: String,
    },
    #[error("sampling budget exhausted: {accepted} of {requested} points accepted after {attempts} attempts")]
    SamplingExhausted {
        requested: usize,
        accepted: usize,
        attempts: usize,
    },
}

/// Metric, structure field and sampling domain in a single chart.
#[derive(Debug, Clone)]
pub struct ManifoldSpec {
    pub name: String,
    pub dim: usize,
    pub metric: Vec<Vec<Expr>>,
    pub xi: Vec<Expr>,
    pub epsilon: i8,
    pub k: Option<f64>,
    pub phi: Option<Vec<Vec<Expr>>>,
    pub domain: Vec<(f64, f64)>,
    pub exclude: Vec<Expr>,
    derivs: Derivatives,
}

#[derive(Debug, Clone)]
struct Derivatives {
    /// `dg[e][i][j] = d_e g_ij`, filled for i <= j.
    dg: Vec<Vec<Vec<Option<Expr>>>>,
    /// `ddg[e][f][i][j]`, filled for e <= f and i <= j.
    ddg: Vec<Vec<Vec<Vec<Option<Expr>>>>>,
    dxi: Vec<Vec<Expr>>,
}

impl Derivatives {
    fn build(metric: &[Vec<Expr>], xi: &[Expr]) -> Self {
        let n = metric.len();
        let mut dg = vec![vec![vec![None; n]; n]; n];
        let mut ddg = vec![vec![vec![vec![None; n]; n]; n]; n];
        for i in 0..n {
            for j in i..n {
                for e in 0..n {
                    let d = metric[i][j].differentiate(e);
                    for f in e..n {
                        ddg[e][f][i][j] = Some(d.differentiate(f));
                    }
                    dg[e][i][j] = Some(d);
                }
            }
        }
        let dxi = (0..n).map(|e| xi.iter().map(|c| c.differentiate(e)).collect()).collect();
        Derivatives { dg, ddg, dxi }
    }
}

impl PartialEq for ManifoldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.dim == other.dim
            && self.metric == other.metric
            && self.xi == other.xi
            && self.epsilon == other.epsilon
            && self.k == other.k
            && self.phi == other.phi
            && self.domain == other.domain
            && self.exclude == other.exclude
    }
}

/// Metric with exact first and second partial derivatives at a point.
#[derive(Debug, Clone)]
pub struct MetricJet {
    pub g: DMatrix<f64>,
    /// `dg[(e * n + i) * n + j] = d_e g_ij`
    pub dg: Vec<f64>,
    /// `ddg[((e * n + f) * n + i) * n + j] = d_e d_f g_ij`
    pub ddg: Vec<f64>,
}

impl ManifoldSpec {
    /// Builds a spec from already-parsed parts, caching metric derivatives.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        metric: Vec<Vec<Expr>>,
        xi: Vec<Expr>,
        epsilon: i8,
        k: Option<f64>,
        phi: Option<Vec<Vec<Expr>>>,
        domain: Vec<(f64, f64)>,
        exclude: Vec<Expr>,
    ) -> Self {
        let dim = metric.len();
        let derivs = Derivatives::build(&metric, &xi);
        ManifoldSpec {
            name: name.into(),
            dim,
            metric,
            xi,
            epsilon,
            k,
            phi,
            domain,
            exclude,
            derivs,
        }
    }

    pub fn eps(&self) -> f64 {
        f64::from(self.epsilon)
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>, GeometryError> {
        let n = self.dim;
        let mut g = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.metric[i][j].evaluate(p)?;
                g[(i, j)] = v;
                g[(j, i)] = v;
            }
        }
        Ok(g)
    }

    pub fn metric_value(&self, p: &[f64]) -> Result<MetricValue, GeometryError> {
        Ok(MetricValue::new(self.metric_at(p)?)?)
    }

    pub fn metric_jet(&self, p: &[f64]) -> Result<MetricJet, GeometryError> {
        let n = self.dim;
        let g = self.metric_at(p)?;
        let mut dg = vec![0.0; n * n * n];
        let mut ddg = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in i..n {
                for e in 0..n {
                    if let Some(d) = &self.derivs.dg[e][i][j] {
                        let v = d.evaluate(p)?;
                        dg[(e * n + i) * n + j] = v;
                        dg[(e * n + j) * n + i] = v;
                    }
                    for f in e..n {
                        if let Some(d) = &self.derivs.ddg[e][f][i][j] {
                            let v = d.evaluate(p)?;
                            for (a, b) in [(e, f), (f, e)] {
                                ddg[((a * n + b) * n + i) * n + j] = v;
                                ddg[((a * n + b) * n + j) * n + i] = v;
                            }
                        }
                    }
                }
            }
        }
        Ok(MetricJet { g, dg, ddg })
    }

    pub fn xi_at(&self, p: &[f64]) -> Result<Vec<f64>, ExprError> {
        self.xi.iter().map(|c| c.evaluate(p)).collect()
    }

    /// `dxi[e][a] = d_e xi^a`
    pub fn xi_jacobian(&self, p: &[f64]) -> Result<Vec<Vec<f64>>, ExprError> {
        self.derivs
            .dxi
            .iter()
            .map(|row| row.iter().map(|c| c.evaluate(p)).collect())
            .collect()
    }

    pub fn phi_at(&self, p: &[f64]) -> Result<Option<DMatrix<f64>>, ExprError> {
        let Some(phi) = &self.phi else { return Ok(None) };
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for a in 0..n {
            for b in 0..n {
                m[(a, b)] = phi[a][b].evaluate(p)?;
            }
        }
        Ok(Some(m))
    }

    /// Inside the domain box, outside every exclusion predicate, and with
    /// every metric component evaluable and nondegenerate.
    pub fn accepts(&self, p: &[f64]) -> bool {
        if p.len() != self.dim {
            return false;
        }
        let inside = p.iter().zip(&self.domain).all(|(x, (lo, hi))| *x >= *lo && *x <= *hi);
        if !inside {
            return false;
        }
        for pred in &self.exclude {
            match pred.evaluate(p) {
                Ok(v) if v <= 0.0 => {}
                _ => return false,
            }
        }
        self.metric_value(p).is_ok() && self.xi_at(p).is_ok()
    }

    /// `(g(xi,xi), eta(xi))` at a point.
    pub fn structure_values(&self, p: &[f64]) -> Result<(f64, f64), GeometryError> {
        let g = self.metric_at(p)?;
        let xi = self.xi_at(p)?;
        let mut gxx = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                gxx += g[(i, j)] * xi[i] * xi[j];
            }
        }
        Ok((gxx, self.eps() * gxx))
    }

    /// Checks `g(xi,xi) = epsilon` and `eta(xi) = 1` at each point.
    pub fn structure_gate(&self, points: &[Vec<f64>]) -> Result<(), SpecError> {
        for p in points {
            let (gxx, eta_xi) = self
                .structure_values(p)
                .map_err(|source| SpecError::GateEvaluation {
                    point: p.clone(),
                    source,
                })?;
            if (gxx - self.eps()).abs() >= STRUCTURE_TOL || (eta_xi - 1.0).abs() >= STRUCTURE_TOL {
                return Err(SpecError::StructureGate {
                    point: p.clone(),
                    value: gxx,
                    expected: self.eps(),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let strings = |m: &Vec<Vec<Expr>>| -> Value {
            Value::Array(
                m.iter()
                    .map(|row| Value::Array(row.iter().map(|e| Value::String(e.to_string())).collect()))
                    .collect(),
            )
        };
        json!({
            "name": self.name,
            "dimension": self.dim,
            "metric": strings(&self.metric),
            "xi": self.xi.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "epsilon": self.epsilon,
            "k": self.k,
            "phi": self.phi.as_ref().map(strings),
            "domain": self.domain.iter().map(|(lo, hi)| vec![*lo, *hi]).collect::<Vec<_>>(),
            "exclude": self.exclude.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        })
    }
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_at(src: &str, dim: usize, path: String) -> Result<Expr, SpecError> {
    parse(src, dim).map_err(|source| SpecError::Expr { path, source })
}

fn expr_field(v: &Value, dim: usize, path: String) -> Result<Expr, SpecError> {
    match v {
        Value::String(s) => parse_at(s, dim, path),
        Value::Number(num) => parse_at(&num.to_string(), dim, path),
        _ => Err(schema(path, "expected an expression string")),
    }
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, SpecError> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn matrix_field(v: &Value, dim: usize, path: &str, symmetric: bool) -> Result<Vec<Vec<Expr>>, SpecError> {
    let rows = array(v, path)?;
    if rows.len() != dim {
        return Err(schema(path, format!("expected {dim} rows, found {}", rows.len())));
    }
    let mut cells: Vec<Vec<Option<Expr>>> = vec![vec![None; dim]; dim];
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}[{i}]");
        let row = array(row, &rpath)?;
        // upper-triangular rows list columns i..n
        let offset = if symmetric && row.len() == dim - i && row.len() != dim {
            i
        } else if row.len() == dim {
            0
        } else {
            let hint = if symmetric {
                format!("{dim} entries (or {} for an upper-triangular row)", dim - i)
            } else {
                format!("{dim} entries")
            };
            return Err(schema(rpath, format!("expected {hint}, found {}", row.len())));
        };
        for (c, cell) in row.iter().enumerate() {
            let j = c + offset;
            if symmetric && cell.is_null() {
                continue;
            }
            cells[i][j] = Some(expr_field(cell, dim, format!("{path}[{i}][{j}]"))?);
        }
    }
    let mut out = vec![vec![Expr::int(0); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i][j] = match (&cells[i][j], &cells[j][i]) {
                (Some(a), _) => a.clone(),
                (None, Some(b)) if symmetric => b.clone(),
                _ => return Err(schema(format!("{path}[{i}][{j}]"), "missing entry")),
            };
        }
    }
    Ok(out)
}

/// Parses a manifold spec document and runs the structure gate at five
/// seeded probe points.
pub fn load_spec(document: &str) -> Result<ManifoldSpec, SpecError> {
    let v: Value = serde_json::from_str(document).map_err(|e| SpecError::Json(e.to_string()))?;
    let spec = spec_from_value(&v)?;
    let probes = sample_points(&spec, PROBE_COUNT, Strategy::Random, PROBE_SEED)?;
    spec.structure_gate(&probes.points)?;
    Ok(spec)
}

pub fn spec_from_value(v: &Value) -> Result<ManifoldSpec, SpecError> {
    let obj = v.as_object().ok_or_else(|| schema("$", "expected an object"))?;
    const KEYS: [&str; 9] = ["name", "dimension", "metric", "xi", "epsilon", "k", "phi", "domain", "exclude"];
    if let Some(extra) = obj.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(schema(format!("$.{extra}"), "unknown key"));
    }
    let field = |key: &str| obj.get(key).ok_or_else(|| schema(format!("$.{key}"), "missing required key"));

    let name = field("name")?
        .as_str()
        .ok_or_else(|| schema("$.name", "expected a string"))?
        .to_string();
    let dim = field("dimension")?
        .as_u64()
        .filter(|d| *d >= 1)
        .ok_or_else(|| schema("$.dimension", "expected a positive integer"))? as usize;
    let metric = matrix_field(field("metric")?, dim, "$.metric", true)?;
    for i in 0..dim {
        for j in (i + 1)..dim {
            if metric[i][j] != metric[j][i] {
                return Err(schema(
                    format!("$.metric[{j}][{i}]"),
                    format!("metric must be symmetric: `{}` vs `{}`", metric[i][j], metric[j][i]),
                ));
            }
        }
    }
    let xi_vals = array(field("xi")?, "$.xi")?;
    if xi_vals.len() != dim {
        return Err(schema("$.xi", format!("expected {dim} components, found {}", xi_vals.len())));
    }
    let xi = xi_vals
        .iter()
        .enumerate()
        .map(|(i, c)| expr_field(c, dim, format!("$.xi[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    let epsilon = match field("epsilon")?.as_i64() {
        Some(1) => 1,
        Some(-1) => -1,
        _ => return Err(schema("$.epsilon", "expected 1 or -1")),
    };
    let k = match obj.get("k") {
        None | Some(Value::Null) => None,
        Some(x) => Some(x.as_f64().ok_or_else(|| schema("$.k", "expected a number or null"))?),
    };
    let phi = match obj.get("phi") {
        None | Some(Value::Null) => None,
        Some(m) => Some(matrix_field(m, dim, "$.phi", false)?),
    };
    let domain = match obj.get("domain") {
        None | Some(Value::Null) => vec![(-1.0, 1.0); dim],
        Some(d) => {
            let rows = array(d, "$.domain")?;
            if rows.len() != dim {
                return Err(schema("$.domain", format!("expected {dim} intervals, found {}", rows.len())));
            }
            rows.iter()
                .enumerate()
                .map(|(i, r)| {
                    let path = format!("$.domain[{i}]");
                    let pair = array(r, &path)?;
                    match pair.as_slice() {
                        [lo, hi] => match (lo.as_f64(), hi.as_f64()) {
                            (Some(lo), Some(hi)) if lo <= hi => Ok((lo, hi)),
                            _ => Err(schema(path, "expected [lo, hi] with lo <= hi")),
                        },
                        _ => Err(schema(path, "expected [lo, hi]")),
                    }
                })
                .collect::<Result<Vec<_>, _>>()?
        }
    };
    let exclude = match obj.get("exclude") {
        None | Some(Value::Null) => Vec::new(),
        Some(list) => array(list, "$.exclude")?
            .iter()
            .enumerate()
            .map(|(i, e)| expr_field(e, dim, format!("$.exclude[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
    };
    Ok(ManifoldSpec::new(name, metric, xi, epsilon, k, phi, domain, exclude))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Builtin {
    FlatE,
    SphereStereo,
    HyperbolicBall,
    Minkowski,
    SasakianR3,
    KenmotsuWarped,
    DeSitter,
}

impl Builtin {
    pub const ALL: [Builtin; 7] = [
        Builtin::FlatE,
        Builtin::SphereStereo,
        Builtin::HyperbolicBall,
        Builtin::Minkowski,
        Builtin::SasakianR3,
        Builtin::KenmotsuWarped,
        Builtin::DeSitter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::FlatE => "flatE",
            Builtin::SphereStereo => "sphereStereo",
            Builtin::HyperbolicBall => "hyperbolicBall",
            Builtin::Minkowski => "minkowski",
            Builtin::SasakianR3 => "sasakianR3",
            Builtin::KenmotsuWarped => "kenmotsuWarped",
            Builtin::DeSitter => "deSitter",
        }
    }

    /// True for the built-ins whose curvature is constant.
    pub fn constant_curvature(self) -> bool {
        !matches!(self, Builtin::SasakianR3)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| SpecError::UnknownBuiltin(s.to_string()))
    }
}

const MAX_BUILTIN_DIM: usize = 7;

fn sum_of_squares(n: usize) -> String {
    (1..=n).map(|i| format!("x{i}^2")).collect::<Vec<_>>().join(" + ")
}

fn p(src: &str, n: usize) -> Expr {
    parse(src, n).unwrap_or_else(|e| panic!("built-in expression `{src}`: {e}"))
}

fn diag(entries: &[String], n: usize) -> Vec<Vec<Expr>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { p(&entries[i], n) } else { Expr::int(0) }).collect())
        .collect()
}

fn unit_axis(first: &str, n: usize) -> Vec<Expr> {
    (0..n).map(|i| if i == 0 { p(first, n) } else { Expr::int(0) }).collect()
}

/// Looks up a built-in by name.
pub fn builtin(name: &str, n: usize) -> Result<ManifoldSpec, SpecError> {
    builtin_spec(name.parse()?, n)
}

pub fn builtin_spec(b: Builtin, n: usize) -> Result<ManifoldSpec, SpecError> {
    let bad = |reason: &str| SpecError::BadDimension {
        name: b.name().to_string(),
        dim: n,
        reason: reason.to_string(),
    };
    if b == Builtin::SasakianR3 {
        if n != 3 {
            return Err(bad("the Sasakian model is three-dimensional"));
        }
    } else if !(2..=MAX_BUILTIN_DIM).contains(&n) {
        return Err(bad("supported dimensions are 2 to 7"));
    }
    let name = if b == Builtin::SasakianR3 {
        b.name().to_string()
    } else {
        format!("{}({n})", b.name())
    };
    let cube = |r: f64| vec![(-r, r); n];
    let spec = match b {
        Builtin::FlatE => ManifoldSpec::new(
            name,
            diag(&vec!["1".into(); n], n),
            unit_axis("1", n),
            1,
            Some(0.0),
            None,
            cube(1.0),
            Vec::new(),
        ),
        Builtin::SphereStereo => {
            let s = sum_of_squares(n);
            ManifoldSpec::new(
                name,
                diag(&vec![format!("4/(1 + {s})^2"); n], n),
                unit_axis(&format!("(1 + {s})/2"), n),
                1,
                Some(1.0),
                None,
                cube(2.0),
                vec![p(&format!("{s} - 4"), n)],
            )
        }
        Builtin::HyperbolicBall => {
            let s = sum_of_squares(n);
            ManifoldSpec::new(
                name,
                diag(&vec![format!("4/(1 - ({s}))^2"); n], n),
                unit_axis(&format!("(1 - ({s}))/2"), n),
                1,
                Some(-1.0),
                None,
                cube(0.9),
                vec![p(&format!("{s} - 9/10"), n)],
            )
        }
        Builtin::Minkowski => {
            let mut entries = vec!["1".to_string(); n];
            entries[0] = "-1".into();
            ManifoldSpec::new(name, diag(&entries, n), unit_axis("1", n), -1, Some(0.0), None, cube(1.0), Vec::new())
        }
        Builtin::SasakianR3 => {
            let m = |rows: [[&str; 3]; 3]| -> Vec<Vec<Expr>> {
                rows.iter().map(|r| r.iter().map(|s| p(s, 3)).collect()).collect()
            };
            ManifoldSpec::new(
                name,
                m([["(1 + x2^2)/4", "0", "-x2/4"], ["0", "1/4", "0"], ["-x2/4", "0", "1/4"]]),
                vec![Expr::int(0), Expr::int(0), Expr::int(2)],
                1,
                Some(1.0),
                Some(m([["0", "1", "0"], ["-1", "0", "0"], ["0", "x2", "0"]])),
                cube(1.0),
                Vec::new(),
            )
        }
        Builtin::KenmotsuWarped => {
            let mut entries = vec!["exp(2*x1)".to_string(); n];
            entries[0] = "1".into();
            ManifoldSpec::new(name, diag(&entries, n), unit_axis("1", n), 1, Some(-1.0), None, cube(1.0), Vec::new())
        }
        Builtin::DeSitter => {
            let mut entries = vec!["exp(2*x1)".to_string(); n];
            entries[0] = "-1".into();
            ManifoldSpec::new(name, diag(&entries, n), unit_axis("1", n), -1, Some(1.0), None, cube(1.0), Vec::new())
        }
    };
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Grid,
    #[serde(rename = "random-uniform")]
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSet {
    pub seed: u64,
    pub strategy: Strategy,
    pub points: Vec<Vec<f64>>,
}

/// Deterministic sample points inside the domain and outside the exclusions.
///
/// Random sampling draws uniformly from the domain box with at most
/// `10 * count` draws. The grid uses `m` nodes per axis (endpoints
/// included, lexicographic order), starting from the smallest `m >= 2` with
/// `m^n >= count` and refining while a level has at most
/// `10 * max(count, m0^n)` nodes.
pub fn sample_points(spec: &ManifoldSpec, count: usize, strategy: Strategy, seed: u64) -> Result<SampleSet, SpecError> {
    if count == 0 {
        return Err(schema("count", "at least one sample point is required"));
    }
    let n = spec.dim;
    let mut points = Vec::with_capacity(count);
    let mut attempts = 0usize;
    match strategy {
        Strategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            while points.len() < count && attempts < 10 * count {
                attempts += 1;
                let p: Vec<f64> = spec
                    .domain
                    .iter()
                    .map(|&(lo, hi)| if lo < hi { rng.random_range(lo..hi) } else { lo })
                    .collect();
                if spec.accepts(&p) {
                    points.push(p);
                }
            }
        }
        Strategy::Grid => {
            let nodes = |m: usize| m.checked_pow(n as u32).unwrap_or(usize::MAX);
            let mut m = 2;
            while nodes(m) < count {
                m += 1;
            }
            let cap = 10 * count.max(nodes(m));
            while points.len() < count && nodes(m) <= cap {
                points.clear();
                let mut idx = vec![0usize; n];
                for _ in 0..nodes(m) {
                    attempts += 1;
                    let p: Vec<f64> = idx
                        .iter()
                        .zip(&spec.domain)
                        .map(|(&i, &(lo, hi))| lo + (hi - lo) * i as f64 / (m - 1) as f64)
                        .collect();
                    if spec.accepts(&p) {
                        points.push(p);
                        if points.len() == count {
                            break;
                        }
                    }
                    for slot in (0..n).rev() {
                        idx[slot] += 1;
                        if idx[slot] < m {
                            break;
                        }
                        idx[slot] = 0;
                    }
                }
                m += 1;
            }
        }
    }
    if points.len() < count {
        return Err(SpecError::SamplingExhausted {
            requested: count,
            accepted: points.len(),
            attempts,
        });
    }
    Ok(SampleSet { seed, strategy, points })
}
