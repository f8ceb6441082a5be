#![allow(dead_code)]

use tcurv_core::curvature::GeometryAtPoint;
use tcurv_core::manifold::{builtin, sample_points, ManifoldSpec, Strategy};
use tcurv_core::nullity::geometries;

/// Every built-in at a representative dimension.
pub const FIXTURES: [(&str, usize); 7] = [
    ("flatE", 3),
    ("sphereStereo", 3),
    ("hyperbolicBall", 3),
    ("minkowski", 4),
    ("sasakianR3", 3),
    ("kenmotsuWarped", 3),
    ("deSitter", 4),
];

pub const CONSTANT_CURVATURE: [(&str, usize); 6] = [
    ("flatE", 3),
    ("sphereStereo", 3),
    ("hyperbolicBall", 3),
    ("minkowski", 4),
    ("kenmotsuWarped", 3),
    ("deSitter", 4),
];

pub fn fixture(name: &str, n: usize, count: usize, seed: u64) -> (ManifoldSpec, Vec<GeometryAtPoint>) {
    let spec = builtin(name, n).unwrap();
    let pts = sample_points(&spec, count, Strategy::Random, seed).unwrap();
    let geos = geometries(&spec, &pts.points).unwrap();
    (spec, geos)
}
