//! Shared setup for the benchmarks.

use tcurv_core::curvature::GeometryAtPoint;
use tcurv_core::manifold::{builtin, sample_points, ManifoldSpec, Strategy};
use tcurv_core::nullity::geometries;

/// A built-in manifold with geometry evaluated at `count` seeded points.
pub fn fixture(name: &str, n: usize, count: usize) -> (ManifoldSpec, Vec<GeometryAtPoint>) {
    let spec = builtin(name, n).expect("built-in exists");
    let points = sample_points(&spec, count, Strategy::Random, 0).expect("sampling succeeds");
    let geos = geometries(&spec, &points.points).expect("geometry evaluates");
    (spec, geos)
}
