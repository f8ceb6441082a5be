//! Numerical verification of curvature identities on semi-Riemannian
//! manifolds carrying a unit field in a k-nullity distribution.

#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod curvature;
pub mod expr;
pub mod manifold;
pub mod nullity;
pub mod report;
pub mod tensor;
pub mod tfamily;

pub use analysis::{AnalysisError, DerivationResidual, MatrixReport, RecurrenceFit, TheoremCheckResult};
pub use curvature::{geometry_at, GeometryAtPoint, GeometryError};
pub use expr::{Expr, ExprError, SourceSpan};
pub use manifold::{builtin, load_spec, sample_points, Builtin, ManifoldSpec, SampleSet, SpecError, Strategy};
pub use nullity::{verify_nullity, NullityReport};
pub use report::CheckReport;
pub use tensor::{DenseTensor, MetricValue, TensorError, Variance};
pub use tfamily::{preset_coeffs, preset_coeffs_default, PresetError, PresetId, TCoeffs};
