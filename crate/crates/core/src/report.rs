use serde::Serialize;

/// Tolerance tiers.
pub const TOL_STRUCTURE: f64 = 1e-9;
pub const TOL_EXACT: f64 = 1e-8;
pub const TOL_FD: f64 = 1e-6;

/// Note attached to a failure on an input whose standing hypothesis holds.
pub const NOTE_IMPLEMENTATION_DEFECT: &str = "implementation-defect";
/// Note attached when a displayed identity fails but its corrected form holds.
pub const NOTE_PAPER_REFUTED: &str = "paper-identity-refuted";
pub const NOTE_HYPOTHESIS_FAILED: &str = "hypothesis-not-satisfied";

/// Residuals of one named identity over a set of sample points.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckReport {
    pub id: String,
    pub paper_eq: String,
    /// Residual at each sample point, in sample order.
    pub points: Vec<f64>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckReport {
    pub fn new(id: impl Into<String>, paper_eq: impl Into<String>, points: Vec<f64>, tol: f64) -> Self {
        let max_residual = max_residual(&points);
        CheckReport {
            id: id.into(),
            paper_eq: paper_eq.into(),
            pass: max_residual < tol,
            points,
            max_residual,
            tol,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Tags a failure with `note` and leaves passing reports untouched.
    pub fn note_on_failure(self, note: &str) -> Self {
        if self.pass {
            self
        } else {
            self.with_note(note)
        }
    }
}

/// Maximum that propagates NaN, so a broken evaluation never passes.
pub fn max_residual(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m: f64, &v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nan_never_passes() {
        let r = CheckReport::new("x", "eq", vec![0.0, f64::NAN, 1e-12], 1e-8);
        assert!(!r.pass);
        assert!(r.max_residual.is_nan());
    }

    #[test]
    fn json_keys() {
        let r = CheckReport::new("x", "eq-ricci", vec![1e-12], 1e-8);
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["id", "maxResidual", "paperEq", "pass", "points", "tol"]);
        let v = serde_json::to_value(r.with_note("n")).unwrap();
        assert_eq!(v["note"], "n");
    }
}
