use thiserror::Error;

/// Coarse failure classes, used by the command line front end to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Parse,
    Validation,
    Convergence,
    Verification,
    Internal,
}

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate triangle{}: {detail}", face.map(|f| format!(" at face {f}")).unwrap_or_default())]
    TriangleDegenerate { face: Option<usize>, detail: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty complex")]
    EmptyComplex,

    #[error("invalid incidence: {0}")]
    Incidence(String),

    #[error("non-manifold complex: {0}")]
    NonManifold(String),

    #[error("non-orientable complex: edge {edge} is traversed in the same direction by both sides")]
    NonOrientable { edge: usize },

    #[error("disconnected complex")]
    Disconnected,

    #[error("genus {genus} is too low; a closed surface of genus > 1 is required")]
    GenusTooLow { genus: i64 },

    #[error("no weight given for edge {edge}")]
    MissingWeight { edge: usize },

    #[error("weight {value} on edge {edge} is outside {range}")]
    WeightOutOfRange { edge: usize, value: f64, range: &'static str },

    #[error("zero weight on edge {edge}; ideal patterns need strictly positive angles")]
    ZeroWeight { edge: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIter { iterations: usize, residual: f64 },

    #[error("solver stalled at residual {residual:e}")]
    Stalled { residual: f64 },

    #[error("flow did not converge within {steps} steps (residual {residual:e})")]
    MaxSteps { steps: usize, residual: f64 },

    #[error("continuation stalled after t = {last_t} (residual {residual:e})")]
    ContinuationStalled { last_t: f64, q: Vec<f64>, residual: f64 },

    #[error("star radii did not decrease over three consecutive stages ending at stage {stage}")]
    NonDecayingStar { stage: usize },

    #[error("quadrature did not reach tolerance {tol:e} (estimate {estimate:e})")]
    QuadratureNonConvergence { tol: f64, estimate: f64 },

    #[error("curvature residual {residual:e} exceeds layout gate {gate:e}")]
    CurvatureGate { residual: f64, gate: f64 },

    #[error("numeric drift while developing: side mismatch {mismatch:e}")]
    NumericDrift { mismatch: f64 },

    #[error("circles of edge {edge} do not intersect (inversive distance {value})")]
    NonIntersecting { edge: usize, value: f64 },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            Parse(_) => ErrorClass::Parse,
            EmptyComplex | Incidence(_) | NonManifold(_) | NonOrientable { .. } | Disconnected
            | GenusTooLow { .. } | MissingWeight { .. } | WeightOutOfRange { .. }
            | ZeroWeight { .. } | Precondition(_) | Domain(_) => ErrorClass::Validation,
            MaxIter { .. } | Stalled { .. } | MaxSteps { .. } | ContinuationStalled { .. }
            | NonDecayingStar { .. } | QuadratureNonConvergence { .. } => ErrorClass::Convergence,
            CurvatureGate { .. } | NumericDrift { .. } | NonIntersecting { .. } => {
                ErrorClass::Verification
            }
            TriangleDegenerate { .. } => ErrorClass::Internal,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
