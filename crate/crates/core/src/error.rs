use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter {param} lies outside the curve domain")]
    ParamOutOfDomain { param: Complex64 },

    #[error("parameter {param} is a marked point of the curve")]
    ParamAtPuncture { param: Complex64 },

    #[error("scene invalid at `{path}`: {message}")]
    SceneInvalid { path: String, message: String },

    /// A TYPE invariant does not hold; `invariant` names it as `Type.rule`.
    #[error("invariant `{invariant}` violated: {detail}")]
    InvariantViolated { invariant: &'static str, detail: String },

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    #[error("integrand is not finite at parameters {params:?}")]
    NonFiniteIntegrand { params: Vec<Complex64> },

    #[error("adaptive quadrature hit max_depth without meeting tolerance (err {err_estimate:e})")]
    MaxDepthExceeded { err_estimate: f64 },

    #[error("curves too close: sampled distance {distance:e} < 1e-6")]
    CurvesTooClose { distance: f64 },

    #[error("principal value does not converge: {reason}")]
    PvNotConverging { reason: String },

    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,

    #[error("projection direction {direction:?} is not generic")]
    DegenerateProjection { direction: [f64; 3] },

    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),

    #[error("root at t = {t} is not simple")]
    NonSimpleRoot { t: Complex64 },

    #[error("composed polynomial vanishes identically (curve lies in the surface)")]
    IdenticallyZero,

    #[error("surface gradients are linearly dependent at s = {s}")]
    DependentGradients { s: Complex64 },

    #[error("multiplier is not a polynomial of degree <= {max_degree}: {detail}")]
    MultiplierNotPolynomial { max_degree: usize, detail: String },

    #[error("pole collision at t = {t}")]
    PoleCollision { t: Complex64 },

    #[error("the two lines intersect")]
    LinesIntersect,

    #[error("hyperplanes are not in general position: {0}")]
    NonGenericHyperplanes(String),

    #[error("eigenvalue iteration failed for a degree-{degree} polynomial")]
    RootFinding { degree: usize },
}

impl Error {
    pub(crate) fn invariant(invariant: &'static str, detail: impl Into<String>) -> Self {
        Error::InvariantViolated {
            invariant,
            detail: detail.into(),
        }
    }

    /// True for errors caused by malformed input rather than numerics.
    pub fn is_scene_error(&self) -> bool {
        matches!(
            self,
            Error::SceneInvalid { .. } | Error::InvariantViolated { .. } | Error::InvalidConfig(_)
        )
    }
}
