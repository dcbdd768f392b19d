use thiserror::Error;

/// Location of a nondifferentiable unit inside a model.
///
/// For layered networks `layer` is the index of the elementwise layer and
/// `unit` the coordinate whose pre-activation sits on a kink. For max trees
/// `layer` is the preorder index of the max node and `unit` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct KinkUnit {
    pub layer: usize,
    pub unit: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {index} = {value} lies outside the box [{lower}, {upper}]")]
    OutOfDomain {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("non-finite number in {context}")]
    NonFinite { context: String },

    #[error("unsupported node in rewrite: {what}")]
    UnsupportedNode { what: String },

    #[error("softplus sharpness must be positive and finite, got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error("Taylor expansion exceeded the term cap ({terms} > {cap})")]
    OrderTooLarge { terms: usize, cap: usize },

    #[error("function is not differentiable at the queried point ({} kink unit(s))", kinks.len())]
    NondifferentiableAt { x: Vec<f64>, kinks: Vec<KinkUnit> },

    #[error("finite-difference probe straddles a kink near the queried point")]
    NondifferentiableNearby { x: Vec<f64> },

    #[error("path endpoints are not bound; call bind(x_bar, x_prime) first")]
    Unbound,

    #[error("t = {t} is an exact breakpoint of the path")]
    AtBreakpoint { t: f64 },

    #[error("ensemble paths have no pointwise evaluation")]
    EnsembleNotPointwise,

    #[error("ensemble weights must be non-negative and sum to 1 (sum = {sum})")]
    NotNormalized { sum: f64 },

    #[error("path is nondifferentiable on a non-negligible set (flagged fraction {fraction:.3e})")]
    NondifferentiablePath { fraction: f64 },

    #[error("quadrature did not converge: estimate still changing by {change:.3e} at {panels} panels")]
    QuadratureDiverged { change: f64, panels: usize },

    #[error("exact Shapley enumeration is capped at {cap} inputs, got {n}")]
    TooManyInputs { n: usize, cap: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
