//! Feature attribution with checkable guarantees.
//!
//! The crate computes integrated gradients, general path attributions, and
//! exact Shapley values for two concrete function classes — closed analytic
//! expression trees and layered (ReLU/softplus) networks — and then turns
//! the axioms those methods are supposed to satisfy into machine-checkable
//! property suites with serializable counterexample witnesses. A companion
//! module quantifies the numerical side: quadrature refinement, softplus
//! smoothing of kinks, and Taylor truncation.

pub mod approx;
pub mod attribution;
pub mod axioms;
pub mod error;
pub mod func_model;
pub mod grad;
pub mod numeric;
pub mod paths;

pub use approx::{
    default_alpha_grid, path_differentiability_probe, softplus_convergence_study,
    taylor_convergence_study, uniform_convergence_probe, ConvergenceSeries,
};
pub use attribution::{
    ig, ig_monomial_closed_form, legendre_rule, path_attribution, shapley, Attribution,
    AttributionMethod, IgMethod, MonomialClosedForm, PathMethod, QuadRule, QuadratureConfig,
    ShapleyMethod, FLAGGED_NODE_LIMIT, GRADING_RATIO, JITTER_T, MAX_GAUSS_ORDER,
    SHAPLEY_MAX_INPUTS,
};
pub use axioms::{
    check, check_all, check_asi, check_c0_symmetric_monotonicity, check_completeness,
    check_dummy, check_implementation_invariance, check_linearity, check_monomial_distribution,
    check_ndp, check_proportionality, check_strong_symmetry, check_symmetric_monotonicity,
    check_symmetry_preserving, reports_to_csv, violation, AffineMap, AxiomCase, AxiomId,
    AxiomReport, CaseGenerator, PairedLshapeMethod, Verdict, DEFAULT_CASES, DEFAULT_TOLERANCE,
    EPSILON_SECANT, SECANT_GRID_POINTS,
};
pub use error::{Error, KinkUnit, Result};
pub use func_model::{
    max_net, model_from_json, model_to_json, monomial, rewrite_max_to_relu, taylor,
    taylor_with_cap, Activation, AnalyticExpr, ComposeAffine, Domain, Layer, LayeredNet,
    LinearCombination, MaxTree, Model, ModelFile, MultiIndex, ScalarFunction,
    TAYLOR_TERM_CAP,
};
pub use grad::{fd_check, grad, partial, GradResult, KINK_EPSILON};
pub use paths::{EnsembleMember, PathKind, PathSpec};
