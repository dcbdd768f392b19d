//! Function classes and the evaluation/differentiation contract shared by
//! every attribution method.
//!
//! Two concrete classes carry the whole library: closed analytic expression
//! trees ([`AnalyticExpr`]) and layered networks ([`LayeredNet`]), plus max
//! trees that rewrite exactly into the latter. [`Model`] wraps them behind
//! one enum; [`ScalarFunction`] is the object-safe trait the attribution and
//! axiom machinery actually consumes, so combinators (linear combinations,
//! affine reparametrizations) and user-defined functions plug in uniformly.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grad::GradResult;
use crate::numeric::ulp_distance;

pub mod expr;
pub mod json;
pub mod max_tree;
pub mod net;

pub use expr::{monomial, taylor, taylor_with_cap, AnalyticExpr, Dual, TAYLOR_TERM_CAP};
pub use json::{model_from_json, model_to_json, ModelFile};
pub use max_tree::{max_net, rewrite_max_to_relu, AffineTerm, MaxTree};
pub use net::{Activation, Layer, LayeredNet};

/// Membership slack, in units in the last place, when testing whether a
/// point lies in a closed box. Quadrature nodes and difference-quotient
/// probes can land a rounding error outside an endpoint they are
/// mathematically on; eight ulps absorbs that without admitting genuinely
/// exterior points.
const DOMAIN_ULP_SLACK: usize = 8;

/// A closed axis-aligned box: the common domain type for every function
/// class. Bounds are validated on construction (and therefore on
/// deserialization): finite, matching lengths, strictly ordered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRaw")]
pub struct Domain {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

#[derive(Deserialize)]
struct DomainRaw {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl TryFrom<DomainRaw> for Domain {
    type Error = Error;

    fn try_from(raw: DomainRaw) -> Result<Self> {
        Domain::new(raw.lower, raw.upper)
    }
}

impl Domain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
        }
        if lower.is_empty() {
            return Err(Error::InvalidModel("box must have at least one coordinate".into()));
        }
        for (i, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::NonFinite { context: format!("box bound {i}") });
            }
            if lo >= hi {
                return Err(Error::InvalidModel(format!(
                    "box coordinate {i} has lower bound {lo} >= upper bound {hi}"
                )));
            }
        }
        Ok(Domain { lower, upper })
    }

    /// The box `[-half_width, half_width]^dim`. Panics on nonsense arguments;
    /// this is a construction shorthand, not a parsing surface.
    pub fn centered(dim: usize, half_width: f64) -> Self {
        assert!(dim > 0, "centered box needs at least one coordinate");
        assert!(
            half_width.is_finite() && half_width > 0.0,
            "centered box needs a positive finite half-width, got {half_width}"
        );
        Domain {
            lower: vec![-half_width; dim],
            upper: vec![half_width; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// Checks that `x` lies in the box, with [`DOMAIN_ULP_SLACK`] ulps of
    /// grace at each face.
    pub fn contains(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        for (i, ((&xi, &lo), &hi)) in x.iter().zip(&self.lower).zip(&self.upper).enumerate() {
            if !xi.is_finite() {
                return Err(Error::NonFinite { context: format!("input coordinate {i}") });
            }
            let inside = (lo..=hi).contains(&xi)
                || ulp_distance(xi, lo) <= DOMAIN_ULP_SLACK
                || ulp_distance(xi, hi) <= DOMAIN_ULP_SLACK;
            if !inside {
                return Err(Error::OutOfDomain { index: i, value: xi, lower: lo, upper: hi });
            }
        }
        Ok(())
    }

    /// Intersection of two boxes; errors if any coordinate becomes empty.
    pub fn intersect(&self, other: &Domain) -> Result<Domain> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let lower: Vec<f64> = self
            .lower
            .iter()
            .zip(&other.lower)
            .map(|(&a, &b)| a.max(b))
            .collect();
        let upper: Vec<f64> = self
            .upper
            .iter()
            .zip(&other.upper)
            .map(|(&a, &b)| a.min(b))
            .collect();
        Domain::new(lower, upper)
    }
}

/// A multi-index `m ∈ ℕ^n`: exponent vector of a monomial, order vector of a
/// mixed partial derivative. Serializes as a bare array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex {
    pub exponents: Vec<usize>,
}

impl MultiIndex {
    pub fn new(exponents: Vec<usize>) -> Self {
        MultiIndex { exponents }
    }

    /// `‖m‖₁ = Σ mᵢ`, the total degree.
    pub fn one_norm(&self) -> usize {
        self.exponents.iter().sum()
    }

    /// `[m]! = ∏ mᵢ!` as a float (exact for the orders Taylor expansion
    /// reaches in practice).
    pub fn factorial(&self) -> f64 {
        self.exponents
            .iter()
            .map(|&e| (1..=e).map(|k| k as f64).product::<f64>())
            .product()
    }
}

/// The evaluation/differentiation contract every attribution method builds
/// on: a scalar-valued function on a box that can report its value, its
/// gradient (with kink flags where one-sided), and the signals whose zero
/// crossings locate its nondifferentiable set.
pub trait ScalarFunction: Send + Sync {
    fn input_dim(&self) -> usize;

    fn domain(&self) -> &Domain;

    fn eval(&self, x: &[f64]) -> Result<f64>;

    fn gradient(&self, x: &[f64]) -> Result<GradResult>;

    /// Continuous signals that are zero exactly on the function's
    /// nondifferentiable set (e.g. ReLU pre-activations). Smooth functions
    /// return an empty vector. Quadrature samples these along a path and
    /// splits panels at sign changes.
    fn kink_signals(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.domain().contains(x)?;
        Ok(Vec::new())
    }
}

/// A concrete, serializable function: the form models take on disk and in
/// axiom-check witnesses. JSON representation lives in [`json`].
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Expr { expr: AnalyticExpr, domain: Domain },
    Net(LayeredNet),
    MaxTree { tree: MaxTree, domain: Domain },
    Monomial { exponents: MultiIndex, center: Vec<f64>, domain: Domain },
}

impl Model {
    pub fn expr(expr: AnalyticExpr, domain: Domain) -> Result<Model> {
        if expr.has_non_finite() {
            return Err(Error::NonFinite { context: "expression constant".into() });
        }
        if let Some(v) = expr.max_var_index() {
            if v >= domain.dim() {
                return Err(Error::InvalidModel(format!(
                    "expression references input {v} but the box has dimension {}",
                    domain.dim()
                )));
            }
        }
        Ok(Model::Expr { expr, domain })
    }

    pub fn net(net: LayeredNet) -> Model {
        Model::Net(net)
    }

    pub fn max_tree(tree: MaxTree, domain: Domain) -> Result<Model> {
        if tree.has_non_finite() {
            return Err(Error::NonFinite { context: "max tree coefficient".into() });
        }
        if let Some(v) = tree.max_var_index() {
            if v >= domain.dim() {
                return Err(Error::InvalidModel(format!(
                    "max tree references input {v} but the box has dimension {}",
                    domain.dim()
                )));
            }
        }
        Ok(Model::MaxTree { tree, domain })
    }

    pub fn monomial(exponents: MultiIndex, center: Vec<f64>, domain: Domain) -> Result<Model> {
        if exponents.exponents.len() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                got: exponents.exponents.len(),
            });
        }
        if center.len() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), got: center.len() });
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite { context: "monomial center".into() });
        }
        for &e in &exponents.exponents {
            if i32::try_from(e).is_err() {
                return Err(Error::InvalidModel(format!("monomial exponent {e} is out of range")));
            }
        }
        Ok(Model::Monomial { exponents, center, domain })
    }

    /// The analytic expression computing the same function, when one exists.
    /// Networks must be ReLU-free; max trees never qualify.
    pub fn to_expr(&self) -> Result<AnalyticExpr> {
        match self {
            Model::Expr { expr, .. } => Ok(expr.clone()),
            Model::Net(net) => net.to_expr(),
            Model::MaxTree { .. } => Err(Error::UnsupportedNode {
                what: "max node has no analytic expression form".into(),
            }),
            Model::Monomial { exponents, center, .. } => monomial(exponents, center),
        }
    }
}

fn monomial_value(exponents: &[usize], center: &[f64], x: &[f64]) -> f64 {
    exponents
        .iter()
        .zip(center)
        .zip(x)
        .map(|((&e, &c), &xi)| (xi - c).powi(e as i32))
        .product()
}

impl ScalarFunction for Model {
    fn input_dim(&self) -> usize {
        match self {
            Model::Net(net) => net.input_dim(),
            Model::Expr { domain, .. }
            | Model::MaxTree { domain, .. }
            | Model::Monomial { domain, .. } => domain.dim(),
        }
    }

    fn domain(&self) -> &Domain {
        match self {
            Model::Net(net) => net.domain(),
            Model::Expr { domain, .. }
            | Model::MaxTree { domain, .. }
            | Model::Monomial { domain, .. } => domain,
        }
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        let v = match self {
            Model::Net(net) => return net.eval(x),
            Model::Expr { expr, domain } => {
                domain.contains(x)?;
                expr.eval_raw(x)
            }
            Model::MaxTree { tree, domain } => {
                domain.contains(x)?;
                tree.eval_raw(x)
            }
            Model::Monomial { exponents, center, domain } => {
                domain.contains(x)?;
                monomial_value(&exponents.exponents, center, x)
            }
        };
        if !v.is_finite() {
            return Err(Error::NonFinite { context: "function value".into() });
        }
        Ok(v)
    }

    fn gradient(&self, x: &[f64]) -> Result<GradResult> {
        match self {
            Model::Net(net) => net.gradient(x),
            Model::Expr { expr, domain } => {
                domain.contains(x)?;
                let mut gradient = Vec::with_capacity(domain.dim());
                for i in 0..domain.dim() {
                    let d = expr.eval_dual(x, i).d;
                    if !d.is_finite() {
                        return Err(Error::NonFinite {
                            context: format!("gradient component {i}"),
                        });
                    }
                    gradient.push(d);
                }
                Ok(GradResult { gradient, differentiable: true, kinks: Vec::new() })
            }
            Model::MaxTree { tree, domain } => {
                domain.contains(x)?;
                let (_, gradient, kinks) = tree.gradient_raw(x, domain.dim());
                Ok(GradResult { gradient, differentiable: kinks.is_empty(), kinks })
            }
            Model::Monomial { exponents, center, domain } => {
                domain.contains(x)?;
                let m = &exponents.exponents;
                let mut gradient = vec![0.0; m.len()];
                for i in 0..m.len() {
                    if m[i] == 0 {
                        continue;
                    }
                    let mut gi = m[i] as f64 * (x[i] - center[i]).powi(m[i] as i32 - 1);
                    for j in 0..m.len() {
                        if j != i {
                            gi *= (x[j] - center[j]).powi(m[j] as i32);
                        }
                    }
                    if !gi.is_finite() {
                        return Err(Error::NonFinite {
                            context: format!("gradient component {i}"),
                        });
                    }
                    gradient[i] = gi;
                }
                Ok(GradResult { gradient, differentiable: true, kinks: Vec::new() })
            }
        }
    }

    fn kink_signals(&self, x: &[f64]) -> Result<Vec<f64>> {
        match self {
            Model::Net(net) => net.kink_signals(x),
            Model::MaxTree { tree, domain } => {
                domain.contains(x)?;
                Ok(tree.kink_signals_raw(x))
            }
            Model::Expr { domain, .. } | Model::Monomial { domain, .. } => {
                domain.contains(x)?;
                Ok(Vec::new())
            }
        }
    }
}

impl ScalarFunction for LayeredNet {
    fn input_dim(&self) -> usize {
        LayeredNet::input_dim(self)
    }

    fn domain(&self) -> &Domain {
        LayeredNet::domain(self)
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        LayeredNet::eval(self, x)
    }

    fn gradient(&self, x: &[f64]) -> Result<GradResult> {
        LayeredNet::gradient(self, x)
    }

    fn kink_signals(&self, x: &[f64]) -> Result<Vec<f64>> {
        LayeredNet::kink_signals(self, x)
    }
}

/// `Σᵢ αᵢ Fᵢ` on the intersection of the members' boxes. The gradient is the
/// coefficient-weighted sum; kink flags and kink signals are the union of
/// the members' (a kink of the sum is always a kink of some member).
pub struct LinearCombination {
    terms: Vec<(f64, Arc<dyn ScalarFunction>)>,
    domain: Domain,
}

impl LinearCombination {
    pub fn new(terms: Vec<(f64, Arc<dyn ScalarFunction>)>) -> Result<Self> {
        let Some(((first_coeff, first), rest)) = terms.split_first() else {
            return Err(Error::InvalidModel("linear combination needs at least one term".into()));
        };
        if !first_coeff.is_finite() {
            return Err(Error::NonFinite { context: "combination coefficient".into() });
        }
        let mut domain = first.domain().clone();
        for (coeff, f) in rest {
            if !coeff.is_finite() {
                return Err(Error::NonFinite { context: "combination coefficient".into() });
            }
            domain = domain.intersect(f.domain())?;
        }
        Ok(LinearCombination { terms, domain })
    }
}

impl ScalarFunction for LinearCombination {
    fn input_dim(&self) -> usize {
        self.domain.dim()
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn eval(&self, x: &[f64]) -> Result<f64> {
        self.domain.contains(x)?;
        let mut v = 0.0;
        for (coeff, f) in &self.terms {
            v += coeff * f.eval(x)?;
        }
        if !v.is_finite() {
            return Err(Error::NonFinite { context: "combination value".into() });
        }
        Ok(v)
    }

    fn gradient(&self, x: &[f64]) -> Result<GradResult> {
        self.domain.contains(x)?;
        let mut gradient = vec![0.0; self.domain.dim()];
        let mut kinks = Vec::new();
        for (coeff, f) in &self.terms {
            let g = f.gradient(x)?;
            for (acc, gi) in gradient.iter_mut().zip(g.gradient) {
                *acc += coeff * gi;
            }
            kinks.extend(g.kinks);
        }
        Ok(GradResult { gradient, differentiable: kinks.is_empty(), kinks })
    }

    fn kink_signals(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.domain.contains(x)?;
        let mut signals = Vec::new();
        for (_, f) in &self.terms {
            signals.extend(f.kink_signals(x)?);
        }
        Ok(signals)
    }
}

/// `G(y) = F(c ⊙ y + d)` for per-coordinate `c ≠ 0`: the reparametrized
/// function in the affine-scale-invariance axiom. Its box is the exact
/// preimage of `F`'s box, and its gradient is the chain rule `cᵢ · ∂ᵢF`.
pub struct ComposeAffine {
    inner: Arc<dyn ScalarFunction>,
    scale: Vec<f64>,
    shift: Vec<f64>,
    domain: Domain,
}

impl ComposeAffine {
    pub fn new(inner: Arc<dyn ScalarFunction>, scale: Vec<f64>, shift: Vec<f64>) -> Result<Self> {
        let n = inner.input_dim();
        if scale.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: scale.len() });
        }
        if shift.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: shift.len() });
        }
        if scale.iter().any(|c| !c.is_finite() || *c == 0.0) {
            return Err(Error::InvalidModel(
                "affine reparametrization needs finite nonzero scales".into(),
            ));
        }
        if shift.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite { context: "affine reparametrization shift".into() });
        }
        let mut lower = Vec::with_capacity(n);
        let mut upper = Vec::with_capacity(n);
        for i in 0..n {
            let a = (inner.domain().lower()[i] - shift[i]) / scale[i];
            let b = (inner.domain().upper()[i] - shift[i]) / scale[i];
            lower.push(a.min(b));
            upper.push(a.max(b));
        }
        let domain = Domain::new(lower, upper)?;
        Ok(ComposeAffine { inner, scale, shift, domain })
    }

    fn map(&self, y: &[f64]) -> Vec<f64> {
        y.iter()
            .zip(&self.scale)
            .zip(&self.shift)
            .map(|((&yi, &c), &d)| c * yi + d)
            .collect()
    }
}

impl ScalarFunction for ComposeAffine {
    fn input_dim(&self) -> usize {
        self.domain.dim()
    }

    fn domain(&self) -> &Domain {
        &self.domain
    }

    fn eval(&self, y: &[f64]) -> Result<f64> {
        self.domain.contains(y)?;
        self.inner.eval(&self.map(y))
    }

    fn gradient(&self, y: &[f64]) -> Result<GradResult> {
        self.domain.contains(y)?;
        let mut g = self.inner.gradient(&self.map(y))?;
        for (gi, &c) in g.gradient.iter_mut().zip(&self.scale) {
            *gi *= c;
        }
        Ok(g)
    }

    fn kink_signals(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.domain.contains(y)?;
        self.inner.kink_signals(&self.map(y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x_squared_model() -> Model {
        Model::expr(
            AnalyticExpr::pow(AnalyticExpr::var(0), 2),
            Domain::centered(1, 4.0),
        )
        .unwrap()
    }

    #[test]
    fn domain_rejects_bad_bounds() {
        assert!(matches!(
            Domain::new(vec![0.0, 0.0], vec![1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Domain::new(vec![1.0], vec![1.0]),
            Err(Error::InvalidModel(_))
        ));
        assert!(matches!(
            Domain::new(vec![f64::NAN], vec![1.0]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn contains_has_ulp_grace_at_faces() {
        let d = Domain::centered(1, 1.0);
        assert!(d.contains(&[1.0]).is_ok(), "closed box includes its faces");
        let just_outside = f64::from_bits(1.0_f64.to_bits() + 3);
        assert!(d.contains(&[just_outside]).is_ok(), "a few ulps of grace");
        match d.contains(&[1.1]) {
            Err(Error::OutOfDomain { index: 0, value, .. }) => assert_eq!(value, 1.1),
            other => panic!("expected OutOfDomain, got {other:?}"),
        }
        assert!(matches!(
            d.contains(&[f64::NAN]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn intersect_narrows_and_rejects_disjoint() {
        let a = Domain::new(vec![0.0], vec![2.0]).unwrap();
        let b = Domain::new(vec![1.0], vec![3.0]).unwrap();
        let c = a.intersect(&b).unwrap();
        assert_eq!((c.lower()[0], c.upper()[0]), (1.0, 2.0));
        let far = Domain::new(vec![5.0], vec![6.0]).unwrap();
        assert!(a.intersect(&far).is_err());
    }

    #[test]
    fn multi_index_norm_and_factorial() {
        let m = MultiIndex::new(vec![2, 1, 0]);
        assert_eq!(m.one_norm(), 3);
        assert_eq!(m.factorial(), 2.0);
        assert_eq!(MultiIndex::new(vec![0, 0]).factorial(), 1.0);
        assert_eq!(MultiIndex::new(vec![4]).factorial(), 24.0);
    }

    #[test]
    fn expr_model_eval_and_gradient() {
        let f = x_squared_model();
        assert_eq!(f.eval(&[3.0]).unwrap(), 9.0);
        let g = f.gradient(&[3.0]).unwrap();
        assert_eq!(g.gradient, vec![6.0]);
        assert!(g.differentiable);
        assert!(matches!(f.eval(&[5.0]), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn monomial_model_matches_its_expression_form() {
        let m = Model::monomial(
            MultiIndex::new(vec![2, 1]),
            vec![0.5, -0.5],
            Domain::centered(2, 3.0),
        )
        .unwrap();
        let e = m.to_expr().unwrap();
        let x = [1.5, 2.0];
        assert!((m.eval(&x).unwrap() - e.eval_raw(&x)).abs() < 1e-15);
        let g = m.gradient(&x).unwrap();
        for i in 0..2 {
            let sym = e.derive(i).eval_raw(&x);
            assert!(
                (g.gradient[i] - sym).abs() < 1e-15,
                "component {i}: direct {} vs symbolic {sym}",
                g.gradient[i]
            );
        }
    }

    #[test]
    fn linear_combination_sums_gradients() {
        let f = Arc::new(x_squared_model());
        let g = Arc::new(
            Model::expr(AnalyticExpr::var(0), Domain::centered(1, 2.0)).unwrap(),
        );
        let combo = LinearCombination::new(vec![
            (2.0, f as Arc<dyn ScalarFunction>),
            (-3.0, g as Arc<dyn ScalarFunction>),
        ])
        .unwrap();
        // domain is the narrower [-2, 2]
        assert_eq!(combo.domain().upper(), &[2.0]);
        assert_eq!(combo.eval(&[1.5]).unwrap(), 2.0 * 2.25 - 4.5);
        assert_eq!(combo.gradient(&[1.5]).unwrap().gradient, vec![3.0]);
        assert!(matches!(combo.eval(&[3.0]), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn compose_affine_applies_chain_rule() {
        // G(y) = F(2y + 1) with F = x² on [-4, 4] → G on [-2.5, 1.5]
        let f = Arc::new(x_squared_model());
        let g = ComposeAffine::new(f, vec![2.0], vec![1.0]).unwrap();
        assert_eq!(g.domain().lower(), &[-2.5]);
        assert_eq!(g.domain().upper(), &[1.5]);
        assert_eq!(g.eval(&[1.0]).unwrap(), 9.0);
        assert_eq!(g.gradient(&[1.0]).unwrap().gradient, vec![12.0]);
    }

    #[test]
    fn compose_affine_negative_scale_flips_box() {
        let f = Arc::new(
            Model::expr(AnalyticExpr::var(0), Domain::new(vec![0.0], vec![4.0]).unwrap())
                .unwrap(),
        );
        let g = ComposeAffine::new(f, vec![-2.0], vec![0.0]).unwrap();
        assert_eq!(g.domain().lower(), &[-2.0]);
        assert_eq!(g.domain().upper(), &[0.0]);
        assert_eq!(g.eval(&[-1.0]).unwrap(), 2.0);
    }

    #[test]
    fn net_kink_signals_surface_through_the_trait() {
        let net = max_net(Domain::centered(2, 10.0)).unwrap();
        let f: &dyn ScalarFunction = &net;
        assert_eq!(f.kink_signals(&[3.0, 1.0]).unwrap(), vec![2.0]);
        let m = Model::net(net.clone());
        assert_eq!(m.kink_signals(&[1.0, 1.0]).unwrap(), vec![0.0]);
    }
}
