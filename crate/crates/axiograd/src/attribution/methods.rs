//! A uniform interface over attribution methods, so harnesses and tools can
//! hold a bag of methods and run each against the same function and
//! endpoint pair without caring which algorithm sits behind it.

use crate::attribution::quadrature::QuadratureConfig;
use crate::attribution::{ig, ig_monomial_closed_form, path_attribution, shapley, Attribution};
use crate::error::{Error, Result};
use crate::func_model::{MultiIndex, ScalarFunction};
use crate::paths::{PathKind, PathSpec};

/// One attribution method, packaged with whatever configuration it needs.
/// `attribute` binds the endpoints itself, so one instance can serve many
/// (x̄, x′) pairs.
pub trait AttributionMethod: Send + Sync {
    /// Stable identifier, matching the `method` field of the attributions
    /// this method produces.
    fn name(&self) -> String;

    /// Attribute F(x̄) − F(x′) across the coordinates.
    fn attribute(
        &self,
        f: &dyn ScalarFunction,
        x_bar: &[f64],
        x_prime: &[f64],
    ) -> Result<Attribution>;
}

/// Integrated gradients (straight-path attribution).
#[derive(Debug, Clone, Default)]
pub struct IgMethod {
    pub quad: QuadratureConfig,
}

impl AttributionMethod for IgMethod {
    fn name(&self) -> String {
        "ig".into()
    }

    fn attribute(
        &self,
        f: &dyn ScalarFunction,
        x_bar: &[f64],
        x_prime: &[f64],
    ) -> Result<Attribution> {
        ig(f, x_bar, x_prime, &self.quad)
    }
}

/// Attribution along an arbitrary path shape (including ensembles). The
/// held [`PathSpec`] is a shape only; endpoints are bound per call.
#[derive(Debug, Clone)]
pub struct PathMethod {
    pub path: PathSpec,
    pub quad: QuadratureConfig,
}

impl PathMethod {
    pub fn new(path: PathSpec) -> Self {
        Self { path, quad: QuadratureConfig::default() }
    }
}

impl AttributionMethod for PathMethod {
    fn name(&self) -> String {
        match self.path.kind() {
            PathKind::Ensemble { .. } => "ensemble".into(),
            kind => format!("path:{}", kind.kind_name()),
        }
    }

    fn attribute(
        &self,
        f: &dyn ScalarFunction,
        x_bar: &[f64],
        x_prime: &[f64],
    ) -> Result<Attribution> {
        let bound = self.path.bind(x_bar, x_prime)?;
        path_attribution(f, &bound, &self.quad)
    }
}

/// Exact Shapley values of the induced cooperative game.
#[derive(Debug, Clone, Copy, Default)]
pub struct ShapleyMethod;

impl AttributionMethod for ShapleyMethod {
    fn name(&self) -> String {
        "shapley".into()
    }

    fn attribute(
        &self,
        f: &dyn ScalarFunction,
        x_bar: &[f64],
        x_prime: &[f64],
    ) -> Result<Attribution> {
        shapley(f, x_bar, x_prime)
    }
}

/// Closed-form integrated gradients for the monomial [x − x′]^m. The caller
/// asserts the function is that monomial; the method checks only shape.
#[derive(Debug, Clone)]
pub struct MonomialClosedForm {
    pub exponents: MultiIndex,
}

impl AttributionMethod for MonomialClosedForm {
    fn name(&self) -> String {
        "monomial-closed-form".into()
    }

    fn attribute(
        &self,
        f: &dyn ScalarFunction,
        x_bar: &[f64],
        x_prime: &[f64],
    ) -> Result<Attribution> {
        if f.input_dim() != self.exponents.exponents.len() {
            return Err(Error::DimensionMismatch {
                expected: self.exponents.exponents.len(),
                got: f.input_dim(),
            });
        }
        ig_monomial_closed_form(&self.exponents, x_bar, x_prime)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func_model::{Domain, Model};

    fn monomial_model() -> Model {
        Model::monomial(
            MultiIndex::new(vec![2, 1]),
            vec![0.0, 0.0],
            Domain::centered(2, 4.0),
        )
        .unwrap()
    }

    #[test]
    fn names_match_the_attribution_method_field() {
        let methods: Vec<Box<dyn AttributionMethod>> = vec![
            Box::new(IgMethod::default()),
            Box::new(PathMethod::new(PathSpec::power())),
            Box::new(PathMethod::new(PathSpec::ensemble(vec![
                (0.5, PathSpec::lshape_xy()),
                (0.5, PathSpec::lshape_yx()),
            ]))),
            Box::new(ShapleyMethod),
            Box::new(MonomialClosedForm { exponents: MultiIndex::new(vec![2, 1]) }),
        ];
        let f = monomial_model();
        for method in &methods {
            let a = method.attribute(&f, &[1.0, 0.5], &[0.0, 0.0]).unwrap();
            assert_eq!(a.method, method.name(), "name/method drift");
        }
    }

    #[test]
    fn closed_form_agrees_with_quadrature_through_the_trait() {
        let f = monomial_model();
        let quad = IgMethod::default().attribute(&f, &[1.2, 0.7], &[0.0, 0.0]).unwrap();
        let closed = MonomialClosedForm { exponents: MultiIndex::new(vec![2, 1]) }
            .attribute(&f, &[1.2, 0.7], &[0.0, 0.0])
            .unwrap();
        for i in 0..2 {
            assert!(
                (quad.values[i] - closed.values[i]).abs() < 1e-10,
                "component {i}: {} vs {}",
                quad.values[i],
                closed.values[i]
            );
        }
    }

    #[test]
    fn closed_form_rejects_wrong_arity() {
        let f = monomial_model();
        let method = MonomialClosedForm { exponents: MultiIndex::new(vec![1, 1, 1]) };
        assert!(matches!(
            method.attribute(&f, &[1.0, 1.0], &[0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn every_quadrature_method_satisfies_completeness_here() {
        let f = monomial_model();
        let xb = [1.0, 1.0];
        let xp = [0.0, 0.0];
        let methods: Vec<Box<dyn AttributionMethod>> = vec![
            Box::new(IgMethod::default()),
            Box::new(PathMethod::new(PathSpec::power())),
            Box::new(PathMethod::new(PathSpec::lshape_xy())),
            Box::new(ShapleyMethod),
        ];
        for method in &methods {
            let a = method.attribute(&f, &xb, &xp).unwrap();
            assert!(
                a.residual.abs() < 1e-9,
                "{} residual {}",
                method.name(),
                a.residual
            );
        }
    }
}
