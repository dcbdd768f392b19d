//! The on-disk JSON form of models.
//!
//! A model file carries the dimension, the box, and exactly one payload:
//!
//! ```json
//! {
//!   "dim": 2,
//!   "box": {"lower": [-4.0, -4.0], "upper": [4.0, 4.0]},
//!   "layers": [
//!     {"type": "affine", "W": [[1.0, -1.0], [0.0, 1.0]], "b": [0.0, 0.0]},
//!     {"type": "elementwise", "acts": ["relu", "identity"]},
//!     {"type": "affine", "W": [[1.0, 1.0]], "b": [0.0]}
//!   ]
//! }
//! ```
//!
//! Alternative payloads are `"expr"` (an operator tree tagged by `"op"`),
//! `"max_tree"`, and `"monomial"` (`{"exponents": [...], "center": [...]}`).
//! Activations are the strings `"identity"`, `"relu"`, `"sigmoid"`,
//! `"tanh"`, or `{"softplus": alpha}`. [`Model`] itself serializes in this
//! same shape, so axiom-check witnesses embed models exactly as files do.

use serde::de::Error as DeError;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::func_model::net::{Activation, Layer, LayeredNet};
use crate::func_model::{AnalyticExpr, Domain, MaxTree, Model, MultiIndex, ScalarFunction};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ActivationRepr {
    Name(String),
    Softplus { softplus: f64 },
}

impl Serialize for Activation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Activation::Identity => s.serialize_str("identity"),
            Activation::Relu => s.serialize_str("relu"),
            Activation::Sigmoid => s.serialize_str("sigmoid"),
            Activation::Tanh => s.serialize_str("tanh"),
            Activation::Softplus(alpha) => {
                ActivationRepr::Softplus { softplus: *alpha }.serialize(s)
            }
        }
    }
}

impl<'de> Deserialize<'de> for Activation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match ActivationRepr::deserialize(d)? {
            ActivationRepr::Name(name) => match name.as_str() {
                "identity" => Ok(Activation::Identity),
                "relu" => Ok(Activation::Relu),
                "sigmoid" => Ok(Activation::Sigmoid),
                "tanh" => Ok(Activation::Tanh),
                other => Err(D::Error::custom(format!(
                    "unknown activation {other:?} (expected identity, relu, sigmoid, tanh, \
                     or {{\"softplus\": alpha}})"
                ))),
            },
            ActivationRepr::Softplus { softplus } => Ok(Activation::Softplus(softplus)),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum LayerRepr {
    Affine {
        #[serde(rename = "W")]
        w: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Elementwise { acts: Vec<Activation> },
}

impl From<&Layer> for LayerRepr {
    fn from(layer: &Layer) -> Self {
        match layer {
            Layer::Affine { weight, bias } => {
                LayerRepr::Affine { w: weight.clone(), b: bias.clone() }
            }
            Layer::Elementwise { acts } => LayerRepr::Elementwise { acts: acts.clone() },
        }
    }
}

impl From<LayerRepr> for Layer {
    fn from(repr: LayerRepr) -> Self {
        match repr {
            LayerRepr::Affine { w, b } => Layer::Affine { weight: w, bias: b },
            LayerRepr::Elementwise { acts } => Layer::Elementwise { acts },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialRepr {
    exponents: Vec<usize>,
    center: Vec<f64>,
}

/// A parsed-but-unvalidated model file. Convert with [`ModelFile::into_model`],
/// which enforces the exactly-one-payload rule and every structural check.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    dim: usize,
    #[serde(rename = "box")]
    bounds: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    layers: Option<Vec<LayerRepr>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expr: Option<AnalyticExpr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_tree: Option<MaxTree>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    monomial: Option<MonomialRepr>,
}

impl ModelFile {
    pub fn from_model(model: &Model) -> ModelFile {
        let mut file = ModelFile {
            dim: model.domain().dim(),
            bounds: model.domain().clone(),
            layers: None,
            expr: None,
            max_tree: None,
            monomial: None,
        };
        match model {
            Model::Expr { expr, .. } => file.expr = Some(expr.clone()),
            Model::Net(net) => {
                file.layers = Some(net.layers().iter().map(LayerRepr::from).collect());
            }
            Model::MaxTree { tree, .. } => file.max_tree = Some(tree.clone()),
            Model::Monomial { exponents, center, .. } => {
                file.monomial = Some(MonomialRepr {
                    exponents: exponents.exponents.clone(),
                    center: center.clone(),
                });
            }
        }
        file
    }

    pub fn into_model(self) -> Result<Model> {
        if self.bounds.dim() != self.dim {
            return Err(Error::InvalidModel(format!(
                "file claims dimension {} but the box has dimension {}",
                self.dim,
                self.bounds.dim()
            )));
        }
        let payloads = usize::from(self.layers.is_some())
            + usize::from(self.expr.is_some())
            + usize::from(self.max_tree.is_some())
            + usize::from(self.monomial.is_some());
        if payloads != 1 {
            return Err(Error::InvalidModel(format!(
                "a model file must carry exactly one of layers, expr, max_tree, monomial; \
                 found {payloads}"
            )));
        }
        if let Some(layers) = self.layers {
            let layers = layers.into_iter().map(Layer::from).collect();
            return Ok(Model::net(LayeredNet::new(self.bounds, layers)?));
        }
        if let Some(expr) = self.expr {
            return Model::expr(expr, self.bounds);
        }
        if let Some(tree) = self.max_tree {
            return Model::max_tree(tree, self.bounds);
        }
        let m = self.monomial.expect("one payload must remain");
        Model::monomial(MultiIndex::new(m.exponents), m.center, self.bounds)
    }
}

impl Serialize for Model {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ModelFile::from_model(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Model {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ModelFile::deserialize(d)?.into_model().map_err(D::Error::custom)
    }
}

/// Parses a model from its JSON file form, running full validation.
pub fn model_from_json(s: &str) -> Result<Model> {
    let file: ModelFile = serde_json::from_str(s)
        .map_err(|e| Error::InvalidModel(format!("model JSON: {e}")))?;
    file.into_model()
}

/// Renders a model to pretty-printed JSON in the file form.
pub fn model_to_json(model: &Model) -> String {
    serde_json::to_string_pretty(&ModelFile::from_model(model))
        .expect("model serialization cannot fail")
}
