//! Layered feed-forward networks: interleaved affine maps and elementwise
//! activations, scalar output. ReLU layers make these the piecewise-smooth
//! function class; replacing every ReLU with a sharp softplus recovers an
//! analytic surrogate.

use crate::error::{Error, KinkUnit, Result};
use crate::func_model::expr::AnalyticExpr;
use crate::func_model::Domain;
use crate::grad::{GradResult, KINK_EPSILON};
use crate::numeric::{sigmoid, softplus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Identity,
    Relu,
    Sigmoid,
    Tanh,
    /// Softplus with sharpness α > 0.
    Softplus(f64),
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Identity => z,
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => sigmoid(z),
            Activation::Tanh => z.tanh(),
            Activation::Softplus(alpha) => softplus(alpha, z),
        }
    }

    /// Derivative at pre-activation `z`. ReLU reports slope 0 at z ≤ 0; the
    /// caller is responsible for flagging |z| < KINK_EPSILON as a kink.
    pub fn slope(self, z: f64) -> f64 {
        match self {
            Activation::Identity => 1.0,
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = sigmoid(z);
                s * (1.0 - s)
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::Softplus(alpha) => sigmoid(alpha * z),
        }
    }

    pub fn is_analytic(self) -> bool {
        !matches!(self, Activation::Relu)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Layer {
    Affine { weight: Vec<Vec<f64>>, bias: Vec<f64> },
    Elementwise { acts: Vec<Activation> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredNet {
    input_dim: usize,
    domain: Domain,
    layers: Vec<Layer>,
}

impl LayeredNet {
    /// Builds and validates a network. Checks that layer widths chain, that
    /// every weight is finite, that softplus sharpness values are positive,
    /// and that the final width is 1 (scalar output).
    pub fn new(domain: Domain, layers: Vec<Layer>) -> Result<Self> {
        let input_dim = domain.dim();
        let mut width = input_dim;
        for (li, layer) in layers.iter().enumerate() {
            match layer {
                Layer::Affine { weight, bias } => {
                    if weight.len() != bias.len() {
                        return Err(Error::InvalidModel(format!(
                            "layer {li}: {} weight rows but {} bias entries",
                            weight.len(),
                            bias.len()
                        )));
                    }
                    for (r, row) in weight.iter().enumerate() {
                        if row.len() != width {
                            return Err(Error::InvalidModel(format!(
                                "layer {li} row {r}: expected width {width}, got {}",
                                row.len()
                            )));
                        }
                        if row.iter().any(|w| !w.is_finite()) {
                            return Err(Error::NonFinite {
                                context: format!("weight in layer {li} row {r}"),
                            });
                        }
                    }
                    if bias.iter().any(|b| !b.is_finite()) {
                        return Err(Error::NonFinite {
                            context: format!("bias in layer {li}"),
                        });
                    }
                    width = weight.len();
                }
                Layer::Elementwise { acts } => {
                    if acts.len() != width {
                        return Err(Error::InvalidModel(format!(
                            "layer {li}: {} activations for width {width}",
                            acts.len()
                        )));
                    }
                    for act in acts {
                        if let Activation::Softplus(alpha) = act {
                            if !(alpha.is_finite() && *alpha > 0.0) {
                                return Err(Error::InvalidAlpha { alpha: *alpha });
                            }
                        }
                    }
                }
            }
        }
        if width != 1 {
            return Err(Error::InvalidModel(format!(
                "network output width is {width}, expected a scalar"
            )));
        }
        Ok(LayeredNet { input_dim, domain, layers })
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    fn check_input(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        self.domain.contains(x)
    }

    /// Forward pass. Returns the scalar output.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_input(x)?;
        let mut v = x.to_vec();
        for layer in &self.layers {
            v = match layer {
                Layer::Affine { weight, bias } => affine_apply(weight, bias, &v),
                Layer::Elementwise { acts } => {
                    v.iter().zip(acts).map(|(&z, a)| a.apply(z)).collect()
                }
            };
        }
        let y = v[0];
        if !y.is_finite() {
            return Err(Error::NonFinite { context: "network output".into() });
        }
        Ok(y)
    }

    /// Forward + reverse pass: value, gradient, and kink flags in one sweep.
    /// A ReLU unit whose pre-activation lies within [`KINK_EPSILON`] of zero
    /// is reported as a kink; its slope contribution is the convention 0.
    pub fn gradient(&self, x: &[f64]) -> Result<GradResult> {
        self.check_input(x)?;
        // forward, recording the input of every layer
        let mut inputs: Vec<Vec<f64>> = Vec::with_capacity(self.layers.len());
        let mut v = x.to_vec();
        for layer in &self.layers {
            inputs.push(v.clone());
            v = match layer {
                Layer::Affine { weight, bias } => affine_apply(weight, bias, &v),
                Layer::Elementwise { acts } => {
                    v.iter().zip(acts).map(|(&z, a)| a.apply(z)).collect()
                }
            };
        }
        // reverse
        let mut kinks = Vec::new();
        let mut bar = vec![1.0]; // d output / d output
        for (li, layer) in self.layers.iter().enumerate().rev() {
            let pre = &inputs[li];
            bar = match layer {
                Layer::Affine { weight, .. } => {
                    let mut out = vec![0.0; pre.len()];
                    for (r, row) in weight.iter().enumerate() {
                        let b = bar[r];
                        if b != 0.0 {
                            for (c, w) in row.iter().enumerate() {
                                out[c] += b * w;
                            }
                        }
                    }
                    out
                }
                Layer::Elementwise { acts } => {
                    let mut out = Vec::with_capacity(pre.len());
                    for (u, (&z, act)) in pre.iter().zip(acts).enumerate() {
                        if matches!(act, Activation::Relu) && z.abs() < KINK_EPSILON {
                            kinks.push(KinkUnit { layer: li, unit: u });
                        }
                        out.push(bar[u] * act.slope(z));
                    }
                    out
                }
            };
        }
        Ok(GradResult {
            gradient: bar,
            differentiable: kinks.is_empty(),
            kinks,
        })
    }

    /// Pre-activations of every ReLU unit, in (layer, unit) order. Their zero
    /// crossings are exactly where the network stops being differentiable.
    pub fn kink_signals(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_input(x)?;
        let mut signals = Vec::new();
        let mut v = x.to_vec();
        for layer in &self.layers {
            v = match layer {
                Layer::Affine { weight, bias } => affine_apply(weight, bias, &v),
                Layer::Elementwise { acts } => {
                    for (&z, act) in v.iter().zip(acts) {
                        if matches!(act, Activation::Relu) {
                            signals.push(z);
                        }
                    }
                    v.iter().zip(acts).map(|(&z, a)| a.apply(z)).collect()
                }
            };
        }
        Ok(signals)
    }

    /// The analytic surrogate F_α: every ReLU replaced by softplus with
    /// sharpness `alpha`. Uniformly, |F_α − F| → 0 as α → ∞, and gradients
    /// converge off the kink set.
    pub fn softplus_smooth(&self, alpha: f64) -> Result<LayeredNet> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidAlpha { alpha });
        }
        let layers = self
            .layers
            .iter()
            .map(|layer| match layer {
                Layer::Affine { weight, bias } => Layer::Affine {
                    weight: weight.clone(),
                    bias: bias.clone(),
                },
                Layer::Elementwise { acts } => Layer::Elementwise {
                    acts: acts
                        .iter()
                        .map(|a| match a {
                            Activation::Relu => Activation::Softplus(alpha),
                            other => *other,
                        })
                        .collect(),
                },
            })
            .collect();
        LayeredNet::new(self.domain.clone(), layers)
    }

    /// True if no layer contains a ReLU.
    pub fn is_analytic(&self) -> bool {
        self.layers.iter().all(|layer| match layer {
            Layer::Affine { .. } => true,
            Layer::Elementwise { acts } => acts.iter().all(|a| a.is_analytic()),
        })
    }

    /// Flattens an analytic network into a single expression tree by
    /// composing layers symbolically. Errors with `UnsupportedNode` if the
    /// network contains a ReLU (which has no analytic expression form).
    pub fn to_expr(&self) -> Result<AnalyticExpr> {
        let mut exprs: Vec<AnalyticExpr> =
            (0..self.input_dim).map(AnalyticExpr::var).collect();
        for layer in &self.layers {
            exprs = match layer {
                Layer::Affine { weight, bias } => weight
                    .iter()
                    .zip(bias)
                    .map(|(row, &b)| {
                        let mut terms: Vec<AnalyticExpr> = row
                            .iter()
                            .zip(&exprs)
                            .filter(|(w, _)| **w != 0.0)
                            .map(|(&w, e)| AnalyticExpr::scale(w, e.clone()))
                            .collect();
                        if b != 0.0 || terms.is_empty() {
                            terms.push(AnalyticExpr::constant(b));
                        }
                        AnalyticExpr::add(terms)
                    })
                    .collect(),
                Layer::Elementwise { acts } => exprs
                    .iter()
                    .zip(acts)
                    .map(|(e, act)| match act {
                        Activation::Identity => Ok(e.clone()),
                        Activation::Sigmoid => Ok(AnalyticExpr::sigmoid(e.clone())),
                        Activation::Tanh => Ok(AnalyticExpr::tanh(e.clone())),
                        Activation::Softplus(alpha) => {
                            Ok(AnalyticExpr::softplus(*alpha, e.clone()))
                        }
                        Activation::Relu => Err(Error::UnsupportedNode {
                            what: "relu has no analytic expression form".into(),
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?,
            };
        }
        Ok(exprs.pop().expect("validated scalar output"))
    }
}

fn affine_apply(weight: &[Vec<f64>], bias: &[f64], v: &[f64]) -> Vec<f64> {
    weight
        .iter()
        .zip(bias)
        .map(|(row, &b)| row.iter().zip(v).map(|(w, x)| w * x).sum::<f64>() + b)
        .collect()
}
