//! Max expressions — compositions of two-input max nodes and affine maps —
//! and their exact rewrite into ReLU networks via max(a,b) = ReLU(a−b) + b.
//!
//! The rewrite gives two implementations of the same mathematical function,
//! which is precisely what the implementation-invariance check needs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, KinkUnit, Result};
use crate::func_model::net::{Activation, Layer, LayeredNet};
use crate::func_model::Domain;
use crate::grad::KINK_EPSILON;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum MaxTree {
    Var { index: usize },
    Affine { terms: Vec<AffineTerm>, offset: f64 },
    Max { a: Box<MaxTree>, b: Box<MaxTree> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineTerm {
    pub coeff: f64,
    pub arg: MaxTree,
}

impl MaxTree {
    pub fn var(index: usize) -> Self {
        MaxTree::Var { index }
    }

    pub fn max(a: MaxTree, b: MaxTree) -> Self {
        MaxTree::Max { a: Box::new(a), b: Box::new(b) }
    }

    pub fn affine(terms: Vec<(f64, MaxTree)>, offset: f64) -> Self {
        MaxTree::Affine {
            terms: terms
                .into_iter()
                .map(|(coeff, arg)| AffineTerm { coeff, arg })
                .collect(),
            offset,
        }
    }

    /// Largest input index mentioned in the tree.
    pub fn max_var_index(&self) -> Option<usize> {
        match self {
            MaxTree::Var { index } => Some(*index),
            MaxTree::Affine { terms, .. } => {
                terms.iter().filter_map(|t| t.arg.max_var_index()).max()
            }
            MaxTree::Max { a, b } => a.max_var_index().max(b.max_var_index()),
        }
    }

    pub fn has_non_finite(&self) -> bool {
        match self {
            MaxTree::Var { .. } => false,
            MaxTree::Affine { terms, offset } => {
                !offset.is_finite()
                    || terms
                        .iter()
                        .any(|t| !t.coeff.is_finite() || t.arg.has_non_finite())
            }
            MaxTree::Max { a, b } => a.has_non_finite() || b.has_non_finite(),
        }
    }

    pub fn eval_raw(&self, x: &[f64]) -> f64 {
        match self {
            MaxTree::Var { index } => x[*index],
            MaxTree::Affine { terms, offset } => {
                terms
                    .iter()
                    .map(|t| t.coeff * t.arg.eval_raw(x))
                    .sum::<f64>()
                    + offset
            }
            MaxTree::Max { a, b } => a.eval_raw(x).max(b.eval_raw(x)),
        }
    }

    /// Value + gradient + kink flags. At a max node the gradient follows the
    /// larger branch (ties take the first); a gap within [`KINK_EPSILON`] is
    /// flagged, tagged by the node's preorder index.
    pub fn gradient_raw(&self, x: &[f64], dim: usize) -> (f64, Vec<f64>, Vec<KinkUnit>) {
        fn rec(
            node: &MaxTree,
            x: &[f64],
            dim: usize,
            next_id: &mut usize,
            kinks: &mut Vec<KinkUnit>,
        ) -> (f64, Vec<f64>) {
            let my_id = *next_id;
            *next_id += 1;
            match node {
                MaxTree::Var { index } => {
                    let mut g = vec![0.0; dim];
                    g[*index] = 1.0;
                    (x[*index], g)
                }
                MaxTree::Affine { terms, offset } => {
                    let mut v = *offset;
                    let mut g = vec![0.0; dim];
                    for t in terms {
                        let (tv, tg) = rec(&t.arg, x, dim, next_id, kinks);
                        v += t.coeff * tv;
                        for (gi, tgi) in g.iter_mut().zip(tg) {
                            *gi += t.coeff * tgi;
                        }
                    }
                    (v, g)
                }
                MaxTree::Max { a, b } => {
                    let (va, ga) = rec(a, x, dim, next_id, kinks);
                    let (vb, gb) = rec(b, x, dim, next_id, kinks);
                    if (va - vb).abs() < KINK_EPSILON {
                        kinks.push(KinkUnit { layer: my_id, unit: 0 });
                    }
                    if va >= vb {
                        (va, ga)
                    } else {
                        (vb, gb)
                    }
                }
            }
        }
        let mut kinks = Vec::new();
        let mut next_id = 0;
        let (v, g) = rec(self, x, dim, &mut next_id, &mut kinks);
        (v, g, kinks)
    }

    /// Gaps (a − b) of every max node, in preorder. Zero crossings of these
    /// are the nondifferentiable set.
    pub fn kink_signals_raw(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        fn rec(node: &MaxTree, x: &[f64], out: &mut Vec<f64>) {
            match node {
                MaxTree::Var { .. } => {}
                MaxTree::Affine { terms, .. } => {
                    for t in terms {
                        rec(&t.arg, x, out);
                    }
                }
                MaxTree::Max { a, b } => {
                    out.push(a.eval_raw(x) - b.eval_raw(x));
                    rec(a, x, out);
                    rec(b, x, out);
                }
            }
        }
        rec(self, x, &mut out);
        out
    }
}

/// Compiles a max tree into a ReLU network computing the identical function,
/// using max(a, b) = ReLU(a − b) + b at every max node.
///
/// The compiler keeps a growing vector of computed slots (inputs first) and
/// appends one slot per subexpression; each max node costs one affine layer
/// (compute a − b), one elementwise layer (ReLU on that slot only), and one
/// affine layer (add b back). The result is exact up to floating rounding:
/// when a ≥ b, (a − b) + b re-associates a, which is why the contract allows
/// a ≤ 4 ulp discrepancy instead of bit equality.
pub fn rewrite_max_to_relu(tree: &MaxTree, domain: Domain) -> Result<LayeredNet> {
    let n = domain.dim();
    if let Some(max_var) = tree.max_var_index() {
        if max_var >= n {
            return Err(Error::InvalidModel(format!(
                "max tree references input {max_var} but the box has dimension {n}"
            )));
        }
    }
    if tree.has_non_finite() {
        return Err(Error::NonFinite { context: "max tree coefficient".into() });
    }

    struct Compiler {
        width: usize,
        layers: Vec<Layer>,
    }

    impl Compiler {
        /// Affine layer that carries all current slots and appends one row.
        fn append_row(&mut self, row: Vec<(usize, f64)>, offset: f64) -> usize {
            let w = self.width;
            let mut weight: Vec<Vec<f64>> = (0..w)
                .map(|r| {
                    let mut id = vec![0.0; w];
                    id[r] = 1.0;
                    id
                })
                .collect();
            let mut new_row = vec![0.0; w];
            for (slot, coeff) in row {
                new_row[slot] += coeff;
            }
            weight.push(new_row);
            let mut bias = vec![0.0; w + 1];
            bias[w] = offset;
            self.layers.push(Layer::Affine { weight, bias });
            self.width = w + 1;
            self.width - 1
        }

        fn relu_on_last(&mut self) {
            let mut acts = vec![Activation::Identity; self.width];
            acts[self.width - 1] = Activation::Relu;
            self.layers.push(Layer::Elementwise { acts });
        }

        fn compile(&mut self, node: &MaxTree) -> usize {
            match node {
                MaxTree::Var { index } => *index,
                MaxTree::Affine { terms, offset } => {
                    let slots: Vec<(usize, f64)> = terms
                        .iter()
                        .map(|t| (self.compile(&t.arg), t.coeff))
                        .collect();
                    self.append_row(slots, *offset)
                }
                MaxTree::Max { a, b } => {
                    let pa = self.compile(a);
                    let pb = self.compile(b);
                    let diff = self.append_row(vec![(pa, 1.0), (pb, -1.0)], 0.0);
                    self.relu_on_last();
                    self.append_row(vec![(diff, 1.0), (pb, 1.0)], 0.0)
                }
            }
        }
    }

    let mut c = Compiler { width: n, layers: Vec::new() };
    let root = c.compile(tree);
    // final selector: scalar output = root slot
    let mut row = vec![0.0; c.width];
    row[root] = 1.0;
    c.layers.push(Layer::Affine { weight: vec![row], bias: vec![0.0] });
    LayeredNet::new(domain, c.layers)
}

/// The two-input max network max(x₁, x₂) on the given 2-D box.
pub fn max_net(domain: Domain) -> Result<LayeredNet> {
    if domain.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: domain.dim() });
    }
    rewrite_max_to_relu(&MaxTree::max(MaxTree::var(0), MaxTree::var(1)), domain)
}
