//! Closed expression trees over a fixed node set.
//!
//! Every node is real-analytic on its natural domain, and the set is closed
//! under differentiation: the derivative of any tree is again a tree (sigmoid
//! differentiates to sigmoid·(1−sigmoid), softplus to a scaled sigmoid, and
//! so on). That closure is what makes exact repeated differentiation — and
//! therefore exact Taylor coefficients — possible without a CAS.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func_model::MultiIndex;
use crate::numeric::{sigmoid, softplus};

/// Default cap on the total node count of intermediate derivative trees
/// produced while assembling a Taylor polynomial.
pub const TAYLOR_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum AnalyticExpr {
    Const { value: f64 },
    Var { index: usize },
    Add { args: Vec<AnalyticExpr> },
    Mul { args: Vec<AnalyticExpr> },
    Scale { factor: f64, arg: Box<AnalyticExpr> },
    /// Integer power; negative exponents are permitted where the base is
    /// bounded away from zero (they arise from differentiating `ln`).
    Pow { exponent: i32, arg: Box<AnalyticExpr> },
    Exp { arg: Box<AnalyticExpr> },
    Ln { arg: Box<AnalyticExpr> },
    Sin { arg: Box<AnalyticExpr> },
    Cos { arg: Box<AnalyticExpr> },
    Sigmoid { arg: Box<AnalyticExpr> },
    Tanh { arg: Box<AnalyticExpr> },
    Softplus { alpha: f64, arg: Box<AnalyticExpr> },
}

impl AnalyticExpr {
    pub fn constant(value: f64) -> Self {
        AnalyticExpr::Const { value }
    }

    pub fn var(index: usize) -> Self {
        AnalyticExpr::Var { index }
    }

    /// Sum constructor. Folds constants and drops exact zeros so that
    /// derivative trees stay small; an empty sum is the constant 0.
    pub fn add(args: Vec<AnalyticExpr>) -> Self {
        let mut flat = Vec::with_capacity(args.len());
        let mut const_acc = 0.0;
        for a in args {
            match a {
                AnalyticExpr::Const { value } => const_acc += value,
                AnalyticExpr::Add { args: inner } => {
                    for b in inner {
                        match b {
                            AnalyticExpr::Const { value } => const_acc += value,
                            other => flat.push(other),
                        }
                    }
                }
                other => flat.push(other),
            }
        }
        if const_acc != 0.0 || flat.is_empty() {
            flat.push(AnalyticExpr::constant(const_acc));
        }
        if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            AnalyticExpr::Add { args: flat }
        }
    }

    /// Product constructor. A zero factor annihilates the product, unit
    /// factors are dropped, and leading constants become a `Scale`.
    pub fn mul(args: Vec<AnalyticExpr>) -> Self {
        let mut flat = Vec::with_capacity(args.len());
        let mut const_acc = 1.0;
        for a in args {
            match a {
                AnalyticExpr::Const { value } => const_acc *= value,
                AnalyticExpr::Scale { factor, arg } => {
                    const_acc *= factor;
                    flat.push(*arg);
                }
                AnalyticExpr::Mul { args: inner } => {
                    for b in inner {
                        match b {
                            AnalyticExpr::Const { value } => const_acc *= value,
                            other => flat.push(other),
                        }
                    }
                }
                other => flat.push(other),
            }
        }
        if const_acc == 0.0 {
            return AnalyticExpr::constant(0.0);
        }
        let core = if flat.is_empty() {
            AnalyticExpr::constant(1.0)
        } else if flat.len() == 1 {
            flat.pop().unwrap()
        } else {
            AnalyticExpr::Mul { args: flat }
        };
        AnalyticExpr::scale(const_acc, core)
    }

    pub fn scale(factor: f64, arg: AnalyticExpr) -> Self {
        if factor == 0.0 {
            return AnalyticExpr::constant(0.0);
        }
        if factor == 1.0 {
            return arg;
        }
        match arg {
            AnalyticExpr::Const { value } => AnalyticExpr::constant(factor * value),
            AnalyticExpr::Scale { factor: f2, arg } => {
                AnalyticExpr::Scale { factor: factor * f2, arg }
            }
            other => AnalyticExpr::Scale { factor, arg: Box::new(other) },
        }
    }

    pub fn pow(arg: AnalyticExpr, exponent: i32) -> Self {
        match exponent {
            0 => AnalyticExpr::constant(1.0),
            1 => arg,
            _ => match arg {
                AnalyticExpr::Const { value } => AnalyticExpr::constant(value.powi(exponent)),
                other => AnalyticExpr::Pow { exponent, arg: Box::new(other) },
            },
        }
    }

    pub fn exp(arg: AnalyticExpr) -> Self {
        AnalyticExpr::Exp { arg: Box::new(arg) }
    }

    pub fn ln(arg: AnalyticExpr) -> Self {
        AnalyticExpr::Ln { arg: Box::new(arg) }
    }

    pub fn sin(arg: AnalyticExpr) -> Self {
        AnalyticExpr::Sin { arg: Box::new(arg) }
    }

    pub fn cos(arg: AnalyticExpr) -> Self {
        AnalyticExpr::Cos { arg: Box::new(arg) }
    }

    pub fn sigmoid(arg: AnalyticExpr) -> Self {
        AnalyticExpr::Sigmoid { arg: Box::new(arg) }
    }

    pub fn tanh(arg: AnalyticExpr) -> Self {
        AnalyticExpr::Tanh { arg: Box::new(arg) }
    }

    pub fn softplus(alpha: f64, arg: AnalyticExpr) -> Self {
        AnalyticExpr::Softplus { alpha, arg: Box::new(arg) }
    }

    /// `a − b`, spelled with the available sum/scale nodes.
    pub fn sub(a: AnalyticExpr, b: AnalyticExpr) -> Self {
        AnalyticExpr::add(vec![a, AnalyticExpr::scale(-1.0, b)])
    }

    /// Largest variable index mentioned anywhere in the tree.
    pub fn max_var_index(&self) -> Option<usize> {
        match self {
            AnalyticExpr::Const { .. } => None,
            AnalyticExpr::Var { index } => Some(*index),
            AnalyticExpr::Add { args } | AnalyticExpr::Mul { args } => {
                args.iter().filter_map(|a| a.max_var_index()).max()
            }
            AnalyticExpr::Scale { arg, .. }
            | AnalyticExpr::Pow { arg, .. }
            | AnalyticExpr::Exp { arg }
            | AnalyticExpr::Ln { arg }
            | AnalyticExpr::Sin { arg }
            | AnalyticExpr::Cos { arg }
            | AnalyticExpr::Sigmoid { arg }
            | AnalyticExpr::Tanh { arg }
            | AnalyticExpr::Softplus { arg, .. } => arg.max_var_index(),
        }
    }

    /// Number of nodes in the tree (used for the Taylor term cap).
    pub fn node_count(&self) -> usize {
        match self {
            AnalyticExpr::Const { .. } | AnalyticExpr::Var { .. } => 1,
            AnalyticExpr::Add { args } | AnalyticExpr::Mul { args } => {
                1 + args.iter().map(|a| a.node_count()).sum::<usize>()
            }
            AnalyticExpr::Scale { arg, .. }
            | AnalyticExpr::Pow { arg, .. }
            | AnalyticExpr::Exp { arg }
            | AnalyticExpr::Ln { arg }
            | AnalyticExpr::Sin { arg }
            | AnalyticExpr::Cos { arg }
            | AnalyticExpr::Sigmoid { arg }
            | AnalyticExpr::Tanh { arg }
            | AnalyticExpr::Softplus { arg, .. } => 1 + arg.node_count(),
        }
    }

    /// True if any constant in the tree (including softplus sharpness) is
    /// NaN or infinite.
    pub fn has_non_finite(&self) -> bool {
        match self {
            AnalyticExpr::Const { value } => !value.is_finite(),
            AnalyticExpr::Var { .. } => false,
            AnalyticExpr::Add { args } | AnalyticExpr::Mul { args } => {
                args.iter().any(|a| a.has_non_finite())
            }
            AnalyticExpr::Scale { factor, arg } => !factor.is_finite() || arg.has_non_finite(),
            AnalyticExpr::Softplus { alpha, arg } => !alpha.is_finite() || arg.has_non_finite(),
            AnalyticExpr::Pow { arg, .. }
            | AnalyticExpr::Exp { arg }
            | AnalyticExpr::Ln { arg }
            | AnalyticExpr::Sin { arg }
            | AnalyticExpr::Cos { arg }
            | AnalyticExpr::Sigmoid { arg }
            | AnalyticExpr::Tanh { arg } => arg.has_non_finite(),
        }
    }

    /// Plain evaluation. Assumes `x` is long enough; dimension/domain checks
    /// happen at the model boundary. May return NaN/∞ (e.g. `ln` of a
    /// non-positive value); the boundary rejects non-finite results.
    pub fn eval_raw(&self, x: &[f64]) -> f64 {
        match self {
            AnalyticExpr::Const { value } => *value,
            AnalyticExpr::Var { index } => x[*index],
            AnalyticExpr::Add { args } => args.iter().map(|a| a.eval_raw(x)).sum(),
            AnalyticExpr::Mul { args } => args.iter().map(|a| a.eval_raw(x)).product(),
            AnalyticExpr::Scale { factor, arg } => factor * arg.eval_raw(x),
            AnalyticExpr::Pow { exponent, arg } => arg.eval_raw(x).powi(*exponent),
            AnalyticExpr::Exp { arg } => arg.eval_raw(x).exp(),
            AnalyticExpr::Ln { arg } => arg.eval_raw(x).ln(),
            AnalyticExpr::Sin { arg } => arg.eval_raw(x).sin(),
            AnalyticExpr::Cos { arg } => arg.eval_raw(x).cos(),
            AnalyticExpr::Sigmoid { arg } => sigmoid(arg.eval_raw(x)),
            AnalyticExpr::Tanh { arg } => arg.eval_raw(x).tanh(),
            AnalyticExpr::Softplus { alpha, arg } => softplus(*alpha, arg.eval_raw(x)),
        }
    }

    /// Forward-mode evaluation: value and derivative with respect to the
    /// seeded variable in a single pass.
    pub fn eval_dual(&self, x: &[f64], seed: usize) -> Dual {
        match self {
            AnalyticExpr::Const { value } => Dual::constant(*value),
            AnalyticExpr::Var { index } => Dual {
                v: x[*index],
                d: if *index == seed { 1.0 } else { 0.0 },
            },
            AnalyticExpr::Add { args } => {
                let mut acc = Dual::constant(0.0);
                for a in args {
                    let u = a.eval_dual(x, seed);
                    acc.v += u.v;
                    acc.d += u.d;
                }
                acc
            }
            AnalyticExpr::Mul { args } => {
                let mut acc = Dual { v: 1.0, d: 0.0 };
                for a in args {
                    let u = a.eval_dual(x, seed);
                    acc = Dual { v: acc.v * u.v, d: acc.d * u.v + acc.v * u.d };
                }
                acc
            }
            AnalyticExpr::Scale { factor, arg } => {
                let u = arg.eval_dual(x, seed);
                Dual { v: factor * u.v, d: factor * u.d }
            }
            AnalyticExpr::Pow { exponent, arg } => {
                let u = arg.eval_dual(x, seed);
                let k = *exponent;
                Dual {
                    v: u.v.powi(k),
                    d: f64::from(k) * u.v.powi(k - 1) * u.d,
                }
            }
            AnalyticExpr::Exp { arg } => {
                let u = arg.eval_dual(x, seed);
                let e = u.v.exp();
                Dual { v: e, d: e * u.d }
            }
            AnalyticExpr::Ln { arg } => {
                let u = arg.eval_dual(x, seed);
                Dual { v: u.v.ln(), d: u.d / u.v }
            }
            AnalyticExpr::Sin { arg } => {
                let u = arg.eval_dual(x, seed);
                Dual { v: u.v.sin(), d: u.v.cos() * u.d }
            }
            AnalyticExpr::Cos { arg } => {
                let u = arg.eval_dual(x, seed);
                Dual { v: u.v.cos(), d: -u.v.sin() * u.d }
            }
            AnalyticExpr::Sigmoid { arg } => {
                let u = arg.eval_dual(x, seed);
                let s = sigmoid(u.v);
                Dual { v: s, d: s * (1.0 - s) * u.d }
            }
            AnalyticExpr::Tanh { arg } => {
                let u = arg.eval_dual(x, seed);
                let t = u.v.tanh();
                Dual { v: t, d: (1.0 - t * t) * u.d }
            }
            AnalyticExpr::Softplus { alpha, arg } => {
                let u = arg.eval_dual(x, seed);
                Dual {
                    v: softplus(*alpha, u.v),
                    d: sigmoid(*alpha * u.v) * u.d,
                }
            }
        }
    }

    /// Exact partial derivative with respect to variable `i`, as a new tree.
    pub fn derive(&self, i: usize) -> AnalyticExpr {
        use AnalyticExpr as E;
        match self {
            E::Const { .. } => E::constant(0.0),
            E::Var { index } => E::constant(if *index == i { 1.0 } else { 0.0 }),
            E::Add { args } => E::add(args.iter().map(|a| a.derive(i)).collect()),
            E::Mul { args } => {
                let mut terms = Vec::with_capacity(args.len());
                for (k, a) in args.iter().enumerate() {
                    let da = a.derive(i);
                    let mut factors = vec![da];
                    for (j, b) in args.iter().enumerate() {
                        if j != k {
                            factors.push(b.clone());
                        }
                    }
                    terms.push(E::mul(factors));
                }
                E::add(terms)
            }
            E::Scale { factor, arg } => E::scale(*factor, arg.derive(i)),
            E::Pow { exponent, arg } => {
                let k = *exponent;
                E::mul(vec![
                    E::constant(f64::from(k)),
                    E::pow((**arg).clone(), k - 1),
                    arg.derive(i),
                ])
            }
            E::Exp { arg } => E::mul(vec![E::exp((**arg).clone()), arg.derive(i)]),
            E::Ln { arg } => E::mul(vec![E::pow((**arg).clone(), -1), arg.derive(i)]),
            E::Sin { arg } => E::mul(vec![E::cos((**arg).clone()), arg.derive(i)]),
            E::Cos { arg } => {
                E::scale(-1.0, E::mul(vec![E::sin((**arg).clone()), arg.derive(i)]))
            }
            E::Sigmoid { arg } => {
                let s = E::sigmoid((**arg).clone());
                let one_minus = E::sub(E::constant(1.0), s.clone());
                E::mul(vec![s, one_minus, arg.derive(i)])
            }
            E::Tanh { arg } => {
                let t2 = E::pow(E::tanh((**arg).clone()), 2);
                E::mul(vec![E::sub(E::constant(1.0), t2), arg.derive(i)])
            }
            E::Softplus { alpha, arg } => E::mul(vec![
                E::sigmoid(E::scale(*alpha, (**arg).clone())),
                arg.derive(i),
            ]),
        }
    }
}

/// Value/derivative pair for forward-mode differentiation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn constant(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
}

/// The monomial `[x − x′]^m = ∏ᵢ (xᵢ − x′ᵢ)^{mᵢ}` as an expression tree.
pub fn monomial(m: &MultiIndex, x_prime: &[f64]) -> Result<AnalyticExpr> {
    if m.exponents.len() != x_prime.len() {
        return Err(Error::DimensionMismatch {
            expected: m.exponents.len(),
            got: x_prime.len(),
        });
    }
    let mut factors = Vec::new();
    for (i, &e) in m.exponents.iter().enumerate() {
        if e == 0 {
            continue;
        }
        let centered = if x_prime[i] == 0.0 {
            AnalyticExpr::var(i)
        } else {
            AnalyticExpr::sub(AnalyticExpr::var(i), AnalyticExpr::constant(x_prime[i]))
        };
        let e = i32::try_from(e).map_err(|_| Error::InvalidConfig(format!(
            "monomial exponent {e} does not fit in i32"
        )))?;
        factors.push(AnalyticExpr::pow(centered, e));
    }
    Ok(AnalyticExpr::mul(factors))
}

/// Multivariate Taylor polynomial of `expr` around `x_prime`, keeping every
/// multi-index with total degree at most `order`:
///
///   T_l(x) = Σ_{‖m‖₁ ≤ l} D^m F(x′) / [m]! · [x − x′]^m
///
/// Derivative tensors come from repeated exact differentiation, each D^m
/// obtained from D^{m − e_k} along the first non-zero slot, memoised so no
/// derivative is recomputed. `cap` bounds the total node count across all
/// intermediate derivative trees.
pub fn taylor_with_cap(
    expr: &AnalyticExpr,
    x_prime: &[f64],
    order: usize,
    cap: usize,
) -> Result<AnalyticExpr> {
    let n = x_prime.len();
    let mut memo: std::collections::HashMap<Vec<usize>, AnalyticExpr> =
        std::collections::HashMap::new();
    memo.insert(vec![0; n], expr.clone());
    let mut budget = expr.node_count();

    let mut terms = Vec::new();
    for degree in 0..=order {
        for m in multi_indices_of_degree(n, degree) {
            let d_expr = if degree == 0 {
                memo[&m].clone()
            } else {
                let k = m.iter().position(|&e| e > 0).expect("degree > 0");
                let mut parent = m.clone();
                parent[k] -= 1;
                let d = memo[&parent].derive(k);
                budget += d.node_count();
                if budget > cap {
                    return Err(Error::OrderTooLarge { terms: budget, cap });
                }
                memo.insert(m.clone(), d.clone());
                d
            };
            let value = d_expr.eval_raw(x_prime);
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("Taylor coefficient for multi-index {m:?}"),
                });
            }
            let idx = MultiIndex::new(m.clone());
            let coeff = value / idx.factorial();
            if coeff == 0.0 {
                continue;
            }
            let mono = monomial(&idx, x_prime)?;
            terms.push(AnalyticExpr::scale(coeff, mono));
        }
    }
    Ok(AnalyticExpr::add(terms))
}

/// [`taylor_with_cap`] with the default term cap.
pub fn taylor(expr: &AnalyticExpr, x_prime: &[f64], order: usize) -> Result<AnalyticExpr> {
    taylor_with_cap(expr, x_prime, order, TAYLOR_TERM_CAP)
}

/// All multi-indices over `n` slots with total degree exactly `degree`,
/// in lexicographic order (deterministic iteration matters for memo reuse).
fn multi_indices_of_degree(n: usize, degree: usize) -> Vec<Vec<usize>> {
    fn rec(out: &mut Vec<Vec<usize>>, prefix: &mut Vec<usize>, slots: usize, left: usize) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=left).rev() {
            prefix.push(e);
            rec(out, prefix, slots - 1, left - e);
            prefix.pop();
        }
    }
    if n == 0 {
        return if degree == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    rec(&mut out, &mut Vec::new(), n, degree);
    out
}
