//! Exact Shapley values for the cooperative game v(S) = F(x_S), where x_S
//! takes x̄ on the coordinates in S and x′ elsewhere.
//!
//! All 2ⁿ vertex values are evaluated once into a bitmask-indexed cache, then
//! every one of the n! coordinate orderings is walked, crediting each
//! coordinate with its marginal contribution. That is exact (no sampling) and
//! affordable for the small n this toolkit targets.

use crate::attribution::Attribution;
use crate::error::{Error, Result};
use crate::func_model::ScalarFunction;
use crate::numeric::KahanSum;

/// Hard cap on the input dimension: 10! orderings ≈ 3.6M walks is the most
/// this exact enumeration will attempt.
pub const SHAPLEY_MAX_INPUTS: usize = 10;

/// Exact Shapley attribution of F between x′ (baseline) and x̄.
///
/// Completeness holds by construction — every ordering telescopes to
/// F(x̄) − F(x′) — so the reported residual is pure accumulation noise.
pub fn shapley(f: &dyn ScalarFunction, x_bar: &[f64], x_prime: &[f64]) -> Result<Attribution> {
    let n = x_bar.len();
    if x_prime.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: x_prime.len() });
    }
    if f.input_dim() != n {
        return Err(Error::DimensionMismatch { expected: f.input_dim(), got: n });
    }
    if n > SHAPLEY_MAX_INPUTS {
        return Err(Error::TooManyInputs { n, cap: SHAPLEY_MAX_INPUTS });
    }

    let mut vertex = vec![0.0_f64; 1 << n];
    let mut point = vec![0.0_f64; n];
    for (mask, slot) in vertex.iter_mut().enumerate() {
        for i in 0..n {
            point[i] = if mask & (1 << i) != 0 { x_bar[i] } else { x_prime[i] };
        }
        *slot = f.eval(&point)?;
    }

    let mut acc = vec![KahanSum::new(); n];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut orderings = 0_u64;
    loop {
        let mut mask = 0_usize;
        for &i in &perm {
            let next = mask | (1 << i);
            acc[i].add(vertex[next] - vertex[mask]);
            mask = next;
        }
        orderings += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }

    // n! ≤ 3 628 800 is exactly representable, so this division is the only
    // rounding step after the Kahan-compensated marginals.
    let count = orderings as f64;
    let values: Vec<f64> = acc.iter().map(|k| k.value() / count).collect();
    let mut sum = KahanSum::new();
    for v in &values {
        sum.add(*v);
    }
    let gap = vertex[(1 << n) - 1] - vertex[0];
    Ok(Attribution {
        values,
        method: "shapley".into(),
        residual: sum.value() - gap,
        quad_error: 0.0,
    })
}

/// Advance `perm` to its lexicographic successor in place. Returns false,
/// leaving the slice untouched, when `perm` is already the last (descending)
/// ordering.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm
        .iter()
        .rposition(|&v| v > perm[i])
        .expect("a successor exists right of the pivot");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}
