//! Violation measures and verdicts for the attribution axioms.
//!
//! Every axiom reduces to a non-negative violation score per case — zero (up
//! to numerical tolerance) means the case is consistent with the axiom. A
//! check runs one deterministic case family through a method, keeps the worst
//! score and the case that produced it, and folds the outcome into a verdict.
//! A method that cannot attribute a case at all (its path runs along a kink)
//! makes that case inapplicable rather than failed; a family with no
//! applicable cases yields [`Verdict::Inapplicable`].

use std::sync::Arc;

use crate::attribution::{ig_monomial_closed_form, Attribution, AttributionMethod};
use crate::axioms::{AxiomCase, AxiomId, AxiomReport, CaseGenerator, Verdict};
use crate::error::{Error, Result};
use crate::func_model::{ComposeAffine, Model, ScalarFunction};
use crate::numeric::KahanSum;

/// Attribute a case, treating a kink-blocked path as "no answer" rather than
/// an error.
fn try_attr(
    method: &dyn AttributionMethod,
    f: &dyn ScalarFunction,
    x_bar: &[f64],
    x_prime: &[f64],
) -> Result<Option<Attribution>> {
    match method.attribute(f, x_bar, x_prime) {
        Ok(attr) => Ok(Some(attr)),
        Err(Error::NondifferentiablePath { .. }) => Ok(None),
        Err(other) => Err(other),
    }
}

fn model_at(case: &AxiomCase, k: usize) -> Result<&Model> {
    case.models.get(k).ok_or_else(|| {
        Error::InvalidConfig(format!(
            "case {} carries {} models but the check needs model {k}",
            case.index,
            case.models.len()
        ))
    })
}

fn pair_of(case: &AxiomCase) -> Result<[usize; 2]> {
    case.pair.ok_or_else(|| {
        Error::InvalidConfig(format!("case {} is missing its coordinate pair", case.index))
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Violation score of one case under one method, or `None` when the method
/// cannot attribute the case.
pub fn violation(
    axiom: AxiomId,
    method: &dyn AttributionMethod,
    case: &AxiomCase,
) -> Result<Option<f64>> {
    match axiom {
        AxiomId::Completeness => {
            let f = model_at(case, 0)?;
            let Some(attr) = try_attr(method, f, &case.x_bar, &case.x_prime)? else {
                return Ok(None);
            };
            let mut sum = KahanSum::new();
            for &v in &attr.values {
                sum.add(v);
            }
            let gap = f.eval(&case.x_bar)? - f.eval(&case.x_prime)?;
            Ok(Some((sum.value() - gap).abs()))
        }
        AxiomId::Linearity => {
            let [alpha, beta] = case.coefficients.ok_or_else(|| {
                Error::InvalidConfig(format!("case {} is missing its coefficients", case.index))
            })?;
            let mut attrs = Vec::with_capacity(3);
            for k in 0..3 {
                match try_attr(method, model_at(case, k)?, &case.x_bar, &case.x_prime)? {
                    Some(attr) => attrs.push(attr),
                    None => return Ok(None),
                }
            }
            let worst = (0..attrs[0].values.len())
                .map(|i| {
                    (attrs[2].values[i] - alpha * attrs[0].values[i] - beta * attrs[1].values[i])
                        .abs()
                })
                .fold(0.0, f64::max);
            Ok(Some(worst))
        }
        AxiomId::Dummy => {
            let k = case.null_index.ok_or_else(|| {
                Error::InvalidConfig(format!("case {} is missing its null index", case.index))
            })?;
            let Some(attr) = try_attr(method, model_at(case, 0)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            Ok(Some(attr.values[k].abs()))
        }
        AxiomId::Ndp => {
            let Some(attr) = try_attr(method, model_at(case, 0)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            Ok(Some(attr.values.iter().fold(0.0, |acc: f64, &v| acc.max(-v))))
        }
        AxiomId::SymmetryPreserving => {
            let [i, j] = pair_of(case)?;
            let Some(attr) = try_attr(method, model_at(case, 0)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            Ok(Some((attr.values[i] - attr.values[j]).abs()))
        }
        AxiomId::StrongSymmetry => {
            let [i, j] = pair_of(case)?;
            let f = model_at(case, 0)?;
            let swap = |v: &[f64]| {
                let mut s = v.to_vec();
                s.swap(i, j);
                s
            };
            let Some(straight) = try_attr(method, f, &case.x_bar, &case.x_prime)? else {
                return Ok(None);
            };
            let Some(mirrored) =
                try_attr(method, f, &swap(&case.x_bar), &swap(&case.x_prime))?
            else {
                return Ok(None);
            };
            let viol = (straight.values[i] - mirrored.values[j])
                .abs()
                .max((straight.values[j] - mirrored.values[i]).abs());
            Ok(Some(viol))
        }
        AxiomId::Asi => {
            let map = case.transform.as_ref().ok_or_else(|| {
                Error::InvalidConfig(format!("case {} is missing its affine map", case.index))
            })?;
            let f = model_at(case, 0)?;
            let Some(base) = try_attr(method, f, &case.x_bar, &case.x_prime)? else {
                return Ok(None);
            };
            // F̃ = F ∘ T⁻¹, so that F̃(T(x)) = F(x)
            let inv_scale: Vec<f64> = map.scale.iter().map(|&c| 1.0 / c).collect();
            let inv_shift: Vec<f64> =
                map.scale.iter().zip(&map.shift).map(|(&c, &d)| -d / c).collect();
            let composed = ComposeAffine::new(Arc::new(f.clone()), inv_scale, inv_shift)?;
            let moved_bar = map.apply(&case.x_bar);
            let moved_prime = map.apply(&case.x_prime);
            let Some(moved) = try_attr(method, &composed, &moved_bar, &moved_prime)? else {
                return Ok(None);
            };
            Ok(Some(max_abs_diff(&base.values, &moved.values)))
        }
        AxiomId::Proportionality => {
            let Some(attr) = try_attr(method, model_at(case, 0)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            let ratios: Vec<f64> = attr
                .values
                .iter()
                .zip(case.x_bar.iter().zip(&case.x_prime))
                .map(|(&a, (&b, &p))| a / (b - p))
                .collect();
            let hi = ratios.iter().fold(f64::NEG_INFINITY, |acc, &r| acc.max(r));
            let lo = ratios.iter().fold(f64::INFINITY, |acc, &r| acc.min(r));
            Ok(Some(hi - lo))
        }
        AxiomId::SymmetricMonotonicity | AxiomId::C0SymmetricMonotonicity => {
            if let Some(k) = case.null_index {
                let Some(attr) =
                    try_attr(method, model_at(case, 0)?, &case.x_bar, &case.x_prime)?
                else {
                    return Ok(None);
                };
                return Ok(Some(attr.values[k].abs()));
            }
            let [i, j] = pair_of(case)?;
            let Some(first) = try_attr(method, model_at(case, 0)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            let Some(second) =
                try_attr(method, model_at(case, 1)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            let per_unit_f = first.values[i] / (case.x_bar[i] - case.x_prime[i]);
            let per_unit_g = second.values[j] / (case.x_bar[j] - case.x_prime[j]);
            Ok(Some((per_unit_f - per_unit_g).max(0.0)))
        }
        AxiomId::ImplementationInvariance => {
            let Some(first) = try_attr(method, model_at(case, 0)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            let Some(second) =
                try_attr(method, model_at(case, 1)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            Ok(Some(max_abs_diff(&first.values, &second.values)))
        }
        AxiomId::MonomialDistribution => {
            let m = case.exponents.as_ref().ok_or_else(|| {
                Error::InvalidConfig(format!("case {} is missing its exponents", case.index))
            })?;
            let Some(attr) = try_attr(method, model_at(case, 0)?, &case.x_bar, &case.x_prime)?
            else {
                return Ok(None);
            };
            let closed = ig_monomial_closed_form(m, &case.x_bar, &case.x_prime)?;
            Ok(Some(max_abs_diff(&attr.values, &closed.values)))
        }
    }
}

fn run_check(
    axiom: AxiomId,
    method: &dyn AttributionMethod,
    cases: &[AxiomCase],
    tol: f64,
    seed: u64,
) -> Result<AxiomReport> {
    let mut worst = f64::NEG_INFINITY;
    let mut witness: Option<AxiomCase> = None;
    let mut applicable = 0_usize;
    for case in cases {
        let Some(score) = violation(axiom, method, case)? else { continue };
        applicable += 1;
        if witness.is_none() || score > worst {
            worst = score;
            witness = Some(case.clone());
        }
    }
    // Clamped violations can come back as -0.0; keep reports sign-clean.
    let worst = worst + 0.0;
    let (verdict, worst, witness) = if applicable == 0 {
        (Verdict::Inapplicable, 0.0, None)
    } else if worst <= tol {
        (Verdict::Pass, worst, witness)
    } else {
        (Verdict::Fail, worst, witness)
    };
    Ok(AxiomReport { axiom, verdict, worst, witness, cases: applicable, seed })
}

pub fn check_completeness(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(AxiomId::Completeness, method, &gen.completeness_cases()?, tol, gen.seed)
}

/// The linearity score compounds the quadrature error of three attributions,
/// so its verdict threshold is twice the requested tolerance.
pub fn check_linearity(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(AxiomId::Linearity, method, &gen.linearity_cases()?, 2.0 * tol, gen.seed)
}

pub fn check_dummy(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(AxiomId::Dummy, method, &gen.dummy_cases()?, tol, gen.seed)
}

pub fn check_ndp(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(AxiomId::Ndp, method, &gen.ndp_cases()?, tol, gen.seed)
}

pub fn check_symmetry_preserving(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(AxiomId::SymmetryPreserving, method, &gen.symmetry_cases()?, tol, gen.seed)
}

pub fn check_strong_symmetry(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(AxiomId::StrongSymmetry, method, &gen.strong_symmetry_cases()?, tol, gen.seed)
}

pub fn check_asi(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(AxiomId::Asi, method, &gen.asi_cases()?, tol, gen.seed)
}

pub fn check_proportionality(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(AxiomId::Proportionality, method, &gen.proportionality_cases()?, tol, gen.seed)
}

pub fn check_symmetric_monotonicity(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(
        AxiomId::SymmetricMonotonicity,
        method,
        &gen.symmetric_monotonicity_cases()?,
        tol,
        gen.seed,
    )
}

pub fn check_c0_symmetric_monotonicity(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(
        AxiomId::C0SymmetricMonotonicity,
        method,
        &gen.c0_symmetric_monotonicity_cases()?,
        tol,
        gen.seed,
    )
}

pub fn check_implementation_invariance(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(
        AxiomId::ImplementationInvariance,
        method,
        &gen.implementation_invariance_cases()?,
        tol,
        gen.seed,
    )
}

pub fn check_monomial_distribution(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    run_check(
        AxiomId::MonomialDistribution,
        method,
        &gen.monomial_distribution_cases()?,
        tol,
        gen.seed,
    )
}

pub fn check(
    axiom: AxiomId,
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<AxiomReport> {
    match axiom {
        AxiomId::Completeness => check_completeness(method, gen, tol),
        AxiomId::Linearity => check_linearity(method, gen, tol),
        AxiomId::Dummy => check_dummy(method, gen, tol),
        AxiomId::Ndp => check_ndp(method, gen, tol),
        AxiomId::SymmetryPreserving => check_symmetry_preserving(method, gen, tol),
        AxiomId::StrongSymmetry => check_strong_symmetry(method, gen, tol),
        AxiomId::Asi => check_asi(method, gen, tol),
        AxiomId::Proportionality => check_proportionality(method, gen, tol),
        AxiomId::SymmetricMonotonicity => check_symmetric_monotonicity(method, gen, tol),
        AxiomId::C0SymmetricMonotonicity => check_c0_symmetric_monotonicity(method, gen, tol),
        AxiomId::ImplementationInvariance => check_implementation_invariance(method, gen, tol),
        AxiomId::MonomialDistribution => check_monomial_distribution(method, gen, tol),
    }
}

/// Run every axiom check in declaration order.
pub fn check_all(
    method: &dyn AttributionMethod,
    gen: &CaseGenerator,
    tol: f64,
) -> Result<Vec<AxiomReport>> {
    AxiomId::ALL.iter().map(|&axiom| check(axiom, method, gen, tol)).collect()
}
