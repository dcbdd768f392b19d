//! Gradient access with explicit nondifferentiability reporting, plus a
//! finite-difference cross-check used by the test oracles and the CLI's
//! self-diagnostics.

use crate::error::{Error, KinkUnit, Result};
use crate::func_model::ScalarFunction;

/// Half-width of the band around a kink signal's zero inside which a point
/// is reported as nondifferentiable. Exact zeros (straight paths hitting a
/// ReLU boundary head-on) are the common case; the band also catches values
/// that rounded off an exact hit.
pub const KINK_EPSILON: f64 = 1e-12;

/// A gradient together with its trust annotations. When `differentiable` is
/// false the vector is still populated — each one-sided rule resolves by the
/// documented convention (ReLU slope 0 at the kink, max taking its first
/// argument on ties) — and `kinks` names the offending units.
#[derive(Debug, Clone, PartialEq)]
pub struct GradResult {
    pub gradient: Vec<f64>,
    pub differentiable: bool,
    pub kinks: Vec<KinkUnit>,
}

/// The gradient of `f` at `x`, kink flags included.
pub fn grad(f: &dyn ScalarFunction, x: &[f64]) -> Result<GradResult> {
    f.gradient(x)
}

/// The partial derivative `∂ᵢ f(x)` as a plain number. Unlike [`grad`] this
/// refuses to answer at a flagged point: a caller asking for one number gets
/// either a trustworthy one or [`Error::NondifferentiableAt`].
pub fn partial(f: &dyn ScalarFunction, i: usize, x: &[f64]) -> Result<f64> {
    if i >= f.input_dim() {
        return Err(Error::DimensionMismatch { expected: f.input_dim(), got: i });
    }
    let g = f.gradient(x)?;
    if !g.differentiable {
        return Err(Error::NondifferentiableAt { x: x.to_vec(), kinks: g.kinks });
    }
    Ok(g.gradient[i])
}

/// Compares the analytic gradient at `x` against central differences with
/// step `h`, returning the worst relative deviation
/// `maxᵢ |fdᵢ − ∂ᵢf| / (1 + |∂ᵢf|)`.
///
/// The probe points `x ± h·eᵢ` must lie in the box. A difference quotient
/// across a kink measures the wrong limit, so the check refuses with
/// [`Error::NondifferentiableNearby`] whenever the center is flagged, a
/// probe is flagged, or any kink signal changes sign between the two probes
/// of a coordinate (a kink strictly between them).
pub fn fd_check(f: &dyn ScalarFunction, x: &[f64], h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "finite-difference step must be positive and finite, got {h}"
        )));
    }
    let center = f.gradient(x)?;
    if !center.differentiable {
        return Err(Error::NondifferentiableNearby { x: x.to_vec() });
    }
    let mut worst = 0.0_f64;
    let mut probe = x.to_vec();
    for i in 0..f.input_dim() {
        probe[i] = x[i] + h;
        let (plus, signals_plus) = probe_off_kinks(f, &probe)?;
        probe[i] = x[i] - h;
        let (minus, signals_minus) = probe_off_kinks(f, &probe)?;
        probe[i] = x[i];
        let straddles = signals_plus
            .iter()
            .zip(&signals_minus)
            .any(|(&a, &b)| a.signum() != b.signum());
        if straddles {
            return Err(Error::NondifferentiableNearby { x: x.to_vec() });
        }
        let fd = (plus - minus) / (2.0 * h);
        let dev = (fd - center.gradient[i]).abs() / (1.0 + center.gradient[i].abs());
        worst = worst.max(dev);
    }
    Ok(worst)
}

fn probe_off_kinks(f: &dyn ScalarFunction, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let g = f.gradient(x)?;
    if !g.differentiable {
        return Err(Error::NondifferentiableNearby { x: x.to_vec() });
    }
    Ok((f.eval(x)?, f.kink_signals(x)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func_model::{max_net, AnalyticExpr, Domain, Model};

    fn smooth_model() -> Model {
        // F(x, y) = sin(x)·eʸ
        Model::expr(
            AnalyticExpr::mul(vec![
                AnalyticExpr::sin(AnalyticExpr::var(0)),
                AnalyticExpr::exp(AnalyticExpr::var(1)),
            ]),
            Domain::centered(2, 3.0),
        )
        .unwrap()
    }

    #[test]
    fn fd_agrees_with_analytic_gradient() {
        let f = smooth_model();
        let dev = fd_check(&f, &[0.7, -0.4], 1e-5).unwrap();
        assert!(dev < 1e-9, "worst relative deviation {dev}");
    }

    #[test]
    fn partial_refuses_kinks_and_bad_indices() {
        let net = max_net(Domain::centered(2, 10.0)).unwrap();
        assert!((partial(&net, 0, &[2.0, 1.0]).unwrap() - 1.0).abs() == 0.0);
        assert!(matches!(
            partial(&net, 0, &[1.0, 1.0]),
            Err(Error::NondifferentiableAt { .. })
        ));
        assert!(matches!(
            partial(&net, 5, &[2.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fd_refuses_to_straddle_a_kink() {
        let net = max_net(Domain::centered(2, 10.0)).unwrap();
        // center exactly on the diagonal: flagged directly
        assert!(matches!(
            fd_check(&net, &[1.0, 1.0], 1e-6),
            Err(Error::NondifferentiableNearby { .. })
        ));
        // center just off the diagonal, kink strictly between the probes:
        // no sampled point is flagged, but the signal changes sign
        assert!(matches!(
            fd_check(&net, &[1.0 + 5e-7, 1.0], 1e-6),
            Err(Error::NondifferentiableNearby { .. })
        ));
        // well away from the diagonal the check passes; the residual is pure
        // probe-rounding noise (≈ eps·|x|/h), not disagreement
        let dev = fd_check(&net, &[3.0, 1.0], 1e-6).unwrap();
        assert!(dev < 1e-9, "max is affine off the kink, got {dev}");
    }

    #[test]
    fn fd_rejects_probes_outside_the_box() {
        let f = smooth_model();
        assert!(matches!(
            fd_check(&f, &[3.0, 0.0], 1e-3),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn fd_step_must_be_positive() {
        let f = smooth_model();
        assert!(matches!(fd_check(&f, &[0.0, 0.0], 0.0), Err(Error::InvalidConfig(_))));
        assert!(matches!(
            fd_check(&f, &[0.0, 0.0], f64::NAN),
            Err(Error::InvalidConfig(_))
        ));
    }
}
