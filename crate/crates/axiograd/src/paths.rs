//! Attribution paths: curves γ : [0,1] → ℝⁿ from a baseline x′ to a point
//! x̄, described declaratively and bound to endpoints before use.
//!
//! A [`PathSpec`] starts as a serializable description (`straight`, `power`,
//! explicit waypoints, axis-ordered L-shapes, parameter warps, convex
//! ensembles of any of these) and acquires endpoints through [`bind`]. The
//! split matters: the same description is reused across hundreds of
//! generated cases, and binding is where every endpoint-dependent validity
//! check runs.
//!
//! [`bind`]: PathSpec::bind

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathKind {
    /// γ(t) = x′ + t·(x̄ − x′).
    Straight,
    /// γᵢ(t) = x′ᵢ + Δᵢ·t^(Δᵢ²) with Δ = x̄ − x′: monotone and
    /// endpoint-correct for every Δ, but not affine-scale-invariant — the
    /// exponent changes when the problem is rescaled, which is exactly what
    /// makes it the counterexample device for that axiom.
    Power,
    /// Straight segments through explicit waypoints (endpoints included),
    /// equal parameter time per segment.
    PiecewiseLinear { waypoints: Vec<Vec<f64>> },
    /// Two-leg axis path in the plane: first coordinate to its final value,
    /// then the second. Corner (x̄₁, x′₂) at t = ½.
    LshapeXy,
    /// Two-leg axis path in the plane: second coordinate first.
    /// Corner (x′₁, x̄₂) at t = ½.
    LshapeYx,
    /// Convex combination of paths: attributed member by member and averaged
    /// with the weights, never evaluated as a single curve.
    Ensemble { members: Vec<EnsembleMember> },
    /// γ(t) = inner(t^exponent): a reparametrization when the inner path is
    /// one, used to check that attributions ignore parameter speed.
    Warp { exponent: f64, inner: Box<PathKind> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub weight: f64,
    pub path: PathKind,
}

impl PathKind {
    pub fn kind_name(&self) -> &'static str {
        match self {
            PathKind::Straight => "straight",
            PathKind::Power => "power",
            PathKind::PiecewiseLinear { .. } => "piecewise_linear",
            PathKind::LshapeXy => "lshape_xy",
            PathKind::LshapeYx => "lshape_yx",
            PathKind::Ensemble { .. } => "ensemble",
            PathKind::Warp { .. } => "warp",
        }
    }
}

/// A path description plus, once bound, its endpoints. Serialization carries
/// only the description; endpoints always come from [`PathSpec::bind`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSpec {
    #[serde(flatten)]
    kind: PathKind,
    /// `(x̄, x′)` once bound.
    #[serde(skip)]
    endpoints: Option<(Vec<f64>, Vec<f64>)>,
}

impl From<PathKind> for PathSpec {
    fn from(kind: PathKind) -> Self {
        PathSpec { kind, endpoints: None }
    }
}

impl PathSpec {
    pub fn straight() -> Self {
        PathKind::Straight.into()
    }

    pub fn power() -> Self {
        PathKind::Power.into()
    }

    pub fn piecewise_linear(waypoints: Vec<Vec<f64>>) -> Self {
        PathKind::PiecewiseLinear { waypoints }.into()
    }

    pub fn lshape_xy() -> Self {
        PathKind::LshapeXy.into()
    }

    pub fn lshape_yx() -> Self {
        PathKind::LshapeYx.into()
    }

    pub fn ensemble(members: Vec<(f64, PathSpec)>) -> Self {
        PathKind::Ensemble {
            members: members
                .into_iter()
                .map(|(weight, spec)| EnsembleMember { weight, path: spec.kind })
                .collect(),
        }
        .into()
    }

    pub fn warp(exponent: f64, inner: PathSpec) -> Self {
        PathKind::Warp { exponent, inner: Box::new(inner.kind) }.into()
    }

    pub fn kind(&self) -> &PathKind {
        &self.kind
    }

    /// Attaches endpoints, validating the description against them. Returns
    /// a new bound spec; the original stays reusable.
    pub fn bind(&self, x_bar: &[f64], x_prime: &[f64]) -> Result<PathSpec> {
        if x_bar.len() != x_prime.len() {
            return Err(Error::DimensionMismatch { expected: x_bar.len(), got: x_prime.len() });
        }
        if x_bar.is_empty() {
            return Err(Error::InvalidConfig("path endpoints must have dimension >= 1".into()));
        }
        for (i, (&a, &b)) in x_bar.iter().zip(x_prime).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(Error::NonFinite { context: format!("path endpoint coordinate {i}") });
            }
        }
        validate_kind(&self.kind, x_bar, x_prime)?;
        Ok(PathSpec {
            kind: self.kind.clone(),
            endpoints: Some((x_bar.to_vec(), x_prime.to_vec())),
        })
    }

    /// `(x̄, x′)` of a bound path.
    pub fn endpoints(&self) -> Result<(&[f64], &[f64])> {
        self.endpoints
            .as_ref()
            .map(|(xb, xp)| (xb.as_slice(), xp.as_slice()))
            .ok_or(Error::Unbound)
    }

    pub fn dim(&self) -> Result<usize> {
        self.endpoints().map(|(xb, _)| xb.len())
    }

    /// γ(t). Exact at the ends: `eval(0)` and `eval(1)` return the bound
    /// endpoints bit for bit.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let (xb, xp) = self.endpoints()?;
        check_t(t)?;
        eval_kind(&self.kind, xb, xp, t)
    }

    /// γ′(t). One-sided at t = 0 and t = 1; an exact interior breakpoint of
    /// a piecewise path has no derivative and errors with
    /// [`Error::AtBreakpoint`].
    pub fn deriv(&self, t: f64) -> Result<Vec<f64>> {
        let (xb, xp) = self.endpoints()?;
        check_t(t)?;
        deriv_kind(&self.kind, xb, xp, t)
    }

    /// Interior parameter values where the path is not differentiable,
    /// sorted ascending. Quadrature panels never span one.
    pub fn breakpoints(&self) -> Result<Vec<f64>> {
        let (xb, xp) = self.endpoints()?;
        let mut b = breakpoints_kind(&self.kind, xb, xp);
        b.sort_by(|a, c| a.partial_cmp(c).expect("breakpoints are finite"));
        b.dedup();
        Ok(b)
    }

    /// True when some coordinate's velocity (or a higher derivative of it)
    /// blows up as t → 0, so quadrature should grade its mesh toward 0
    /// instead of splitting uniformly.
    pub fn singular_at_start(&self) -> Result<bool> {
        let (xb, xp) = self.endpoints()?;
        Ok(singular_kind(&self.kind, xb, xp))
    }

    /// Samples `samples + 1` equally spaced parameter values and checks that
    /// every coordinate moves weakly monotonically. A sampled check: it can
    /// miss a wiggle between grid points, but the axiom harness only needs
    /// it to classify its own constructions.
    pub fn is_monotone(&self, samples: usize) -> Result<bool> {
        if samples == 0 {
            return Err(Error::InvalidConfig("monotonicity check needs samples >= 1".into()));
        }
        let (xb, xp) = self.endpoints()?;
        is_monotone_kind(&self.kind, xb, xp, samples)
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidConfig(format!(
            "path parameter must lie in [0, 1], got {t}"
        )));
    }
    Ok(())
}

fn validate_kind(kind: &PathKind, x_bar: &[f64], x_prime: &[f64]) -> Result<()> {
    match kind {
        PathKind::Straight | PathKind::Power => Ok(()),
        PathKind::PiecewiseLinear { waypoints } => {
            if waypoints.len() < 2 {
                return Err(Error::InvalidConfig(
                    "piecewise path needs at least two waypoints".into(),
                ));
            }
            for (j, w) in waypoints.iter().enumerate() {
                if w.len() != x_bar.len() {
                    return Err(Error::DimensionMismatch { expected: x_bar.len(), got: w.len() });
                }
                if w.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { context: format!("waypoint {j}") });
                }
            }
            let first = waypoints.first().expect("len >= 2");
            let last = waypoints.last().expect("len >= 2");
            if first != x_prime {
                return Err(Error::InvalidConfig(format!(
                    "first waypoint {first:?} must equal the baseline {x_prime:?}"
                )));
            }
            if last != x_bar {
                return Err(Error::InvalidConfig(format!(
                    "last waypoint {last:?} must equal the endpoint {x_bar:?}"
                )));
            }
            Ok(())
        }
        PathKind::LshapeXy | PathKind::LshapeYx => {
            if x_bar.len() != 2 {
                return Err(Error::InvalidConfig(format!(
                    "L-shaped paths are planar; got dimension {}",
                    x_bar.len()
                )));
            }
            Ok(())
        }
        PathKind::Ensemble { members } => {
            if members.is_empty() {
                return Err(Error::InvalidConfig("ensemble needs at least one member".into()));
            }
            let mut sum = 0.0;
            for m in members {
                if !m.weight.is_finite() || m.weight < 0.0 {
                    return Err(Error::InvalidConfig(format!(
                        "ensemble weights must be finite and nonnegative, got {}",
                        m.weight
                    )));
                }
                sum += m.weight;
                validate_kind(&m.path, x_bar, x_prime)?;
            }
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::NotNormalized { sum });
            }
            Ok(())
        }
        PathKind::Warp { exponent, inner } => {
            if !(exponent.is_finite() && *exponent > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "warp exponent must be positive and finite, got {exponent}"
                )));
            }
            validate_kind(inner, x_bar, x_prime)
        }
    }
}

/// Waypoints of an L-shaped path: move one coordinate fully, then the other.
fn lshape_waypoints(kind: &PathKind, x_bar: &[f64], x_prime: &[f64]) -> Vec<Vec<f64>> {
    let corner = match kind {
        PathKind::LshapeXy => vec![x_bar[0], x_prime[1]],
        PathKind::LshapeYx => vec![x_prime[0], x_bar[1]],
        _ => unreachable!("only L-shape kinds have a corner"),
    };
    vec![x_prime.to_vec(), corner, x_bar.to_vec()]
}

fn piecewise_eval(waypoints: &[Vec<f64>], x_bar: &[f64], x_prime: &[f64], t: f64) -> Vec<f64> {
    if t == 0.0 {
        return x_prime.to_vec();
    }
    if t == 1.0 {
        return x_bar.to_vec();
    }
    let segments = waypoints.len() - 1;
    let scaled = t * segments as f64;
    let j = (scaled.floor() as usize).min(segments - 1);
    let local = scaled - j as f64;
    waypoints[j]
        .iter()
        .zip(&waypoints[j + 1])
        .map(|(&a, &b)| a + local * (b - a))
        .collect()
}

fn piecewise_deriv(waypoints: &[Vec<f64>], t: f64) -> Result<Vec<f64>> {
    let segments = waypoints.len() - 1;
    let scaled = t * segments as f64;
    // exact interior node: no two-sided derivative
    if t > 0.0 && t < 1.0 && scaled.fract() == 0.0 {
        return Err(Error::AtBreakpoint { t });
    }
    let j = (scaled.floor() as usize).min(segments - 1);
    Ok(waypoints[j]
        .iter()
        .zip(&waypoints[j + 1])
        .map(|(&a, &b)| (b - a) * segments as f64)
        .collect())
}

fn eval_kind(kind: &PathKind, x_bar: &[f64], x_prime: &[f64], t: f64) -> Result<Vec<f64>> {
    match kind {
        PathKind::Straight => {
            if t == 0.0 {
                return Ok(x_prime.to_vec());
            }
            if t == 1.0 {
                return Ok(x_bar.to_vec());
            }
            Ok(x_prime
                .iter()
                .zip(x_bar)
                .map(|(&p, &b)| p + t * (b - p))
                .collect())
        }
        PathKind::Power => {
            if t == 0.0 {
                return Ok(x_prime.to_vec());
            }
            if t == 1.0 {
                return Ok(x_bar.to_vec());
            }
            Ok(x_prime
                .iter()
                .zip(x_bar)
                .map(|(&p, &b)| {
                    let d = b - p;
                    if d == 0.0 {
                        p
                    } else {
                        p + d * t.powf(d * d)
                    }
                })
                .collect())
        }
        PathKind::PiecewiseLinear { waypoints } => {
            Ok(piecewise_eval(waypoints, x_bar, x_prime, t))
        }
        PathKind::LshapeXy | PathKind::LshapeYx => {
            let waypoints = lshape_waypoints(kind, x_bar, x_prime);
            Ok(piecewise_eval(&waypoints, x_bar, x_prime, t))
        }
        PathKind::Ensemble { .. } => Err(Error::EnsembleNotPointwise),
        PathKind::Warp { exponent, inner } => {
            eval_kind(inner, x_bar, x_prime, t.powf(*exponent))
        }
    }
}

fn deriv_kind(kind: &PathKind, x_bar: &[f64], x_prime: &[f64], t: f64) -> Result<Vec<f64>> {
    match kind {
        PathKind::Straight => Ok(x_prime.iter().zip(x_bar).map(|(&p, &b)| b - p).collect()),
        PathKind::Power => Ok(x_prime
            .iter()
            .zip(x_bar)
            .map(|(&p, &b)| {
                let d = b - p;
                if d == 0.0 {
                    0.0
                } else {
                    // d/dt [d · t^(d²)] = d³ · t^(d²−1); unbounded at t = 0
                    // when d² < 1, which is what graded panels absorb
                    d * d * d * t.powf(d * d - 1.0)
                }
            })
            .collect()),
        PathKind::PiecewiseLinear { waypoints } => piecewise_deriv(waypoints, t),
        PathKind::LshapeXy | PathKind::LshapeYx => {
            let waypoints = lshape_waypoints(kind, x_bar, x_prime);
            piecewise_deriv(&waypoints, t)
        }
        PathKind::Ensemble { .. } => Err(Error::EnsembleNotPointwise),
        PathKind::Warp { exponent, inner } => {
            let e = *exponent;
            let inner_d = deriv_kind(inner, x_bar, x_prime, t.powf(e))?;
            let speed = e * t.powf(e - 1.0);
            Ok(inner_d.into_iter().map(|v| v * speed).collect())
        }
    }
}

fn breakpoints_kind(kind: &PathKind, x_bar: &[f64], x_prime: &[f64]) -> Vec<f64> {
    match kind {
        PathKind::Straight | PathKind::Power => Vec::new(),
        PathKind::PiecewiseLinear { waypoints } => {
            let segments = waypoints.len() - 1;
            (1..segments).map(|j| j as f64 / segments as f64).collect()
        }
        PathKind::LshapeXy | PathKind::LshapeYx => vec![0.5],
        PathKind::Ensemble { members } => members
            .iter()
            .flat_map(|m| breakpoints_kind(&m.path, x_bar, x_prime))
            .collect(),
        PathKind::Warp { exponent, inner } => breakpoints_kind(inner, x_bar, x_prime)
            .into_iter()
            .map(|b| b.powf(1.0 / exponent))
            .collect(),
    }
}

fn singular_kind(kind: &PathKind, x_bar: &[f64], x_prime: &[f64]) -> bool {
    match kind {
        PathKind::Straight | PathKind::PiecewiseLinear { .. } => false,
        PathKind::LshapeXy | PathKind::LshapeYx => false,
        PathKind::Power => x_bar.iter().zip(x_prime).any(|(&b, &p)| {
            let d = b - p;
            d != 0.0 && (d * d).fract() != 0.0
        }),
        PathKind::Ensemble { members } => members
            .iter()
            .any(|m| singular_kind(&m.path, x_bar, x_prime)),
        PathKind::Warp { exponent, inner } => {
            exponent.fract() != 0.0 || singular_kind(inner, x_bar, x_prime)
        }
    }
}

fn is_monotone_kind(
    kind: &PathKind,
    x_bar: &[f64],
    x_prime: &[f64],
    samples: usize,
) -> Result<bool> {
    if let PathKind::Ensemble { members } = kind {
        for m in members {
            if !is_monotone_kind(&m.path, x_bar, x_prime, samples)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    let n = x_bar.len();
    let mut prev = eval_kind(kind, x_bar, x_prime, 0.0)?;
    let mut up = vec![true; n];
    let mut down = vec![true; n];
    for j in 1..=samples {
        let t = j as f64 / samples as f64;
        let cur = eval_kind(kind, x_bar, x_prime, t)?;
        for i in 0..n {
            if cur[i] > prev[i] {
                down[i] = false;
            }
            if cur[i] < prev[i] {
                up[i] = false;
            }
        }
        prev = cur;
    }
    Ok((0..n).all(|i| up[i] || down[i]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_is_bit_exact_at_the_ends() {
        let xb = [0.3, -1.7];
        let xp = [0.1, 0.2];
        for spec in [
            PathSpec::straight(),
            PathSpec::power(),
            PathSpec::lshape_xy(),
            PathSpec::warp(2.0, PathSpec::straight()),
        ] {
            let p = spec.bind(&xb, &xp).unwrap();
            let start = p.eval(0.0).unwrap();
            let end = p.eval(1.0).unwrap();
            for i in 0..2 {
                assert_eq!(start[i].to_bits(), xp[i].to_bits(), "{:?}", p.kind());
                assert_eq!(end[i].to_bits(), xb[i].to_bits(), "{:?}", p.kind());
            }
        }
    }

    #[test]
    fn unbound_paths_refuse_to_evaluate() {
        assert!(matches!(PathSpec::straight().eval(0.5), Err(Error::Unbound)));
        assert!(matches!(PathSpec::power().deriv(0.5), Err(Error::Unbound)));
    }

    #[test]
    fn power_path_midpoint_value() {
        // Δ = (1, 0.5): γ₂(½) = 0.5 · 0.5^0.25
        let p = PathSpec::power().bind(&[1.0, 0.5], &[0.0, 0.0]).unwrap();
        let mid = p.eval(0.5).unwrap();
        assert_eq!(mid[0], 0.5);
        assert!((mid[1] - 0.42044820762685727).abs() < 1e-16, "got {}", mid[1]);
    }

    #[test]
    fn power_path_derivative_matches_formula() {
        let p = PathSpec::power().bind(&[1.0, 0.5], &[0.0, 0.0]).unwrap();
        let d = p.deriv(0.5).unwrap();
        assert_eq!(d[0], 1.0, "unit offset runs at straight-line speed");
        // Δ₂³ · t^(Δ₂²−1) = 0.125 · 0.5^(−0.75)
        assert!((d[1] - 0.21022410381342863).abs() < 1e-15, "got {}", d[1]);
        // unbounded velocity entering t = 0 on the fractional coordinate
        assert!(p.deriv(0.0).unwrap()[1].is_infinite());
        assert!(p.singular_at_start().unwrap());
    }

    #[test]
    fn integer_offsets_make_power_paths_regular() {
        let p = PathSpec::power().bind(&[1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert!(!p.singular_at_start().unwrap());
    }

    #[test]
    fn lshape_legs_and_corner() {
        let p = PathSpec::lshape_xy().bind(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(p.eval(0.25).unwrap(), vec![0.5, 0.0]);
        assert_eq!(p.eval(0.5).unwrap(), vec![1.0, 0.0]);
        assert_eq!(p.eval(0.75).unwrap(), vec![1.0, 0.5]);
        assert_eq!(p.deriv(0.25).unwrap(), vec![2.0, 0.0]);
        assert_eq!(p.deriv(0.75).unwrap(), vec![0.0, 2.0]);
        assert!(matches!(p.deriv(0.5), Err(Error::AtBreakpoint { t }) if t == 0.5));
        assert_eq!(p.breakpoints().unwrap(), vec![0.5]);

        let q = PathSpec::lshape_yx().bind(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert_eq!(q.eval(0.5).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn lshape_requires_the_plane() {
        assert!(matches!(
            PathSpec::lshape_xy().bind(&[1.0, 1.0, 1.0], &[0.0, 0.0, 0.0]),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn warp_is_a_reparametrization() {
        let xb = [2.0, -1.0];
        let xp = [0.5, 0.5];
        let straight = PathSpec::straight().bind(&xb, &xp).unwrap();
        let warped = PathSpec::warp(2.0, PathSpec::straight()).bind(&xb, &xp).unwrap();
        for &t in &[0.1, 0.3, 0.9] {
            assert_eq!(warped.eval(t).unwrap(), straight.eval(t * t).unwrap());
        }
        // chain rule: γ_w′(t) = 2t · Δ
        let d = warped.deriv(0.3).unwrap();
        assert!((d[0] - 0.6 * 1.5).abs() < 1e-15);
        assert!(PathSpec::warp(0.5, PathSpec::straight())
            .bind(&xb, &xp)
            .unwrap()
            .singular_at_start()
            .unwrap());
        assert!(matches!(
            PathSpec::warp(-1.0, PathSpec::straight()).bind(&xb, &xp),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn piecewise_validates_endpoints_and_reports_breakpoints() {
        let xb = [1.0, 1.0];
        let xp = [0.0, 0.0];
        let good = PathSpec::piecewise_linear(vec![
            vec![0.0, 0.0],
            vec![0.5, 0.25],
            vec![0.75, 0.5],
            vec![1.0, 1.0],
        ]);
        let p = good.bind(&xb, &xp).unwrap();
        assert_eq!(p.breakpoints().unwrap(), vec![1.0 / 3.0, 2.0 / 3.0]);
        assert!(p.is_monotone(30).unwrap());

        let bad_first = PathSpec::piecewise_linear(vec![vec![0.1, 0.0], vec![1.0, 1.0]]);
        assert!(matches!(bad_first.bind(&xb, &xp), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn monotonicity_sees_backtracking() {
        let xb = [1.0, 1.0];
        let xp = [0.0, 0.0];
        let overshoot = PathSpec::piecewise_linear(vec![
            vec![0.0, 0.0],
            vec![2.0, 0.0],
            vec![1.0, 1.0],
        ]);
        let p = overshoot.bind(&xb, &xp).unwrap();
        assert!(!p.is_monotone(30).unwrap());
        assert!(matches!(p.is_monotone(0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn ensembles_validate_weights_and_refuse_pointwise_use() {
        let xb = [1.0, 1.0];
        let xp = [0.0, 0.0];
        let half_half = PathSpec::ensemble(vec![
            (0.5, PathSpec::lshape_xy()),
            (0.5, PathSpec::lshape_yx()),
        ]);
        let p = half_half.bind(&xb, &xp).unwrap();
        assert!(matches!(p.eval(0.25), Err(Error::EnsembleNotPointwise)));
        assert!(matches!(p.deriv(0.25), Err(Error::EnsembleNotPointwise)));
        assert_eq!(p.breakpoints().unwrap(), vec![0.5]);
        assert!(p.is_monotone(20).unwrap());

        let lopsided = PathSpec::ensemble(vec![
            (0.9, PathSpec::straight()),
            (0.2, PathSpec::power()),
        ]);
        assert!(matches!(
            lopsided.bind(&xb, &xp),
            Err(Error::NotNormalized { sum }) if (sum - 1.1).abs() < 1e-12
        ));
        let negative = PathSpec::ensemble(vec![
            (1.5, PathSpec::straight()),
            (-0.5, PathSpec::power()),
        ]);
        assert!(matches!(negative.bind(&xb, &xp), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn spec_serde_round_trip_drops_endpoints() {
        let spec = PathSpec::ensemble(vec![
            (0.5, PathSpec::straight()),
            (0.5, PathSpec::warp(2.0, PathSpec::power())),
        ]);
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"kind\":\"ensemble\""), "{json}");
        let back: PathSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert!(matches!(back.eval(0.5), Err(Error::Unbound)));

        let plain: PathSpec = serde_json::from_str(r#"{"kind":"power"}"#).unwrap();
        assert_eq!(plain, PathSpec::power());
    }

    #[test]
    fn parameter_outside_unit_interval_is_rejected() {
        let p = PathSpec::straight().bind(&[1.0], &[0.0]).unwrap();
        assert!(matches!(p.eval(1.5), Err(Error::InvalidConfig(_))));
        assert!(matches!(p.eval(f64::NAN), Err(Error::InvalidConfig(_))));
        assert!(matches!(p.deriv(-0.1), Err(Error::InvalidConfig(_))));
    }
}
