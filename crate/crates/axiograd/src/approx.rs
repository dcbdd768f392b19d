//! Convergence studies for the smoothing and truncation approximations.
//!
//! Three questions get numerical answers here: how fast softplus-smoothed
//! attributions approach the ReLU limit as the sharpness α grows, how fast
//! the smoothed networks themselves converge uniformly, and how fast
//! attributions of Taylor truncations approach the attribution of the full
//! analytic function. A fourth probe samples a path for kinks to decide
//! whether the smoothing studies' limit attribution exists at all.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::attribution::{ig, Attribution, QuadratureConfig};
use crate::error::{Error, Result};
use crate::func_model::{taylor, AnalyticExpr, Domain, LayeredNet, Model};
use crate::grad::grad;
use crate::paths::PathSpec;

/// Sample seed for the uniform-convergence probe; fixed so repeated probes
/// of the same network are comparable.
const PROBE_SEED: u64 = 0x5A_4D7;

/// One convergence experiment: a strictly increasing parameter grid, the
/// attribution computed at each grid point, and each point's ∞-norm distance
/// to the limit. The limit is the reference attribution when one exists;
/// when it does not (the limiting gradient is undefined on the path), each
/// point is measured against the final grid point instead, a Cauchy-style
/// criterion that needs no limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub params: Vec<f64>,
    pub attributions: Vec<Attribution>,
    pub deltas: Vec<f64>,
    pub reference: Option<Attribution>,
}

impl ConvergenceSeries {
    fn assemble(
        params: Vec<f64>,
        attributions: Vec<Attribution>,
        reference: Option<Attribution>,
    ) -> Self {
        let target: &[f64] = match &reference {
            Some(attr) => &attr.values,
            None => &attributions.last().expect("grids are validated non-empty").values,
        };
        let target = target.to_vec();
        let deltas = attributions
            .iter()
            .map(|attr| {
                attr.values
                    .iter()
                    .zip(&target)
                    .map(|(&a, &t)| (a - t).abs())
                    .fold(0.0, f64::max)
            })
            .collect();
        ConvergenceSeries { params, attributions, deltas, reference }
    }

    /// One row per grid point: `param,a1,…,an,delta,residual`.
    pub fn to_csv(&self) -> String {
        let n = self.attributions.first().map_or(0, |a| a.values.len());
        let mut out = String::from("param");
        for i in 1..=n {
            out.push_str(&format!(",a{i}"));
        }
        out.push_str(",delta,residual\n");
        for ((param, attr), delta) in
            self.params.iter().zip(&self.attributions).zip(&self.deltas)
        {
            out.push_str(&format!("{param}"));
            for v in &attr.values {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{delta},{}\n", attr.residual));
        }
        out
    }
}

fn require_increasing(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig(format!("the {what} grid is empty")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(format!(
            "the {what} grid must be strictly increasing"
        )));
    }
    Ok(())
}

/// The default sharpness grid, one decade per step. Past 10⁵ the smoothed
/// derivative is numerically indistinguishable from the step it approximates,
/// so larger values measure rounding, not convergence.
pub fn default_alpha_grid() -> Vec<f64> {
    vec![1.0, 1e1, 1e2, 1e3, 1e4, 1e5]
}

/// Straight-path attributions of softplus-smoothed copies of `net` along a
/// grid of sharpness values. The reference is the attribution of `net`
/// itself when its kinks stay off the path; otherwise the series carries no
/// reference and measures Cauchy-style convergence.
pub fn softplus_convergence_study(
    net: &LayeredNet,
    x_bar: &[f64],
    x_prime: &[f64],
    alphas: &[f64],
    q: &QuadratureConfig,
) -> Result<ConvergenceSeries> {
    require_increasing(alphas, "sharpness")?;
    let reference = match ig(net, x_bar, x_prime, q) {
        Ok(attr) => Some(attr),
        Err(Error::NondifferentiablePath { .. }) => None,
        Err(other) => return Err(other),
    };
    let mut attributions = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let smoothed = net.softplus_smooth(alpha)?;
        attributions.push(ig(&smoothed, x_bar, x_prime, q)?);
    }
    Ok(ConvergenceSeries::assemble(alphas.to_vec(), attributions, reference))
}

/// Largest observed |F_α(x) − F(x)| per sharpness value, over a seeded
/// sample of the box plus its center. The center is included so symmetric
/// test networks are probed exactly at their kink, where the gap peaks.
pub fn uniform_convergence_probe(
    net: &LayeredNet,
    alphas: &[f64],
    samples: usize,
) -> Result<Vec<f64>> {
    require_increasing(alphas, "sharpness")?;
    let domain = net.domain();
    let mut points = Vec::with_capacity(samples + 1);
    points.push(
        domain
            .lower()
            .iter()
            .zip(domain.upper())
            .map(|(&lo, &hi)| 0.5 * (lo + hi))
            .collect::<Vec<f64>>(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..samples {
        points.push(
            domain
                .lower()
                .iter()
                .zip(domain.upper())
                .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
                .collect(),
        );
    }
    let mut sups = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let smoothed = net.softplus_smooth(alpha)?;
        let mut sup = 0.0_f64;
        for x in &points {
            sup = sup.max((smoothed.eval(x)? - net.eval(x)?).abs());
        }
        sups.push(sup);
    }
    Ok(sups)
}

/// Straight-path attributions of Taylor truncations of `expr` centered at
/// x′, against the attribution of the full expression. Evaluation happens
/// only on the segment between the endpoints; the working box pads their
/// hull by one unit per side.
pub fn taylor_convergence_study(
    expr: &AnalyticExpr,
    x_bar: &[f64],
    x_prime: &[f64],
    orders: &[usize],
    q: &QuadratureConfig,
) -> Result<ConvergenceSeries> {
    if x_bar.len() != x_prime.len() {
        return Err(Error::DimensionMismatch { expected: x_bar.len(), got: x_prime.len() });
    }
    let order_grid: Vec<f64> = orders.iter().map(|&l| l as f64).collect();
    require_increasing(&order_grid, "order")?;
    let lower: Vec<f64> =
        x_bar.iter().zip(x_prime).map(|(&b, &p)| b.min(p) - 1.0).collect();
    let upper: Vec<f64> =
        x_bar.iter().zip(x_prime).map(|(&b, &p)| b.max(p) + 1.0).collect();
    let domain = Domain::new(lower, upper)?;
    let full = Model::expr(expr.clone(), domain.clone())?;
    let reference = ig(&full, x_bar, x_prime, q)?;
    let mut attributions = Vec::with_capacity(orders.len());
    for &order in orders {
        let truncated = taylor(expr, x_prime, order)?;
        let model = Model::expr(truncated, domain.clone())?;
        attributions.push(ig(&model, x_bar, x_prime, q)?);
    }
    Ok(ConvergenceSeries::assemble(order_grid, attributions, Some(reference)))
}

/// Fraction of sampled path parameters at which the network has a clean
/// gradient. Samples are panel midpoints k+½ of a uniform grid, so the
/// endpoints themselves — measure zero, and allowed to sit on kinks — are
/// never probed.
pub fn path_differentiability_probe(
    net: &LayeredNet,
    path: &PathSpec,
    samples: usize,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidConfig("the probe needs at least one sample".into()));
    }
    let (x_bar, _) = path.endpoints()?;
    if x_bar.len() != net.input_dim() {
        return Err(Error::DimensionMismatch { expected: net.input_dim(), got: x_bar.len() });
    }
    let mut clean = 0_usize;
    for k in 0..samples {
        let t = (k as f64 + 0.5) / samples as f64;
        let x = path.eval(t)?;
        if grad(net, &x)?.differentiable {
            clean += 1;
        }
    }
    Ok(clean as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func_model::{max_net, Activation, Layer};

    fn quarter_box_max_net() -> LayeredNet {
        max_net(Domain::new(vec![0.0, 0.0], vec![2.0, 2.0]).unwrap()).unwrap()
    }

    fn single_relu() -> LayeredNet {
        LayeredNet::new(
            Domain::centered(1, 2.0),
            vec![
                Layer::Affine { weight: vec![vec![1.0]], bias: vec![0.0] },
                Layer::Elementwise { acts: vec![Activation::Relu] },
                Layer::Affine { weight: vec![vec![1.0]], bias: vec![0.0] },
            ],
        )
        .unwrap()
    }

    fn tiny_tanh_net() -> LayeredNet {
        LayeredNet::new(
            Domain::centered(2, 2.0),
            vec![
                Layer::Affine {
                    weight: vec![vec![0.7, -0.3], vec![0.2, 0.9]],
                    bias: vec![0.1, -0.2],
                },
                Layer::Elementwise { acts: vec![Activation::Tanh, Activation::Tanh] },
                Layer::Affine { weight: vec![vec![0.8, -0.6]], bias: vec![0.3] },
            ],
        )
        .unwrap()
    }

    fn deep_quadrature() -> QuadratureConfig {
        // sharp sigmoids concentrate near t = 0; leave room to refine
        QuadratureConfig { max_panels: 1 << 13, ..QuadratureConfig::default() }
    }

    #[test]
    fn softplus_study_on_the_max_net_matches_the_analytic_gaps() {
        // A₁(α) = 2(ln(1+e^α) − ln 2)/α, and the limit attribution is (2,0),
        // so the ∞-norm delta is 2 − A₁(α).
        let expected = [
            0.759_770_986_083_352_2,
            0.138_620_356_251_791_33,
            0.013_862_943_611_197_88,
            0.001_386_294_361_119_890_6,
        ];
        let series = softplus_convergence_study(
            &quarter_box_max_net(),
            &[2.0, 1.0],
            &[0.0, 0.0],
            &[1.0, 10.0, 100.0, 1000.0],
            &deep_quadrature(),
        )
        .unwrap();
        let reference = series.reference.as_ref().expect("the straight path avoids the ridge");
        assert!((reference.values[0] - 2.0).abs() < 1e-9, "limit A₁: {:?}", reference.values);
        assert!(reference.values[1].abs() < 1e-9, "limit A₂: {:?}", reference.values);
        for (k, (&got, &want)) in series.deltas.iter().zip(&expected).enumerate() {
            assert!(
                (got - want).abs() < 1e-8,
                "delta at α = {}: got {got}, expected {want}",
                series.params[k]
            );
        }
        assert!(
            series.deltas.windows(2).all(|w| w[1] < w[0]),
            "gaps shrink with sharpness: {:?}",
            series.deltas
        );
        assert!(series.deltas.last().unwrap() <= &1e-2);
    }

    #[test]
    fn diagonal_study_has_no_reference_and_equal_splits() {
        // On the ridge every smoothed copy splits evenly, so the series is
        // constant at (0.5, 0.5) even though the limit attribution is
        // undefined.
        let net = max_net(Domain::centered(2, 2.0)).unwrap();
        let series = softplus_convergence_study(
            &net,
            &[1.0, 1.0],
            &[0.0, 0.0],
            &[1.0, 10.0, 100.0],
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(series.reference.is_none(), "the ridge path has no limiting gradient");
        for attr in &series.attributions {
            assert!((attr.values[0] - 0.5).abs() < 1e-9, "split: {:?}", attr.values);
            assert!((attr.values[1] - 0.5).abs() < 1e-9, "split: {:?}", attr.values);
        }
        assert!(series.deltas.iter().all(|&d| d < 1e-9), "deltas: {:?}", series.deltas);
        assert_eq!(*series.deltas.last().unwrap(), 0.0, "the final point measures itself");
    }

    #[test]
    fn smoothing_a_relu_free_net_changes_nothing() {
        let net = tiny_tanh_net();
        let q = QuadratureConfig::default();
        let series =
            softplus_convergence_study(&net, &[1.0, -0.5], &[0.0, 0.0], &[1.0, 10.0], &q)
                .unwrap();
        assert!(series.deltas.iter().all(|&d| d <= q.tolerance), "deltas: {:?}", series.deltas);
        let sups = uniform_convergence_probe(&net, &[1.0, 10.0], 50).unwrap();
        assert_eq!(sups, vec![0.0, 0.0], "identical networks evaluate identically");
    }

    #[test]
    fn single_relu_sup_gap_is_ln2_over_alpha_with_decade_ratio_ten() {
        let sups = uniform_convergence_probe(&single_relu(), &[1.0, 10.0, 100.0], 40).unwrap();
        let ln2 = std::f64::consts::LN_2;
        for (&sup, alpha) in sups.iter().zip([1.0, 10.0, 100.0]) {
            assert!(
                (sup - ln2 / alpha).abs() < 1e-15,
                "sup at α = {alpha}: got {sup}, peak sits at the sampled center"
            );
        }
        let ratio = sups[0] / sups[1];
        assert!((8.0..=12.0).contains(&ratio), "decade ratio {ratio} strays from 10");
    }

    #[test]
    fn max_net_sup_gaps_strictly_decrease() {
        let sups =
            uniform_convergence_probe(&quarter_box_max_net(), &[1.0, 10.0, 100.0], 60).unwrap();
        assert!(
            sups.windows(2).all(|w| w[1] < w[0]),
            "sup gaps must fall decade over decade: {sups:?}"
        );
    }

    #[test]
    fn taylor_study_of_the_exponential_matches_the_remainder_series() {
        // delta(l) = a·Σ_{k≥l} (2a)^k / (k!(k+1)) at a = 0.5
        let expected = [
            0.359_140_914_229_522_8,
            0.109_140_914_229_522_83,
            0.025_807_580_896_189_447,
            0.004_974_247_562_856_125,
            0.000_807_580_896_189_403_5,
            0.000_113_136_450_634_856_04,
            1.393_010_349_765_661_5e-5,
            1.529_308_909_754_5e-6,
        ];
        let expr = AnalyticExpr::exp(AnalyticExpr::add(vec![
            AnalyticExpr::var(0),
            AnalyticExpr::var(1),
        ]));
        let series = taylor_convergence_study(
            &expr,
            &[0.5, 0.5],
            &[0.0, 0.0],
            &[1, 2, 3, 4, 5, 6, 7, 8],
            &QuadratureConfig::default(),
        )
        .unwrap();
        for (k, (&got, &want)) in series.deltas.iter().zip(&expected).enumerate() {
            assert!(
                (got - want).abs() < 1e-9,
                "order {}: delta {got} vs {want}",
                series.params[k]
            );
        }
        assert!(series.deltas.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn truncating_past_the_degree_reproduces_a_polynomial() {
        let expr = AnalyticExpr::add(vec![
            AnalyticExpr::mul(vec![
                AnalyticExpr::pow(AnalyticExpr::var(0), 2),
                AnalyticExpr::var(1),
            ]),
            AnalyticExpr::scale(0.5, AnalyticExpr::var(0)),
        ]);
        let series = taylor_convergence_study(
            &expr,
            &[1.0, 0.75],
            &[0.25, -0.5],
            &[3, 4, 5],
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(
            series.deltas.iter().all(|&d| d <= 1e-9),
            "a cubic is its own Taylor series from order three: {:?}",
            series.deltas
        );
    }

    #[test]
    fn sine_product_converges_within_ten_orders() {
        let expr = AnalyticExpr::mul(vec![
            AnalyticExpr::sin(AnalyticExpr::var(0)),
            AnalyticExpr::var(1),
        ]);
        let series = taylor_convergence_study(
            &expr,
            &[1.0, 1.0],
            &[0.0, 0.0],
            &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10],
            &QuadratureConfig::default(),
        )
        .unwrap();
        let reference = series.reference.as_ref().unwrap();
        assert!((reference.values[0] - 0.381_773_290_676_036_22).abs() < 1e-9);
        assert!((reference.values[1] - 0.459_697_694_131_860_28).abs() < 1e-9);
        assert!(*series.deltas.last().unwrap() <= 1e-5);
    }

    #[test]
    fn probe_sees_the_ridge_only_when_the_path_rides_it() {
        let net = max_net(Domain::centered(2, 2.0)).unwrap();
        let ridge = PathSpec::straight()
            .bind(&[1.0, 1.0], &[0.0, 0.0])
            .unwrap();
        assert_eq!(path_differentiability_probe(&net, &ridge, 101).unwrap(), 0.0);
        let clear = PathSpec::straight()
            .bind(&[2.0, 1.0], &[0.0, 0.0])
            .unwrap();
        assert_eq!(path_differentiability_probe(&net, &clear, 101).unwrap(), 1.0);
        let analytic = tiny_tanh_net();
        let anywhere = PathSpec::straight()
            .bind(&[1.0, -1.0], &[-0.5, 0.5])
            .unwrap();
        assert_eq!(path_differentiability_probe(&analytic, &anywhere, 101).unwrap(), 1.0);
    }

    #[test]
    fn grids_must_be_strictly_increasing_and_non_empty() {
        let net = single_relu();
        let q = QuadratureConfig::default();
        assert!(softplus_convergence_study(&net, &[1.0], &[0.0], &[10.0, 10.0], &q).is_err());
        assert!(softplus_convergence_study(&net, &[1.0], &[0.0], &[], &q).is_err());
        assert!(uniform_convergence_probe(&net, &[100.0, 1.0], 10).is_err());
        let expr = AnalyticExpr::var(0);
        assert!(taylor_convergence_study(&expr, &[1.0], &[0.0], &[3, 2], &q).is_err());
    }

    #[test]
    fn csv_rows_carry_param_components_delta_and_residual() {
        let series = softplus_convergence_study(
            &quarter_box_max_net(),
            &[2.0, 1.0],
            &[0.0, 0.0],
            &[1.0, 10.0],
            &QuadratureConfig::default(),
        )
        .unwrap();
        let csv = series.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "param,a1,a2,delta,residual");
        assert_eq!(lines.len(), 3, "header plus one row per grid point");
        assert!(lines[1].starts_with("1,"), "params print plainly: {}", lines[1]);
        assert_eq!(lines[1].split(',').count(), 5);
    }

    #[test]
    fn default_grid_spans_six_decades() {
        let grid = default_alpha_grid();
        assert_eq!(grid, vec![1.0, 1e1, 1e2, 1e3, 1e4, 1e5]);
    }
}
