//! Randomized invariants that must hold for every draw, not just the worked
//! examples: endpoint exactness, reparametrization invariance, linearity in
//! the function argument, ensemble transparency, rewrite fidelity, and
//! smoothing monotonicity.

use axiograd::{
    ig, path_attribution, rewrite_max_to_relu, AnalyticExpr, Domain, MaxTree, Model, PathSpec,
    QuadratureConfig, ScalarFunction,
};
use proptest::prelude::*;

fn endpoint() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-4.0_f64..4.0, 2)
}

/// Random polynomial c₀ + c₁x₀ + c₂x₁ + c₃x₀x₁ + c₄x₀² + c₅x₁³ over a box
/// wide enough for every endpoint strategy.
fn poly_model(c: &[f64; 6]) -> Model {
    let v0 = AnalyticExpr::var(0);
    let v1 = AnalyticExpr::var(1);
    Model::expr(
        AnalyticExpr::add(vec![
            AnalyticExpr::constant(c[0]),
            AnalyticExpr::scale(c[1], v0.clone()),
            AnalyticExpr::scale(c[2], v1.clone()),
            AnalyticExpr::scale(c[3], AnalyticExpr::mul(vec![v0.clone(), v1.clone()])),
            AnalyticExpr::scale(c[4], AnalyticExpr::pow(v0, 2)),
            AnalyticExpr::scale(c[5], AnalyticExpr::pow(v1, 3)),
        ]),
        Domain::centered(2, 6.0),
    )
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = [f64; 6]> {
    [
        -1.0_f64..1.0,
        -1.0_f64..1.0,
        -1.0_f64..1.0,
        -1.0_f64..1.0,
        -1.0_f64..1.0,
        -1.0_f64..1.0,
    ]
}

proptest! {
    #[test]
    fn bound_paths_hit_their_endpoints_bit_exactly(
        x_bar in endpoint(),
        x_prime in endpoint(),
        waypoint in endpoint(),
    ) {
        let specs = vec![
            PathSpec::straight(),
            PathSpec::power(),
            PathSpec::lshape_xy(),
            PathSpec::lshape_yx(),
            PathSpec::piecewise_linear(vec![x_prime.clone(), waypoint, x_bar.clone()]),
        ];
        for spec in specs {
            let bound = spec.bind(&x_bar, &x_prime).unwrap();
            prop_assert_eq!(bound.eval(0.0).unwrap(), x_prime.clone());
            prop_assert_eq!(bound.eval(1.0).unwrap(), x_bar.clone());
        }
    }

    #[test]
    fn warping_the_clock_does_not_move_the_attribution(
        c in coeffs(),
        x_bar in endpoint(),
        x_prime in endpoint(),
        exponent in 1.5_f64..4.0,
    ) {
        let f = poly_model(&c);
        let q = QuadratureConfig::default();
        let straight = path_attribution(
            &f,
            &PathSpec::straight().bind(&x_bar, &x_prime).unwrap(),
            &q,
        )
        .unwrap();
        let warped = path_attribution(
            &f,
            &PathSpec::warp(exponent, PathSpec::straight())
                .bind(&x_bar, &x_prime)
                .unwrap(),
            &q,
        )
        .unwrap();
        for (a, b) in warped.values.iter().zip(&straight.values) {
            prop_assert!(
                (a - b).abs() <= 1e-8,
                "same curve, different clock: {} vs {}",
                a,
                b
            );
        }
    }

    #[test]
    fn attribution_is_linear_in_the_function(
        cf in coeffs(),
        cg in coeffs(),
        alpha in -2.0_f64..2.0,
        beta in -2.0_f64..2.0,
        x_bar in endpoint(),
        x_prime in endpoint(),
    ) {
        let q = QuadratureConfig::default();
        let f = poly_model(&cf);
        let g = poly_model(&cg);
        let mut mixed = [0.0_f64; 6];
        for k in 0..6 {
            mixed[k] = alpha * cf[k] + beta * cg[k];
        }
        let h = poly_model(&mixed);
        let af = ig(&f, &x_bar, &x_prime, &q).unwrap();
        let ag = ig(&g, &x_bar, &x_prime, &q).unwrap();
        let ah = ig(&h, &x_bar, &x_prime, &q).unwrap();
        for k in 0..2 {
            let combined = alpha * af.values[k] + beta * ag.values[k];
            prop_assert!(
                (ah.values[k] - combined).abs() <= 1e-9,
                "coordinate {}: {} vs {}",
                k,
                ah.values[k],
                combined
            );
        }
    }

    #[test]
    fn a_weight_one_ensemble_is_bit_identical_to_its_member(
        c in coeffs(),
        x_bar in endpoint(),
        x_prime in endpoint(),
    ) {
        let f = poly_model(&c);
        let q = QuadratureConfig::default();
        let direct = path_attribution(
            &f,
            &PathSpec::straight().bind(&x_bar, &x_prime).unwrap(),
            &q,
        )
        .unwrap();
        let wrapped = path_attribution(
            &f,
            &PathSpec::ensemble(vec![(1.0, PathSpec::straight())])
                .bind(&x_bar, &x_prime)
                .unwrap(),
            &q,
        )
        .unwrap();
        for (a, b) in wrapped.values.iter().zip(&direct.values) {
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn the_relu_rewrite_rounds_no_worse_than_its_operands(
        w in prop::collection::vec(-2.0_f64..2.0, 6),
        x in prop::collection::vec(-3.0_f64..3.0, 2),
    ) {
        let branch = |a: f64, b: f64, o: f64| {
            MaxTree::affine(vec![(a, MaxTree::var(0)), (b, MaxTree::var(1))], o)
        };
        let u = w[0] * x[0] + w[1] * x[1] + w[2];
        let v = w[3] * x[0] + w[4] * x[1] + w[5];
        let tree = MaxTree::max(
            branch(w[0], w[1], w[2]),
            branch(w[3], w[4], w[5]),
        );
        let domain = Domain::centered(2, 4.0);
        let net = rewrite_max_to_relu(&tree, domain.clone()).unwrap();
        let direct = Model::max_tree(tree, domain).unwrap().eval(&x).unwrap();
        let rewritten = net.eval(&x).unwrap();
        // max(u, v) becomes v + relu(u − v): the re-association rounds at the
        // scale of the branch values, not of the (possibly tiny) result.
        let scale = 1.0_f64.max(u.abs()).max(v.abs());
        prop_assert!(
            (direct - rewritten).abs() <= 8.0 * f64::EPSILON * scale,
            "rewrite drifted: {} vs {} (branches {}, {})",
            direct,
            rewritten,
            u,
            v
        );
    }

    #[test]
    fn sharper_softplus_hugs_relu_tighter(
        z in -10.0_f64..10.0,
        alpha in 0.5_f64..50.0,
    ) {
        let gap = |a: f64| (axiograd::numeric::softplus(a, z) - z.max(0.0)).abs();
        prop_assert!(gap(2.0 * alpha) <= gap(alpha) + 1e-15);
    }
}
