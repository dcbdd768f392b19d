//! Shared fixtures for the benchmark targets: a polynomial-scale monomial, a
//! small tanh network, and endpoints inside both domains.

use axiograd::{Activation, Domain, Layer, LayeredNet, Model, MultiIndex};

pub fn monomial_3_2() -> Model {
    Model::monomial(MultiIndex::new(vec![3, 2]), vec![0.0, 0.0], Domain::centered(2, 4.0))
        .expect("fixture monomial is valid")
}

pub fn tanh_net(width: usize, dim: usize) -> Model {
    let mut w1 = Vec::with_capacity(width);
    for r in 0..width {
        w1.push((0..dim).map(|c| 0.3 + 0.1 * (r as f64) - 0.05 * (c as f64)).collect());
    }
    let b1 = (0..width).map(|r| 0.01 * r as f64).collect();
    let w2 = vec![(0..width).map(|r| if r % 2 == 0 { 0.8 } else { -0.6 }).collect()];
    let net = LayeredNet::new(
        Domain::centered(dim, 4.0),
        vec![
            Layer::Affine { weight: w1, bias: b1 },
            Layer::Elementwise { acts: vec![Activation::Tanh; width] },
            Layer::Affine { weight: w2, bias: vec![0.05] },
        ],
    )
    .expect("fixture net is valid");
    Model::net(net)
}
