//! Deterministic case families for the axiom checks.
//!
//! Every family is built so the axiom's hypothesis holds by construction —
//! monotone aligned sums for NDP, coordinate-symmetric functions with
//! matching endpoint components for symmetry, derivative- or
//! secant-dominance pairs for the monotonicity axioms. Random functions are
//! never filtered against a hypothesis, because no finite sample can verify
//! one over a whole box.

use crate::axioms::{AffineMap, AxiomCase, EPSILON_SECANT, SECANT_GRID_POINTS};
use crate::error::{Error, Result};
use crate::func_model::{
    monomial as monomial_expr, rewrite_max_to_relu, Activation, AnalyticExpr, Domain, Layer,
    LayeredNet, MaxTree, Model, MultiIndex,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded, deterministic source of axiom test cases. Each case draws from
/// its own sub-seeded stream, so case k is identical no matter how many
/// cases are requested or in which order families are generated.
#[derive(Debug, Clone)]
pub struct CaseGenerator {
    pub seed: u64,
    pub dim: usize,
    pub domain: Domain,
    pub cases: usize,
}

impl CaseGenerator {
    pub fn new(seed: u64, dim: usize, domain: Domain, cases: usize) -> Result<Self> {
        if dim == 0 || dim != domain.dim() {
            return Err(Error::InvalidConfig(format!(
                "generator dimension {dim} does not match a {}-dimensional box",
                domain.dim()
            )));
        }
        Ok(CaseGenerator { seed, dim, domain, cases })
    }

    fn case_rng(&self, index: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(
            self.seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        )
    }

    /// Usable range of coordinate k: the box shrunk by a 5% margin per side,
    /// so generated points stay strictly interior.
    fn margin_range(&self, k: usize) -> (f64, f64) {
        let lo = self.domain.lower()[k];
        let hi = self.domain.upper()[k];
        let margin = 0.05 * (hi - lo);
        (lo + margin, hi - margin)
    }

    fn point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        (0..self.dim)
            .map(|k| {
                let (lo, hi) = self.margin_range(k);
                rng.gen_range(lo..hi)
            })
            .collect()
    }

    /// Endpoint pair with |x̄ₖ − x′ₖ| ≥ min_sep in every coordinate
    /// (min_sep = 0 puts no constraint).
    fn draw_pair(&self, rng: &mut ChaCha8Rng, min_sep: f64) -> (Vec<f64>, Vec<f64>) {
        let mut x_bar = Vec::with_capacity(self.dim);
        let mut x_prime = Vec::with_capacity(self.dim);
        for k in 0..self.dim {
            let (lo, hi) = self.margin_range(k);
            let p = rng.gen_range(lo..hi);
            let mut b = rng.gen_range(lo..hi);
            let mut tries = 0;
            while (b - p).abs() < min_sep && tries < 64 {
                b = rng.gen_range(lo..hi);
                tries += 1;
            }
            if (b - p).abs() < min_sep {
                b = if hi - p >= p - lo { p + min_sep } else { p - min_sep };
            }
            x_prime.push(p);
            x_bar.push(b);
        }
        (x_bar, x_prime)
    }

    fn distinct_pair_indices(&self, rng: &mut ChaCha8Rng) -> (usize, usize) {
        if self.dim == 2 {
            return (0, 1);
        }
        let i = rng.gen_range(0..self.dim);
        let mut j = rng.gen_range(0..self.dim - 1);
        if j >= i {
            j += 1;
        }
        (i, j)
    }

    fn require_dim(&self, min: usize, what: &str) -> Result<()> {
        if self.dim < min {
            return Err(Error::InvalidConfig(format!(
                "{what} needs at least {min} inputs, the generator has {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// Random polynomial of total degree ≤ 3, optionally never touching one
    /// coordinate.
    fn polynomial(&self, rng: &mut ChaCha8Rng, skip: Option<usize>) -> AnalyticExpr {
        let usable: Vec<usize> = (0..self.dim).filter(|k| Some(*k) != skip).collect();
        let terms = self.dim + rng.gen_range(2..=4);
        let mut parts = vec![AnalyticExpr::constant(rng.gen_range(-1.0..1.0))];
        for _ in 0..terms {
            let degree = rng.gen_range(1..=3_usize);
            let mut exps = vec![0_usize; self.dim];
            for _ in 0..degree {
                exps[usable[rng.gen_range(0..usable.len())]] += 1;
            }
            let mut factors = Vec::new();
            for (k, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(AnalyticExpr::var(k)),
                    _ => factors.push(AnalyticExpr::pow(AnalyticExpr::var(k), e as i32)),
                }
            }
            parts.push(AnalyticExpr::scale(rng.gen_range(-1.0..1.0), AnalyticExpr::mul(factors)));
        }
        AnalyticExpr::add(parts)
    }

    /// Random one-hidden-layer tanh network, optionally blind to one
    /// coordinate (its input column zeroed).
    fn tanh_net(&self, rng: &mut ChaCha8Rng, skip: Option<usize>) -> Result<LayeredNet> {
        let width = 3;
        let mut w1 = Vec::with_capacity(width);
        let mut b1 = Vec::with_capacity(width);
        for _ in 0..width {
            let row: Vec<f64> = (0..self.dim)
                .map(|k| if Some(k) == skip { 0.0 } else { rng.gen_range(-1.0..1.0) })
                .collect();
            w1.push(row);
            b1.push(rng.gen_range(-0.5..0.5));
        }
        let w2: Vec<f64> = (0..width).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b2 = rng.gen_range(-0.5..0.5);
        LayeredNet::new(
            self.domain.clone(),
            vec![
                Layer::Affine { weight: w1, bias: b1 },
                Layer::Elementwise { acts: vec![Activation::Tanh; width] },
                Layer::Affine { weight: vec![w2], bias: vec![b2] },
            ],
        )
    }

    /// Expression symmetric under swapping coordinates i and j, plus low-order
    /// terms in the remaining coordinates.
    fn symmetric_expr(&self, rng: &mut ChaCha8Rng, i: usize, j: usize) -> AnalyticExpr {
        let vi = AnalyticExpr::var(i);
        let vj = AnalyticExpr::var(j);
        let mut parts = vec![
            AnalyticExpr::scale(
                rng.gen_range(-1.0..1.0),
                AnalyticExpr::mul(vec![vi.clone(), vj.clone()]),
            ),
            AnalyticExpr::scale(
                rng.gen_range(-1.0..1.0),
                AnalyticExpr::add(vec![vi.clone(), vj.clone()]),
            ),
            AnalyticExpr::scale(
                rng.gen_range(-0.5..0.5),
                AnalyticExpr::add(vec![
                    AnalyticExpr::pow(vi.clone(), 2),
                    AnalyticExpr::pow(vj.clone(), 2),
                ]),
            ),
            AnalyticExpr::scale(
                rng.gen_range(-1.0..1.0),
                AnalyticExpr::sin(AnalyticExpr::add(vec![vi, vj])),
            ),
        ];
        for k in 0..self.dim {
            if k != i && k != j {
                parts.push(AnalyticExpr::scale(rng.gen_range(-1.0..1.0), AnalyticExpr::var(k)));
            }
        }
        AnalyticExpr::add(parts)
    }

    pub fn completeness_cases(&self) -> Result<Vec<AxiomCase>> {
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let (x_bar, mut x_prime) = self.draw_pair(&mut rng, 0.0);
            if index % 9 == 0 {
                // zero-gap endpoints: the residual must vanish outright
                x_prime = x_bar.clone();
            }
            let model = match index % 3 {
                0 => Model::expr(self.polynomial(&mut rng, None), self.domain.clone())?,
                1 => Model::net(self.tanh_net(&mut rng, None)?),
                _ => {
                    let m = self.random_multi_index(&mut rng, 4, false);
                    Model::monomial(m, x_prime.clone(), self.domain.clone())?
                }
            };
            out.push(AxiomCase::new(index, x_bar, x_prime, vec![model]));
        }
        Ok(out)
    }

    pub fn linearity_cases(&self) -> Result<Vec<AxiomCase>> {
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let (x_bar, x_prime) = self.draw_pair(&mut rng, 0.0);
            let f = self.polynomial(&mut rng, None);
            let g = self.polynomial(&mut rng, None);
            let alpha = rng.gen_range(-2.0..2.0);
            let beta = rng.gen_range(-2.0..2.0);
            let combined = AnalyticExpr::add(vec![
                AnalyticExpr::scale(alpha, f.clone()),
                AnalyticExpr::scale(beta, g.clone()),
            ]);
            let mut case = AxiomCase::new(
                index,
                x_bar,
                x_prime,
                vec![
                    Model::expr(f, self.domain.clone())?,
                    Model::expr(g, self.domain.clone())?,
                    Model::expr(combined, self.domain.clone())?,
                ],
            );
            case.coefficients = Some([alpha, beta]);
            out.push(case);
        }
        Ok(out)
    }

    pub fn dummy_cases(&self) -> Result<Vec<AxiomCase>> {
        self.require_dim(2, "the dummy check")?;
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let null = rng.gen_range(0..self.dim);
            let (x_bar, x_prime) = self.draw_pair(&mut rng, 0.0);
            let model = if index % 2 == 0 {
                Model::expr(self.polynomial(&mut rng, Some(null)), self.domain.clone())?
            } else {
                Model::net(self.tanh_net(&mut rng, Some(null))?)
            };
            let mut case = AxiomCase::new(index, x_bar, x_prime, vec![model]);
            case.null_index = Some(null);
            out.push(case);
        }
        Ok(out)
    }

    pub fn ndp_cases(&self) -> Result<Vec<AxiomCase>> {
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let (x_bar, x_prime) = if index % 13 == 0 {
                let p = self.point(&mut rng);
                (p.clone(), p)
            } else {
                self.draw_pair(&mut rng, 0.0)
            };
            // separable sum, each term non-decreasing from x′ₖ toward x̄ₖ
            let mut parts = Vec::with_capacity(self.dim);
            for k in 0..self.dim {
                let coeff = rng.gen_range(0.0..1.0);
                let arg = if x_bar[k] >= x_prime[k] {
                    AnalyticExpr::var(k)
                } else {
                    AnalyticExpr::scale(-1.0, AnalyticExpr::var(k))
                };
                let term = match rng.gen_range(0..4) {
                    0 => arg,
                    1 => AnalyticExpr::pow(arg, 3),
                    2 => AnalyticExpr::tanh(arg),
                    _ => AnalyticExpr::exp(AnalyticExpr::scale(0.5, arg)),
                };
                parts.push(AnalyticExpr::scale(coeff, term));
            }
            let model = Model::expr(AnalyticExpr::add(parts), self.domain.clone())?;
            out.push(AxiomCase::new(index, x_bar, x_prime, vec![model]));
        }
        Ok(out)
    }

    pub fn symmetry_cases(&self) -> Result<Vec<AxiomCase>> {
        self.require_dim(2, "the symmetry check")?;
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let (i, j) = self.distinct_pair_indices(&mut rng);
            // a visible per-coordinate move keeps the violation measurable and
            // keeps slow-starting paths (exponent Δ² near zero) integrable
            let (mut x_bar, mut x_prime) = self.draw_pair(&mut rng, 0.25);
            x_bar[j] = x_bar[i];
            x_prime[j] = x_prime[i];
            let model = Model::expr(self.symmetric_expr(&mut rng, i, j), self.domain.clone())?;
            let mut case = AxiomCase::new(index, x_bar, x_prime, vec![model]);
            case.pair = Some([i, j]);
            out.push(case);
        }
        Ok(out)
    }

    pub fn strong_symmetry_cases(&self) -> Result<Vec<AxiomCase>> {
        self.require_dim(2, "the strong-symmetry check")?;
        // the designated corner-path endpoint pairs, used when they fit
        let designated: [([f64; 2], [f64; 2]); 2] =
            [([2.0, 1.0], [1.0, 0.0]), ([1.0, 2.0], [0.0, 1.0])];
        let designated_fit = self.dim == 2
            && designated.iter().all(|(b, p)| {
                self.domain.contains(b).is_ok() && self.domain.contains(p).is_ok()
            });
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let (x_bar, x_prime) = if designated_fit && index < 2 {
                (designated[index].0.to_vec(), designated[index].1.to_vec())
            } else {
                self.draw_pair(&mut rng, 0.0)
            };
            let model = Model::expr(self.symmetric_expr(&mut rng, 0, 1), self.domain.clone())?;
            let mut case = AxiomCase::new(index, x_bar, x_prime, vec![model]);
            case.pair = Some([0, 1]);
            out.push(case);
        }
        Ok(out)
    }

    pub fn asi_cases(&self) -> Result<Vec<AxiomCase>> {
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            // |Δₖ| ≥ ½ keeps power-style paths integrable on both sides of
            // the transform, so failing methods fail rather than diverge
            let (x_bar, x_prime) = self.draw_pair(&mut rng, 0.5);
            let model = if index % 2 == 0 {
                Model::expr(self.polynomial(&mut rng, None), self.domain.clone())?
            } else {
                Model::net(self.tanh_net(&mut rng, None)?)
            };
            let transform = if index % 5 == 0 {
                AffineMap { scale: vec![1.0; self.dim], shift: vec![0.0; self.dim] }
            } else {
                let scale: Vec<f64> = (0..self.dim)
                    .map(|_| {
                        let c = rng.gen_range(1.0..2.0);
                        if rng.gen_bool(0.5) {
                            -c
                        } else {
                            c
                        }
                    })
                    .collect();
                let shift: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
                AffineMap { scale, shift }
            };
            let mut case = AxiomCase::new(index, x_bar, x_prime, vec![model]);
            case.transform = Some(transform);
            out.push(case);
        }
        Ok(out)
    }

    pub fn proportionality_cases(&self) -> Result<Vec<AxiomCase>> {
        self.require_dim(2, "the proportionality check")?;
        let zero = vec![0.0; self.dim];
        if self.domain.contains(&zero).is_err() {
            return Err(Error::InvalidConfig(
                "the proportionality axiom fixes x′ = 0, which lies outside the box".into(),
            ));
        }
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let x_bar: Vec<f64> = (0..self.dim)
                .map(|k| {
                    let (lo, hi) = self.margin_range(k);
                    let mut v = rng.gen_range(lo..hi);
                    let mut tries = 0;
                    while v.abs() < 0.2 && tries < 64 {
                        v = rng.gen_range(lo..hi);
                        tries += 1;
                    }
                    if v.abs() < 0.2 {
                        v = 0.2;
                    }
                    v
                })
                .collect();
            let s = AnalyticExpr::add((0..self.dim).map(AnalyticExpr::var).collect());
            let g = match index % 3 {
                0 => AnalyticExpr::pow(s, 2),
                1 => AnalyticExpr::pow(s, 3),
                _ => AnalyticExpr::exp(s),
            };
            let model = Model::expr(g, self.domain.clone())?;
            out.push(AxiomCase::new(index, x_bar, zero.clone(), vec![model]));
        }
        Ok(out)
    }

    pub fn symmetric_monotonicity_cases(&self) -> Result<Vec<AxiomCase>> {
        self.require_dim(2, "the symmetric-monotonicity check")?;
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let case = match index % 3 {
                0 => self.separable_dominance_case(index, &mut rng)?,
                1 => self.monomial_dominance_case(index, &mut rng)?,
                _ => self.monotonicity_null_case(index, &mut rng)?,
            };
            out.push(case);
        }
        Ok(out)
    }

    /// F = c·xᵢ + δ·sin xᵢ + r, G = (c+ε)·xⱼ + δ·sin xⱼ + r with ε > 2δ:
    /// sup ∂ᵢF = c + δ < c + ε − δ = inf ∂ⱼG on any box.
    fn separable_dominance_case(&self, index: usize, rng: &mut ChaCha8Rng) -> Result<AxiomCase> {
        let (i, j) = self.distinct_pair_indices(rng);
        let (x_bar, x_prime) = self.draw_pair(rng, 0.3);
        let c = rng.gen_range(0.5..1.5);
        let delta = rng.gen_range(0.1..0.3);
        let eps = 2.0 * delta + 0.05;
        let mut shared = vec![AnalyticExpr::constant(rng.gen_range(-1.0..1.0))];
        for k in 0..self.dim {
            if k != i && k != j {
                shared.push(AnalyticExpr::scale(rng.gen_range(-1.0..1.0), AnalyticExpr::var(k)));
            }
        }
        let f = AnalyticExpr::add(
            vec![
                AnalyticExpr::scale(c, AnalyticExpr::var(i)),
                AnalyticExpr::scale(delta, AnalyticExpr::sin(AnalyticExpr::var(i))),
            ]
            .into_iter()
            .chain(shared.iter().cloned())
            .collect(),
        );
        let g = AnalyticExpr::add(
            vec![
                AnalyticExpr::scale(c + eps, AnalyticExpr::var(j)),
                AnalyticExpr::scale(delta, AnalyticExpr::sin(AnalyticExpr::var(j))),
            ]
            .into_iter()
            .chain(shared.into_iter())
            .collect(),
        );
        let mut case = AxiomCase::new(
            index,
            x_bar,
            x_prime,
            vec![Model::expr(f, self.domain.clone())?, Model::expr(g, self.domain.clone())?],
        );
        case.pair = Some([i, j]);
        Ok(case)
    }

    /// The monomial equality device: F = 1.5·[x−x′]^(2 at a, 2 at b) with
    /// i = b, G = [x−x′]^(3 at a, 1 at b) with j = a. Then ∂F/∂xᵢ ≡ ∂G/∂xⱼ,
    /// so the axiom forces equal per-unit attributions — straight-path
    /// attribution delivers them exactly, while an equal-split method
    /// overpays the i side by 0.25·Δₐ²·Δᵦ.
    fn monomial_dominance_case(&self, index: usize, rng: &mut ChaCha8Rng) -> Result<AxiomCase> {
        let (a, b) = self.distinct_pair_indices(rng);
        let mut x_prime = self.point(rng);
        let mut x_bar = x_prime.clone();
        for &k in &[a, b] {
            let (lo, hi) = self.margin_range(k);
            let room = 0.45 * (hi - lo);
            let max_step = room.min(1.2);
            if max_step <= 0.3 {
                return Err(Error::InvalidConfig(
                    "the box is too small for the monomial dominance family".into(),
                ));
            }
            let step = rng.gen_range(0.3..max_step);
            // keep x′ low enough that x′ + step stays inside the margin
            if x_prime[k] + step > hi {
                x_prime[k] = hi - step - 0.25 * (hi - lo) * rng.gen::<f64>();
            }
            x_bar[k] = x_prime[k] + step;
        }
        let mut mp = vec![0_usize; self.dim];
        mp[a] = 2;
        mp[b] = 2;
        let mut mq = vec![0_usize; self.dim];
        mq[a] = 3;
        mq[b] = 1;
        let p_expr =
            AnalyticExpr::scale(1.5, monomial_expr(&MultiIndex::new(mp), &x_prime)?);
        let q = Model::monomial(MultiIndex::new(mq), x_prime.clone(), self.domain.clone())?;
        let mut case = AxiomCase::new(
            index,
            x_bar,
            x_prime,
            vec![Model::expr(p_expr, self.domain.clone())?, q],
        );
        case.pair = Some([b, a]);
        Ok(case)
    }

    fn monotonicity_null_case(&self, index: usize, rng: &mut ChaCha8Rng) -> Result<AxiomCase> {
        let (i, j) = self.distinct_pair_indices(rng);
        let (mut x_bar, x_prime) = self.draw_pair(rng, 0.0);
        x_bar[i] = x_prime[i];
        let c = rng.gen_range(0.5..1.5);
        let delta = rng.gen_range(0.1..0.3);
        let f = AnalyticExpr::add(vec![
            AnalyticExpr::scale(c, AnalyticExpr::var(i)),
            AnalyticExpr::scale(delta, AnalyticExpr::sin(AnalyticExpr::var(i))),
            AnalyticExpr::scale(rng.gen_range(-1.0..1.0), AnalyticExpr::var(j)),
        ]);
        let mut case =
            AxiomCase::new(index, x_bar, x_prime, vec![Model::expr(f, self.domain.clone())?]);
        case.null_index = Some(i);
        Ok(case)
    }

    pub fn c0_symmetric_monotonicity_cases(&self) -> Result<Vec<AxiomCase>> {
        self.require_dim(2, "the C⁰ symmetric-monotonicity check")?;
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let case = if index % 3 == 2 {
                self.relu_null_case(index, &mut rng)?
            } else {
                self.relu_dominance_case(index, &mut rng)?
            };
            out.push(case);
        }
        Ok(out)
    }

    /// ReLU pair with ordered slopes: F bends coordinate i with slope in
    /// [c, c+δ], G bends coordinate j with slope in [c+ε, c+ε+δ], ε = 2δ.
    /// Secant dominance is verified on a sampled (x, z) grid before the case
    /// is accepted.
    fn relu_dominance_case(&self, index: usize, rng: &mut ChaCha8Rng) -> Result<AxiomCase> {
        let (i, j) = self.distinct_pair_indices(rng);
        let (x_bar, x_prime) = self.draw_pair(rng, 0.3);
        let c = rng.gen_range(0.5..1.5);
        let delta = rng.gen_range(0.1..0.3);
        let eps = 2.0 * delta;
        let linear: Vec<f64> = (0..self.dim)
            .map(|k| if k == i || k == j { 0.0 } else { rng.gen_range(-0.5..0.5) })
            .collect();
        let kink_at = |rng: &mut ChaCha8Rng, k: usize| {
            let (lo, hi) = self.margin_range(k);
            rng.gen_range(lo + 0.1 * (hi - lo)..hi - 0.1 * (hi - lo))
        };
        let ki = kink_at(rng, i);
        let kj = kink_at(rng, j);
        let bias = rng.gen_range(-0.5..0.5);
        let f = self.bent_slope_net(i, ki, c, delta, &linear, bias)?;
        let g = self.bent_slope_net(j, kj, c + eps, delta, &linear, bias)?;
        self.verify_secant_dominance(&f, &g, i, j, rng)?;
        let mut case = AxiomCase::new(
            index,
            x_bar,
            x_prime,
            vec![Model::net(f), Model::net(g)],
        );
        case.pair = Some([i, j]);
        Ok(case)
    }

    fn relu_null_case(&self, index: usize, rng: &mut ChaCha8Rng) -> Result<AxiomCase> {
        let (i, j) = self.distinct_pair_indices(rng);
        let (mut x_bar, x_prime) = self.draw_pair(rng, 0.0);
        x_bar[i] = x_prime[i];
        let linear: Vec<f64> = (0..self.dim)
            .map(|k| if k == i { 0.0 } else { rng.gen_range(-0.5..0.5) })
            .collect();
        let (lo, hi) = self.margin_range(i);
        let kink = rng.gen_range(lo..hi);
        let net = self.bent_slope_net(i, kink, rng.gen_range(0.5..1.5), 0.2, &linear, 0.0)?;
        let _ = j;
        let mut case = AxiomCase::new(index, x_bar, x_prime, vec![Model::net(net)]);
        case.null_index = Some(i);
        Ok(case)
    }

    /// F(x) = bend·relu(x_t − kink) + slope·x_t + Σₖ linearₖ·xₖ + bias,
    /// assembled as a width-2 hidden layer (one ReLU unit, one identity
    /// carry).
    fn bent_slope_net(
        &self,
        target: usize,
        kink: f64,
        slope: f64,
        bend: f64,
        linear: &[f64],
        bias: f64,
    ) -> Result<LayeredNet> {
        let mut w_relu = vec![0.0; self.dim];
        w_relu[target] = 1.0;
        let mut w_lin = linear.to_vec();
        w_lin[target] += slope;
        LayeredNet::new(
            self.domain.clone(),
            vec![
                Layer::Affine { weight: vec![w_relu, w_lin], bias: vec![-kink, 0.0] },
                Layer::Elementwise { acts: vec![Activation::Relu, Activation::Identity] },
                Layer::Affine { weight: vec![vec![bend, 1.0]], bias: vec![bias] },
            ],
        )
    }

    /// Sampled verification that secᵢF(x, z) ≤ secⱼG(x, z) for |z| ≤ ε_sec.
    fn verify_secant_dominance(
        &self,
        f: &LayeredNet,
        g: &LayeredNet,
        i: usize,
        j: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<()> {
        for _ in 0..5 {
            let x = self.point(rng);
            for step in 0..SECANT_GRID_POINTS {
                let z = -EPSILON_SECANT
                    + 2.0 * EPSILON_SECANT * step as f64 / (SECANT_GRID_POINTS - 1) as f64;
                if z == 0.0 {
                    continue;
                }
                let mut xi = x.clone();
                xi[i] += z;
                let mut xj = x.clone();
                xj[j] += z;
                let sec_f = (f.eval(&xi)? - f.eval(&x)?) / z;
                let sec_g = (g.eval(&xj)? - g.eval(&x)?) / z;
                if sec_f > sec_g + 1e-9 {
                    return Err(Error::InvalidConfig(format!(
                        "generated pair violates secant dominance: {sec_f} > {sec_g}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn implementation_invariance_cases(&self) -> Result<Vec<AxiomCase>> {
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let (x_bar, x_prime) = self.draw_pair(&mut rng, 0.0);
            let models = if index % 2 == 0 {
                let tree = self.random_max_tree(&mut rng);
                let net = rewrite_max_to_relu(&tree, self.domain.clone())?;
                vec![Model::max_tree(tree, self.domain.clone())?, Model::net(net)]
            } else {
                let net = self.tanh_net(&mut rng, None)?;
                let flattened = net.to_expr()?;
                vec![Model::net(net), Model::expr(flattened, self.domain.clone())?]
            };
            out.push(AxiomCase::new(index, x_bar, x_prime, models));
        }
        Ok(out)
    }

    fn random_max_tree(&self, rng: &mut ChaCha8Rng) -> MaxTree {
        let affine = |rng: &mut ChaCha8Rng| {
            let terms: Vec<(f64, MaxTree)> = (0..self.dim)
                .map(|k| (rng.gen_range(-1.0..1.0), MaxTree::var(k)))
                .collect();
            MaxTree::affine(terms, rng.gen_range(-1.0..1.0))
        };
        let base = MaxTree::max(affine(rng), affine(rng));
        if rng.gen_bool(0.3) {
            MaxTree::max(base, affine(rng))
        } else {
            base
        }
    }

    pub fn monomial_distribution_cases(&self) -> Result<Vec<AxiomCase>> {
        let mut out = Vec::with_capacity(self.cases);
        for index in 0..self.cases {
            let mut rng = self.case_rng(index);
            let m = if index % 11 == 0 {
                MultiIndex::new(vec![0; self.dim])
            } else {
                self.random_multi_index(&mut rng, 8, true)
            };
            let x_prime = self.point(&mut rng);
            let x_bar: Vec<f64> = (0..self.dim)
                .map(|k| {
                    let (lo, hi) = self.margin_range(k);
                    let mut v = rng.gen_range(lo..hi);
                    let mut tries = 0;
                    while !(0.3..=1.5).contains(&(v - x_prime[k]).abs()) && tries < 64 {
                        v = rng.gen_range(lo..hi);
                        tries += 1;
                    }
                    if !(0.3..=1.5).contains(&(v - x_prime[k]).abs()) {
                        v = if hi - x_prime[k] >= 0.5 { x_prime[k] + 0.5 } else { x_prime[k] - 0.5 }
                    }
                    v
                })
                .collect();
            let model =
                Model::monomial(m.clone(), x_prime.clone(), self.domain.clone())?;
            let mut case = AxiomCase::new(index, x_bar, x_prime, vec![model]);
            case.exponents = Some(m);
            out.push(case);
        }
        Ok(out)
    }

    fn random_multi_index(
        &self,
        rng: &mut ChaCha8Rng,
        cap: usize,
        full_range: bool,
    ) -> MultiIndex {
        let degree = if full_range {
            rng.gen_range(1..=cap)
        } else {
            rng.gen_range(1..=cap.min(4))
        };
        let mut exps = vec![0_usize; self.dim];
        for _ in 0..degree {
            exps[rng.gen_range(0..self.dim)] += 1;
        }
        MultiIndex::new(exps)
    }
}
