//! Machine-checkable attribution axioms.
//!
//! Each check runs an attribution method over a deterministic family of
//! generated cases on which the axiom's hypothesis holds **by construction**
//! (monotone sums for NDP, symmetric functions with matching endpoints for
//! symmetry, derivative-dominance pairs for the monotonicity axioms, …) and
//! reports the worst observed violation together with a replayable witness.
//! Sampling can refute an axiom, never prove it; a `pass` verdict means "no
//! violation above tolerance across this seeded family".
//!
//! Cases on which the method reports an undefined attribution
//! ([`crate::error::Error::NondifferentiablePath`]) count as inapplicable
//! rather than failing: the axioms quantify only over triples where the
//! method is defined.

use crate::attribution::{path_attribution, AttributionMethod, Attribution, QuadratureConfig};
use crate::error::Result;
use crate::func_model::{Model, MultiIndex, ScalarFunction};
use crate::paths::PathSpec;
use serde::{Deserialize, Serialize};

pub mod checks;
pub mod generators;

pub use checks::{
    check, check_all, check_asi, check_c0_symmetric_monotonicity, check_completeness,
    check_dummy, check_implementation_invariance, check_linearity,
    check_monomial_distribution, check_ndp, check_proportionality,
    check_strong_symmetry, check_symmetric_monotonicity, check_symmetry_preserving,
    violation,
};
pub use generators::CaseGenerator;

/// Half-width of the secant probe interval for the C⁰ monotonicity axiom:
/// secant slopes (F(x+z·eᵢ) − F(x))/z are checked for |z| ≤ this.
pub const EPSILON_SECANT: f64 = 1e-3;

/// Number of grid points for the secant probe (the center z = 0 is skipped).
pub const SECANT_GRID_POINTS: usize = 21;

/// Default number of generated cases per axiom check.
pub const DEFAULT_CASES: usize = 200;

/// Default absolute tolerance for axiom violations.
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// Identifier of one checkable axiom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AxiomId {
    Completeness,
    Linearity,
    Dummy,
    Ndp,
    SymmetryPreserving,
    StrongSymmetry,
    Asi,
    Proportionality,
    SymmetricMonotonicity,
    C0SymmetricMonotonicity,
    ImplementationInvariance,
    MonomialDistribution,
}

impl AxiomId {
    /// Every checkable axiom, in canonical reporting order.
    pub const ALL: [AxiomId; 12] = [
        AxiomId::Completeness,
        AxiomId::Linearity,
        AxiomId::Dummy,
        AxiomId::Ndp,
        AxiomId::SymmetryPreserving,
        AxiomId::StrongSymmetry,
        AxiomId::Asi,
        AxiomId::Proportionality,
        AxiomId::SymmetricMonotonicity,
        AxiomId::C0SymmetricMonotonicity,
        AxiomId::ImplementationInvariance,
        AxiomId::MonomialDistribution,
    ];

    /// Stable kebab-case name, matching the serialized form.
    pub fn name(&self) -> &'static str {
        match self {
            AxiomId::Completeness => "completeness",
            AxiomId::Linearity => "linearity",
            AxiomId::Dummy => "dummy",
            AxiomId::Ndp => "ndp",
            AxiomId::SymmetryPreserving => "symmetry-preserving",
            AxiomId::StrongSymmetry => "strong-symmetry",
            AxiomId::Asi => "asi",
            AxiomId::Proportionality => "proportionality",
            AxiomId::SymmetricMonotonicity => "symmetric-monotonicity",
            AxiomId::C0SymmetricMonotonicity => "c0-symmetric-monotonicity",
            AxiomId::ImplementationInvariance => "implementation-invariance",
            AxiomId::MonomialDistribution => "monomial-distribution",
        }
    }
}

impl std::fmt::Display for AxiomId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AxiomId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        AxiomId::ALL
            .iter()
            .find(|a| a.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown axiom '{s}'"))
    }
}

/// Outcome of one axiom check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail,
    Inapplicable,
}

/// A per-coordinate affine reparametrization T(x) = scale ⊙ x + shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub scale: Vec<f64>,
    pub shift: Vec<f64>,
}

impl AffineMap {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.scale).zip(&self.shift).map(|((&v, &c), &d)| c * v + d).collect()
    }
}

/// One generated test case: everything needed to recompute its violation
/// standalone. A failing report carries its worst case as the witness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomCase {
    /// Position in the generated sequence (also the sub-seed index).
    pub index: usize,
    pub x_bar: Vec<f64>,
    pub x_prime: Vec<f64>,
    /// The model(s) the axiom relates: one for most axioms, (F, G) for the
    /// monotonicity pairs, (F, G, αF+βG) for linearity, two implementations
    /// for implementation invariance.
    pub models: Vec<Model>,
    /// Linearity coefficients (α, β).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<[f64; 2]>,
    /// Coordinate pair (i, j) for the symmetry and monotonicity axioms.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pair: Option<[usize; 2]>,
    /// Reparametrization for the affine-scale-invariance axiom.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transform: Option<AffineMap>,
    /// Monomial exponents for the distribution axiom.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponents: Option<MultiIndex>,
    /// Coordinate pinned to x̄ᵢ = x′ᵢ whose attribution must vanish.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub null_index: Option<usize>,
}

impl AxiomCase {
    /// A bare case: endpoints, models, nothing optional.
    pub fn new(index: usize, x_bar: Vec<f64>, x_prime: Vec<f64>, models: Vec<Model>) -> Self {
        AxiomCase {
            index,
            x_bar,
            x_prime,
            models,
            coefficients: None,
            pair: None,
            transform: None,
            exponents: None,
            null_index: None,
        }
    }
}

/// Verdict and evidence for one (method, axiom) combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: AxiomId,
    pub verdict: Verdict,
    /// Largest violation over the applicable cases (0 when none were
    /// applicable). Units are those of the axiom's defect — attribution
    /// differences, residuals, or per-unit gaps.
    pub worst: f64,
    /// The case achieving `worst`; absent only when no case was applicable.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<AxiomCase>,
    /// Number of applicable cases actually measured.
    pub cases: usize,
    pub seed: u64,
}

/// Render a batch of reports as CSV, one row per (method, axiom).
pub fn reports_to_csv(method: &str, reports: &[AxiomReport]) -> String {
    let mut out = String::from("method,axiom,verdict,worst,cases,seed\n");
    for r in reports {
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inapplicable => "inapplicable",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            method, r.axiom, verdict, r.worst, r.cases, r.seed
        ));
    }
    out
}

/// The two-endpoint L-path dispatcher: straight-line attribution everywhere
/// except on one designated endpoint pair, where it takes the axis-aligned
/// corner path through (2, 0), and on that pair's coordinate swap, where it
/// takes the mirrored corner path through (0, 2). Swapping endpoints maps
/// one L onto the other, so for functions symmetric in the two inputs the
/// attributions swap exactly — the method satisfies strong symmetry while
/// disagreeing with straight-path attribution on the designated pairs.
#[derive(Debug, Clone, Default)]
pub struct PairedLshapeMethod {
    pub quad: QuadratureConfig,
}

impl PairedLshapeMethod {
    const X_BAR: [f64; 2] = [2.0, 1.0];
    const X_PRIME: [f64; 2] = [1.0, 0.0];
    const X_BAR_SWAPPED: [f64; 2] = [1.0, 2.0];
    const X_PRIME_SWAPPED: [f64; 2] = [0.0, 1.0];
}

impl AttributionMethod for PairedLshapeMethod {
    fn name(&self) -> String {
        "paired-lshape".into()
    }

    fn attribute(
        &self,
        f: &dyn ScalarFunction,
        x_bar: &[f64],
        x_prime: &[f64],
    ) -> Result<Attribution> {
        let path = if x_bar == Self::X_BAR && x_prime == Self::X_PRIME {
            PathSpec::lshape_xy()
        } else if x_bar == Self::X_BAR_SWAPPED && x_prime == Self::X_PRIME_SWAPPED {
            PathSpec::lshape_yx()
        } else {
            PathSpec::straight()
        };
        let bound = path.bind(x_bar, x_prime)?;
        let mut attribution = path_attribution(f, &bound, &self.quad)?;
        attribution.method = self.name();
        Ok(attribution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::ig;
    use crate::func_model::{AnalyticExpr, Domain};
    use std::str::FromStr;

    #[test]
    fn axiom_ids_serialize_kebab_case_and_parse_back() {
        for id in AxiomId::ALL {
            let json = serde_json::to_string(&id).unwrap();
            assert_eq!(json, format!("\"{}\"", id.name()));
            let back: AxiomId = serde_json::from_str(&json).unwrap();
            assert_eq!(back, id);
            assert_eq!(AxiomId::from_str(id.name()).unwrap(), id);
        }
        assert!(AxiomId::from_str("symmetry").is_err(), "no fuzzy matching");
    }

    #[test]
    fn report_json_uses_the_documented_field_names() {
        let report = AxiomReport {
            axiom: AxiomId::Completeness,
            verdict: Verdict::Pass,
            worst: 1e-12,
            witness: Some(AxiomCase::new(0, vec![1.0], vec![0.0], vec![])),
            cases: 1,
            seed: 42,
        };
        let json = serde_json::to_string(&report).unwrap();
        for key in ["\"axiom\"", "\"verdict\"", "\"worst\"", "\"witness\"", "\"cases\"", "\"seed\""]
        {
            assert!(json.contains(key), "missing {key} in {json}");
        }
        assert!(json.contains("\"completeness\""));
        assert!(json.contains("\"pass\""));
        let back: AxiomReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    fn symmetric_product_plus_sine() -> Model {
        // F(x, y) = x·y + sin(x + y), symmetric in its two inputs
        Model::expr(
            AnalyticExpr::add(vec![
                AnalyticExpr::mul(vec![AnalyticExpr::var(0), AnalyticExpr::var(1)]),
                AnalyticExpr::sin(AnalyticExpr::add(vec![
                    AnalyticExpr::var(0),
                    AnalyticExpr::var(1),
                ])),
            ]),
            Domain::centered(2, 4.0),
        )
        .unwrap()
    }

    #[test]
    fn paired_lshape_attributes_the_first_leg_gap_on_the_designated_pair() {
        let f = symmetric_product_plus_sine();
        let method = PairedLshapeMethod::default();
        let a = method.attribute(&f, &[2.0, 1.0], &[1.0, 0.0]).unwrap();
        // first leg runs (1,0) → (2,0), so A₁ = F(2,0) − F(1,0) = sin 2 − sin 1
        let first_leg_gap = 0.067826442017785189;
        assert!(
            (a.values[0] - first_leg_gap).abs() < 1e-10,
            "A₁ = {} but F(2,0) − F(1,0) = {first_leg_gap}",
            a.values[0]
        );

        // …and the swapped pair mirrors it into the second coordinate
        let swapped = method.attribute(&f, &[1.0, 2.0], &[0.0, 1.0]).unwrap();
        assert!(
            (swapped.values[1] - first_leg_gap).abs() < 1e-10,
            "A₂* = {} should equal A₁ = {first_leg_gap}",
            swapped.values[1]
        );
    }

    #[test]
    fn paired_lshape_is_straight_path_attribution_elsewhere() {
        let f = symmetric_product_plus_sine();
        let method = PairedLshapeMethod::default();
        let a = method.attribute(&f, &[1.5, 0.5], &[0.0, 0.0]).unwrap();
        let reference = ig(&f, &[1.5, 0.5], &[0.0, 0.0], &QuadratureConfig::default()).unwrap();
        for i in 0..2 {
            assert!(
                (a.values[i] - reference.values[i]).abs() < 1e-12,
                "off the designated pairs the dispatcher must act as ig"
            );
        }
    }

    #[test]
    fn affine_map_applies_componentwise() {
        let t = AffineMap { scale: vec![2.0, -1.0], shift: vec![0.5, 1.0] };
        assert_eq!(t.apply(&[1.0, 3.0]), vec![2.5, -2.0]);
    }

    #[test]
    fn csv_batch_has_one_row_per_report() {
        let reports = vec![
            AxiomReport {
                axiom: AxiomId::Dummy,
                verdict: Verdict::Pass,
                worst: 0.0,
                witness: None,
                cases: 5,
                seed: 7,
            },
            AxiomReport {
                axiom: AxiomId::MonomialDistribution,
                verdict: Verdict::Fail,
                worst: 0.25,
                witness: None,
                cases: 5,
                seed: 7,
            },
        ];
        let csv = reports_to_csv("shapley", &reports);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "method,axiom,verdict,worst,cases,seed");
        assert_eq!(lines[1], "shapley,dummy,pass,0,5,7");
        assert_eq!(lines[2], "shapley,monomial-distribution,fail,0.25,5,7");
    }
}
