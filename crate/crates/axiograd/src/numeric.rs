//! Small numerically careful scalar kernels shared by expressions and nets.

/// Logistic sigmoid, stable for large |z|.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Softplus with sharpness `alpha`:
///
///   s_α(z) = ln(1 + exp(αz)) / α
///
/// computed as max(z, 0) + log1p(exp(−α|z|))/α so that neither branch
/// overflows. The sup gap to ReLU is ln 2 / α, attained at z = 0.
pub fn softplus(alpha: f64, z: f64) -> f64 {
    z.max(0.0) + (-alpha * z.abs()).exp().ln_1p() / alpha
}

/// Compensated (Kahan) accumulator: summing many quadrature-node or
/// permutation-marginal contributions loses up to √count · ulp digits with
/// naive addition; compensation keeps the error at a few ulps regardless of
/// count.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: f64) {
        let y = v - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

/// Units in the last place between two finite floats; `usize::MAX` when
/// either is non-finite. Equal values (including ±0) give zero.
pub fn ulp_distance(a: f64, b: f64) -> usize {
    if !a.is_finite() || !b.is_finite() {
        return usize::MAX;
    }
    if a == b {
        return 0;
    }
    // Map to a monotone integer line: negative floats are reflected so that
    // consecutive representable values differ by one.
    fn key(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 { i64::MIN.wrapping_sub(bits) } else { bits }
    }
    key(a).abs_diff(key(b)).try_into().unwrap_or(usize::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_midpoint_and_slope() {
        assert_eq!(sigmoid(0.0), 0.5);
        // σ'(0) = σ(0)(1−σ(0)) = 0.25
        let s = sigmoid(0.0);
        assert_eq!(s * (1.0 - s), 0.25);
        assert!(sigmoid(40.0) > 1.0 - 1e-16);
        assert!(sigmoid(-40.0) < 1e-16);
    }

    #[test]
    fn softplus_gap_at_zero_is_ln2_over_alpha() {
        let gap = softplus(10.0, 0.0);
        assert!((gap - std::f64::consts::LN_2 / 10.0).abs() < 1e-16);
    }

    #[test]
    fn softplus_stable_for_large_arguments() {
        assert_eq!(softplus(1.0, 1e4), 1e4);
        assert_eq!(softplus(1.0, -1e4), 0.0);
        assert!(softplus(1e3, 5.0).is_finite());
    }

    #[test]
    fn ulp_distance_basics() {
        assert_eq!(ulp_distance(1.0, 1.0), 0);
        assert_eq!(ulp_distance(1.0, 1.0 + f64::EPSILON), 1);
        assert_eq!(ulp_distance(-0.0, 0.0), 0);
        assert_eq!(ulp_distance(f64::NAN, 1.0), usize::MAX);
        assert_eq!(ulp_distance(1.0, 2.0), 1usize << 52);
    }

    #[test]
    fn kahan_resists_cancellation_naive_sum_suffers() {
        // 10⁷ copies of 0.1 plus a large head: naive summation drifts, the
        // compensated sum stays within a few ulps of the true value
        let mut kahan = KahanSum::new();
        let mut naive = 0.0_f64;
        kahan.add(1e9);
        naive += 1e9;
        for _ in 0..10_000_000 {
            kahan.add(0.1);
            naive += 0.1;
        }
        let exact = 1e9 + 1e6;
        assert!(
            (kahan.value() - exact).abs() <= 1e-6,
            "kahan off by {}",
            kahan.value() - exact
        );
        assert!(
            (naive - exact).abs() > (kahan.value() - exact).abs(),
            "naive {naive} should be worse than compensated {}",
            kahan.value()
        );
    }
}
