//! Small statistics helpers for Monte Carlo estimates.

/// 97.5th percentile of the standard normal; two-sided 95% coverage.
const Z_95: f64 = 1.959963984540054;

/// Wilson score interval for a binomial proportion at 95% confidence.
///
/// Stays valid at zero or near-zero counts, which matters for deep
/// error-rate estimates. Returns `(low, high)`; the interval always
/// contains the point estimate `successes / trials`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    assert!(trials >= 1, "wilson_interval requires at least one trial");
    assert!(successes <= trials);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // the score bounds are exactly 0 (resp. 1) at the extreme counts;
    // evaluate them as such rather than leaving rounding residue
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_contains_point_estimate() {
        for (k, n) in [(0u64, 10u64), (1, 10), (5, 10), (10, 10), (3, 1_000_000)] {
            let p = k as f64 / n as f64;
            let (lo, hi) = wilson_interval(k, n);
            assert!(lo <= p && p <= hi, "({k},{n}): [{lo},{hi}] vs {p}");
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
    }

    #[test]
    fn zero_count_interval_is_informative() {
        let (lo, hi) = wilson_interval(0, 1_000_000);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 1e-5);
    }

    #[test]
    fn matches_large_sample_normal_width() {
        // at p = 0.5, n large, Wilson ≈ Wald
        let (lo, hi) = wilson_interval(500_000, 1_000_000);
        let wald = 1.959963984540054 * (0.25_f64 / 1e6).sqrt();
        assert!(((hi - lo) / 2.0 - wald).abs() < 1e-6);
    }
}
