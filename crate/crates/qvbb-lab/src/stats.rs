//! Interval estimates and goodness-of-fit helpers for the Monte Carlo runs.

/// Two-sided standard normal quantiles.
pub const Z_95: f64 = 1.959_963_984_540_054;
pub const Z_99: f64 = 2.575_829_303_548_901;
/// One-sided 0.999 quantile.
pub const Z_999: f64 = 3.090_232_306_167_813;

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Upper chi-square quantile via the Wilson–Hilferty cube approximation;
/// `z` is the matching one-sided normal quantile.
pub fn chi2_critical(df: usize, z: f64) -> f64 {
    let k = df as f64;
    let t = 2.0 / (9.0 * k);
    k * (1.0 - t + z * t.sqrt()).powi(3)
}

/// Pearson statistic of `observed` counts against uniform expectation.
pub fn chi2_uniform(observed: &[u64]) -> f64 {
    let total: u64 = observed.iter().sum();
    let e = total as f64 / observed.len() as f64;
    observed.iter().map(|&o| (o as f64 - e).powi(2) / e).sum()
}

pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_matches_reference_values() {
        // k = 81, n = 263: (0.2553, 0.3662) from the standard worked example
        let (lo, hi) = wilson_interval(81, 263, Z_95);
        assert!((lo - 0.2553).abs() < 1e-3 && (hi - 0.3662).abs() < 1e-3, "{lo} {hi}");
        assert_eq!(wilson_interval(0, 0, Z_95), (0.0, 1.0));
        let (lo, hi) = wilson_interval(100, 100, Z_95);
        assert!(lo > 0.96 && hi == 1.0);
    }

    #[test]
    fn chi2_quantiles_near_tables() {
        assert!((chi2_critical(10, 1.644_853_626_951_472) - 18.307).abs() < 0.1);
        assert!((chi2_critical(255, Z_999) - 330.52).abs() < 0.5);
    }

    #[test]
    fn chi2_of_exact_uniform_is_zero() {
        assert_eq!(chi2_uniform(&[5, 5, 5, 5]), 0.0);
        assert!((chi2_uniform(&[10, 0]) - 10.0).abs() < 1e-12);
    }
}
