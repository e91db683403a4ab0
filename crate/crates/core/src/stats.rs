//! One-sample Kolmogorov–Smirnov test.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    /// Asymptotic p-value from the Kolmogorov distribution.
    pub p_value: f64,
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // Small-x series: P(K <= x) = sqrt(2π)/x Σ exp(-(2k-1)² π² / (8x²)).
        let c = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let cdf: f64 = (1..=20)
            .map(|k| ((2 * k - 1) as f64).powi(2) * c)
            .map(f64::exp)
            .sum::<f64>()
            * (std::f64::consts::TAU).sqrt()
            / x;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * x * x).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// KS test of `samples` against the continuous distribution function `cdf`.
pub fn ks_test(samples: &[f64], cdf: impl Fn(f64) -> f64) -> KsResult {
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let statistic = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let en = n.sqrt();
    let p_value = if xs.is_empty() {
        1.0
    } else {
        kolmogorov_survival((en + 0.12 + 0.11 / en) * statistic)
    };
    KsResult { statistic, p_value }
}

/// KS test against the uniform distribution on `[lo, hi]`.
pub fn ks_uniform(samples: &[f64], lo: f64, hi: f64) -> KsResult {
    ks_test(samples, |x| ((x - lo) / (hi - lo)).clamp(0.0, 1.0))
}

pub fn mean(samples: &[f64]) -> f64 {
    samples.iter().sum::<f64>() / samples.len() as f64
}
