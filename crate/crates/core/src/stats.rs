//! Small statistics helpers: Wilson intervals, binomial standard errors, the
//! one-sample Kolmogorov–Smirnov distance and running moments.

use serde::{Deserialize, Serialize};

/// Two-sided 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// A binomial proportion with its Wilson 95% interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Rate {
    pub fn new(successes: u64, trials: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_95);
        let estimate = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        Self {
            successes,
            trials,
            estimate,
            ci_low: ci_low.min(estimate),
            ci_high: ci_high.max(estimate),
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Wilson score interval for `successes` out of `trials` at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Standard error of a Bernoulli(`p`) mean over `trials` draws.
pub fn binomial_se(p: f64, trials: u64) -> f64 {
    if trials == 0 {
        return 0.0;
    }
    (p * (1.0 - p) / trials as f64).max(0.0).sqrt()
}

/// `sup_x |F_n(x) - F(x)|` for the empirical distribution of `sample`.
///
/// Sorts `sample` in place.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> f64 {
    sample.sort_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Power sums up to third order; merged in a fixed order for reproducibility.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
    pub sum_cube: f64,
}

impl Moments {
    pub fn from_slice(xs: &[f64]) -> Self {
        let mut m = Moments::default();
        for &x in xs {
            m.count += 1;
            m.sum += x;
            m.sum_sq += x * x;
            m.sum_cube += x * x * x;
        }
        m
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self.sum_cube += other.sum_cube;
    }

    pub fn mean(&self) -> f64 {
        self.sum / self.count as f64
    }

    /// Biased (population) variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.sum_sq / self.count as f64 - mean * mean
    }

    pub fn skewness(&self) -> f64 {
        let n = self.count as f64;
        let mean = self.mean();
        let var = self.variance();
        let third = self.sum_cube / n - 3.0 * mean * self.sum_sq / n + 2.0 * mean.powi(3);
        third / var.powf(1.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_known_values() {
        // 0 of 10^4: upper limit z^2 / (n + z^2)
        let (lo, hi) = wilson_interval(0, 10_000, Z_95);
        assert_eq!(lo, 0.0);
        assert!((hi - Z_95 * Z_95 / (10_000.0 + Z_95 * Z_95)).abs() < 1e-15);
        let (lo, hi) = wilson_interval(50, 100, Z_95);
        assert!((lo - 0.403_831_7).abs() < 1e-6 && (hi - 0.596_168_3).abs() < 1e-6);
    }

    #[test]
    fn rate_contains_estimate() {
        for (s, n) in [(0, 5), (5, 5), (3, 7), (1, 1_000_000)] {
            let r = Rate::new(s, n);
            assert!(r.ci_low <= r.estimate && r.estimate <= r.ci_high);
        }
    }

    #[test]
    fn ks_of_uniform_grid() {
        let mut xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let d = ks_distance(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.005).abs() < 1e-12);
    }

    #[test]
    fn moments_of_symmetric_set() {
        let m = Moments::from_slice(&[-2.0, -1.0, 0.0, 1.0, 2.0]);
        assert_eq!(m.mean(), 0.0);
        assert!((m.variance() - 2.0).abs() < 1e-15);
        assert!(m.skewness().abs() < 1e-15);
    }
}
