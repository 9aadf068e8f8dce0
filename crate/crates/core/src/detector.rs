//! Bin-parity detector.
//!
//! The real line is cut into bins `U_k = [ka - a/2, ka + a/2)`. Each
//! coordinate gets the label `Z = +1` when its bin index is even and `-1`
//! when odd, and the statistic `A` is the mean label. A shift by `+-a` moves a
//! coordinate into a neighbouring bin and flips its label, which is what makes
//! the detector hard to evade with dense perturbations.

use serde::{Deserialize, Serialize};

use crate::attack::PerturbationVector;
use crate::error::{Error, Result};
use crate::kernels::{self, KernelParams};

/// Index of the half-open bin `[ka - a/2, ka + a/2)` containing `x`.
pub fn bin_index(x: f64, a: f64) -> i64 {
    (x / a + 0.5).floor() as i64
}

/// Parity label of a bin index: `+1` for even, `-1` for odd.
pub fn parity_label(k: i64) -> i8 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn labels(x: &[f64], a: f64) -> Vec<i8> {
    x.iter().map(|&v| parity_label(bin_index(v, a))).collect()
}

/// Sum of labels; exact integer form of `n * A`.
pub fn label_sum(x: &[f64], a: f64) -> i64 {
    x.iter().map(|&v| parity_label(bin_index(v, a)) as i64).sum()
}

/// Parity statistic `A = (1/n) sum_i Z_i`.
pub fn parity_statistic(x: &[f64], a: f64) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(label_sum(x, a) as f64 / x.len() as f64)
}

/// Normalized probability of bin `U_k` under the standard normal law.
pub fn bin_prob(k: i64, a: f64) -> f64 {
    let lo = k as f64 * a - 0.5 * a;
    let hi = lo + a;
    if lo >= 0.0 {
        kernels::normal_sf(lo) - kernels::normal_sf(hi)
    } else if hi <= 0.0 {
        kernels::normal_cdf(hi) - kernels::normal_cdf(lo)
    } else {
        1.0 - kernels::normal_sf(hi) - kernels::normal_cdf(lo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestVariant {
    /// Accept iff `sqrt(n) (A - G(a)) > -lambda`.
    Thresholded,
    /// Accept iff `A > 0`.
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorConfig {
    a: f64,
    lambda: f64,
    variant: TestVariant,
    g_a: f64,
}

impl DetectorConfig {
    pub fn new(a: f64, lambda: f64, variant: TestVariant) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must be finite and positive",
            });
        }
        let params = KernelParams::with_controls(a, 1e-12, KernelParams::DEFAULT_MAX_TERMS)?;
        let g_a = kernels::eval_big_g(&params)?.value;
        Ok(Self {
            a,
            lambda,
            variant,
            g_a,
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn variant(&self) -> TestVariant {
        self.variant
    }

    /// `G(a)`, cached at construction.
    pub fn g_a(&self) -> f64 {
        self.g_a
    }

    /// Decision from an exact label sum over `n` coordinates.
    pub fn accepts_sum(&self, sum: i64, n: usize) -> bool {
        match self.variant {
            TestVariant::Zero => sum > 0,
            TestVariant::Thresholded => {
                let nf = n as f64;
                nf.sqrt() * (sum as f64 / nf - self.g_a) > -self.lambda
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionResult {
    pub statistic_a: f64,
    pub accept_h0: bool,
    pub n: usize,
}

/// Applies the acceptance region to a sample.
pub fn decide(x: &[f64], config: &DetectorConfig) -> Result<DetectionResult> {
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sum = label_sum(x, config.a);
    Ok(DetectionResult {
        statistic_a: sum as f64 / x.len() as f64,
        accept_h0: config.accepts_sum(sum, x.len()),
        n: x.len(),
    })
}

/// Checks `A(x + theta) = -A(x) + (2/n) sum_{theta_i = 0} Z_i(x)`.
///
/// The attacked sample is formed in floating point, so this exercises the
/// real bin assignment of `x + theta`. Returns the absolute discrepancy, which
/// is an integer multiple of `1/n` and zero when the identity holds.
pub fn flip_identity_check(x: &[f64], theta: &PerturbationVector, a: f64) -> Result<f64> {
    if x.len() != theta.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: theta.len(),
        });
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut discrepancy = 0i64;
    for (&xi, &si) in x.iter().zip(theta.signs()) {
        let z = parity_label(bin_index(xi, a)) as i64;
        let z_post = parity_label(bin_index(xi + si as f64 * theta.a(), a)) as i64;
        discrepancy += z_post + z;
        if si == 0 {
            discrepancy -= 2 * z;
        }
    }
    Ok(discrepancy.abs() as f64 / x.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bins_half_open() {
        assert_eq!(bin_index(0.3, 1.0), 0);
        assert_eq!(bin_index(0.6, 1.0), 1);
        assert_eq!(bin_index(-0.5, 1.0), 0);
        assert_eq!(bin_index(0.5, 1.0), 1);
        assert_eq!(bin_index(-1.2, 1.0), -1);
    }

    #[test]
    fn statistic_hand_count() {
        let a = parity_statistic(&[0.3, 0.6, -1.2], 1.0).unwrap();
        assert!((a + 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(parity_statistic(&[0.1, -0.2, 0.49], 1.0).unwrap(), 1.0);
        assert!(parity_statistic(&[], 1.0).is_err());
    }

    #[test]
    fn bin_prob_values() {
        assert!((bin_prob(0, 1.0) - 0.382_924_922_548_026_2).abs() < 1e-15);
        for a in [0.5, 1.0, 2.0] {
            let total: f64 = (-40..=40).map(|k| bin_prob(k, a)).sum();
            assert!((total - 1.0).abs() < 1e-12);
            let alternating: f64 = (-40..=40)
                .map(|k| parity_label(k) as f64 * bin_prob(k, a))
                .sum();
            let g = kernels::eval_big_g(&KernelParams::new(a).unwrap()).unwrap().value;
            assert!((alternating - g).abs() < 1e-10);
        }
    }

    #[test]
    fn decisions() {
        let cfg = DetectorConfig::new(1.0, 3.0, TestVariant::Zero).unwrap();
        let r = decide(&[0.3, 0.6, -1.2], &cfg).unwrap();
        assert!(!r.accept_h0);
        let thr = DetectorConfig::new(2.0, 3.0, TestVariant::Thresholded).unwrap();
        // sqrt(n)(A - G) = 0 > -lambda at the boundary-interior point
        let n = 1000usize;
        let sum = (thr.g_a() * n as f64).round() as i64;
        assert!(thr.accepts_sum(sum, n));
        assert!(!thr.accepts_sum(-(n as i64), n));
    }

    #[test]
    fn flip_identity_simple_cases() {
        let x = [0.3, 0.6, -1.2, 2.4];
        let zero = PerturbationVector::from_signs(vec![0; 4], 1.0).unwrap();
        assert_eq!(flip_identity_check(&x, &zero, 1.0).unwrap(), 0.0);
        let full = PerturbationVector::from_signs(vec![1, -1, 1, 1], 1.0).unwrap();
        assert_eq!(flip_identity_check(&x, &full, 1.0).unwrap(), 0.0);
        let shifted: Vec<f64> = x.iter().zip(full.entries()).map(|(a, b)| a + b).collect();
        assert_eq!(label_sum(&shifted, 1.0), -label_sum(&x, 1.0));
        assert!(flip_identity_check(&x[..3], &full, 1.0).is_err());
    }
}
