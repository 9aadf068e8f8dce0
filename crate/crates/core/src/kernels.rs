//! Gaussian kernels on the lattice `aZ`.
//!
//! This module evaluates the standard normal density, the alternating wrapped
//! Gaussian
//!
//! ```text
//! g(x) = (1/sqrt(2 pi)) * sum_k (-1)^k exp(-(x + k a)^2 / 2),
//! ```
//!
//! its integral over the central bin `G(a) = int_{-a/2}^{a/2} g`, and the two
//! coupling functions `gamma` (probability of leaving a coordinate untouched)
//! and `phi` (probability of shifting it by `+a`).
//!
//! `g` has two exact representations. The primal one sums translates of the
//! density and converges like `exp(-k^2 a^2 / 2)`; the dual one is the Poisson
//! resummation
//!
//! ```text
//! g(x) = (2/a) * sum_{m odd >= 1} exp(-m^2 pi^2 / (2 a^2)) cos(m pi x / a)
//! ```
//!
//! and converges like `exp(-m^2 pi^2 / (2 a^2))`. Both decay at the same rate
//! at `a = sqrt(pi)`, which is where [`SeriesMode::for_edge`] switches.

use std::f64::consts::{FRAC_2_PI, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::detector::bin_index;
use crate::error::{Error, Result};
use crate::quadrature;

/// `1 / sqrt(2 pi)`.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Edge length at which primal and dual series decay equally fast.
pub const MODE_CROSSOVER: f64 = 1.772_453_850_905_516;

/// Magnitude floor used by the relative stopping rule.
const TINY: f64 = 1e-300;

/// Absolute slack on the [0, 1] range guard when `rel_tol` is below the
/// rounding level of the series.
const RANGE_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesMode {
    Primal,
    Dual,
}

impl SeriesMode {
    /// Automatic choice: primal translates for `a >= sqrt(pi)`, dual cosines below.
    pub fn for_edge(a: f64) -> Self {
        if a >= MODE_CROSSOVER {
            SeriesMode::Primal
        } else {
            SeriesMode::Dual
        }
    }
}

/// Edge half-length `a` of the perturbation lattice plus series controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    a: f64,
    rel_tol: f64,
    max_terms: usize,
    mode: Option<SeriesMode>,
}

impl KernelParams {
    pub const DEFAULT_REL_TOL: f64 = 1e-13;
    pub const DEFAULT_MAX_TERMS: usize = 4096;

    pub fn new(a: f64) -> Result<Self> {
        Self::with_controls(a, Self::DEFAULT_REL_TOL, Self::DEFAULT_MAX_TERMS)
    }

    pub fn with_controls(a: f64, rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "must be finite and positive",
            });
        }
        if !(rel_tol > 0.0 && rel_tol <= 1e-6) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: rel_tol,
                reason: "must lie in (0, 1e-6]",
            });
        }
        if max_terms < 8 {
            return Err(Error::InvalidParameter {
                name: "max_terms",
                value: max_terms as f64,
                reason: "must be at least 8",
            });
        }
        Ok(Self {
            a,
            rel_tol,
            max_terms,
            mode: None,
        })
    }

    /// Pins the series representation instead of choosing it from `a`.
    pub fn force_mode(mut self, mode: SeriesMode) -> Self {
        self.mode = Some(mode);
        self
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    pub fn mode(&self) -> SeriesMode {
        self.mode.unwrap_or_else(|| SeriesMode::for_edge(self.a))
    }

    /// Domain clamp for `phi`: `12 + 4a`.
    pub fn x_max(&self) -> f64 {
        12.0 + 4.0 * self.a
    }

    fn range_slack(&self) -> f64 {
        (10.0 * self.rel_tol).max(RANGE_FLOOR)
    }
}

/// A series value together with its truncation certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelEval {
    pub value: f64,
    pub terms_used: usize,
    pub mode: SeriesMode,
    /// Bound on the omitted tail.
    pub est_error: f64,
}

pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(-x / SQRT_2)
}

/// Upper tail `1 - Phi(x)`, accurate for large positive `x`.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / SQRT_2)
}

fn parity_sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `sum_k (-1)^k exp(-(r + k a)^2 / 2)` for `|r| <= a/2`, summed outward in pairs.
fn primal_translates(r: f64, a: f64, rel_tol: f64, max_terms: usize) -> Result<(f64, usize, f64)> {
    let mut sum = (-0.5 * r * r).exp();
    let mut terms = 1;
    let mut k = 1i64;
    loop {
        let sign = parity_sign(k);
        let kf = k as f64;
        let up = sign * (-0.5 * (r + kf * a).powi(2)).exp();
        let down = sign * (-0.5 * (r - kf * a).powi(2)).exp();
        sum += up + down;
        terms += 2;
        let pair = up.abs() + down.abs();
        if pair <= rel_tol * sum.abs().max(TINY) {
            return Ok((sum, terms, pair));
        }
        if terms >= max_terms {
            return Err(Error::Truncation {
                series: "primal translate series",
                max_terms,
                last_term: pair,
            });
        }
        k += 1;
    }
}

/// `sum_{m odd} exp(-m^2 c + shift) cos(m pi x / a)` with `c = pi^2 / (2 a^2)`.
///
/// `shift` is added inside every exponent so callers can fold a prefactor
/// such as `exp(x^2/2)` into log space.
fn dual_cosines(
    x: f64,
    a: f64,
    shift: f64,
    rel_tol: f64,
    max_terms: usize,
) -> Result<(f64, usize, f64)> {
    let c = PI * PI / (2.0 * a * a);
    let omega = PI * x / a;
    let mut sum = 0.0f64;
    let mut terms = 0;
    let mut m = 1.0f64;
    loop {
        let magnitude = (shift - m * m * c).exp();
        // Tail from m onward is dominated by a geometric series in exp(-4 m c).
        let tail = magnitude / (1.0 - (-4.0 * m * c).exp()).max(f64::EPSILON);
        if terms > 0 && tail <= rel_tol * sum.abs().max(TINY) {
            return Ok((sum, terms, tail));
        }
        if terms >= max_terms {
            return Err(Error::Truncation {
                series: "dual cosine series",
                max_terms,
                last_term: magnitude,
            });
        }
        sum += magnitude * (m * omega).cos();
        terms += 1;
        m += 2.0;
    }
}

/// Alternating wrapped Gaussian `g(x)`.
pub fn eval_g(x: f64, params: &KernelParams) -> Result<KernelEval> {
    let a = params.a;
    let mode = params.mode();
    match mode {
        SeriesMode::Primal => {
            // g(x + j a) = (-1)^j g(x): reduce into the central bin first.
            let j = bin_index(x, a);
            let r = x - j as f64 * a;
            let (sum, terms_used, tail) =
                primal_translates(r, a, params.rel_tol, params.max_terms)?;
            Ok(KernelEval {
                value: parity_sign(j) * FRAC_1_SQRT_2PI * sum,
                terms_used,
                mode,
                est_error: FRAC_1_SQRT_2PI * tail,
            })
        }
        SeriesMode::Dual => {
            let (sum, terms_used, tail) =
                dual_cosines(x, a, 0.0, params.rel_tol, params.max_terms)?;
            let scale = 2.0 / a;
            Ok(KernelEval {
                value: scale * sum,
                terms_used,
                mode,
                est_error: scale * tail,
            })
        }
    }
}

/// `G(a)` from the odd-harmonic series
/// `(4/pi) sum_{k>=0} (-1)^k / (2k+1) exp(-(2k+1)^2 pi^2 / (2 a^2))`.
///
/// The series alternates with decreasing terms, so the first omitted term
/// bounds the remainder.
pub fn eval_big_g(params: &KernelParams) -> Result<KernelEval> {
    let c = PI * PI / (2.0 * params.a * params.a);
    let mut sum = 0.0f64;
    let mut k = 0usize;
    loop {
        let m = (2 * k + 1) as f64;
        let magnitude = (-m * m * c).exp() / m;
        if k > 0 && magnitude <= params.rel_tol * sum.abs().max(TINY) {
            let scale = 2.0 * FRAC_2_PI;
            return Ok(KernelEval {
                value: scale * sum,
                terms_used: k,
                mode: SeriesMode::Dual,
                est_error: scale * magnitude,
            });
        }
        if k >= params.max_terms {
            return Err(Error::Truncation {
                series: "G(a) odd-harmonic series",
                max_terms: params.max_terms,
                last_term: magnitude,
            });
        }
        sum += if k % 2 == 0 { magnitude } else { -magnitude };
        k += 1;
    }
}

/// Floor below which the oracle's translate sum is pure rounding noise: each
/// point carries error ~eps * sum_k p(x + ka), which integrates to ~eps.
const ORACLE_NOISE_FLOOR: f64 = 64.0 * f64::EPSILON;

/// Independent route to `G(a)`: adaptive quadrature of the raw translate sum
/// over the central bin, absolute tolerance `1e-12`.
///
/// Values below the rounding floor of the translate sum are reported as `0`.
pub fn big_g_oracle(params: &KernelParams) -> Result<f64> {
    let a = params.a;
    // exp(-40^2/2) underflows, so translates farther than 40 contribute nothing.
    let reach = (40.0 / a).ceil() as i64 + 2;
    let integrand = |x: f64| {
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in -reach..=reach {
            let term = parity_sign(k) * (-0.5 * (x + k as f64 * a).powi(2)).exp();
            // Neumaier compensated summation.
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        FRAC_1_SQRT_2PI * (sum + comp)
    };
    let half = 0.5 * a;
    let value = quadrature::integrate(integrand, -half, 0.0, 0.5e-12)?
        + quadrature::integrate(integrand, 0.0, half, 0.5e-12)?;
    Ok(if value.abs() < ORACLE_NOISE_FLOOR {
        0.0
    } else {
        value
    })
}

/// `gamma(x)` before range verification and clamping.
///
/// Inside the central bin this is `g(x) / p(x)`; outside it is zero.
pub fn gamma_raw(x: f64, params: &KernelParams) -> Result<f64> {
    let a = params.a;
    if x.abs() >= 0.5 * a {
        return Ok(0.0);
    }
    match params.mode() {
        SeriesMode::Primal => {
            // sum_k (-1)^k exp(-k a x - k^2 a^2 / 2); both tails decay for |x| < a/2.
            let mut sum = 1.0;
            let mut terms = 1;
            let mut k = 1.0f64;
            loop {
                let sign = if (k as i64) % 2 == 0 { 1.0 } else { -1.0 };
                let quad = -0.5 * k * k * a * a;
                let up = (quad - k * a * x).exp();
                let down = (quad + k * a * x).exp();
                sum += sign * (up + down);
                terms += 2;
                if up + down <= params.rel_tol * sum.abs().max(TINY) {
                    return Ok(sum);
                }
                if terms >= params.max_terms {
                    return Err(Error::Truncation {
                        series: "gamma primal series",
                        max_terms: params.max_terms,
                        last_term: up + down,
                    });
                }
                k += 1.0;
            }
        }
        SeriesMode::Dual => {
            // g(x) / p(x) with the 1/p(x) = sqrt(2 pi) exp(x^2/2) factor folded
            // into each exponent.
            let (sum, _, _) =
                dual_cosines(x, a, 0.5 * x * x, params.rel_tol, params.max_terms)?;
            Ok(2.0 / a / FRAC_1_SQRT_2PI * sum)
        }
    }
}

fn verify_unit(what: &'static str, x: f64, value: f64, params: &KernelParams) -> Result<f64> {
    let slack = params.range_slack();
    if !(value >= -slack && value <= 1.0 + slack) {
        return Err(Error::RangeViolation { what, x, value });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Stay probability `gamma(x)`, clamped to `[0, 1]` after range verification.
pub fn eval_gamma(x: f64, params: &KernelParams) -> Result<f64> {
    let raw = gamma_raw(x, params)?;
    verify_unit("gamma", x, raw, params)
}

/// `sum_{k>=1} (-1)^{k+1} [1 - gamma(x + s k a)] exp(-s k a x - k^2 a^2 / 2)`.
///
/// With `s = sign(x)` every exponent is non-positive and the terms decrease
/// monotonically.
fn shifted_tail(x: f64, direction: f64, params: &KernelParams) -> Result<f64> {
    let a = params.a;
    let mut sum = 0.0f64;
    let mut k = 1usize;
    loop {
        let kf = k as f64;
        let exponent = -direction * kf * a * x - 0.5 * kf * kf * a * a;
        let weight = 1.0 - eval_gamma(x + direction * kf * a, params)?;
        let term = weight * exponent.exp();
        if k > 1 && term <= params.rel_tol * sum.abs().max(TINY) {
            return Ok(sum);
        }
        if k >= params.max_terms {
            return Err(Error::Truncation {
                series: "phi shifted series",
                max_terms: params.max_terms,
                last_term: term,
            });
        }
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
    }
}

/// Mirrored series `psi(x)` used for `x < 0`; equals `phi(-x)` by evenness of
/// `p` and `gamma`.
pub fn mirrored_series(x: f64, params: &KernelParams) -> Result<f64> {
    shifted_tail(x, -1.0, params)
}

/// `phi(x)` before range verification and clamping.
pub fn phi_raw(x: f64, params: &KernelParams) -> Result<f64> {
    let limit = params.x_max();
    if !(x.abs() <= limit) {
        return Err(Error::OutOfDomain { x, limit });
    }
    if x >= 0.0 {
        shifted_tail(x, 1.0, params)
    } else {
        Ok(1.0 - gamma_raw(x, params)? - mirrored_series(x, params)?)
    }
}

/// Probability `phi(x)` of the `+a` move, clamped to `[0, 1]`.
pub fn eval_phi(x: f64, params: &KernelParams) -> Result<f64> {
    let raw = phi_raw(x, params)?;
    verify_unit("phi", x, raw, params)
}

/// Residual of the balance equation
/// `phi(x-a)p(x-a) + gamma(x)p(x) + [1 - phi(x+a) - gamma(x+a)]p(x+a) - p(x)`.
pub fn fp_residual(x: f64, params: &KernelParams) -> Result<f64> {
    let a = params.a;
    let limit = params.x_max() - a;
    if !(x.abs() <= limit) {
        return Err(Error::OutOfDomain { x, limit });
    }
    let inflow_up = eval_phi(x - a, params)? * normal_pdf(x - a);
    let stay = eval_gamma(x, params)? * normal_pdf(x);
    let inflow_down =
        (1.0 - eval_phi(x + a, params)? - eval_gamma(x + a, params)?) * normal_pdf(x + a);
    Ok(inflow_up + stay + inflow_down - normal_pdf(x))
}

/// Inverts `G` by bisection: returns `a` with `|G(a) - target| <= tol`.
pub fn solve_a_for_g(target: f64, tol: f64) -> Result<f64> {
    if !(target > 1e-12 && target < 1.0 - 1e-12) {
        return Err(Error::InvalidParameter {
            name: "target",
            value: target,
            reason: "must lie in (1e-12, 1 - 1e-12)",
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "must be positive",
        });
    }
    let big_g = |a: f64| -> Result<f64> {
        Ok(eval_big_g(&KernelParams::with_controls(a, 1e-15, KernelParams::DEFAULT_MAX_TERMS)?)?.value)
    };
    // G(0.3) ~ 2e-24 and G(40) == 1 in double precision bracket every admissible target.
    let (mut lo, mut hi) = (0.3f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let value = big_g(mid)?;
        if (value - target).abs() <= tol || hi - lo <= 4.0 * f64::EPSILON * mid {
            return Ok(mid);
        }
        if value < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64) -> KernelParams {
        KernelParams::new(a).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(KernelParams::new(0.0).is_err());
        assert!(KernelParams::new(f64::NAN).is_err());
        assert!(KernelParams::with_controls(1.0, 1e-3, 100).is_err());
        assert!(KernelParams::with_controls(1.0, 1e-12, 4).is_err());
    }

    #[test]
    fn g_large_edge_is_single_translate() {
        let v = eval_g(0.0, &params(40.0)).unwrap();
        assert!((v.value - FRAC_1_SQRT_2PI).abs() < 1e-15);
        assert_eq!(v.mode, SeriesMode::Primal);
    }

    #[test]
    fn g_vanishes_at_bin_edge() {
        for a in [0.5, 1.0, 1.5, 2.0, 3.0, 6.0] {
            let v = eval_g(0.5 * a, &params(a)).unwrap();
            assert!(v.value.abs() < 1e-15, "a = {a}: {}", v.value);
        }
    }

    #[test]
    fn g_edge_matches_direct_pair_cancellation() {
        // Brute-force translate sum straight from the definition.
        let a = 2.0;
        let direct: f64 = (-60i64..=60)
            .map(|k| parity_sign(k) * normal_pdf(0.5 * a + k as f64 * a))
            .sum();
        assert!(direct.abs() < 1e-15);
    }

    #[test]
    fn primal_and_dual_agree_at_crossover() {
        let p = params(MODE_CROSSOVER);
        for x in [0.0, 0.3, 0.8] {
            let primal = eval_g(x, &p.force_mode(SeriesMode::Primal)).unwrap();
            let dual = eval_g(x, &p.force_mode(SeriesMode::Dual)).unwrap();
            assert!((primal.value - dual.value).abs() <= 1e-12);
            assert!(primal.terms_used <= 21 && dual.terms_used <= 10);
        }
    }

    #[test]
    fn g_is_antiperiodic() {
        let p = params(1.3);
        for x in [-0.4, 0.1, 0.6] {
            let g0 = eval_g(x, &p).unwrap().value;
            let g1 = eval_g(x + 1.3, &p).unwrap().value;
            assert!((g0 + g1).abs() < 1e-14);
        }
    }

    #[test]
    fn est_error_respects_tolerance() {
        for a in [0.5, 1.0, 2.0, 5.0] {
            let p = params(a);
            let big = eval_big_g(&p).unwrap();
            assert!(big.est_error <= p.rel_tol() * big.value.abs().max(1e-300));
            let g = eval_g(0.1 * a, &p).unwrap();
            assert!(g.est_error <= p.rel_tol() * g.value.abs().max(1e-300));
        }
    }

    // Reference values from extended-precision quadrature of the translate sum.
    #[test]
    fn big_g_regression_constants() {
        let g1 = eval_big_g(&params(1.0)).unwrap().value;
        assert!((g1 / 0.009_156_990_289_760_756 - 1.0).abs() < 1e-13);
        let leading = 2.0 * FRAC_2_PI * (-PI * PI / 2.0).exp();
        assert!((g1 - leading).abs() < 1e-19);
        let g05 = eval_big_g(&params(0.5)).unwrap().value;
        assert!((g05 / 3.406_282_463_790_813e-9 - 1.0).abs() < 1e-12);
        let g2 = eval_big_g(&params(2.0)).unwrap().value;
        assert!((g2 / 0.370_777_429_799_523_9 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn big_g_limits_and_monotonicity() {
        let far = eval_big_g(&params(60.0)).unwrap().value;
        assert!((far - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 0..40 {
            let a = 0.2 * 1.15f64.powi(i);
            let v = eval_big_g(&params(a)).unwrap().value;
            // Increasing up to the series tolerance once G is within 1e-13 of 1.
            assert!(v > prev || (1.0 - v) < 1e-13, "a = {a}");
            prev = v;
        }
    }

    #[test]
    fn oracle_examples() {
        let o2 = big_g_oracle(&params(2.0)).unwrap();
        assert!((o2 - 0.370_777_429_799_523_9).abs() < 1e-12);
        let p = params(0.5);
        let diff = big_g_oracle(&p).unwrap() - eval_big_g(&p).unwrap().value;
        assert!(diff.abs() <= 1e-12);
        let tiny = big_g_oracle(&params(0.1)).unwrap();
        assert!(tiny < 1e-200);
    }

    #[test]
    fn gamma_examples() {
        let p = params(3.0);
        let v = eval_gamma(0.0, &p).unwrap();
        assert!((v - 0.977_782_037_383_474_9).abs() < 1e-14);
        // direct bilateral series with 41 terms
        let direct: f64 = (-20i64..=20)
            .map(|k| parity_sign(k) * (-0.5 * (k * k) as f64 * 9.0).exp())
            .sum();
        assert!((v - direct).abs() < 1e-15);
        for a in [0.7, 1.0, 2.0, 3.0] {
            let p = params(a);
            assert!(eval_gamma(0.5 * a, &p).unwrap() <= 1e-10);
            assert!(eval_gamma(-0.5 * a, &p).unwrap() <= 1e-10);
            assert!(gamma_raw(0.5 * a - 1e-12, &p).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn gamma_is_even() {
        for a in [0.7, 1.5, 2.5] {
            let p = params(a);
            for i in 0..50 {
                let x = -0.5 * a + a * i as f64 / 50.0;
                let lhs = eval_gamma(x, &p).unwrap();
                let rhs = eval_gamma(-x, &p).unwrap();
                assert!((lhs - rhs).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn gamma_dual_matches_primal_inside_bin() {
        let p = params(1.9);
        for x in [-0.9, -0.3, 0.0, 0.5, 0.94] {
            let primal = gamma_raw(x, &p.force_mode(SeriesMode::Primal)).unwrap();
            let dual = gamma_raw(x, &p.force_mode(SeriesMode::Dual)).unwrap();
            assert!((primal - dual).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_examples() {
        let p = params(1.0);
        let v = eval_phi(6.0, &p).unwrap();
        let direct: f64 = (1..=8)
            .map(|k| -parity_sign(k) * (-6.0 * k as f64 - 0.5 * (k * k) as f64).exp())
            .sum();
        assert!((v - direct).abs() < 1e-15);
        assert!((v - 1.502_607_833_435_597_3e-3).abs() < 1e-15);
        let w = eval_phi(-6.0, &p).unwrap();
        assert!((w - 0.998_497_392_166_564_4).abs() < 1e-14);
    }

    #[test]
    fn phi_out_of_domain() {
        let p = params(1.0);
        assert!(matches!(eval_phi(16.5, &p), Err(Error::OutOfDomain { .. })));
        assert!(eval_phi(-16.0, &p).is_ok());
        assert!(fp_residual(15.5, &p).is_err());
    }

    #[test]
    fn residual_examples() {
        assert!(fp_residual(0.3, &params(1.2)).unwrap().abs() <= 1e-10);
        assert!(fp_residual(0.0, &params(2.0)).unwrap().abs() <= 1e-10);
        let p = params(1.7);
        for x in [0.2, 1.1, 3.4] {
            let d = fp_residual(x, &p).unwrap() - fp_residual(-x, &p).unwrap();
            assert!(d.abs() < 1e-12);
        }
    }

    #[test]
    fn solve_round_trips() {
        let g2 = eval_big_g(&params(2.0)).unwrap().value;
        let a = solve_a_for_g(g2, 1e-13).unwrap();
        assert!((a - 2.0).abs() < 1e-9);
        let half = solve_a_for_g(0.5, 1e-12).unwrap();
        assert!((eval_big_g(&params(half)).unwrap().value - 0.5).abs() <= 1e-9);
        let one = solve_a_for_g(0.009157, 1e-12).unwrap();
        assert!((one - 1.0).abs() < 1e-4);
        assert!(solve_a_for_g(0.0, 1e-9).is_err());
        assert!(solve_a_for_g(1.0, 1e-9).is_err());
    }
}
