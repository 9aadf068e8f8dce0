//! Adversaries: the distribution-preserving coupling and the worst-case
//! parity evader.

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::kernels::{self, KernelParams};

/// A perturbation `theta` with entries in `{-a, 0, +a}`, stored as signs.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationVector {
    signs: Vec<i8>,
    a: f64,
}

impl PerturbationVector {
    pub fn from_signs(signs: Vec<i8>, a: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "must be finite and positive",
            });
        }
        if let Some(&bad) = signs.iter().find(|s| !(-1..=1).contains(*s)) {
            return Err(Error::InvalidParameter {
                name: "sign",
                value: bad as f64,
                reason: "perturbation signs must be -1, 0 or 1",
            });
        }
        Ok(Self { signs, a })
    }

    /// The all-`+a` vertex of the hypercube `K_a`.
    pub fn full_flip(n: usize, a: f64) -> Result<Self> {
        Self::from_signs(vec![1; n], a)
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn entries(&self) -> Vec<f64> {
        self.signs.iter().map(|&s| s as f64 * self.a).collect()
    }

    pub fn zero_count(&self) -> usize {
        self.signs.iter().filter(|&&s| s == 0).count()
    }

    /// Fraction of untouched coordinates.
    pub fn sparsity_ratio(&self) -> Result<f64> {
        sparsity_ratio(self)
    }

    /// Membership in `F_{a,t}`: sparsity ratio strictly below `t`.
    pub fn in_sparse_set(&self, t: f64) -> Result<bool> {
        Ok(self.sparsity_ratio()? < t)
    }

    /// Membership in the hypercube vertex set `K_a` (no zero entries).
    pub fn is_vertex(&self) -> bool {
        !self.is_empty() && self.zero_count() == 0
    }

    /// Run-length form, e.g. `P3Z1M2` for `(+a,+a,+a,0,-a,-a)`.
    pub fn to_rle(&self) -> String {
        let mut out = String::new();
        let mut iter = self.signs.iter().peekable();
        while let Some(&s) = iter.next() {
            let mut run = 1usize;
            while iter.peek() == Some(&&s) {
                iter.next();
                run += 1;
            }
            let symbol = match s {
                1 => 'P',
                0 => 'Z',
                _ => 'M',
            };
            let _ = write!(out, "{symbol}{run}");
        }
        out
    }

    pub fn from_rle(rle: &str, a: f64) -> Result<Self> {
        let bad = || Error::spec("theta.rle", format!("malformed run-length string `{rle}`"));
        let mut signs = Vec::new();
        let mut chars = rle.chars().peekable();
        while let Some(symbol) = chars.next() {
            let sign = match symbol {
                'P' => 1,
                'Z' => 0,
                'M' => -1,
                _ => return Err(bad()),
            };
            let mut digits = String::new();
            while let Some(d) = chars.peek().filter(|c| c.is_ascii_digit()) {
                digits.push(*d);
                chars.next();
            }
            let run: usize = digits.parse().map_err(|_| bad())?;
            if run == 0 {
                return Err(bad());
            }
            signs.extend(std::iter::repeat_n(sign, run));
        }
        Self::from_signs(signs, a)
    }
}

#[derive(Serialize, Deserialize)]
struct RleRepr {
    a: f64,
    rle: String,
}

impl Serialize for PerturbationVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RleRepr {
            a: self.a,
            rle: self.to_rle(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PerturbationVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RleRepr::deserialize(deserializer)?;
        PerturbationVector::from_rle(&repr.rle, repr.a).map_err(serde::de::Error::custom)
    }
}

pub fn sparsity_ratio(theta: &PerturbationVector) -> Result<f64> {
    if theta.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(theta.zero_count() as f64 / theta.len() as f64)
}

const DIE_SLACK: f64 = 1e-9;

/// Sign of a three-sided die roll: `+1` if `u < p1`, `0` if `p1 <= u < p1 + p2`,
/// `-1` otherwise.
pub fn die_sign(p1: f64, p2: f64, u: f64) -> Result<i8> {
    if !(p1 >= 0.0 && p2 >= 0.0 && p1 + p2 <= 1.0 + DIE_SLACK) {
        return Err(Error::InvalidProbabilities { p1, p2 });
    }
    Ok(if u < p1 {
        1
    } else if u < p1 + p2 {
        0
    } else {
        -1
    })
}

/// Three-sided die with outcomes `(+a, 0, -a)` and probabilities
/// `(p1, p2, 1 - p1 - p2)`, driven by one uniform `u` in `[0, 1)`.
pub fn sample_die(p1: f64, p2: f64, a: f64, u: f64) -> Result<f64> {
    Ok(die_sign(p1, p2, u)? as f64 * a)
}

/// Coupling kernel plus the generator stream that drives the die.
#[derive(Clone, Debug)]
pub struct CouplingPolicy<R> {
    pub kernel: KernelParams,
    pub rng: R,
}

impl<R: Rng> CouplingPolicy<R> {
    pub fn new(kernel: KernelParams, rng: R) -> Self {
        Self { kernel, rng }
    }

    /// Draws one coordinate's move: `+1` with probability `phi(x)`, `0` with
    /// probability `gamma(x)`, `-1` otherwise.
    pub fn draw_sign(&mut self, x: f64) -> Result<i8> {
        let gamma = kernels::eval_gamma(x, &self.kernel)?;
        let phi = kernels::eval_phi(x, &self.kernel)?;
        let u: f64 = self.rng.random();
        die_sign(phi, gamma, u)
    }
}

/// Perturbs every coordinate independently with the coupling die, so that
/// `x' = x + theta` is again standard normal coordinatewise.
pub fn couple_perturb<R: Rng>(
    x: &[f64],
    policy: &mut CouplingPolicy<R>,
) -> Result<(PerturbationVector, Vec<f64>)> {
    let a = policy.kernel.a();
    let mut signs = Vec::with_capacity(x.len());
    let mut shifted = Vec::with_capacity(x.len());
    for &xi in x {
        let s = policy.draw_sign(xi)?;
        signs.push(s);
        shifted.push(xi + s as f64 * a);
    }
    Ok((PerturbationVector { signs, a }, shifted))
}

/// Largest zero count `m` with `m / n < t`.
pub fn zero_budget(t: f64, n: usize) -> Result<usize> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must lie in [0, 1]",
        });
    }
    let nf = n as f64;
    let feasible = |m: usize| (m as f64) / nf < t;
    // ceil(t n) - 1, then corrected against the float predicate itself.
    let mut m = ((t * nf).ceil() as i64 - 1).clamp(-1, n as i64);
    while m >= 0 && !feasible(m as usize) {
        m -= 1;
    }
    while m < n as i64 && feasible((m + 1) as usize) {
        m += 1;
    }
    if m < 0 {
        return Err(Error::EmptyFeasibleSet { t, n });
    }
    Ok(m as usize)
}

/// Perturbation in `F_{a,t}` maximizing the post-attack parity statistic.
///
/// Since `A' = (2/n) sum_{kept} Z_i - A`, the best move keeps as many `Z = +1`
/// coordinates as the zero budget allows (lowest indices first) and shifts
/// everything else by `+a`.
pub fn optimal_parity_evasion(z: &[i8], a: f64, t: f64) -> Result<PerturbationVector> {
    if z.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut budget = zero_budget(t, z.len())?;
    let mut signs = Vec::with_capacity(z.len());
    for &label in z {
        if label == 1 && budget > 0 {
            signs.push(0);
            budget -= 1;
        } else if label == 1 || label == -1 {
            signs.push(1);
        } else {
            return Err(Error::InvalidParameter {
                name: "z",
                value: label as f64,
                reason: "parity labels must be +1 or -1",
            });
        }
    }
    PerturbationVector::from_signs(signs, a)
}
