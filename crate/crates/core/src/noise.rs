//! Projection noise of repeated projective measurements.
//!
//! An outcome with probability `p` estimated from `nu` trials has variance
//! `p (1 - p) / nu`. When the measured quantity is a rescaled probability
//! `P = C0 q` (gain followed by renormalization), the variance becomes
//! `P (C0 - P) / nu`. Errors are combined by first-order propagation.
//!
//! Sampling uses ChaCha8 streams seeded explicitly per call, so every draw is
//! reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::{Error, Result};

/// Gradients smaller than this make a first-order sensitivity meaningless.
pub const GRADIENT_FLOOR: f64 = 1e-12;

const PROBABILITY_SLACK: f64 = 1e-12;

/// Variance of a scaled projective estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProjectionStatistics {
    pub p: f64,
    pub scale: f64,
    pub nu: u64,
    pub variance: f64,
}

impl ProjectionStatistics {
    pub fn new(p: f64, scale: f64, nu: u64) -> Result<Self> {
        let variance = scaled_binomial_variance(p, scale, nu)?;
        Ok(Self { p, scale, nu, variance })
    }
}

fn check_nu(nu: u64) -> Result<()> {
    if nu == 0 {
        return Err(Error::Domain { what: "trial count", value: 0.0 });
    }
    Ok(())
}

/// Clamps `p` into `[0, scale]` if it lies within rounding slack, otherwise fails.
fn check_probability(p: f64, scale: f64, what: &'static str) -> Result<f64> {
    if !p.is_finite() || p < -PROBABILITY_SLACK * scale || p > scale * (1.0 + PROBABILITY_SLACK) {
        return Err(Error::Domain { what, value: p });
    }
    Ok(p.clamp(0.0, scale))
}

/// `p (1 - p) / nu`.
pub fn binomial_variance(p: f64, nu: u64) -> Result<f64> {
    check_nu(nu)?;
    let p = check_probability(p, 1.0, "binomial probability")?;
    Ok(p * (1.0 - p) / nu as f64)
}

/// `P (C0 - P) / nu` for a probability rescaled by `C0 >= 1`.
pub fn scaled_binomial_variance(p: f64, c0: f64, nu: u64) -> Result<f64> {
    check_nu(nu)?;
    if !(c0 >= 1.0 && c0.is_finite()) {
        return Err(Error::Domain { what: "scale constant C0", value: c0 });
    }
    let p = check_probability(p, c0, "scaled probability")?;
    Ok(p * (c0 - p) / nu as f64)
}

/// Marginal variance `p_i (1 - p_i) / N` of one multinomial outcome frequency.
pub fn multinomial_variance(p_i: f64, n: u64) -> Result<f64> {
    binomial_variance(p_i, n)
}

/// `sum_i g_i^2 v_i` for independent inputs with variances `v_i`.
pub fn propagate_error(gradient: &[f64], variances: &[f64]) -> Result<f64> {
    if gradient.len() != variances.len() {
        return Err(Error::LengthMismatch { left: gradient.len(), right: variances.len() });
    }
    if let Some(&v) = variances.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain { what: "variance", value: v });
    }
    Ok(gradient.iter().zip(variances).map(|(g, v)| g * g * v).sum())
}

/// Estimate of `p` from `nu` Bernoulli trials with success probability
/// `p / scale`, reported on the original scale: `scale * successes / nu`.
///
/// The success count is drawn directly from `Binomial(nu, p / scale)`, which has
/// the same distribution as counting `nu` independent Bernoulli outcomes.
pub fn sample_projection(p: f64, scale: f64, nu: u64, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_projection_with(p, scale, nu, &mut rng)
}

/// [`sample_projection`] drawing from a caller-held generator.
pub fn sample_projection_with<R: Rng + ?Sized>(p: f64, scale: f64, nu: u64, rng: &mut R) -> Result<f64> {
    check_nu(nu)?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain { what: "scale", value: scale });
    }
    let p = check_probability(p, scale, "sampled probability")?;
    let q = (p / scale).clamp(0.0, 1.0);
    let successes = Binomial::new(nu, q).map_err(|_| Error::Domain { what: "sampled probability", value: q })?.sample(rng);
    Ok(scale * successes as f64 / nu as f64)
}

/// Outcome counts of `n` trials over the categorical distribution `probs`,
/// drawn as a chain of conditional binomials.
pub fn sample_multinomial<R: Rng + ?Sized>(probs: &[f64], n: u64, rng: &mut R) -> Result<Vec<u64>> {
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Domain { what: "categorical distribution total", value: total });
    }
    let mut counts = Vec::with_capacity(probs.len());
    let mut remaining_n = n;
    let mut remaining_p = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        if i + 1 == probs.len() {
            counts.push(remaining_n);
            break;
        }
        let q = if remaining_p > 0.0 { (p / remaining_p).clamp(0.0, 1.0) } else { 0.0 };
        let k = Binomial::new(remaining_n, q).map_err(|_| Error::Domain { what: "conditional probability", value: q })?.sample(rng);
        counts.push(k);
        remaining_n -= k;
        remaining_p -= p;
    }
    Ok(counts)
}

/// Seeded generator for stream `index` of a family of independent streams.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Sample mean and unbiased sample variance.
pub fn mean_and_variance(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Standard error of the unbiased sample variance of `m` draws from a
/// distribution with variance `var` and fourth central moment `mu4`.
pub fn variance_standard_error(var: f64, mu4: f64, m: usize) -> f64 {
    let m = m as f64;
    ((mu4 - var * var * (m - 3.0) / (m - 1.0)) / m).max(0.0).sqrt()
}

/// Fourth central moment of `Binomial(n, q) / n` scaled by `scale`.
pub fn scaled_binomial_fourth_moment(q: f64, n: u64, scale: f64) -> f64 {
    let nf = n as f64;
    let pq = q * (1.0 - q);
    // Fourth central moment of the count: n p q (1 + 3 (n - 2) p q).
    let count_mu4 = nf * pq * (1.0 + 3.0 * (nf - 2.0) * pq);
    count_mu4 * (scale / nf).powi(4)
}
