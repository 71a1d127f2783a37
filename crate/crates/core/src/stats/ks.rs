use std::f64::consts::PI;

use serde::Serialize;

use super::lognormal::lognormal_cdf;
use super::{check_positive, StatsError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub d_stat: f64,
    pub p_value: f64,
    pub m: usize,
}

/// Kolmogorov survival function `Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} e^{-2k²λ²}`.
///
/// Below λ = 1.18 the alternating series converges slowly, so the equivalent
/// Jacobi theta form `1 - √(2π)/λ Σ e^{-(2k-1)²π²/(8λ²)}` is summed instead.
/// Both are truncated once a term drops under 1e-12.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let mut sum = 0.0;
        for k in 1..=100 {
            let j = (2 * k - 1) as f64;
            let term = (-j * j * PI * PI / (8.0 * lambda * lambda)).exp();
            sum += term;
            if term < 1e-12 {
                break;
            }
        }
        (1.0 - (2.0 * PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        let mut sign = 1.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += sign * term;
            if term < 1e-12 {
                break;
            }
            sign = -sign;
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// `sup |F_m − F|` over the sorted sample for an arbitrary continuous CDF.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let i = i as f64;
            ((i + 1.0) / m - f).max(f - i / m)
        })
        .fold(0.0, f64::max)
}

/// One-sample KS test against `LogNormal(mu, sigma²)`, with the p-value from
/// the asymptotic distribution at `λ = (√m + 0.12 + 0.11/√m)·D`.
pub fn ks_test(samples: &[f64], mu: f64, sigma: f64) -> Result<KsResult, StatsError> {
    check_positive(samples)?;
    if !(sigma > 0.0) {
        return Err(StatsError::NonPositiveSigma(sigma));
    }
    let d_stat = ks_statistic(samples, |x| lognormal_cdf(x, mu, sigma));
    let m = samples.len();
    let sm = (m as f64).sqrt();
    let lambda = (sm + 0.12 + 0.11 / sm) * d_stat;
    Ok(KsResult {
        d_stat,
        p_value: kolmogorov_q(lambda),
        m,
    })
}
