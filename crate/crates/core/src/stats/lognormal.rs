use std::f64::consts::{PI, SQRT_2};

use libm::erfc;
use serde::Serialize;

use super::histogram::{build_histogram_range, Histogram};
use super::{check_positive, StatsError};

pub const DEFAULT_BINS: usize = 50;

/// Upper end of the fitting histogram as a sample quantile. The ρ_v sample
/// for small games has a sparse tail reaching ~100× the median; equal-width
/// bins over the full range would put nearly all mass in the first bin.
pub const FIT_UPPER_QUANTILE: f64 = 0.99;

const MAX_ITERATIONS: usize = 20_000;

/// Standard normal CDF.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / SQRT_2)
}

pub fn lognormal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let z = (x.ln() - mu) / sigma;
    (-0.5 * z * z).exp() / (x * sigma * (2.0 * PI).sqrt())
}

pub fn lognormal_cdf(x: f64, mu: f64, sigma: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    normal_cdf((x.ln() - mu) / sigma)
}

/// `P(X <= x)` for `X ~ LogNormal(mu, sigma²)`.
pub fn lognormal_probability_le(mu: f64, sigma: f64, x: f64) -> Result<f64, StatsError> {
    if !(x > 0.0) {
        return Err(StatsError::NonPositiveThreshold(x));
    }
    if !(sigma > 0.0) {
        return Err(StatsError::NonPositiveSigma(sigma));
    }
    Ok(lognormal_cdf(x, mu, sigma))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Lsq,
    Mle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogNormalFit {
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub method: FitMethod,
    /// Sum of squared density residuals over the fitting histogram.
    pub sse: f64,
    pub mean_hat: f64,
    pub var_hat: f64,
    pub p_le_1: f64,
}

impl LogNormalFit {
    pub fn new(mu_hat: f64, sigma_hat: f64, method: FitMethod, sse: f64) -> Self {
        let s2 = sigma_hat * sigma_hat;
        LogNormalFit {
            mu_hat,
            sigma_hat,
            method,
            sse,
            mean_hat: (mu_hat + 0.5 * s2).exp(),
            var_hat: s2.exp_m1() * (2.0 * mu_hat + s2).exp(),
            p_le_1: normal_cdf(-mu_hat / sigma_hat),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        lognormal_pdf(x, self.mu_hat, self.sigma_hat)
    }
}

fn density_sse(h: &Histogram, centers: &[f64], mu: f64, sigma: f64) -> f64 {
    centers
        .iter()
        .zip(&h.densities)
        .map(|(&c, &d)| {
            let r = lognormal_pdf(c, mu, sigma) - d;
            r * r
        })
        .sum()
}

/// Log-moment estimate from bin centers weighted by counts.
fn binned_log_moments(h: &Histogram, centers: &[f64]) -> (f64, f64) {
    let total: f64 = h.counts.iter().map(|&c| c as f64).sum();
    let mean = centers
        .iter()
        .zip(&h.counts)
        .map(|(c, &k)| k as f64 * c.ln())
        .sum::<f64>()
        / total;
    let var = centers
        .iter()
        .zip(&h.counts)
        .map(|(c, &k)| k as f64 * (c.ln() - mean).powi(2))
        .sum::<f64>()
        / total;
    (mean, var.sqrt())
}

/// Least-squares fit of the log-normal density to the histogram densities at
/// bin centers. Nelder–Mead over `(μ, ln σ)`, started from the binned
/// log-moment estimate.
pub fn fit_lognormal_lsq(h: &Histogram) -> Result<LogNormalFit, StatsError> {
    let nonempty = h.nonempty_bins();
    if nonempty < 3 {
        return Err(StatsError::DegenerateHistogram(nonempty));
    }
    let centers = h.centers();
    if centers[0] <= 0.0 {
        return Err(StatsError::NonPositiveSample(centers[0]));
    }
    let (mu0, sigma0) = binned_log_moments(h, &centers);
    let sigma0 = if sigma0 > 0.0 {
        sigma0
    } else {
        h.width() / centers[centers.len() - 1]
    };
    let objective = |p: [f64; 2]| density_sse(h, &centers, p[0], p[1].exp());
    let (best, value) = nelder_mead(objective, [mu0, sigma0.ln()], [0.1, 0.2])?;
    Ok(LogNormalFit::new(
        best[0],
        best[1].exp(),
        FitMethod::Lsq,
        value,
    ))
}

/// Maximum-likelihood fit: mean and (population) standard deviation of
/// `ln x`. `sse` is left at zero since no histogram is involved.
pub fn fit_lognormal_mle(samples: &[f64]) -> Result<LogNormalFit, StatsError> {
    check_positive(samples)?;
    let m = samples.len() as f64;
    let mean = samples.iter().map(|x| x.ln()).sum::<f64>() / m;
    let var = samples.iter().map(|x| (x.ln() - mean).powi(2)).sum::<f64>() / m;
    if !(var > 0.0) {
        return Err(StatsError::NonPositiveSigma(var.sqrt()));
    }
    Ok(LogNormalFit::new(mean, var.sqrt(), FitMethod::Mle, 0.0))
}

/// Histogram and both fits for one sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleFit {
    pub histogram: Histogram,
    pub lsq: LogNormalFit,
    pub mle: LogNormalFit,
}

/// Fits a ρ_v sample: `bins` equal-width bins over `[min, q]` where `q` is the
/// [`FIT_UPPER_QUANTILE`] sample quantile, then the least-squares fit.
pub fn fit_sample(samples: &[f64], bins: usize) -> Result<SampleFit, StatsError> {
    check_positive(samples)?;
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = ((FIT_UPPER_QUANTILE * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let histogram = build_histogram_range(samples, bins, sorted[0], sorted[rank - 1])?;
    let lsq = fit_lognormal_lsq(&histogram)?;
    let mle = fit_lognormal_mle(samples)?;
    Ok(SampleFit {
        histogram,
        lsq,
        mle,
    })
}

/// Two-dimensional Nelder–Mead with standard coefficients. Stops when every
/// vertex lies within 1e-10 of the best one.
fn nelder_mead<F>(f: F, start: [f64; 2], step: [f64; 2]) -> Result<([f64; 2], f64), StatsError>
where
    F: Fn([f64; 2]) -> f64,
{
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut values = simplex.map(&f);
    let lerp =
        |a: [f64; 2], b: [f64; 2], t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    for _ in 0..MAX_ITERATIONS {
        // order best..worst
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.map(|i| simplex[i]);
        values = idx.map(|i| values[i]);

        let spread = simplex[1..]
            .iter()
            .map(|p| {
                (p[0] - simplex[0][0])
                    .abs()
                    .max((p[1] - simplex[0][1]).abs())
            })
            .fold(0.0, f64::max);
        if spread < 1e-10 {
            return Ok((simplex[0], values[0]));
        }

        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(centroid, simplex[2], -1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = lerp(centroid, simplex[2], -2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let (contracted, fc) = if fr < values[2] {
                let c = lerp(centroid, reflected, 0.5);
                (c, f(c))
            } else {
                let c = lerp(centroid, simplex[2], 0.5);
                (c, f(c))
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = lerp(simplex[0], simplex[k], 0.5);
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    Err(StatsError::NoConvergence(MAX_ITERATIONS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_cdf_reference_points() {
        assert_eq!(normal_cdf(0.0), 0.5);
        // Φ(1.96) and Φ(-3) from standard tables
        assert!((normal_cdf(1.96) - 0.975_002_104_851_780).abs() < 1e-12);
        assert!((normal_cdf(-3.0) - 0.001_349_898_031_630_095).abs() < 1e-12);
    }

    #[test]
    fn probability_le() {
        let p = lognormal_probability_le(0.095919, 0.22983, 1.0).unwrap();
        assert!((p - 0.33821).abs() < 1e-4);
        assert_eq!(lognormal_probability_le(0.0, 0.7, 1.0).unwrap(), 0.5);
        assert!(lognormal_probability_le(-0.63945, 0.12035, 1.0).unwrap() >= 0.9999);
        assert_eq!(
            lognormal_probability_le(0.0, 1.0, 0.0),
            Err(StatsError::NonPositiveThreshold(0.0))
        );
    }

    #[test]
    fn derived_fields() {
        let fit = LogNormalFit::new(0.095919, 0.22983, FitMethod::Lsq, 0.0);
        assert!((fit.mean_hat - 1.1301).abs() < 1e-3);
        assert!((fit.var_hat - 0.069274).abs() < 1e-3);
        assert!((fit.p_le_1 - 0.33821).abs() < 1e-3);
    }

    #[test]
    fn analytic_density_recovered() {
        let bins = 50;
        let (lo, hi) = (0.7, 1.4);
        let width = (hi - lo) / bins as f64;
        let edges: Vec<f64> = (0..=bins).map(|k| lo + k as f64 * width).collect();
        let densities: Vec<f64> = edges
            .windows(2)
            .map(|e| lognormal_pdf(0.5 * (e[0] + e[1]), 0.0, 0.1))
            .collect();
        let h = Histogram {
            counts: densities
                .iter()
                .map(|d| (d * 1000.0).round() as usize)
                .collect(),
            edges,
            densities,
            m: 1000,
            excluded: 0,
        };
        let fit = fit_lognormal_lsq(&h).unwrap();
        assert!(fit.mu_hat.abs() < 1e-3, "{fit:?}");
        assert!((fit.sigma_hat - 0.1).abs() < 1e-3, "{fit:?}");
        assert!(fit.sse < 1e-12);
    }

    #[test]
    fn degenerate_histogram_rejected() {
        let h = build_histogram_range(&[1.0, 1.0, 2.0], 5, 1.0, 2.0).unwrap();
        assert_eq!(
            fit_lognormal_lsq(&h),
            Err(StatsError::DegenerateHistogram(2))
        );
    }

    #[test]
    fn mle_of_log_moments() {
        let xs: Vec<f64> = [-1.0f64, 0.0, 1.0].iter().map(|z| z.exp()).collect();
        let fit = fit_lognormal_mle(&xs).unwrap();
        assert!(fit.mu_hat.abs() < 1e-12);
        assert!((fit.sigma_hat - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nelder_mead_quadratic() {
        let (p, v) = nelder_mead(
            |p| (p[0] - 3.0).powi(2) + 2.0 * (p[1] + 1.0).powi(2),
            [0.0, 0.0],
            [1.0, 1.0],
        )
        .unwrap();
        assert!((p[0] - 3.0).abs() < 1e-8 && (p[1] + 1.0).abs() < 1e-8 && v < 1e-15);
    }
}
