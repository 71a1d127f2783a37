//! Statistics for ρ_v samples: histograms, log-normal fitting,
//! Kolmogorov–Smirnov testing and the cross-n regression models.

mod histogram;
mod ks;
mod lognormal;
mod regression;

use thiserror::Error;

pub use histogram::{build_histogram, build_histogram_range, Histogram};
pub use ks::{kolmogorov_q, ks_statistic, ks_test, KsResult};
pub use lognormal::{
    fit_lognormal_lsq, fit_lognormal_mle, fit_sample, lognormal_cdf, lognormal_pdf,
    lognormal_probability_le, normal_cdf, FitMethod, LogNormalFit, SampleFit, DEFAULT_BINS,
    FIT_UPPER_QUANTILE,
};
pub use regression::{
    log_regression, moving_average_predict, predict, predict_p_le_1, MovingAverage, Prediction,
    RegressionFit,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-positive or non-finite value: {0}")]
    NonPositiveSample(f64),
    #[error("bin count must be at least 1")]
    NoBins,
    #[error("histogram has {0} nonempty bins, at least 3 are needed")]
    DegenerateHistogram(usize),
    #[error("least-squares fit did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("threshold must be positive, got {0}")]
    NonPositiveThreshold(f64),
    #[error("scale parameter must be positive, got {0}")]
    NonPositiveSigma(f64),
    #[error("regression needs at least 3 distinct n values, got {0}")]
    InsufficientPoints(usize),
    #[error("window {window} is larger than the {len} available values")]
    WindowTooLarge { window: usize, len: usize },
    #[error("window must be at least 1")]
    EmptyWindow,
}

pub(crate) fn check_positive(samples: &[f64]) -> Result<(), StatsError> {
    if samples.is_empty() {
        return Err(StatsError::EmptySample);
    }
    match samples.iter().find(|&&x| !(x > 0.0 && x.is_finite())) {
        Some(&bad) => Err(StatsError::NonPositiveSample(bad)),
        None => Ok(()),
    }
}
