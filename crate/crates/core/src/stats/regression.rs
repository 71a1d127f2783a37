use serde::{Deserialize, Serialize};

use super::lognormal::normal_cdf;
use super::StatsError;

/// `y = slope · ln(n) + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl RegressionFit {
    pub fn eval(&self, n: f64) -> f64 {
        self.slope * n.ln() + self.intercept
    }

    pub fn residuals(&self, points: &[(usize, f64)]) -> Vec<f64> {
        points
            .iter()
            .map(|&(n, y)| y - self.eval(n as f64))
            .collect()
    }
}

/// Ordinary least squares of `y` on `ln(n)`.
pub fn log_regression(points: &[(usize, f64)]) -> Result<RegressionFit, StatsError> {
    let mut distinct: Vec<usize> = points.iter().map(|p| p.0).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 || distinct[0] == 0 {
        return Err(StatsError::InsufficientPoints(distinct.len()));
    }
    let k = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64).ln()).collect();
    let x_mean = xs.iter().sum::<f64>() / k;
    let y_mean = points.iter().map(|p| p.1).sum::<f64>() / k;
    let (sxy, sxx) = xs
        .iter()
        .zip(points)
        .fold((0.0, 0.0), |(sxy, sxx), (&x, &(_, y))| {
            let dx = x - x_mean;
            (sxy + dx * (y - y_mean), sxx + dx * dx)
        });
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let (sse, sst) = xs
        .iter()
        .zip(points)
        .fold((0.0, 0.0), |(sse, sst), (&x, &(_, y))| {
            let r = y - (slope * x + intercept);
            (sse + r * r, sst + (y - y_mean).powi(2))
        });
    let r_squared = if sst > 0.0 {
        (1.0 - sse / sst).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(RegressionFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MovingAverage {
    /// Trailing-window means, one per full window.
    pub smoothed: Vec<f64>,
    /// Mean of the last `window` values.
    pub predicted: f64,
    /// Population standard deviation of `value − trailing mean` over full
    /// windows.
    pub residual_sd: f64,
}

pub fn moving_average_predict(values: &[f64], window: usize) -> Result<MovingAverage, StatsError> {
    if window == 0 {
        return Err(StatsError::EmptyWindow);
    }
    if values.len() < window {
        return Err(StatsError::WindowTooLarge {
            window,
            len: values.len(),
        });
    }
    let smoothed: Vec<f64> = values
        .windows(window)
        .map(|w| w.iter().sum::<f64>() / window as f64)
        .collect();
    let predicted = *smoothed.last().expect("at least one full window");
    let residuals: Vec<f64> = values[window - 1..]
        .iter()
        .zip(&smoothed)
        .map(|(v, s)| v - s)
        .collect();
    let k = residuals.len() as f64;
    let mean = residuals.iter().sum::<f64>() / k;
    let residual_sd = (residuals.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / k).sqrt();
    Ok(MovingAverage {
        smoothed,
        predicted,
        residual_sd,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub n: usize,
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub p_le_1: f64,
}

pub fn predict(n: usize, reg: &RegressionFit, sigma_pred: f64) -> Prediction {
    let mu_hat = reg.eval(n as f64);
    Prediction {
        n,
        mu_hat,
        sigma_hat: sigma_pred,
        p_le_1: normal_cdf(-mu_hat / sigma_pred),
    }
}

/// `Φ(−μ̂(n)/σ̂)` with `μ̂(n)` from the regression.
pub fn predict_p_le_1(n: usize, reg: &RegressionFit, sigma_pred: f64) -> f64 {
    predict(n, reg, sigma_pred).p_le_1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let pts: Vec<(usize, f64)> = (3..10).map(|n| (n, 2.0 * (n as f64).ln() + 1.0)).collect();
        let fit = log_regression(&pts).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!((fit.eval(20.0) - (2.0 * 20f64.ln() + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn too_few_points() {
        assert_eq!(
            log_regression(&[(3, 1.0), (4, 2.0)]),
            Err(StatsError::InsufficientPoints(2))
        );
        assert_eq!(
            log_regression(&[(3, 1.0), (3, 2.0), (4, 2.0)]),
            Err(StatsError::InsufficientPoints(2))
        );
    }

    #[test]
    fn moving_average() {
        let ma = moving_average_predict(&[4.0, 4.0, 4.0, 4.0], 2).unwrap();
        assert_eq!(ma.predicted, 4.0);
        assert_eq!(ma.smoothed, vec![4.0; 3]);
        assert_eq!(ma.residual_sd, 0.0);
        assert_eq!(
            moving_average_predict(&[1.0, 2.0, 3.0], 3)
                .unwrap()
                .predicted,
            2.0
        );
        assert_eq!(
            moving_average_predict(&[1.0], 2),
            Err(StatsError::WindowTooLarge { window: 2, len: 1 })
        );
        assert_eq!(
            moving_average_predict(&[1.0], 0),
            Err(StatsError::EmptyWindow)
        );
    }

    #[test]
    fn zero_regression_gives_half() {
        let reg = RegressionFit {
            slope: 0.0,
            intercept: 0.0,
            r_squared: 1.0,
        };
        assert_eq!(predict_p_le_1(12, &reg, 0.3), 0.5);
    }
}
