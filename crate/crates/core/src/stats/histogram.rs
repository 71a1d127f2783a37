use serde::Serialize;

use super::{check_positive, StatsError};

/// Equal-width histogram with densities normalised by the full sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// `count / (m · width)`.
    pub densities: Vec<f64>,
    /// Total sample size `m`, including excluded values.
    pub m: usize,
    /// Samples outside `[edges[0], edges[last]]`.
    pub excluded: usize,
}

impl Histogram {
    pub fn bins(&self) -> usize {
        self.counts.len()
    }

    pub fn width(&self) -> f64 {
        self.edges[1] - self.edges[0]
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges.windows(2).map(|e| 0.5 * (e[0] + e[1])).collect()
    }

    pub fn nonempty_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// `Σ density · width`; 1 when nothing is excluded.
    pub fn integral(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.width()
    }
}

/// Bins spanning `[min, max]`; the maximum lands in the last bin. A constant
/// sample gets a synthetic unit-width span ending at the value.
pub fn build_histogram(samples: &[f64], bins: usize) -> Result<Histogram, StatsError> {
    check_positive(samples)?;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    build_histogram_range(samples, bins, lo, hi)
}

/// Bins spanning `[lo, hi]`. Values outside the range are counted in
/// `excluded` but still contribute to the density normalisation.
pub fn build_histogram_range(
    samples: &[f64],
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<Histogram, StatsError> {
    check_positive(samples)?;
    if bins == 0 {
        return Err(StatsError::NoBins);
    }
    let (lo, hi) = if hi > lo { (lo, hi) } else { (hi - 1.0, hi) };
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|k| if k == bins { hi } else { lo + k as f64 * width })
        .collect();
    let mut counts = vec![0usize; bins];
    let mut excluded = 0;
    for &x in samples {
        if x < lo || x > hi {
            excluded += 1;
            continue;
        }
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let m = samples.len();
    let scale = 1.0 / (m as f64 * width);
    let densities = counts.iter().map(|&c| c as f64 * scale).collect();
    Ok(Histogram {
        edges,
        counts,
        densities,
        m,
        excluded,
    })
}
