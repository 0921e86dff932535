//! Statistics over frequency signals: dispersion, histograms with skewness,
//! Pearson correlation, autocorrelation and FFT peak detection.

pub mod export;
mod spectrum;

use serde::Serialize;
use thiserror::Error;

use crate::timeseries::TimeSeries;

pub use spectrum::{amplitude_spectrum, find_peaks, spectrum_peaks, welch_spectrum, PeakReport, Spectrum, SpectrumPeak};

/// Default histogram bin width for dynamic-component plots: 1 mHz.
pub const DEFAULT_FREQUENCY_BIN_HZ: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("need at least {need} samples, got {got}")]
    TooFewSamples { need: usize, got: usize },
    #[error("bin width must be positive, got {0}")]
    BinWidth(f64),
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("correlation undefined: {0} sequence is constant")]
    Constant(&'static str),
    #[error("series has {0} masked samples")]
    Gaps(usize),
    #[error("non-finite value for metric `{0}`")]
    NonFinite(String),
}

/// A named scalar with the window and signal it was computed on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub metric: String,
    pub value: f64,
    /// `[start, end)` in epoch milliseconds.
    pub window: (i64, i64),
    pub source: String,
}

impl StatReport {
    pub fn new(
        metric: impl Into<String>,
        value: f64,
        window: (i64, i64),
        source: impl Into<String>,
    ) -> Result<Self, StatsError> {
        let metric = metric.into();
        if !value.is_finite() {
            return Err(StatsError::NonFinite(metric));
        }
        Ok(Self {
            metric,
            value,
            window,
            source: source.into(),
        })
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation.
pub fn std_dev_values(values: &[f64]) -> Result<f64, StatsError> {
    if values.len() < 2 {
        return Err(StatsError::TooFewSamples {
            need: 2,
            got: values.len(),
        });
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    Ok((ss / values.len() as f64).sqrt())
}

/// Population standard deviation over the non-gap samples of `series`.
pub fn std_dev(series: &TimeSeries) -> Result<f64, StatsError> {
    let v: Vec<f64> = series.valid_values().collect();
    std_dev_values(&v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Normalized {
    pub values: Vec<f64>,
    /// Fewer than two values, or all equal; every output is 0.
    pub degenerate: bool,
}

/// Min-max normalization onto `[0, 1]`.
pub fn normalize_across_groups(values: &[f64]) -> Normalized {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.len() < 2 || !(hi > lo) {
        return Normalized {
            values: vec![0.0; values.len()],
            degenerate: true,
        };
    }
    Normalized {
        values: values.iter().map(|v| (v - lo) / (hi - lo)).collect(),
        degenerate: false,
    }
}

/// Counts over half-open bins `[k w, (k + 1) w)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histogram {
    pub bin_width: f64,
    /// Index `k` of the first bin.
    pub first_bin: i64,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Bins span exactly from the bin holding the minimum to the bin holding
    /// the maximum.
    pub fn from_values(values: &[f64], bin_width: f64) -> Result<Self, StatsError> {
        if !(bin_width > 0.0 && bin_width.is_finite()) {
            return Err(StatsError::BinWidth(bin_width));
        }
        if values.is_empty() {
            return Err(StatsError::TooFewSamples { need: 1, got: 0 });
        }
        let bin = |v: f64| (v / bin_width).floor() as i64;
        let lo = values.iter().map(|&v| bin(v)).min().expect("non-empty");
        let hi = values.iter().map(|&v| bin(v)).max().expect("non-empty");
        let mut counts = vec![0u64; (hi - lo + 1) as usize];
        for &v in values {
            counts[(bin(v) - lo) as usize] += 1;
        }
        Ok(Self {
            bin_width,
            first_bin: lo,
            counts,
        })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(lower edge, upper edge, count)` per bin.
    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.counts.iter().enumerate().map(move |(i, &c)| {
            let k = (self.first_bin + i as i64) as f64;
            (k * self.bin_width, (k + 1.0) * self.bin_width, c)
        })
    }

    /// Count in the bin containing `value`.
    pub fn count_at(&self, value: f64) -> u64 {
        let k = (value / self.bin_width).floor() as i64 - self.first_bin;
        if k < 0 {
            return 0;
        }
        self.counts.get(k as usize).copied().unwrap_or(0)
    }
}

/// Adjusted Fisher-Pearson sample skewness `G1`.
///
/// `None` for fewer than three samples or zero variance.
pub fn skewness(values: &[f64]) -> Option<f64> {
    let n = values.len();
    if n < 3 {
        return None;
    }
    let m = mean(values);
    let nf = n as f64;
    let m2 = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / nf;
    let m3 = values.iter().map(|v| (v - m).powi(3)).sum::<f64>() / nf;
    if m2 <= 0.0 {
        return None;
    }
    let g1 = m3 / m2.powf(1.5);
    Some(g1 * (nf * (nf - 1.0)).sqrt() / (nf - 2.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramReport {
    pub histogram: Histogram,
    pub skewness: Option<f64>,
    pub samples: usize,
}

/// Histogram of the non-gap samples, with their skewness.
pub fn histogram(series: &TimeSeries, bin_width: f64) -> Result<HistogramReport, StatsError> {
    let v: Vec<f64> = series.valid_values().collect();
    histogram_values(&v, bin_width)
}

pub fn histogram_values(values: &[f64], bin_width: f64) -> Result<HistogramReport, StatsError> {
    Ok(HistogramReport {
        histogram: Histogram::from_values(values, bin_width)?,
        skewness: skewness(values),
        samples: values.len(),
    })
}

/// Pearson's linear correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < 2 {
        return Err(StatsError::TooFewSamples {
            need: 2,
            got: x.len(),
        });
    }
    let mx = mean(x);
    let my = mean(y);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::Constant("first"));
    }
    if syy == 0.0 {
        return Err(StatsError::Constant("second"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Correlations of hourly fluctuation dispersion with its drivers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriverCorrelation {
    /// Absent when no inertia data was supplied.
    pub r_inertia: Option<f64>,
    pub r_ibr: f64,
    pub hours: usize,
}

/// Pearson of hourly `sigma_f` against hourly inertia and IBR penetration.
///
/// The three sequences must be aligned hour by hour.
pub fn correlate_fluctuation_drivers(
    sigma_f: &[f64],
    inertia: Option<&[f64]>,
    penetration: &[f64],
) -> Result<DriverCorrelation, StatsError> {
    if sigma_f.len() < 3 {
        return Err(StatsError::TooFewSamples {
            need: 3,
            got: sigma_f.len(),
        });
    }
    let r_inertia = inertia.map(|h| pearson(sigma_f, h)).transpose()?;
    let r_ibr = pearson(sigma_f, penetration)?;
    Ok(DriverCorrelation {
        r_inertia,
        r_ibr,
        hours: sigma_f.len(),
    })
}

/// Dispersion of one clock hour of a signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourlySigma {
    /// Start of the hour, epoch ms.
    pub hour_start_ms: i64,
    pub sigma: f64,
    pub samples: usize,
}

const HOUR_MS: i64 = 3_600_000;

/// Standard deviation over each clock hour touched by `series`, skipping
/// hours with fewer than `min_samples` valid samples.
pub fn hourly_sigma(series: &TimeSeries, min_samples: usize) -> Vec<HourlySigma> {
    let mut out = Vec::new();
    let mut current: Option<i64> = None;
    let mut bucket: Vec<f64> = Vec::new();
    let mut flush = |hour: Option<i64>, bucket: &mut Vec<f64>| {
        if let Some(h) = hour {
            if bucket.len() >= min_samples.max(2) {
                out.push(HourlySigma {
                    hour_start_ms: h,
                    sigma: std_dev_values(bucket).expect("at least two samples"),
                    samples: bucket.len(),
                });
            }
        }
        bucket.clear();
    };
    for i in 0..series.len() {
        let hour = series.timestamp_exact(i).floor().to_integer() as i64;
        let hour = hour.div_euclid(HOUR_MS) * HOUR_MS;
        if current != Some(hour) {
            flush(current, &mut bucket);
            current = Some(hour);
        }
        if !series.gap_mask()[i] {
            bucket.push(series.values()[i]);
        }
    }
    flush(current, &mut bucket);
    out
}

/// Autocorrelation `r(tau)` for `tau = 0..=max_lag`, each lag computed as
/// Pearson between the series and its shifted copy over their overlap.
pub fn acf(series: &TimeSeries, max_lag: usize) -> Result<Vec<f64>, StatsError> {
    let gaps = series.gap_count();
    if gaps > 0 {
        return Err(StatsError::Gaps(gaps));
    }
    acf_values(series.values(), max_lag)
}

pub fn acf_values(x: &[f64], max_lag: usize) -> Result<Vec<f64>, StatsError> {
    let n = x.len();
    if n <= max_lag + 1 {
        return Err(StatsError::TooFewSamples {
            need: max_lag + 2,
            got: n,
        });
    }
    let mut out = Vec::with_capacity(max_lag + 1);
    // r(0) is 1 by definition; still reject a constant series.
    pearson(x, x)?;
    out.push(1.0);
    for lag in 1..=max_lag {
        out.push(pearson(&x[..n - lag], &x[lag..])?);
    }
    Ok(out)
}
