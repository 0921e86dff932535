//! Uniformly sampled signals with a gap mask.
//!
//! A [`TimeSeries`] is the currency every analysis in this crate consumes:
//! PMU frequency streams, decomposed modes and dynamic components. Sample
//! `i` sits exactly at `start + i / rate`; the start instant is kept as an
//! exact rational number of milliseconds so that slicing a 30 Hz stream at
//! an arbitrary sample never accumulates rounding.

mod filter;
pub mod pmu_csv;

use chrono::{DateTime, TimeZone, Utc};
use num_rational::Ratio;
use thiserror::Error;

pub use filter::lowpass_taps;

/// Default gap-interpolation limit, in samples.
pub const DEFAULT_MAX_GAP_SAMPLES: usize = 30;

/// Default plausibility band for frequency channels, in Hz.
pub const DEFAULT_FREQUENCY_BAND: (f64, f64) = (55.0, 65.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TimeSeriesError {
    #[error("sample rate must be positive, got {num}/{den}")]
    InvalidRate { num: u32, den: u32 },
    #[error("values ({values}) and gap mask ({mask}) differ in length")]
    MaskLength { values: usize, mask: usize },
    #[error("non-finite value {value} at sample {index} is not marked as a gap")]
    NonFinite { index: usize, value: f64 },
    #[error("decimation from {from} Hz to {to} Hz is not an integer factor")]
    NonIntegerFactor { from: String, to: String },
    #[error("series has {0} masked samples; fill gaps before decimating")]
    HasGaps(usize),
    #[error("window [{start_ms}, {end_ms}) ms does not overlap the series")]
    EmptyWindow { start_ms: i64, end_ms: i64 },
    #[error("window start must precede its end")]
    InvertedWindow,
}

/// A positive rational sample rate in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleRate {
    num: u32,
    den: u32,
}

impl SampleRate {
    pub fn new(num: u32, den: u32) -> Result<Self, TimeSeriesError> {
        if num == 0 || den == 0 {
            return Err(TimeSeriesError::InvalidRate { num, den });
        }
        let r = Ratio::new(num, den);
        Ok(Self {
            num: *r.numer(),
            den: *r.denom(),
        })
    }

    /// Integer rate in Hz.
    pub fn hz(rate: u32) -> Result<Self, TimeSeriesError> {
        Self::new(rate, 1)
    }

    pub fn numer(&self) -> u32 {
        self.num
    }

    pub fn denom(&self) -> u32 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Sampling period in milliseconds, exact.
    pub fn period_ms(&self) -> Ratio<i128> {
        Ratio::new(1000 * self.den as i128, self.num as i128)
    }

    /// `self / target` if that ratio is a whole number.
    pub fn integer_factor(&self, target: SampleRate) -> Option<usize> {
        let q = Ratio::new(
            self.num as u64 * target.den as u64,
            self.den as u64 * target.num as u64,
        );
        q.is_integer().then(|| q.to_integer() as usize)
    }
}

impl std::fmt::Display for SampleRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Target rate for [`decimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingSpec {
    pub target_rate: SampleRate,
    pub antialias: bool,
}

impl SamplingSpec {
    pub fn new(target_rate: SampleRate) -> Self {
        Self {
            target_rate,
            antialias: true,
        }
    }
}

/// Uniformly sampled scalar signal.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    start_ms: Ratio<i128>,
    rate: SampleRate,
    values: Vec<f64>,
    gaps: Vec<bool>,
}

impl TimeSeries {
    /// Gap-free series. Every value must be finite.
    pub fn new(start_ms: i64, rate: SampleRate, values: Vec<f64>) -> Result<Self, TimeSeriesError> {
        let gaps = vec![false; values.len()];
        Self::with_gaps(start_ms, rate, values, gaps)
    }

    /// Series with an explicit gap mask. Masked values are replaced by NaN.
    pub fn with_gaps(
        start_ms: i64,
        rate: SampleRate,
        values: Vec<f64>,
        gaps: Vec<bool>,
    ) -> Result<Self, TimeSeriesError> {
        Self::from_parts(Ratio::from_integer(start_ms as i128), rate, values, gaps)
    }

    /// Series whose masked samples are the non-finite entries of `values`.
    pub fn from_nan_gaps(start_ms: i64, rate: SampleRate, values: Vec<f64>) -> Self {
        let gaps = values.iter().map(|v| !v.is_finite()).collect();
        Self::with_gaps(start_ms, rate, values, gaps).expect("mask derived from values")
    }

    fn from_parts(
        start_ms: Ratio<i128>,
        rate: SampleRate,
        mut values: Vec<f64>,
        gaps: Vec<bool>,
    ) -> Result<Self, TimeSeriesError> {
        if values.len() != gaps.len() {
            return Err(TimeSeriesError::MaskLength {
                values: values.len(),
                mask: gaps.len(),
            });
        }
        for (i, (v, &g)) in values.iter_mut().zip(&gaps).enumerate() {
            if g {
                *v = f64::NAN;
            } else if !v.is_finite() {
                return Err(TimeSeriesError::NonFinite { index: i, value: *v });
            }
        }
        Ok(Self {
            start_ms,
            rate,
            values,
            gaps,
        })
    }

    /// Same timing as `self`, new gap-free values (e.g. a decomposed mode).
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, TimeSeriesError> {
        let gaps = vec![false; values.len()];
        Self::from_parts(self.start_ms, self.rate, values, gaps)
    }

    pub fn rate(&self) -> SampleRate {
        self.rate
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn gap_mask(&self) -> &[bool] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn gap_count(&self) -> usize {
        self.gaps.iter().filter(|&&g| g).count()
    }

    pub fn is_gap_free(&self) -> bool {
        !self.gaps.iter().any(|&g| g)
    }

    /// Iterator over non-gap values.
    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.gaps)
            .filter(|(_, &g)| !g)
            .map(|(&v, _)| v)
    }

    /// Exact start instant in epoch milliseconds.
    pub fn start_ms_exact(&self) -> Ratio<i128> {
        self.start_ms
    }

    /// Start instant truncated to millisecond precision.
    pub fn start_epoch(&self) -> DateTime<Utc> {
        let ms = self.start_ms.floor().to_integer() as i64;
        Utc.timestamp_millis_opt(ms).single().expect("timestamp in range")
    }

    /// Exact timestamp of sample `i` in epoch milliseconds.
    pub fn timestamp_exact(&self, i: usize) -> Ratio<i128> {
        self.start_ms + self.rate.period_ms() * Ratio::from_integer(i as i128)
    }

    /// Timestamp of sample `i`, rounded to the nearest millisecond.
    pub fn timestamp_ms(&self, i: usize) -> i64 {
        self.timestamp_exact(i).round().to_integer() as i64
    }

    /// Exact end of the span covered by the series: the timestamp one sample
    /// past the last.
    pub fn end_ms_exact(&self) -> Ratio<i128> {
        self.timestamp_exact(self.len())
    }

    pub fn duration_s(&self) -> f64 {
        self.len() as f64 / self.rate.as_f64()
    }

    /// Index of the first sample whose timestamp is at or after `t_ms`,
    /// clamped to `[0, len]`.
    pub fn index_at_or_after(&self, t_ms: Ratio<i128>) -> usize {
        let offset = (t_ms - self.start_ms) / self.rate.period_ms();
        let idx = offset.ceil().to_integer();
        idx.clamp(0, self.len() as i128) as usize
    }

    /// Sub-series of samples `[from, to)`.
    pub fn sub_range(&self, from: usize, to: usize) -> TimeSeries {
        let to = to.min(self.len());
        let from = from.min(to);
        TimeSeries {
            start_ms: self.timestamp_exact(from),
            rate: self.rate,
            values: self.values[from..to].to_vec(),
            gaps: self.gaps[from..to].to_vec(),
        }
    }

    /// Maximal gap-free runs, in order.
    pub fn segments(&self) -> Vec<TimeSeries> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.len() {
            if self.gaps[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < self.len() && !self.gaps[i] {
                i += 1;
            }
            out.push(self.sub_range(start, i));
        }
        out
    }
}

/// Summary returned by [`validate`].
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ValidationReport {
    pub samples: usize,
    pub gap_count: usize,
    pub longest_gap_run: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub band: (f64, f64),
    pub out_of_band: usize,
}

impl ValidationReport {
    pub fn plausible(&self) -> bool {
        self.out_of_band == 0
    }
}

/// Gap and range report using the default 55–65 Hz plausibility band.
pub fn validate(series: &TimeSeries) -> ValidationReport {
    validate_with_band(series, DEFAULT_FREQUENCY_BAND)
}

pub fn validate_with_band(series: &TimeSeries, band: (f64, f64)) -> ValidationReport {
    let mut longest = 0;
    let mut run = 0;
    for &g in series.gap_mask() {
        run = if g { run + 1 } else { 0 };
        longest = longest.max(run);
    }
    let mut min: Option<f64> = None;
    let mut max: Option<f64> = None;
    let mut out_of_band = 0;
    for v in series.valid_values() {
        min = Some(min.map_or(v, |m| m.min(v)));
        max = Some(max.map_or(v, |m| m.max(v)));
        if v < band.0 || v > band.1 {
            out_of_band += 1;
        }
    }
    ValidationReport {
        samples: series.len(),
        gap_count: series.gap_count(),
        longest_gap_run: longest,
        min,
        max,
        band,
        out_of_band,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum UnfilledReason {
    /// Touches the first or last sample; no bounding value on one side.
    Edge,
    /// Longer than the interpolation limit.
    TooLong,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GapRun {
    pub start: usize,
    pub len: usize,
    pub reason: UnfilledReason,
}

/// Result of [`fill_gaps`]: the repaired series and the runs left masked.
#[derive(Debug, Clone, PartialEq)]
pub struct GapFill {
    pub series: TimeSeries,
    pub filled_runs: usize,
    pub unfilled: Vec<GapRun>,
}

/// Linearly interpolate interior gap runs no longer than `max_gap_samples`.
///
/// Non-gap samples are copied untouched. Leading and trailing runs, and
/// runs over the limit, stay masked and are listed in [`GapFill::unfilled`].
pub fn fill_gaps(series: &TimeSeries, max_gap_samples: usize) -> GapFill {
    let n = series.len();
    let mut values = series.values.clone();
    let mut gaps = series.gaps.clone();
    let mut unfilled = Vec::new();
    let mut filled_runs = 0;
    let mut i = 0;
    while i < n {
        if !series.gaps[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i < n && series.gaps[i] {
            i += 1;
        }
        let len = i - start;
        if start == 0 || i == n {
            unfilled.push(GapRun {
                start,
                len,
                reason: UnfilledReason::Edge,
            });
        } else if len > max_gap_samples {
            unfilled.push(GapRun {
                start,
                len,
                reason: UnfilledReason::TooLong,
            });
        } else {
            let a = series.values[start - 1];
            let b = series.values[i];
            let span = (len + 1) as f64;
            for j in 0..len {
                values[start + j] = a + (b - a) * (j + 1) as f64 / span;
                gaps[start + j] = false;
            }
            filled_runs += 1;
        }
    }
    GapFill {
        series: TimeSeries::from_parts(series.start_ms, series.rate, values, gaps)
            .expect("interpolated values are finite"),
        filled_runs,
        unfilled,
    }
}

/// Reduce the sample rate by an integer factor.
///
/// With `antialias` set, a zero-phase windowed-sinc low-pass with cutoff at
/// 80% of the target Nyquist frequency is evaluated at every retained sample
/// (edges are handled by reflection). Otherwise samples are simply strided.
pub fn decimate(series: &TimeSeries, spec: SamplingSpec) -> Result<TimeSeries, TimeSeriesError> {
    let factor = series.rate.integer_factor(spec.target_rate).ok_or_else(|| {
        TimeSeriesError::NonIntegerFactor {
            from: series.rate.to_string(),
            to: spec.target_rate.to_string(),
        }
    })?;
    let gaps = series.gap_count();
    if gaps > 0 {
        return Err(TimeSeriesError::HasGaps(gaps));
    }
    let values = if factor == 1 {
        series.values.clone()
    } else if spec.antialias {
        let taps = filter::decimation_taps(factor);
        filter::filter_at_stride(&series.values, &taps, factor)
    } else {
        series.values.iter().step_by(factor).copied().collect()
    };
    let n = values.len();
    TimeSeries::from_parts(series.start_ms, spec.target_rate, values, vec![false; n])
}

/// Samples whose timestamps fall in the half-open window `[start, end)`.
pub fn slice_window(
    series: &TimeSeries,
    start: DateTime<Utc>,
    end: DateTime<Utc>,
) -> Result<TimeSeries, TimeSeriesError> {
    slice_window_ms(series, start.timestamp_millis(), end.timestamp_millis())
}

pub fn slice_window_ms(
    series: &TimeSeries,
    start_ms: i64,
    end_ms: i64,
) -> Result<TimeSeries, TimeSeriesError> {
    if start_ms >= end_ms {
        return Err(TimeSeriesError::InvertedWindow);
    }
    let from = series.index_at_or_after(Ratio::from_integer(start_ms as i128));
    let to = series.index_at_or_after(Ratio::from_integer(end_ms as i128));
    if from >= to {
        return Err(TimeSeriesError::EmptyWindow { start_ms, end_ms });
    }
    Ok(series.sub_range(from, to))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hz(r: u32) -> SampleRate {
        SampleRate::hz(r).unwrap()
    }

    fn gappy(values: &[Option<f64>]) -> TimeSeries {
        let v = values.iter().map(|x| x.unwrap_or(f64::NAN)).collect();
        TimeSeries::from_nan_gaps(0, hz(1), v)
    }

    #[test]
    fn validate_constant() {
        let s = TimeSeries::new(0, hz(60), vec![60.0; 60]).unwrap();
        let r = validate(&s);
        assert_eq!(r.gap_count, 0);
        assert_eq!(r.min, Some(60.0));
        assert_eq!(r.max, Some(60.0));
        assert!(r.plausible());
    }

    #[test]
    fn validate_gap_run_and_band() {
        let mut v = vec![Some(60.0); 10];
        v[3] = None;
        v[4] = None;
        v[5] = None;
        v[8] = Some(70.0);
        let r = validate(&gappy(&v));
        assert_eq!(r.longest_gap_run, 3);
        assert_eq!(r.gap_count, 3);
        assert_eq!(r.out_of_band, 1);
        assert!(!r.plausible());
    }

    #[test]
    fn fill_single_gap() {
        let f = fill_gaps(&gappy(&[Some(1.0), None, Some(3.0)]), 1);
        assert_eq!(f.series.values(), &[1.0, 2.0, 3.0]);
        assert!(f.series.is_gap_free());
        assert_eq!(f.filled_runs, 1);
    }

    #[test]
    fn fill_two_gap_run() {
        let f = fill_gaps(&gappy(&[Some(1.0), None, None, Some(4.0)]), 2);
        assert_eq!(f.series.values(), &[1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn long_run_stays_masked() {
        let f = fill_gaps(&gappy(&[Some(1.0), None, None, None, Some(5.0)]), 2);
        assert_eq!(f.series.gap_count(), 3);
        assert_eq!(
            f.unfilled,
            vec![GapRun {
                start: 1,
                len: 3,
                reason: UnfilledReason::TooLong
            }]
        );
    }

    #[test]
    fn edge_runs_reported() {
        let f = fill_gaps(&gappy(&[None, Some(1.0), Some(2.0), None, None]), 30);
        assert_eq!(f.series.gap_count(), 3);
        assert_eq!(f.unfilled.len(), 2);
        assert!(f.unfilled.iter().all(|r| r.reason == UnfilledReason::Edge));
    }

    #[test]
    fn decimate_constant() {
        let s = TimeSeries::new(1_000, hz(30), vec![60.0; 30 * 120]).unwrap();
        let d = decimate(&s, SamplingSpec::new(hz(1))).unwrap();
        assert_eq!(d.len(), 120);
        assert_eq!(d.start_ms_exact(), s.start_ms_exact());
        for v in d.values() {
            assert!((v - 60.0).abs() < 1e-12);
        }
    }

    #[test]
    fn decimate_rejects_fractional_factor() {
        let s = TimeSeries::new(0, hz(30), vec![60.0; 300]).unwrap();
        let err = decimate(&s, SamplingSpec::new(hz(7))).unwrap_err();
        assert!(matches!(err, TimeSeriesError::NonIntegerFactor { .. }));
        assert!(err.to_string().contains("not an integer factor"));
    }

    #[test]
    fn decimate_rejects_gaps() {
        let s = gappy(&[Some(1.0), None, Some(1.0), Some(1.0)]);
        let err = decimate(&s, SamplingSpec::new(SampleRate::new(1, 2).unwrap()));
        assert_eq!(err.unwrap_err(), TimeSeriesError::HasGaps(1));
    }

    #[test]
    fn decimate_without_antialias_strides() {
        let s = TimeSeries::new(0, hz(4), (0..12).map(f64::from).collect()).unwrap();
        let spec = SamplingSpec {
            target_rate: hz(1),
            antialias: false,
        };
        assert_eq!(decimate(&s, spec).unwrap().values(), &[0.0, 4.0, 8.0]);
    }

    #[test]
    fn slice_three_hours() {
        let s = TimeSeries::new(0, hz(1), vec![60.0; 86_400]).unwrap();
        let w = slice_window_ms(&s, 9 * 3_600_000, 12 * 3_600_000).unwrap();
        assert_eq!(w.len(), 10_800);
        assert_eq!(w.timestamp_ms(0), 9 * 3_600_000);
    }

    #[test]
    fn slice_full_span_is_identity() {
        let s = TimeSeries::new(5, hz(30), vec![1.0; 90]).unwrap();
        let w = slice_window_ms(&s, 5, 3_005).unwrap();
        assert_eq!(w, s);
    }

    #[test]
    fn slice_across_midnight() {
        // Two days of 1 Hz data; 21:00 to 00:00 of the following day.
        let s = TimeSeries::new(0, hz(1), vec![0.0; 2 * 86_400]).unwrap();
        let w = slice_window_ms(&s, 21 * 3_600_000, 24 * 3_600_000).unwrap();
        assert_eq!(w.len(), 10_800);
        // Crossing into the next day's samples.
        let w = slice_window_ms(&s, 22 * 3_600_000, 25 * 3_600_000).unwrap();
        assert_eq!(w.len(), 10_800);
        assert_eq!(w.timestamp_ms(w.len() - 1), 25 * 3_600_000 - 1_000);
    }

    #[test]
    fn slice_thirty_hz_keeps_exact_phase() {
        let s = TimeSeries::new(0, hz(30), vec![0.0; 300]).unwrap();
        let w = slice_window_ms(&s, 40, 10_000).unwrap();
        // First sample at or after 40 ms is sample 2 (66.67 ms).
        assert_eq!(w.start_ms_exact(), Ratio::new(200, 3));
        assert_eq!(w.len(), 298);
    }

    #[test]
    fn empty_window_rejected() {
        let s = TimeSeries::new(0, hz(1), vec![0.0; 10]).unwrap();
        assert!(matches!(
            slice_window_ms(&s, 20_000, 30_000),
            Err(TimeSeriesError::EmptyWindow { .. })
        ));
        assert_eq!(
            slice_window_ms(&s, 5, 5),
            Err(TimeSeriesError::InvertedWindow)
        );
    }

    #[test]
    fn rejects_unmasked_nan() {
        let err = TimeSeries::new(0, hz(1), vec![1.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, TimeSeriesError::NonFinite { index: 1, .. }));
    }

    #[test]
    fn segments_split_on_gaps() {
        let s = gappy(&[Some(1.0), Some(2.0), None, Some(3.0), None, None, Some(4.0)]);
        let segs = s.segments();
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[1].values(), &[3.0]);
        assert_eq!(segs[1].timestamp_ms(0), 3_000);
    }

    #[test]
    fn rate_factor() {
        assert_eq!(hz(60).integer_factor(hz(1)), Some(60));
        assert_eq!(hz(30).integer_factor(hz(60)), None);
        assert_eq!(
            hz(1).integer_factor(SampleRate::new(1, 10).unwrap()),
            Some(10)
        );
        assert!(SampleRate::new(0, 1).is_err());
    }
}
