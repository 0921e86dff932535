use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use super::StatsError;
use crate::timeseries::TimeSeries;

/// Minimum input length for [`spectrum_peaks`].
pub const MIN_SPECTRUM_LEN: usize = 64;

/// One-sided Hann-windowed amplitude spectrum, DC bin dropped.
///
/// Amplitudes are scaled so a tone `a cos(2 pi f t)` centred on a bin reads `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    /// Bin spacing: rate / segment length.
    pub resolution_hz: f64,
    pub freqs_hz: Vec<f64>,
    pub amplitudes: Vec<f64>,
}

impl Spectrum {
    pub fn median_amplitude(&self) -> f64 {
        if self.amplitudes.is_empty() {
            return 0.0;
        }
        let mut a = self.amplitudes.clone();
        a.sort_by(f64::total_cmp);
        let mid = a.len() / 2;
        if a.len() % 2 == 0 {
            0.5 * (a[mid - 1] + a[mid])
        } else {
            a[mid]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumPeak {
    pub freq_hz: f64,
    pub amplitude: f64,
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeakReport {
    pub resolution_hz: f64,
    /// Sorted by amplitude, largest first.
    pub peaks: Vec<SpectrumPeak>,
}

fn hann(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| 0.5 - 0.5 * (2.0 * PI * i as f64 / n as f64).cos())
        .collect()
}

/// Amplitude spectrum of one segment, mean removed before windowing.
pub fn amplitude_spectrum(values: &[f64], rate_hz: f64) -> Spectrum {
    welch_spectrum(values, rate_hz, values.len())
}

/// Average of the amplitude spectra of consecutive non-overlapping segments
/// of `segment_len` samples; a trailing partial segment is dropped.
pub fn welch_spectrum(values: &[f64], rate_hz: f64, segment_len: usize) -> Spectrum {
    let n = segment_len;
    let half = n / 2;
    let resolution_hz = rate_hz / n as f64;
    let freqs_hz: Vec<f64> = (1..=half).map(|j| j as f64 * resolution_hz).collect();
    let mut amplitudes = vec![0.0; half];
    let segments: Vec<&[f64]> = values.chunks_exact(n.max(1)).collect();
    if n < 2 || segments.is_empty() {
        return Spectrum {
            resolution_hz,
            freqs_hz,
            amplitudes,
        };
    }
    let window = hann(n);
    let gain: f64 = window.iter().sum();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for seg in &segments {
        let m = seg.iter().sum::<f64>() / n as f64;
        for ((b, x), w) in buf.iter_mut().zip(seg.iter()).zip(&window) {
            *b = Complex64::new((x - m) * w, 0.0);
        }
        fft.process(&mut buf);
        for (j, a) in amplitudes.iter_mut().enumerate() {
            // The Nyquist bin of an even-length transform has no mirror image.
            let scale = if 2 * (j + 1) == n { 1.0 } else { 2.0 };
            *a += scale * buf[j + 1].norm() / gain;
        }
    }
    let count = segments.len() as f64;
    amplitudes.iter_mut().for_each(|a| *a /= count);
    Spectrum {
        resolution_hz,
        freqs_hz,
        amplitudes,
    }
}

/// Strict local maxima with topographic prominence of at least
/// `min_prominence`, sorted by amplitude descending.
pub fn find_peaks(spectrum: &Spectrum, min_prominence: f64) -> Vec<SpectrumPeak> {
    let a = &spectrum.amplitudes;
    let mut peaks = Vec::new();
    for i in 1..a.len().saturating_sub(1) {
        if !(a[i] > a[i - 1] && a[i] > a[i + 1]) {
            continue;
        }
        let h = a[i];
        let mut left_min = h;
        for &v in a[..i].iter().rev() {
            if v > h {
                break;
            }
            left_min = left_min.min(v);
        }
        let mut right_min = h;
        for &v in &a[i + 1..] {
            if v > h {
                break;
            }
            right_min = right_min.min(v);
        }
        let prominence = h - left_min.max(right_min);
        if prominence >= min_prominence {
            peaks.push(SpectrumPeak {
                freq_hz: spectrum.freqs_hz[i],
                amplitude: h,
                prominence,
            });
        }
    }
    peaks.sort_by(|x, y| y.amplitude.total_cmp(&x.amplitude).then(x.freq_hz.total_cmp(&y.freq_hz)));
    peaks
}

/// FFT peak detection over a gap-free series of at least 64 samples.
pub fn spectrum_peaks(series: &TimeSeries, min_prominence: f64) -> Result<PeakReport, StatsError> {
    let gaps = series.gap_count();
    if gaps > 0 {
        return Err(StatsError::Gaps(gaps));
    }
    if series.len() < MIN_SPECTRUM_LEN {
        return Err(StatsError::TooFewSamples {
            need: MIN_SPECTRUM_LEN,
            got: series.len(),
        });
    }
    let spectrum = amplitude_spectrum(series.values(), series.rate().as_f64());
    Ok(PeakReport {
        resolution_hz: spectrum.resolution_hz,
        peaks: find_peaks(&spectrum, min_prominence),
    })
}
