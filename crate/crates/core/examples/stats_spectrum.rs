//! Dispersion, histogram, autocorrelation and spectral peaks of a noisy
//! frequency record with a 2.5 Hz oscillation.
//!
//! ```text
//! cargo run --release --example stats_spectrum
//! ```

use std::f64::consts::PI;

use gridfreq::stats::{acf, histogram, spectrum_peaks, std_dev};
use gridfreq::timeseries::{SampleRate, TimeSeries};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let noise = Normal::new(0.0, 0.003)?;
    let values: Vec<f64> = (0..18_000)
        .map(|i| {
            let t = i as f64 / 30.0;
            60.0 + 0.004 * (2.0 * PI * 2.5 * t).sin() + noise.sample(&mut rng)
        })
        .collect();
    let series = TimeSeries::new(0, SampleRate::hz(30)?, values)?;

    println!("sigma_f {:.5} Hz", std_dev(&series)?);
    let h = histogram(&series, 1e-3)?;
    println!(
        "histogram: {} bins of 1 mHz, skewness {:.3}",
        h.histogram.counts.len(),
        h.skewness.unwrap_or(f64::NAN)
    );
    let r = acf(&series, 6)?;
    println!("acf r(1..=6) {:?}", r[1..].iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>());
    let peaks = spectrum_peaks(&series, 1e-3)?;
    for p in peaks.peaks.iter().take(3) {
        println!("peak {:.3} Hz amplitude {:.4} Hz", p.freq_hz, p.amplitude);
    }
    Ok(())
}
