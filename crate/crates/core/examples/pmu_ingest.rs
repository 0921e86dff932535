//! PMU CSV round trip, gap interpolation and decimation.
//!
//! ```text
//! cargo run --release --example pmu_ingest
//! ```

use gridfreq::timeseries::pmu_csv::{read_pmu_csv, write_pmu_csv};
use gridfreq::timeseries::{decimate, fill_gaps, SampleRate, SamplingSpec, TimeSeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rate = SampleRate::hz(30)?;
    let mut values: Vec<f64> = (0..600).map(|i| 60.0 + 0.01 * (i as f64 * 0.05).sin()).collect();
    for v in &mut values[100..104] {
        *v = f64::NAN;
    }
    let series = TimeSeries::from_nan_gaps(1_689_562_800_000, rate, values);

    let mut csv = Vec::new();
    write_pmu_csv(&mut csv, &series)?;
    let back = read_pmu_csv(csv.as_slice(), rate)?;
    println!("{} rows read back, {} gap samples", back.len(), back.gap_count());

    let filled = fill_gaps(&back, 30);
    println!(
        "{} runs interpolated, {} left masked",
        filled.filled_runs,
        filled.unfilled.len()
    );

    let slow = decimate(&filled.series, SamplingSpec::new(SampleRate::hz(10)?))?;
    println!("decimated to {} Hz: {} samples", slow.rate().as_f64(), slow.len());
    Ok(())
}
