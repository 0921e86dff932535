//! Share of wind curtailment by reason over a morning hour range.
//!
//! ```text
//! cargo run --release --example curtailment_breakdown
//! ```

use gridfreq::gridmetrics::{curtailment_breakdown, hourly_curtailment_profile};
use gridfreq::pipeline::{generate_synthetic, SyntheticScenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = SyntheticScenario {
        pmu_days: 1,
        pmu_rate_hz: 10,
        ..SyntheticScenario::default()
    };
    let data = generate_synthetic(&scenario)?;
    let b = curtailment_breakdown(&data.curtailment, (8, 11));
    println!("{} of {} events fall in hours 8-11", b.total, data.curtailment.len());
    for s in &b.shares {
        println!("{:<20} {:>6} {:>6.2}%", s.reason.code(), s.count, s.percentage);
    }
    let profile = hourly_curtailment_profile(&data.curtailment);
    let (peak, mw) = profile
        .iter()
        .enumerate()
        .fold((0, 0.0), |best, (h, &v)| if v > best.1 { (h, v) } else { best });
    println!("most curtailed hour: {peak:02}:00 with {mw:.0} MW");
    Ok(())
}
