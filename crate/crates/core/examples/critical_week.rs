//! Locate the seven-day window with the highest mean IBR penetration.
//!
//! ```text
//! cargo run --release --example critical_week
//! ```

use gridfreq::gridmetrics::Region;
use gridfreq::pipeline::{generate_synthetic, select_critical_week, SyntheticScenario};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scenario = SyntheticScenario {
        pmu_days: 1,
        pmu_rate_hz: 10,
        ..SyntheticScenario::default()
    };
    let data = generate_synthetic(&scenario)?;
    println!("generator peak week starts {}", scenario.peak_week_start());
    for region in Region::ALL {
        let w = select_critical_week(&data.balance, region)?;
        println!(
            "{:<5} {} .. {}  mean {:>6.1}%",
            region.code(),
            w.start_date,
            w.end_date,
            w.mean_penetration_pct
        );
    }
    Ok(())
}
