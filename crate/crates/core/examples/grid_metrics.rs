//! Center-of-inertia frequency, IBR penetration, net load and ramps.
//!
//! ```text
//! cargo run --release --example grid_metrics
//! ```

use chrono::NaiveDate;
use gridfreq::gridmetrics::{
    coi_frequency, ibr_penetration, net_load, ramp_histogram, ramps_over_runs, system_aggregate,
    system_penetration, MachineState, Region, RegionalHourRecord,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let machines = [MachineState::new(4.0, 60.02)?, MachineState::new(2.0, 59.93)?];
    println!("COI frequency {:.5} Hz", coi_frequency(&machines)?);

    let date = NaiveDate::from_ymd_opt(2023, 7, 17).unwrap();
    let mut records = Vec::new();
    for hour in 0..24u8 {
        let sun = (f64::from(hour) - 12.0).abs().min(6.0);
        let solar = 1500.0 * (1.0 - sun / 6.0);
        for (region, demand, wind) in [
            (Region::N, 7_500.0, 1_200.0),
            (Region::NE, 12_000.0, 9_000.0),
            (Region::S, 13_000.0, 1_500.0),
            (Region::SeCw, 45_000.0, 500.0),
        ] {
            records.push(RegionalHourRecord::new(
                region,
                date,
                hour,
                2_000.0,
                1_000.0,
                wind,
                solar,
                0.3 * solar,
                demand,
            )?);
        }
    }
    let ne: Vec<&RegionalHourRecord> = records.iter().filter(|r| r.region == Region::NE).collect();
    let noon = ne[12];
    println!("NE penetration at noon {:.1}%", ibr_penetration(noon)?);
    let system = system_aggregate(&records);
    println!("system penetration at noon {:.1}%", system_penetration(&system[12]).unwrap_or(f64::NAN));

    let series: Vec<_> = system.iter().map(|h| (h.timestamp(), net_load(h))).collect();
    for horizon in [1, 3] {
        let ramps = ramps_over_runs(&series, horizon);
        let values: Vec<f64> = ramps.iter().map(|r| r.ramp_mw).collect();
        let hist = ramp_histogram(&values, 500.0)?;
        let steepest = values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        println!(
            "{horizon} h ramps: {} values, {} bins, steepest {steepest:.0} MW",
            values.len(),
            hist.counts.len()
        );
    }
    Ok(())
}
