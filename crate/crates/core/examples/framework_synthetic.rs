//! Full framework run on a synthetic week.
//!
//! ```text
//! cargo run --release --example framework_synthetic -- [rate_hz] [out_dir]
//! ```

use std::time::Instant;

use gridfreq::pipeline::{
    evaluate_framework, generate_synthetic, FrameworkConfig, FrameworkInputs, GroupLabel, SyntheticScenario,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rate: u32 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(10);
    let out = args.next();

    let scenario = SyntheticScenario {
        pmu_rate_hz: rate,
        ..SyntheticScenario::default()
    };
    let t = Instant::now();
    let data = generate_synthetic(&scenario)?;
    println!("generated {} sites at {rate} Hz in {:.1?}", data.pmu.len(), t.elapsed());

    let inputs = FrameworkInputs {
        balance: data.balance,
        inertia_supplied: true,
        pmu: data.pmu,
    };
    let t = Instant::now();
    let output = evaluate_framework(&inputs, &FrameworkConfig::default())?;
    println!("framework finished in {:.1?}", t.elapsed());

    let r = &output.report;
    let w = &r.critical_week;
    println!(
        "critical week {} .. {} ({} mean {:.1}%)",
        w.start_date, w.end_date, w.region, w.mean_penetration_pct
    );
    println!("{} VMD windows, {} stopped at max_iters", r.extraction.windows, r.extraction.unconverged_windows);
    for label in GroupLabel::ALL {
        let g = r.group(label).expect("both groups reported");
        for s in &g.sites {
            println!(
                "{:<8} {:<2} sigma_f {:>9.6} Hz  skew {:>7.3}",
                label.code(),
                s.site,
                s.sigma_f_hz.unwrap_or(f64::NAN),
                s.skewness.unwrap_or(f64::NAN)
            );
        }
    }
    for c in &r.correlations.sites {
        println!(
            "{:<2} r_inertia {:>7.3}  r_ibr {:>7.3}  ({} h)",
            c.site,
            c.r_inertia.unwrap_or(f64::NAN),
            c.r_ibr.unwrap_or(f64::NAN),
            c.hours
        );
    }
    for o in &r.oscillations {
        let top = o.peaks.first().map(|p| p.freq_hz).unwrap_or(f64::NAN);
        println!("{:<2} oscillation {:<5} top peak {:.3} Hz", o.site, o.oscillation_flagged, top);
    }
    if let Some(dir) = out {
        output.write_to(std::path::Path::new(&dir))?;
        println!("report written to {dir}");
    }
    Ok(())
}
