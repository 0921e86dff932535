use chrono::{Duration, NaiveDate};
use gridfreq::gridmetrics::{
    coi_frequency, curtailment_breakdown, ibr_penetration, net_load_ramps, CurtailReason, CurtailmentRecord,
    MachineState, Region, RegionalHourRecord,
};
use gridfreq::pipeline::select_critical_week;
use gridfreq::stats::{acf_values, amplitude_spectrum, pearson, Histogram};
use gridfreq::timeseries::{SampleRate, TimeSeries};
use gridfreq::vmd::{vmd_decompose, VmdConfig};
use proptest::prelude::*;

fn non_constant(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, len).prop_filter("needs spread", |v| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo > 1e-3
    })
}

fn record(date: NaiveDate, hour: u8, mw: [f64; 4]) -> RegionalHourRecord {
    let [wind, solar, der, demand] = mw;
    RegionalHourRecord::new(Region::NE, date, hour, 100.0, 50.0, wind, solar, der, demand).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pearson_is_symmetric_and_affine_invariant(
        xy in non_constant(3..40).prop_flat_map(|x| {
            let n = x.len();
            (Just(x), non_constant(n..n + 1))
        }),
        a in 0.1..10.0f64,
        b in -50.0..50.0f64,
    ) {
        let (x, y) = xy;
        let r = pearson(&x, &y).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
        let xs: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((r - pearson(&xs, &y).unwrap()).abs() < 1e-9);
        let xn: Vec<f64> = x.iter().map(|v| -a * v + b).collect();
        prop_assert!((r + pearson(&xn, &y).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn acf_starts_at_one_and_stays_bounded(x in non_constant(10..60), lag in 0usize..5) {
        let r = acf_values(&x, lag).unwrap();
        prop_assert_eq!(r.len(), lag + 1);
        prop_assert_eq!(r[0], 1.0);
        prop_assert!(r.iter().all(|v| (-1.0..=1.0).contains(v)));
    }

    #[test]
    fn histogram_counts_every_value(x in prop::collection::vec(-1.0..1.0f64, 1..200), w in 1e-3..0.5f64) {
        let h = Histogram::from_values(&x, w).unwrap();
        prop_assert_eq!(h.total(), x.len() as u64);
        for v in &x {
            prop_assert!(h.count_at(*v) >= 1);
        }
    }

    #[test]
    fn coi_lies_between_extremes_and_ignores_inertia_scale(
        machines in prop::collection::vec((0.1..10.0f64, 59.5..60.5f64), 1..8),
        scale in 0.1..100.0f64,
    ) {
        let m: Vec<MachineState> = machines.iter().map(|&(h, f)| MachineState::new(h, f).unwrap()).collect();
        let s: Vec<MachineState> = machines.iter().map(|&(h, f)| MachineState::new(h * scale, f).unwrap()).collect();
        let f = coi_frequency(&m).unwrap();
        let lo = machines.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let hi = machines.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(f >= lo - 1e-12 && f <= hi + 1e-12);
        prop_assert!((f - coi_frequency(&s).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn penetration_is_scale_free(
        mw in (0.0..5000.0f64, 0.0..2000.0f64, 0.0..500.0f64, 1.0..20000.0f64),
        scale in 0.01..100.0f64,
    ) {
        let date = NaiveDate::from_ymd_opt(2023, 1, 1).unwrap();
        let a = record(date, 0, [mw.0, mw.1, mw.2, mw.3]);
        let b = record(date, 0, [mw.0 * scale, mw.1 * scale, mw.2 * scale, mw.3 * scale]);
        let (pa, pb) = (ibr_penetration(&a).unwrap(), ibr_penetration(&b).unwrap());
        prop_assert!((pa - pb).abs() <= 1e-9 * pa.abs().max(1.0));
    }

    #[test]
    fn hourly_ramps_telescope(nl in prop::collection::vec(-1e4..1e4f64, 2..100), h in 1usize..13) {
        let r1 = net_load_ramps(&nl, 1).unwrap();
        let total: f64 = r1.iter().sum();
        prop_assert!((total - (nl[nl.len() - 1] - nl[0])).abs() < 1e-6);
        if nl.len() > h {
            let rh = net_load_ramps(&nl, h).unwrap();
            prop_assert_eq!(rh.len(), nl.len() - h);
            for (t, v) in rh.iter().enumerate() {
                let sum: f64 = r1[t..t + h].iter().sum();
                prop_assert!((v - sum).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn curtailment_shares_sum_to_100(reasons in prop::collection::vec((0usize..3, 0u8..24), 1..300)) {
        let date = NaiveDate::from_ymd_opt(2023, 1, 1).unwrap();
        let events: Vec<CurtailmentRecord> = reasons
            .iter()
            .map(|&(k, hour)| CurtailmentRecord {
                region: Region::NE,
                date,
                hour,
                curtailed_wind_mw: 10.0,
                reason: CurtailReason::ALL[k],
            })
            .collect();
        let b = curtailment_breakdown(&events, (0, 24));
        prop_assert_eq!(b.total, events.len() as u64);
        let pct: f64 = b.shares.iter().map(|s| s.percentage).sum();
        prop_assert!((pct - 100.0).abs() < 1e-9);
        prop_assert!(b.shares.iter().all(|s| s.count > 0));
    }

    #[test]
    fn critical_week_ignores_power_of_two_scaling(
        levels in prop::collection::vec(1.0..100.0f64, 7..16),
        exp in -4i32..5,
    ) {
        let start = NaiveDate::from_ymd_opt(2023, 7, 1).unwrap();
        let scale = 2f64.powi(exp);
        let build = |s: f64| -> Vec<RegionalHourRecord> {
            levels
                .iter()
                .enumerate()
                .flat_map(|(d, &lvl)| {
                    let date = start + Duration::days(d as i64);
                    (0..24u8).map(move |h| record(date, h, [lvl * s, (h as f64) * s, 1.0 * s, 200.0 * s]))
                })
                .collect()
        };
        let a = select_critical_week(&build(1.0), Region::NE).unwrap();
        let b = select_critical_week(&build(scale), Region::NE).unwrap();
        prop_assert_eq!(a.start_date, b.start_date);
        prop_assert_eq!(a.mean_penetration_pct, b.mean_penetration_pct);
    }

    #[test]
    fn spectrum_ignores_dc_offset(x in prop::collection::vec(-1.0..1.0f64, 16..128), offset in -100.0..100.0f64) {
        let a = amplitude_spectrum(&x, 30.0);
        let shifted: Vec<f64> = x.iter().map(|v| v + offset).collect();
        let b = amplitude_spectrum(&shifted, 30.0);
        prop_assert_eq!(a.freqs_hz.len(), b.freqs_hz.len());
        for (p, q) in a.amplitudes.iter().zip(&b.amplitudes).skip(1) {
            prop_assert!((p - q).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn vmd_modes_plus_residual_reconstruct_input(
        tones in prop::collection::vec((0.1..10.0f64, 0.001..0.05f64, 0.0..6.28f64), 0..3),
        noise in prop::collection::vec(-0.002..0.002f64, 256..257),
        modes in 1usize..4,
    ) {
        let values: Vec<f64> = noise
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let t = i as f64 / 30.0;
                60.0 + 0.01 * t + e + tones.iter().map(|&(f, a, p)| a * (2.0 * std::f64::consts::PI * f * t + p).sin()).sum::<f64>()
            })
            .collect();
        let series = TimeSeries::new(0, SampleRate::hz(30).unwrap(), values.clone()).unwrap();
        let cfg = VmdConfig { n_modes: modes, max_iters: 50, ..VmdConfig::default() };
        let r = vmd_decompose(&series, &cfg).unwrap();
        prop_assert_eq!(r.modes.len(), modes);
        prop_assert!(r.center_freqs_hz.windows(2).all(|w| w[0] <= w[1]));
        for (i, x) in values.iter().enumerate() {
            let sum: f64 = r.modes.iter().map(|m| m.values()[i]).sum::<f64>() + r.residual.values()[i];
            prop_assert!((sum - x).abs() <= 1e-9 * x.abs());
        }
    }
}
