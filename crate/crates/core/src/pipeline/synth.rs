//! Deterministic stand-in data: PMU frequency series per site and matching
//! hourly balance, inertia and curtailment tables.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::fs;
use std::io::{self, BufWriter};
use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{local_midnight_utc_ms, Site};
use crate::gridmetrics::csv_io::{write_balance_csv, write_curtailment_csv, write_inertia_csv};
use crate::gridmetrics::{CurtailReason, CurtailmentRecord, Region, RegionalHourRecord};
use crate::timeseries::pmu_csv::save_pmu_csv;
use crate::timeseries::{SampleRate, TimeSeries};

const BALANCE_STREAM: u64 = 1;
const TREND_STREAM: u64 = 2;
const CURTAIL_STREAM: u64 = 3;
const NOISE_STREAM: u64 = 100;
const GAP_STREAM: u64 = 200;

/// Longest synthetic dropout, in samples.
const MAX_DROPOUT: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tone {
    pub freq_hz: f64,
    pub amp_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionProfile {
    pub region: Region,
    pub demand_mw: f64,
    pub base_penetration_pct: f64,
    /// Daily mean penetration inside the peak week.
    pub peak_penetration_pct: f64,
    /// Share of IBR output that is wind; the rest follows the solar curve.
    pub wind_share: f64,
    /// Share of the solar-shaped output that is distributed generation.
    pub der_share: f64,
    /// Relative hourly noise on demand and IBR output.
    pub jitter: f64,
    /// Inertia constant of the synchronous fleet, seconds.
    pub inertia_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteProfile {
    pub site: Site,
    pub noise_base_hz: f64,
    /// Added noise standard deviation per percent of regional penetration.
    pub noise_per_pct_hz: f64,
    #[serde(default)]
    pub tones: Vec<Tone>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticScenario {
    pub seed: u64,
    pub start_date: NaiveDate,
    /// Days of hourly balance data.
    pub days: u32,
    /// First day of the elevated-penetration week, counted from `start_date`.
    pub peak_week_offset_days: u32,
    pub pmu_rate_hz: u32,
    /// PMU coverage in days, starting at the peak week.
    pub pmu_days: u32,
    pub utc_offset_minutes: i32,
    /// Amplitude of the shared slow frequency drift.
    pub trend_amp_hz: f64,
    /// Short dropouts per site-day, each at most ten samples.
    pub gaps_per_day: u32,
    pub curtailment_events_per_day: u32,
    /// `[start, end)` hours that receive `curtailment_peak_share` of events.
    pub curtailment_peak_hours: (u8, u8),
    pub curtailment_peak_share: f64,
    pub regions: Vec<RegionProfile>,
    pub sites: Vec<SiteProfile>,
}

impl Default for SyntheticScenario {
    fn default() -> Self {
        let region = |region, demand_mw, base, peak, wind_share, inertia_s| RegionProfile {
            region,
            demand_mw,
            base_penetration_pct: base,
            peak_penetration_pct: peak,
            wind_share,
            der_share: 0.4,
            jitter: 0.03,
            inertia_s,
        };
        let site = |site, noise_base_hz, noise_per_pct_hz, tones| SiteProfile {
            site,
            noise_base_hz,
            noise_per_pct_hz,
            tones,
        };
        Self {
            seed: 42,
            start_date: NaiveDate::from_ymd_opt(2023, 6, 19).expect("valid date"),
            days: 42,
            peak_week_offset_days: 28,
            pmu_rate_hz: 30,
            pmu_days: 7,
            utc_offset_minutes: -180,
            trend_amp_hz: 0.02,
            gaps_per_day: 4,
            curtailment_events_per_day: 12,
            curtailment_peak_hours: (8, 11),
            curtailment_peak_share: 0.6,
            regions: vec![
                region(Region::N, 7_500.0, 20.0, 26.0, 0.3, 4.0),
                region(Region::NE, 12_000.0, 95.0, 140.0, 0.75, 3.5),
                region(Region::S, 13_000.0, 15.0, 19.0, 0.5, 4.5),
                region(Region::SeCw, 45_000.0, 20.0, 24.0, 0.1, 4.5),
            ],
            sites: vec![
                site(
                    Site::NE,
                    0.002,
                    4e-5,
                    vec![Tone {
                        freq_hz: 2.5,
                        amp_hz: 0.004,
                    }],
                ),
                site(Site::N, 0.0025, 0.0, Vec::new()),
                site(Site::CW, 0.002, 0.0, Vec::new()),
                site(Site::SE, 0.002, 0.0, Vec::new()),
                site(Site::S, 0.002, 0.0, Vec::new()),
            ],
        }
    }
}

impl SyntheticScenario {
    pub fn peak_week_start(&self) -> NaiveDate {
        self.start_date + Duration::days(self.peak_week_offset_days as i64)
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.days < 7 {
            return Err(format!("days must be at least 7, got {}", self.days));
        }
        if self.peak_week_offset_days + 7 > self.days {
            return Err("the peak week must lie inside the balance period".into());
        }
        if self.pmu_rate_hz == 0 {
            return Err("pmu_rate_hz must be positive".into());
        }
        if self.peak_week_offset_days + self.pmu_days > self.days {
            return Err("PMU coverage must lie inside the balance period".into());
        }
        let (h0, h1) = self.curtailment_peak_hours;
        if h0 >= h1 || h1 > 24 {
            return Err(format!("curtailment_peak_hours must satisfy start < end <= 24, got [{h0}, {h1})"));
        }
        if !(0.0..=1.0).contains(&self.curtailment_peak_share) {
            return Err("curtailment_peak_share must lie in [0, 1]".into());
        }
        let mut regions: Vec<Region> = self.regions.iter().map(|r| r.region).collect();
        regions.sort();
        if regions != Region::ALL {
            return Err("exactly one profile per region is required".into());
        }
        for r in &self.regions {
            let nonneg = [
                r.base_penetration_pct,
                r.peak_penetration_pct,
                r.jitter,
                r.inertia_s,
            ];
            if !(r.demand_mw > 0.0) || nonneg.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(format!("region {}: demand must be positive and other fields non-negative", r.region));
            }
            if !(0.0..=1.0).contains(&r.wind_share) || !(0.0..=1.0).contains(&r.der_share) {
                return Err(format!("region {}: shares must lie in [0, 1]", r.region));
            }
        }
        let mut sites: Vec<Site> = self.sites.iter().map(|s| s.site).collect();
        sites.sort();
        if sites.windows(2).any(|w| w[0] == w[1]) {
            return Err("duplicate site profile".into());
        }
        for s in &self.sites {
            if !(s.noise_base_hz >= 0.0 && s.noise_per_pct_hz >= 0.0) {
                return Err(format!("site {}: noise levels must be non-negative", s.site));
            }
            let nyquist = self.pmu_rate_hz as f64 / 2.0;
            if s.tones.iter().any(|t| !(t.freq_hz > 0.0 && t.freq_hz < nyquist)) {
                return Err(format!("site {}: tone frequencies must lie in (0, {nyquist}) Hz", s.site));
            }
        }
        Ok(())
    }
}

/// Generated inputs for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub pmu: Vec<(Site, TimeSeries)>,
    /// Inertia is attached to every record.
    pub balance: Vec<RegionalHourRecord>,
    pub curtailment: Vec<CurtailmentRecord>,
}

impl SyntheticData {
    /// `balance.csv`, `inertia.csv`, `curtailment.csv` and `pmu/<SITE>.csv`.
    pub fn write_to(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir.join("pmu"))?;
        let create = |name: &str| fs::File::create(dir.join(name)).map(BufWriter::new);
        write_balance_csv(create("balance.csv")?, &self.balance)?;
        write_inertia_csv(create("inertia.csv")?, &self.balance)?;
        write_curtailment_csv(create("curtailment.csv")?, &self.curtailment)?;
        for (site, series) in &self.pmu {
            save_pmu_csv(&dir.join("pmu").join(format!("{site}.csv")), series)
                .map_err(|e| io::Error::other(e.to_string()))?;
        }
        Ok(())
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn round_mw(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

fn solar_curve() -> [f64; 24] {
    let mut c = [0.0; 24];
    for (h, v) in c.iter_mut().enumerate() {
        *v = (PI * (h as f64 + 0.5 - 6.0) / 12.0).sin().max(0.0);
    }
    let mean = c.iter().sum::<f64>() / 24.0;
    c.map(|v| v / mean)
}

fn wind_curve(h: usize) -> f64 {
    1.0 + 0.25 * (2.0 * PI * (h as f64 - 2.0) / 24.0).cos()
}

pub fn generate_synthetic(scenario: &SyntheticScenario) -> Result<SyntheticData, String> {
    scenario.validate()?;
    let balance = generate_balance(scenario);
    let pen: HashMap<(Region, NaiveDate, u8), f64> = balance
        .iter()
        .map(|r| ((r.region, r.date, r.hour), (r.wind_mw + r.solar_mw + r.der_mw) / r.demand_mw * 100.0))
        .collect();
    let pmu = scenario
        .sites
        .iter()
        .enumerate()
        .map(|(i, profile)| (profile.site, generate_pmu(scenario, profile, i as u64, &pen)))
        .collect::<Vec<_>>();
    let mut pmu = pmu;
    pmu.sort_by_key(|(site, _)| *site);
    Ok(SyntheticData {
        pmu,
        balance,
        curtailment: generate_curtailment(scenario),
    })
}

fn generate_balance(sc: &SyntheticScenario) -> Vec<RegionalHourRecord> {
    let mut r = rng(sc.seed, BALANCE_STREAM);
    let solar = solar_curve();
    let mut profiles: Vec<&RegionProfile> = sc.regions.iter().collect();
    profiles.sort_by_key(|p| p.region);
    let mut out = Vec::with_capacity(sc.days as usize * 24 * profiles.len());
    let peak = sc.peak_week_offset_days..sc.peak_week_offset_days + 7;
    for day in 0..sc.days {
        let date = sc.start_date + Duration::days(day as i64);
        for hour in 0..24usize {
            for p in &profiles {
                let mut z = || 1.0 + p.jitter * r.sample::<f64, _>(StandardNormal);
                let level = if peak.contains(&day) {
                    p.peak_penetration_pct
                } else {
                    p.base_penetration_pct
                } / 100.0;
                let demand = p.demand_mw * (1.0 + 0.12 * (2.0 * PI * (hour as f64 - 10.0) / 24.0).sin()) * z().max(0.5);
                let wind = demand * level * p.wind_share * wind_curve(hour) * z().max(0.0);
                let sun = demand * level * (1.0 - p.wind_share) * solar[hour] * z().max(0.0);
                let der = sun * p.der_share;
                let ibr = wind + sun;
                let sync = demand / (1.0 + ibr / demand);
                let mut rec = RegionalHourRecord::new(
                    p.region,
                    date,
                    hour as u8,
                    round_mw(0.65 * sync),
                    round_mw(0.35 * sync),
                    round_mw(wind),
                    round_mw(sun - der),
                    round_mw(der),
                    round_mw(demand),
                )
                .expect("generated values are finite and non-negative");
                rec.inertia_mws = Some(round_mw(p.inertia_s * sync));
                out.push(rec);
            }
        }
    }
    out
}

fn generate_pmu(
    sc: &SyntheticScenario,
    profile: &SiteProfile,
    index: u64,
    pen: &HashMap<(Region, NaiveDate, u8), f64>,
) -> TimeSeries {
    let rate = SampleRate::hz(sc.pmu_rate_hz).expect("validated rate");
    let fs = sc.pmu_rate_hz as f64;
    let per_hour = 3600 * sc.pmu_rate_hz as usize;
    let per_day = 24 * per_hour;
    let n = sc.pmu_days as usize * per_day;
    let week0 = sc.peak_week_start();

    let mut trend_rng = rng(sc.seed, TREND_STREAM);
    let phase: [f64; 2] = [trend_rng.gen_range(0.0..2.0 * PI), trend_rng.gen_range(0.0..2.0 * PI)];
    let mut noise = rng(sc.seed, NOISE_STREAM + index);
    let tone_phase: Vec<f64> = profile.tones.iter().map(|_| noise.gen_range(0.0..2.0 * PI)).collect();

    let region = profile.site.region();
    let mut values = Vec::with_capacity(n);
    for hour in 0..n / per_hour {
        let date = week0 + Duration::days((hour / 24) as i64);
        let p = pen.get(&(region, date, (hour % 24) as u8)).copied().unwrap_or(0.0);
        let sigma = profile.noise_base_hz + profile.noise_per_pct_hz * p;
        for j in 0..per_hour {
            let t = (hour * per_hour + j) as f64 / fs;
            let mut f = 60.0
                + sc.trend_amp_hz
                    * ((2.0 * PI * t / 1800.0 + phase[0]).sin() + 0.5 * (2.0 * PI * t / 420.0 + phase[1]).sin());
            for (tone, ph) in profile.tones.iter().zip(&tone_phase) {
                f += tone.amp_hz * (2.0 * PI * tone.freq_hz * t + ph).sin();
            }
            f += sigma * noise.sample::<f64, _>(StandardNormal);
            values.push(f);
        }
    }

    let mut gaps = rng(sc.seed, GAP_STREAM + index);
    let margin = 100.min(per_day / 4);
    if per_day > 2 * margin + MAX_DROPOUT {
        for day in 0..sc.pmu_days as usize {
            for _ in 0..sc.gaps_per_day {
                let at = day * per_day + gaps.gen_range(margin..per_day - margin - MAX_DROPOUT);
                let len = gaps.gen_range(1..=MAX_DROPOUT);
                values[at..at + len].iter_mut().for_each(|v| *v = f64::NAN);
            }
        }
    }
    TimeSeries::from_nan_gaps(local_midnight_utc_ms(week0, sc.utc_offset_minutes), rate, values)
}

fn generate_curtailment(sc: &SyntheticScenario) -> Vec<CurtailmentRecord> {
    let mut r = rng(sc.seed, CURTAIL_STREAM);
    let reasons = WeightedIndex::new([5185u32, 2594, 2221]).expect("positive weights");
    let (h0, h1) = sc.curtailment_peak_hours;
    let mut out = Vec::new();
    for day in 0..sc.days {
        let date = sc.start_date + Duration::days(day as i64);
        for _ in 0..sc.curtailment_events_per_day {
            let hour = if r.gen_bool(sc.curtailment_peak_share) {
                r.gen_range(h0..h1)
            } else {
                r.gen_range(0..24)
            };
            let region = if r.gen_bool(0.7) {
                Region::NE
            } else {
                Region::ALL[r.gen_range(0..Region::ALL.len())]
            };
            out.push(CurtailmentRecord {
                region,
                date,
                hour,
                curtailed_wind_mw: round_mw(50.0 + 350.0 * r.gen::<f64>()),
                reason: CurtailReason::ALL[reasons.sample(&mut r)],
            });
        }
    }
    out.sort_by_key(|e| (e.date, e.hour, e.region));
    out
}
