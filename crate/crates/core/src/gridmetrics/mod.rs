//! Hourly regional generation/demand data and the power-balance metrics
//! built on it: center-of-inertia frequency, IBR penetration, net load,
//! net-load ramps and wind curtailment statistics.

pub mod csv_io;

use std::collections::{BTreeMap, HashMap};

use chrono::{Duration, NaiveDate, NaiveDateTime, NaiveTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stats::{Histogram, StatsError};

/// Net-load ramp horizons, in hours.
pub const DEFAULT_RAMP_HORIZONS: [usize; 5] = [1, 3, 5, 7, 12];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("center-of-inertia frequency needs at least one machine")]
    NoMachines,
    #[error("inertia must be positive, got {0}")]
    NonPositiveInertia(f64),
    #[error("penetration undefined: zero demand in {region} on {date} hour {hour}")]
    ZeroDemand {
        region: Region,
        date: NaiveDate,
        hour: u8,
    },
    #[error("ramp horizon {horizon} h needs more than {horizon} samples, got {len}")]
    Horizon { horizon: usize, len: usize },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Geo-electric regions, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Region {
    N,
    NE,
    S,
    #[serde(rename = "SE_CW")]
    SeCw,
}

impl Region {
    pub const ALL: [Region; 4] = [Region::N, Region::NE, Region::S, Region::SeCw];

    pub fn code(&self) -> &'static str {
        match self {
            Region::N => "N",
            Region::NE => "NE",
            Region::S => "S",
            Region::SeCw => "SE_CW",
        }
    }
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for Region {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "N" => Ok(Region::N),
            "NE" => Ok(Region::NE),
            "S" => Ok(Region::S),
            "SE_CW" | "SE-CW" | "SECW" => Ok(Region::SeCw),
            other => Err(format!("unknown region `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurtailReason {
    EnergyBalance,
    Reliability,
    #[serde(rename = "external_electrical")]
    ExternalUnavailability,
}

impl CurtailReason {
    pub const ALL: [CurtailReason; 3] = [
        CurtailReason::EnergyBalance,
        CurtailReason::Reliability,
        CurtailReason::ExternalUnavailability,
    ];

    pub fn code(&self) -> &'static str {
        match self {
            CurtailReason::EnergyBalance => "energy_balance",
            CurtailReason::Reliability => "reliability",
            CurtailReason::ExternalUnavailability => "external_electrical",
        }
    }
}

impl std::str::FromStr for CurtailReason {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CurtailReason::ALL
            .into_iter()
            .find(|r| r.code() == s.trim())
            .ok_or_else(|| format!("unknown curtailment reason `{s}`"))
    }
}

/// One region, one hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionalHourRecord {
    pub region: Region,
    pub date: NaiveDate,
    pub hour: u8,
    pub hydro_mw: f64,
    pub thermal_mw: f64,
    pub wind_mw: f64,
    pub solar_mw: f64,
    pub der_mw: f64,
    pub demand_mw: f64,
    pub inertia_mws: Option<f64>,
    pub curtailed_wind_mw: Option<f64>,
    pub curtail_reason: Option<CurtailReason>,
}

impl RegionalHourRecord {
    /// Record with power fields only; inertia and curtailment unset.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        region: Region,
        date: NaiveDate,
        hour: u8,
        hydro_mw: f64,
        thermal_mw: f64,
        wind_mw: f64,
        solar_mw: f64,
        der_mw: f64,
        demand_mw: f64,
    ) -> Result<Self, GridError> {
        let r = Self {
            region,
            date,
            hour,
            hydro_mw,
            thermal_mw,
            wind_mw,
            solar_mw,
            der_mw,
            demand_mw,
            inertia_mws: None,
            curtailed_wind_mw: None,
            curtail_reason: None,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if self.hour > 23 {
            return Err(GridError::InvalidRecord(format!("hour {} outside 0..=23", self.hour)));
        }
        let fields = [
            ("hydro_mw", self.hydro_mw),
            ("thermal_mw", self.thermal_mw),
            ("wind_mw", self.wind_mw),
            ("solar_mw", self.solar_mw),
            ("der_mw", self.der_mw),
            ("demand_mw", self.demand_mw),
        ];
        for (name, v) in fields
            .into_iter()
            .chain(self.inertia_mws.map(|v| ("inertia_mws", v)))
            .chain(self.curtailed_wind_mw.map(|v| ("curtailed_wind_mw", v)))
        {
            if !(v.is_finite() && v >= 0.0) {
                return Err(GridError::InvalidRecord(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn timestamp(&self) -> NaiveDateTime {
        hour_start(self.date, self.hour)
    }

    /// Curtailment attached to this hour, if any.
    pub fn curtailment(&self) -> Option<CurtailmentRecord> {
        Some(CurtailmentRecord {
            region: self.region,
            date: self.date,
            hour: self.hour,
            curtailed_wind_mw: self.curtailed_wind_mw?,
            reason: self.curtail_reason?,
        })
    }
}

pub(crate) fn hour_start(date: NaiveDate, hour: u8) -> NaiveDateTime {
    date.and_time(NaiveTime::MIN) + Duration::hours(hour as i64)
}

/// Demand and IBR output, shared by regional and system-wide records.
pub trait PowerBalance {
    fn demand_mw(&self) -> f64;
    fn wind_mw(&self) -> f64;
    fn solar_mw(&self) -> f64;
    fn der_mw(&self) -> f64;

    fn ibr_mw(&self) -> f64 {
        self.wind_mw() + self.solar_mw() + self.der_mw()
    }
}

impl PowerBalance for RegionalHourRecord {
    fn demand_mw(&self) -> f64 {
        self.demand_mw
    }
    fn wind_mw(&self) -> f64 {
        self.wind_mw
    }
    fn solar_mw(&self) -> f64 {
        self.solar_mw
    }
    fn der_mw(&self) -> f64 {
        self.der_mw
    }
}

/// Sum of the four regions for one hour.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemHour {
    pub date: NaiveDate,
    pub hour: u8,
    pub wind_mw: f64,
    pub solar_mw: f64,
    pub der_mw: f64,
    pub demand_mw: f64,
    /// Present only when every region reported inertia.
    pub inertia_mws: Option<f64>,
}

impl SystemHour {
    pub fn timestamp(&self) -> NaiveDateTime {
        hour_start(self.date, self.hour)
    }
}

impl PowerBalance for SystemHour {
    fn demand_mw(&self) -> f64 {
        self.demand_mw
    }
    fn wind_mw(&self) -> f64 {
        self.wind_mw
    }
    fn solar_mw(&self) -> f64 {
        self.solar_mw
    }
    fn der_mw(&self) -> f64 {
        self.der_mw
    }
}

/// System-wide hours, in time order. Hours missing any region are dropped.
pub fn system_aggregate(records: &[RegionalHourRecord]) -> Vec<SystemHour> {
    let mut by_hour: BTreeMap<(NaiveDate, u8), Vec<&RegionalHourRecord>> = BTreeMap::new();
    for r in records {
        by_hour.entry((r.date, r.hour)).or_default().push(r);
    }
    by_hour
        .into_iter()
        .filter_map(|((date, hour), mut rs)| {
            rs.sort_by_key(|r| r.region);
            rs.dedup_by_key(|r| r.region);
            if rs.len() != Region::ALL.len() {
                return None;
            }
            let sum = |f: fn(&RegionalHourRecord) -> f64| rs.iter().map(|r| f(r)).sum::<f64>();
            let inertia = rs
                .iter()
                .map(|r| r.inertia_mws)
                .sum::<Option<f64>>();
            Some(SystemHour {
                date,
                hour,
                wind_mw: sum(|r| r.wind_mw),
                solar_mw: sum(|r| r.solar_mw),
                der_mw: sum(|r| r.der_mw),
                demand_mw: sum(|r| r.demand_mw),
                inertia_mws: inertia,
            })
        })
        .collect()
}

/// A synchronous machine's inertia (MW s) and internal frequency (Hz).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MachineState {
    inertia_mws: f64,
    freq_hz: f64,
}

impl MachineState {
    pub fn new(inertia_mws: f64, freq_hz: f64) -> Result<Self, GridError> {
        if !(inertia_mws > 0.0 && inertia_mws.is_finite()) {
            return Err(GridError::NonPositiveInertia(inertia_mws));
        }
        Ok(Self {
            inertia_mws,
            freq_hz,
        })
    }

    pub fn inertia_mws(&self) -> f64 {
        self.inertia_mws
    }

    pub fn freq_hz(&self) -> f64 {
        self.freq_hz
    }
}

/// Inertia-weighted mean frequency, `sum(H_k w_k) / sum(H_k)`.
pub fn coi_frequency(machines: &[MachineState]) -> Result<f64, GridError> {
    if machines.is_empty() {
        return Err(GridError::NoMachines);
    }
    let total: f64 = machines.iter().map(|m| m.inertia_mws).sum();
    if !(total > 0.0) {
        return Err(GridError::NonPositiveInertia(total));
    }
    let weighted: f64 = machines.iter().map(|m| m.inertia_mws * m.freq_hz).sum();
    Ok(weighted / total)
}

/// `100 * (wind + solar + DER) / demand`.
pub fn ibr_penetration(record: &RegionalHourRecord) -> Result<f64, GridError> {
    if record.demand_mw <= 0.0 {
        return Err(GridError::ZeroDemand {
            region: record.region,
            date: record.date,
            hour: record.hour,
        });
    }
    Ok(penetration_pct(record))
}

fn penetration_pct(b: &impl PowerBalance) -> f64 {
    100.0 * b.ibr_mw() / b.demand_mw()
}

/// System-wide penetration for one aggregated hour; `None` at zero demand.
pub fn system_penetration(hour: &SystemHour) -> Option<f64> {
    (hour.demand_mw > 0.0).then(|| penetration_pct(hour))
}

/// `demand - wind - solar - DER`; negative during surplus.
pub fn net_load(record: &impl PowerBalance) -> f64 {
    record.demand_mw() - record.wind_mw() - record.solar_mw() - record.der_mw()
}

/// `R_i = NL_{i+h} - NL_i` for every window that fits.
pub fn net_load_ramps(net_load: &[f64], horizon_h: usize) -> Result<Vec<f64>, GridError> {
    if horizon_h == 0 || horizon_h >= net_load.len() {
        return Err(GridError::Horizon {
            horizon: horizon_h,
            len: net_load.len(),
        });
    }
    Ok(net_load
        .windows(horizon_h + 1)
        .map(|w| w[horizon_h] - w[0])
        .collect())
}

/// Split `(hour, value)` points (sorted by time) into runs of consecutive hours.
pub fn contiguous_hourly_runs<T: Clone>(points: &[(NaiveDateTime, T)]) -> Vec<Vec<(NaiveDateTime, T)>> {
    let mut runs: Vec<Vec<(NaiveDateTime, T)>> = Vec::new();
    for p in points {
        match runs.last_mut() {
            Some(run) if p.0 - run.last().expect("non-empty run").0 == Duration::hours(1) => {
                run.push(p.clone())
            }
            _ => runs.push(vec![p.clone()]),
        }
    }
    runs
}

/// A ramp tagged with the hour it starts from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ramp {
    pub start: NaiveDateTime,
    pub horizon_h: usize,
    pub ramp_mw: f64,
}

/// Ramps over each contiguous run of hourly net load; runs shorter than the
/// horizon contribute nothing.
pub fn ramps_over_runs(net_load: &[(NaiveDateTime, f64)], horizon_h: usize) -> Vec<Ramp> {
    contiguous_hourly_runs(net_load)
        .into_iter()
        .filter(|run| run.len() > horizon_h)
        .flat_map(|run| {
            let values: Vec<f64> = run.iter().map(|p| p.1).collect();
            let ramps = net_load_ramps(&values, horizon_h).expect("run longer than horizon");
            run.into_iter()
                .zip(ramps)
                .map(move |((start, _), ramp_mw)| Ramp {
                    start,
                    horizon_h,
                    ramp_mw,
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

pub fn ramp_histogram(ramps: &[f64], bin_width_mw: f64) -> Result<Histogram, GridError> {
    Ok(Histogram::from_values(ramps, bin_width_mw)?)
}

/// One curtailment event.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurtailmentRecord {
    pub region: Region,
    pub date: NaiveDate,
    pub hour: u8,
    pub curtailed_wind_mw: f64,
    pub reason: CurtailReason,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReasonShare {
    pub reason: CurtailReason,
    pub count: u64,
    pub percentage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurtailmentBreakdown {
    /// `[start, end)` hours of day.
    pub hour_range: (u8, u8),
    pub total: u64,
    /// Reasons with at least one event, in [`CurtailReason::ALL`] order.
    pub shares: Vec<ReasonShare>,
}

/// Event counts and shares per reason for events with hour in `[h0, h1)`.
pub fn curtailment_breakdown(records: &[CurtailmentRecord], hour_range: (u8, u8)) -> CurtailmentBreakdown {
    let (h0, h1) = hour_range;
    let mut counts: BTreeMap<CurtailReason, u64> = BTreeMap::new();
    for r in records.iter().filter(|r| r.hour >= h0 && r.hour < h1) {
        *counts.entry(r.reason).or_default() += 1;
    }
    let total: u64 = counts.values().sum();
    let shares = counts
        .into_iter()
        .map(|(reason, count)| ReasonShare {
            reason,
            count,
            percentage: 100.0 * count as f64 / total as f64,
        })
        .collect();
    CurtailmentBreakdown {
        hour_range,
        total,
        shares,
    }
}

/// Curtailed wind MW summed per hour-of-day slot.
pub fn hourly_curtailment_profile(records: &[CurtailmentRecord]) -> [f64; 24] {
    let mut slots = [0.0; 24];
    for r in records {
        slots[r.hour as usize % 24] += r.curtailed_wind_mw;
    }
    slots
}

/// Fill `inertia_mws` from a `(region, date, hour) -> MW s` table.
pub fn attach_inertia(records: &mut [RegionalHourRecord], inertia: &[csv_io::InertiaRow]) {
    let table: HashMap<(Region, NaiveDate, u8), f64> = inertia
        .iter()
        .map(|r| ((r.region, r.date, r.hour), r.inertia_mws))
        .collect();
    for r in records {
        r.inertia_mws = table.get(&(r.region, r.date, r.hour)).copied();
    }
}

/// Attach curtailment events to their region-hour: MW are summed and the
/// reason carrying the most MW is kept.
pub fn attach_curtailment(records: &mut [RegionalHourRecord], events: &[CurtailmentRecord]) {
    let mut table: HashMap<(Region, NaiveDate, u8), BTreeMap<CurtailReason, f64>> = HashMap::new();
    for e in events {
        *table
            .entry((e.region, e.date, e.hour))
            .or_default()
            .entry(e.reason)
            .or_default() += e.curtailed_wind_mw;
    }
    for r in records {
        if let Some(by_reason) = table.get(&(r.region, r.date, r.hour)) {
            r.curtailed_wind_mw = Some(by_reason.values().sum());
            r.curtail_reason = by_reason
                .iter()
                .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(reason, _)| *reason);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day() -> NaiveDate {
        NaiveDate::from_ymd_opt(2023, 7, 17).unwrap()
    }

    fn rec(region: Region, hour: u8, wind: f64, solar: f64, der: f64, demand: f64) -> RegionalHourRecord {
        RegionalHourRecord::new(region, day(), hour, 0.0, 0.0, wind, solar, der, demand).unwrap()
    }

    fn machines(pairs: &[(f64, f64)]) -> Vec<MachineState> {
        pairs.iter().map(|&(h, w)| MachineState::new(h, w).unwrap()).collect()
    }

    #[test]
    fn coi_equal_weights() {
        let f = coi_frequency(&machines(&[(5.0, 60.0), (5.0, 59.9)])).unwrap();
        assert!((f - 59.95).abs() < 1e-12);
    }

    #[test]
    fn coi_weighted() {
        // (60.0 + 2 * 60.1 + 3 * 59.9) / 6
        let f = coi_frequency(&machines(&[(1.0, 60.0), (2.0, 60.1), (3.0, 59.9)])).unwrap();
        assert!((f - 359.9 / 6.0).abs() < 1e-12);
        assert!((f - 59.983_333_333_333).abs() < 1e-9);
    }

    #[test]
    fn coi_single_and_errors() {
        assert_eq!(coi_frequency(&machines(&[(3.0, 60.02)])).unwrap(), 60.02);
        assert_eq!(coi_frequency(&[]), Err(GridError::NoMachines));
        assert!(MachineState::new(0.0, 60.0).is_err());
    }

    #[test]
    fn penetration_cases() {
        assert_eq!(ibr_penetration(&rec(Region::NE, 0, 0.0, 0.0, 0.0, 100.0)).unwrap(), 0.0);
        let ne = rec(Region::NE, 0, 10_009.0, 1_821.0, 0.0, 12_117.0);
        let p = ibr_penetration(&ne).unwrap();
        assert!((p - 97.63).abs() < 0.005, "{p}");
        assert_eq!(ibr_penetration(&rec(Region::NE, 0, 150.0, 30.0, 20.0, 100.0)).unwrap(), 200.0);
        assert!(matches!(
            ibr_penetration(&rec(Region::S, 4, 1.0, 0.0, 0.0, 0.0)),
            Err(GridError::ZeroDemand { hour: 4, .. })
        ));
    }

    #[test]
    fn net_load_cases() {
        assert_eq!(net_load(&rec(Region::N, 0, 10.0, 5.0, 5.0, 100.0)), 80.0);
        assert_eq!(net_load(&rec(Region::N, 0, 100.0, 10.0, 10.0, 100.0)), -20.0);
        assert_eq!(net_load(&rec(Region::N, 0, 0.0, 0.0, 0.0, 0.0)), 0.0);
    }

    #[test]
    fn ramps_cases() {
        let nl = [10.0, 12.0, 15.0, 11.0];
        assert_eq!(net_load_ramps(&nl, 1).unwrap(), vec![2.0, 3.0, -4.0]);
        assert_eq!(net_load_ramps(&nl, 3).unwrap(), vec![1.0]);
        assert_eq!(
            net_load_ramps(&nl, 4),
            Err(GridError::Horizon { horizon: 4, len: 4 })
        );
    }

    #[test]
    fn ramps_split_on_missing_hour() {
        let t = |h: i64| hour_start(day(), 0) + Duration::hours(h);
        let pts = vec![(t(0), 1.0), (t(1), 2.0), (t(2), 4.0), (t(5), 0.0), (t(6), 3.0)];
        let r = ramps_over_runs(&pts, 1);
        let values: Vec<f64> = r.iter().map(|r| r.ramp_mw).collect();
        assert_eq!(values, vec![1.0, 2.0, 3.0]);
        assert_eq!(r[2].start, t(5));
        assert_eq!(ramps_over_runs(&pts, 2).len(), 1);
    }

    #[test]
    fn ramp_histogram_errors() {
        assert!(matches!(ramp_histogram(&[], 1.0), Err(GridError::Stats(_))));
        assert!(matches!(ramp_histogram(&[1.0], -1.0), Err(GridError::Stats(StatsError::BinWidth(_)))));
    }

    fn event(hour: u8, mw: f64, reason: CurtailReason) -> CurtailmentRecord {
        CurtailmentRecord {
            region: Region::NE,
            date: day(),
            hour,
            curtailed_wind_mw: mw,
            reason,
        }
    }

    #[test]
    fn breakdown_single_reason_and_filter() {
        let events = vec![
            event(9, 10.0, CurtailReason::Reliability),
            event(9, 5.0, CurtailReason::Reliability),
            event(14, 5.0, CurtailReason::EnergyBalance),
        ];
        let b = curtailment_breakdown(&events, (8, 11));
        assert_eq!(b.total, 2);
        assert_eq!(b.shares.len(), 1);
        assert_eq!(b.shares[0].percentage, 100.0);
        assert_eq!(curtailment_breakdown(&[], (8, 11)).total, 0);
    }

    #[test]
    fn hourly_profile() {
        let p = hourly_curtailment_profile(&[event(9, 100.0, CurtailReason::EnergyBalance)]);
        assert_eq!(p[9], 100.0);
        assert_eq!(p.iter().sum::<f64>(), 100.0);
        let two_days: Vec<_> = (0..48).map(|h| event((h % 24) as u8, 1.0, CurtailReason::EnergyBalance)).collect();
        assert!(hourly_curtailment_profile(&two_days).iter().all(|&v| v == 2.0));
    }

    #[test]
    fn aggregate_drops_incomplete_hours() {
        let mut recs: Vec<_> = Region::ALL.iter().map(|&r| rec(r, 0, 1.0, 2.0, 3.0, 10.0)).collect();
        recs.push(rec(Region::NE, 1, 1.0, 0.0, 0.0, 5.0));
        let sys = system_aggregate(&recs);
        assert_eq!(sys.len(), 1);
        assert_eq!(sys[0].demand_mw, 40.0);
        assert_eq!(net_load(&sys[0]), 16.0);
        assert_eq!(sys[0].inertia_mws, None);
    }

    #[test]
    fn attachments() {
        let mut recs = vec![rec(Region::NE, 9, 1.0, 0.0, 0.0, 5.0)];
        attach_inertia(
            &mut recs,
            &[csv_io::InertiaRow {
                date: day(),
                hour: 9,
                region: Region::NE,
                inertia_mws: 27_198.0,
            }],
        );
        assert_eq!(recs[0].inertia_mws, Some(27_198.0));
        attach_curtailment(
            &mut recs,
            &[
                event(9, 10.0, CurtailReason::Reliability),
                event(9, 30.0, CurtailReason::EnergyBalance),
            ],
        );
        assert_eq!(recs[0].curtailed_wind_mw, Some(40.0));
        assert_eq!(recs[0].curtail_reason, Some(CurtailReason::EnergyBalance));
        assert_eq!(recs[0].curtailment().unwrap().curtailed_wind_mw, 40.0);
    }

    #[test]
    fn record_validation() {
        assert!(RegionalHourRecord::new(Region::N, day(), 24, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0).is_err());
        assert!(RegionalHourRecord::new(Region::N, day(), 1, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0).is_err());
        assert!(RegionalHourRecord::new(Region::N, day(), 1, 0.0, f64::NAN, 0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn region_and_reason_tokens() {
        assert_eq!("SE-CW".parse::<Region>(), Ok(Region::SeCw));
        assert_eq!("ne".parse::<Region>(), Ok(Region::NE));
        assert_eq!("external_electrical".parse::<CurtailReason>(), Ok(CurtailReason::ExternalUnavailability));
        assert!("weather".parse::<CurtailReason>().is_err());
    }
}
