//! Regional frequency response framework: IBR penetration, critical-week
//! selection, fluctuation extraction by VMD, and dynamic evaluation.

mod framework;
mod groups;
pub mod synth;

pub use framework::{
    evaluate_framework, AcfWindow, CorrelationSection, ExtractionSummary, FrameworkInputs, FrameworkOutput,
    FrameworkReport, GroupSiteStats, GroupSummary, OscillationReport, RegionPenetration,
    SiteCorrelation, REPORT_SCHEMA_VERSION,
};
pub use groups::{form_groups, Extraction, GroupDataset, GroupLabel, GroupSegment, HourSigma, SiteSegments, SkippedDay};
pub use synth::{generate_synthetic, SyntheticData, SyntheticScenario};

use std::collections::BTreeMap;

use chrono::{Duration, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridmetrics::{ibr_penetration, GridError, Region, RegionalHourRecord};
use crate::vmd::{VmdConfig, VmdError};

/// PMU locations, in reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Site {
    NE,
    N,
    CW,
    SE,
    S,
}

impl Site {
    pub const ALL: [Site; 5] = [Site::NE, Site::N, Site::CW, Site::SE, Site::S];

    pub fn code(&self) -> &'static str {
        match self {
            Site::NE => "NE",
            Site::N => "N",
            Site::CW => "CW",
            Site::SE => "SE",
            Site::S => "S",
        }
    }

    pub fn city(&self) -> &'static str {
        match self {
            Site::NE => "Fortaleza",
            Site::N => "Manaus",
            Site::CW => "Campo Grande",
            Site::SE => "Campinas",
            Site::S => "Florianopolis",
        }
    }

    /// Region whose hourly balance and inertia data the site is compared with.
    pub fn region(&self) -> Region {
        match self {
            Site::NE => Region::NE,
            Site::N => Region::N,
            Site::CW | Site::SE => Region::SeCw,
            Site::S => Region::S,
        }
    }
}

impl std::fmt::Display for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

impl std::str::FromStr for Site {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Site::ALL
            .into_iter()
            .find(|site| site.code().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown site `{s}`"))
    }
}

/// Stage a [`PipelineError`] originated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Config,
    Ingest,
    Extraction,
    Evaluation,
    Output,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("ingest: {0}")]
    Ingest(String),
    #[error("penetration: {0}")]
    Penetration(#[source] GridError),
    #[error("critical week: region {region} has at most {longest} consecutive complete days, need 7")]
    InsufficientData { region: Region, longest: usize },
    #[error("vmd: site {site} on {date}: {source}")]
    Vmd {
        site: Site,
        date: NaiveDate,
        #[source]
        source: VmdError,
    },
    #[error("stats: {0}")]
    Stats(String),
    #[error("output: {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl PipelineError {
    pub fn stage(&self) -> Stage {
        match self {
            PipelineError::Config(_) => Stage::Config,
            PipelineError::Ingest(_)
            | PipelineError::Penetration(_)
            | PipelineError::InsufficientData { .. } => Stage::Ingest,
            PipelineError::Vmd { .. } => Stage::Extraction,
            PipelineError::Stats(_) => Stage::Evaluation,
            PipelineError::Io { .. } => Stage::Output,
        }
    }
}

/// Settings shared by every stage of the framework.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameworkConfig {
    /// Region whose penetration picks the critical week.
    pub region: Region,
    /// Local time = UTC + offset. Balance tables use local dates and hours.
    pub utc_offset_minutes: i32,
    pub vmd: VmdConfig,
    /// Length of each VMD window; must divide 24.
    pub window_hours: u8,
    pub group_i_hours: (u8, u8),
    pub group_ii_hours: (u8, u8),
    pub max_gap_samples: usize,
    /// Optional rate reduction applied to each day before decomposition.
    pub decimate_to_hz: Option<u32>,
    pub histogram_bin_hz: f64,
    pub acf_max_lag: usize,
    pub spectrum_segment_s: u32,
    pub oscillation_band_hz: (f64, f64),
    /// A spectral peak counts when its prominence reaches this multiple of
    /// the median spectral amplitude.
    pub oscillation_snr: f64,
    pub max_peaks: usize,
}

impl Default for FrameworkConfig {
    fn default() -> Self {
        Self {
            region: Region::NE,
            utc_offset_minutes: -180,
            vmd: VmdConfig {
                max_iters: 100,
                ..VmdConfig::default()
            },
            window_hours: 3,
            group_i_hours: (9, 12),
            group_ii_hours: (21, 24),
            max_gap_samples: crate::timeseries::DEFAULT_MAX_GAP_SAMPLES,
            decimate_to_hz: None,
            histogram_bin_hz: crate::stats::DEFAULT_FREQUENCY_BIN_HZ,
            acf_max_lag: 30,
            spectrum_segment_s: 60,
            oscillation_band_hz: (2.0, 3.0),
            oscillation_snr: 5.0,
            max_peaks: 10,
        }
    }
}

impl FrameworkConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        self.vmd.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
        if self.window_hours == 0 || 24 % self.window_hours != 0 {
            return bad(format!("window_hours must divide 24, got {}", self.window_hours));
        }
        for (name, (h0, h1)) in [("group_i_hours", self.group_i_hours), ("group_ii_hours", self.group_ii_hours)] {
            if h0 >= h1 || h1 > 24 {
                return bad(format!("{name} must satisfy start < end <= 24, got [{h0}, {h1})"));
            }
        }
        if self.utc_offset_minutes.abs() >= 24 * 60 {
            return bad(format!("utc_offset_minutes out of range: {}", self.utc_offset_minutes));
        }
        if !(self.histogram_bin_hz > 0.0 && self.histogram_bin_hz.is_finite()) {
            return bad(format!("histogram_bin_hz must be positive, got {}", self.histogram_bin_hz));
        }
        if self.spectrum_segment_s == 0 {
            return bad("spectrum_segment_s must be positive".into());
        }
        let (b0, b1) = self.oscillation_band_hz;
        if !(b0 >= 0.0 && b0 < b1) {
            return bad(format!("oscillation_band_hz must satisfy 0 <= low < high, got ({b0}, {b1})"));
        }
        if !(self.oscillation_snr > 0.0) {
            return bad(format!("oscillation_snr must be positive, got {}", self.oscillation_snr));
        }
        if self.decimate_to_hz == Some(0) {
            return bad("decimate_to_hz must be positive".into());
        }
        Ok(())
    }

    pub fn group_hours(&self, label: GroupLabel) -> (u8, u8) {
        match label {
            GroupLabel::GroupI => self.group_i_hours,
            GroupLabel::GroupII => self.group_ii_hours,
        }
    }
}

/// UTC epoch milliseconds of local midnight starting `date`.
pub fn local_midnight_utc_ms(date: NaiveDate, utc_offset_minutes: i32) -> i64 {
    let naive = date.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc().timestamp_millis();
    naive - utc_offset_minutes as i64 * 60_000
}

/// Seven day-aligned days with the highest mean penetration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalWeek {
    pub region: Region,
    pub start_date: NaiveDate,
    /// Last day of the week, `start_date + 6`.
    pub end_date: NaiveDate,
    pub mean_penetration_pct: f64,
}

impl CriticalWeek {
    pub fn days(&self) -> impl Iterator<Item = NaiveDate> {
        let start = self.start_date;
        (0..7).map(move |d| start + Duration::days(d))
    }

    pub fn contains(&self, date: NaiveDate) -> bool {
        date >= self.start_date && date <= self.end_date
    }
}

/// Penetration for each complete day (all 24 hours present) of `region`.
fn daily_penetration(
    records: &[RegionalHourRecord],
    region: Region,
) -> Result<BTreeMap<NaiveDate, f64>, PipelineError> {
    let mut days: BTreeMap<NaiveDate, [Option<f64>; 24]> = BTreeMap::new();
    for r in records.iter().filter(|r| r.region == region) {
        let p = ibr_penetration(r).map_err(PipelineError::Penetration)?;
        days.entry(r.date).or_insert([None; 24])[r.hour as usize] = Some(p);
    }
    Ok(days
        .into_iter()
        .filter_map(|(date, hours)| {
            let sum = hours.iter().copied().sum::<Option<f64>>()?;
            Some((date, sum))
        })
        .collect())
}

/// Evaluate every window of seven consecutive complete days and keep the
/// one with the highest mean hourly penetration; ties go to the earliest.
pub fn select_critical_week(
    records: &[RegionalHourRecord],
    region: Region,
) -> Result<CriticalWeek, PipelineError> {
    let days = daily_penetration(records, region)?;
    let dates: Vec<NaiveDate> = days.keys().copied().collect();
    let sums: Vec<f64> = days.values().copied().collect();
    let mut best: Option<(NaiveDate, f64)> = None;
    let mut run = 0usize;
    let mut longest = 0usize;
    for i in 0..dates.len() {
        run = if i > 0 && dates[i] - dates[i - 1] == Duration::days(1) {
            run + 1
        } else {
            1
        };
        longest = longest.max(run);
        if run >= 7 {
            let mean = sums[i + 1 - 7..=i].iter().sum::<f64>() / (7.0 * 24.0);
            if best.is_none_or(|(_, m)| mean > m) {
                best = Some((dates[i + 1 - 7], mean));
            }
        }
    }
    let (start_date, mean_penetration_pct) =
        best.ok_or(PipelineError::InsufficientData { region, longest })?;
    Ok(CriticalWeek {
        region,
        start_date,
        end_date: start_date + Duration::days(6),
        mean_penetration_pct,
    })
}
