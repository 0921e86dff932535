use chrono::NaiveDate;
use serde::Serialize;

use super::{local_midnight_utc_ms, CriticalWeek, FrameworkConfig, PipelineError, Site};
use crate::stats::{std_dev_values, welch_spectrum, Spectrum};
use crate::timeseries::{decimate, fill_gaps, slice_window_ms, SampleRate, SamplingSpec, TimeSeries};
use crate::vmd::{split_from_result, vmd_decompose, DecompositionSplit};

const DAY_MS: i64 = 86_400_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GroupLabel {
    GroupI,
    GroupII,
}

impl GroupLabel {
    pub const ALL: [GroupLabel; 2] = [GroupLabel::GroupI, GroupLabel::GroupII];

    pub fn code(&self) -> &'static str {
        match self {
            GroupLabel::GroupI => "group_i",
            GroupLabel::GroupII => "group_ii",
        }
    }
}

/// One day's slice of a group window.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSegment {
    pub date: NaiveDate,
    pub dynamic: TimeSeries,
    pub qss: TimeSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SiteSegments {
    pub site: Site,
    pub segments: Vec<GroupSegment>,
}

impl SiteSegments {
    /// Dynamic component of every segment, concatenated in date order.
    pub fn dynamic_values(&self) -> Vec<f64> {
        self.segments
            .iter()
            .flat_map(|s| s.dynamic.values().iter().copied())
            .collect()
    }
}

/// Dynamic components of every site over one daily hour range.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDataset {
    pub label: GroupLabel,
    /// `[start, end)` local hours; an end of 24 is midnight.
    pub hour_range: (u8, u8),
    pub sites: Vec<SiteSegments>,
}

impl GroupDataset {
    pub fn site(&self, site: Site) -> Option<&SiteSegments> {
        self.sites.iter().find(|s| s.site == site)
    }
}

/// Dispersion of the dynamic component over one local clock hour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HourSigma {
    pub date: NaiveDate,
    pub hour: u8,
    pub sigma_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedDay {
    pub site: Site,
    pub date: NaiveDate,
    pub reason: String,
}

/// Everything the fluctuation-extraction stage produces.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub group_i: GroupDataset,
    pub group_ii: GroupDataset,
    /// Per site, every hour of every decomposed day.
    pub hourly_sigma: Vec<(Site, Vec<HourSigma>)>,
    /// Welch average of the dynamic component over all decomposed windows.
    pub spectra: Vec<(Site, Option<Spectrum>)>,
    pub windows: usize,
    pub unconverged_windows: usize,
    pub skipped: Vec<SkippedDay>,
}

impl Extraction {
    pub fn group(&self, label: GroupLabel) -> &GroupDataset {
        match label {
            GroupLabel::GroupI => &self.group_i,
            GroupLabel::GroupII => &self.group_ii,
        }
    }
}

/// Samples per `seconds` at `rate`, when that is a whole number.
fn samples_in(rate: SampleRate, seconds: u64) -> Option<usize> {
    let num = rate.numer() as u64 * seconds;
    (num % rate.denom() as u64 == 0).then(|| (num / rate.denom() as u64) as usize)
}

struct WelchSum {
    spectrum: Option<Spectrum>,
    segments: usize,
}

impl WelchSum {
    fn add(&mut self, values: &[f64], rate_hz: f64, segment_len: usize) {
        let count = values.len() / segment_len;
        if count == 0 {
            return;
        }
        let s = welch_spectrum(values, rate_hz, segment_len);
        match &mut self.spectrum {
            None => {
                let mut s = s;
                s.amplitudes.iter_mut().for_each(|a| *a *= count as f64);
                self.spectrum = Some(s);
            }
            Some(acc) => {
                for (a, b) in acc.amplitudes.iter_mut().zip(&s.amplitudes) {
                    *a += b * count as f64;
                }
            }
        }
        self.segments += count;
    }

    fn finish(self) -> Option<Spectrum> {
        let n = self.segments as f64;
        self.spectrum.map(|mut s| {
            s.amplitudes.iter_mut().for_each(|a| *a /= n);
            s
        })
    }
}

struct SiteWeek {
    groups: [Vec<GroupSegment>; 2],
    hourly: Vec<HourSigma>,
    spectrum: Option<Spectrum>,
    windows: usize,
    unconverged: usize,
    skipped: Vec<SkippedDay>,
}

/// Decompose each site's critical-week data window by window and cut the
/// Group I and Group II hour ranges out of every day.
///
/// A site-day without full coverage, or with gaps too long to interpolate,
/// is skipped and listed in [`Extraction::skipped`].
pub fn form_groups(
    pmu: &[(Site, TimeSeries)],
    week: &CriticalWeek,
    cfg: &FrameworkConfig,
) -> Result<Extraction, PipelineError> {
    cfg.validate()?;
    let mut order: Vec<&(Site, TimeSeries)> = pmu.iter().collect();
    order.sort_by_key(|(site, _)| *site);
    if order.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(PipelineError::Config("duplicate site in PMU inputs".into()));
    }
    let mut out = Extraction {
        group_i: GroupDataset {
            label: GroupLabel::GroupI,
            hour_range: cfg.group_i_hours,
            sites: Vec::new(),
        },
        group_ii: GroupDataset {
            label: GroupLabel::GroupII,
            hour_range: cfg.group_ii_hours,
            sites: Vec::new(),
        },
        hourly_sigma: Vec::new(),
        spectra: Vec::new(),
        windows: 0,
        unconverged_windows: 0,
        skipped: Vec::new(),
    };
    for (site, series) in order {
        let w = site_week(*site, series, week, cfg)?;
        let [g1, g2] = w.groups;
        out.group_i.sites.push(SiteSegments {
            site: *site,
            segments: g1,
        });
        out.group_ii.sites.push(SiteSegments {
            site: *site,
            segments: g2,
        });
        out.hourly_sigma.push((*site, w.hourly));
        out.spectra.push((*site, w.spectrum));
        out.windows += w.windows;
        out.unconverged_windows += w.unconverged;
        out.skipped.extend(w.skipped);
    }
    Ok(out)
}

fn site_week(
    site: Site,
    series: &TimeSeries,
    week: &CriticalWeek,
    cfg: &FrameworkConfig,
) -> Result<SiteWeek, PipelineError> {
    let raw_rate = series.rate();
    let target = match cfg.decimate_to_hz {
        Some(hz) => {
            let t = SampleRate::hz(hz).map_err(|e| PipelineError::Config(e.to_string()))?;
            if raw_rate.integer_factor(t).is_none() {
                return Err(PipelineError::Config(format!(
                    "site {site}: cannot decimate {raw_rate} to {t} by an integer factor"
                )));
            }
            Some(t)
        }
        None => None,
    };
    let rate = target.unwrap_or(raw_rate);
    let config_err = |what: &str| PipelineError::Config(format!("site {site}: {what} is not a whole number of samples at {rate}"));
    let raw_per_day =
        samples_in(raw_rate, 86_400).ok_or_else(|| PipelineError::Config(format!("site {site}: a day is not a whole number of samples at {raw_rate}")))?;
    let per_hour = samples_in(rate, 3_600).ok_or_else(|| config_err("an hour"))?;
    let segment_len = samples_in(rate, cfg.spectrum_segment_s as u64).ok_or_else(|| config_err("the spectrum segment"))?;
    let w_hours = cfg.window_hours as usize;
    let per_window = per_hour * w_hours;

    let mut acc = SiteWeek {
        groups: [Vec::new(), Vec::new()],
        hourly: Vec::new(),
        spectrum: None,
        windows: 0,
        unconverged: 0,
        skipped: Vec::new(),
    };
    let mut welch = WelchSum {
        spectrum: None,
        segments: 0,
    };
    for date in week.days() {
        let start = local_midnight_utc_ms(date, cfg.utc_offset_minutes);
        let skip = |reason: String| SkippedDay { site, date, reason };
        let day = match slice_window_ms(series, start, start + DAY_MS) {
            Ok(d) => d,
            Err(_) => {
                acc.skipped.push(skip("no samples".into()));
                continue;
            }
        };
        if day.len() < raw_per_day {
            acc.skipped.push(skip(format!("{} of {raw_per_day} samples present", day.len())));
            continue;
        }
        let filled = fill_gaps(&day, cfg.max_gap_samples);
        if !filled.unfilled.is_empty() {
            acc.skipped.push(skip(format!(
                "{} gap runs could not be interpolated",
                filled.unfilled.len()
            )));
            continue;
        }
        let day = match target {
            Some(t) => decimate(&filled.series, SamplingSpec::new(t))
                .map_err(|e| PipelineError::Config(e.to_string()))?,
            None => filled.series,
        };

        let mut splits: Vec<DecompositionSplit> = Vec::with_capacity(24 / w_hours);
        for t in 0..24 / w_hours {
            let tile = day.sub_range(t * per_window, (t + 1) * per_window);
            let vmd_err = |source| PipelineError::Vmd { site, date, source };
            let result = vmd_decompose(&tile, &cfg.vmd).map_err(vmd_err)?;
            acc.windows += 1;
            if !result.converged {
                acc.unconverged += 1;
            }
            splits.push(split_from_result(&tile, &result).map_err(vmd_err)?);
        }

        for (t, split) in splits.iter().enumerate() {
            let dynamic = split.dynamic.values();
            for (k, chunk) in dynamic.chunks_exact(per_hour).enumerate() {
                acc.hourly.push(HourSigma {
                    date,
                    hour: (t * w_hours + k) as u8,
                    sigma_hz: std_dev_values(chunk).map_err(|e| PipelineError::Stats(e.to_string()))?,
                });
            }
            welch.add(dynamic, rate.as_f64(), segment_len);
        }

        for (g, label) in super::GroupLabel::ALL.iter().enumerate() {
            if let Some(seg) = cut_group(&splits, cfg.group_hours(*label), w_hours, per_hour, date) {
                acc.groups[g].push(seg);
            }
        }
    }
    acc.spectrum = welch.finish();
    Ok(acc)
}

/// Concatenate the parts of consecutive windows that fall in `[h0, h1)`.
fn cut_group(
    splits: &[DecompositionSplit],
    (h0, h1): (u8, u8),
    w_hours: usize,
    per_hour: usize,
    date: NaiveDate,
) -> Option<GroupSegment> {
    let (h0, h1) = (h0 as usize, h1 as usize);
    let mut first: Option<(TimeSeries, TimeSeries)> = None;
    let mut dynamic = Vec::new();
    let mut qss = Vec::new();
    for (t, split) in splits.iter().enumerate() {
        let (a, b) = (t * w_hours, (t + 1) * w_hours);
        let (o0, o1) = (a.max(h0), b.min(h1));
        if o0 >= o1 {
            continue;
        }
        let (from, to) = ((o0 - a) * per_hour, (o1 - a) * per_hour);
        if first.is_none() {
            first = Some((split.dynamic.sub_range(from, to), split.qss.sub_range(from, to)));
        }
        dynamic.extend_from_slice(&split.dynamic.values()[from..to]);
        qss.extend_from_slice(&split.qss.values()[from..to]);
    }
    let (d0, q0) = first?;
    Some(GroupSegment {
        date,
        dynamic: d0.with_values(dynamic).expect("finite decomposition"),
        qss: q0.with_values(qss).expect("finite decomposition"),
    })
}
