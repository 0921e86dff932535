use std::collections::HashMap;
use std::fs;
use std::io::BufWriter;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use super::groups::{Extraction, GroupLabel, SkippedDay};
use super::{form_groups, select_critical_week, CriticalWeek, FrameworkConfig, PipelineError, Site};
use crate::gridmetrics::{ibr_penetration, Region, RegionalHourRecord};
use crate::stats::export::{write_acf_csv, write_histogram_csv, write_spectrum_csv};
use crate::stats::{
    acf_values, find_peaks, histogram_values, normalize_across_groups, pearson, std_dev_values, Histogram,
    Spectrum, SpectrumPeak,
};
use crate::timeseries::TimeSeries;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Loaded inputs. Inertia, when supplied, is attached to the balance records.
#[derive(Debug, Clone)]
pub struct FrameworkInputs {
    pub balance: Vec<RegionalHourRecord>,
    pub inertia_supplied: bool,
    pub pmu: Vec<(Site, TimeSeries)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionPenetration {
    pub region: Region,
    /// Mean over the critical week.
    pub week_mean_pct: Option<f64>,
    /// Mean per local hour of day over the critical week.
    pub hourly_mean_pct: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractionSummary {
    pub windows: usize,
    pub unconverged_windows: usize,
    pub skipped_days: Vec<SkippedDay>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfWindow {
    pub date: NaiveDate,
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSiteStats {
    pub site: Site,
    pub region: Region,
    pub segments: usize,
    pub samples: usize,
    pub sigma_f_hz: Option<f64>,
    /// Min-max normalized over every site and group in the report.
    pub sigma_f_normalized: Option<f64>,
    pub skewness: Option<f64>,
    pub histogram_csv: Option<String>,
    pub acf: Vec<AcfWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub label: GroupLabel,
    pub hour_range: (u8, u8),
    pub sites: Vec<GroupSiteStats>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteCorrelation {
    pub site: Site,
    pub region: Region,
    pub hours: usize,
    pub r_inertia: Option<f64>,
    pub r_ibr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSection {
    pub inertia_available: bool,
    pub sites: Vec<SiteCorrelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillationReport {
    pub site: Site,
    pub resolution_hz: Option<f64>,
    pub median_amplitude: Option<f64>,
    pub peaks: Vec<SpectrumPeak>,
    /// A reported peak lies inside the oscillation band.
    pub oscillation_flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameworkReport {
    pub schema_version: u32,
    pub config: FrameworkConfig,
    pub penetration: Vec<RegionPenetration>,
    pub critical_week: CriticalWeek,
    pub extraction: ExtractionSummary,
    pub groups: Vec<GroupSummary>,
    pub correlations: CorrelationSection,
    pub oscillations: Vec<OscillationReport>,
    pub warnings: Vec<String>,
}

impl FrameworkReport {
    pub fn group(&self, label: GroupLabel) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.label == label)
    }

    pub fn correlation(&self, site: Site) -> Option<&SiteCorrelation> {
        self.correlations.sites.iter().find(|c| c.site == site)
    }

    pub fn oscillation(&self, site: Site) -> Option<&OscillationReport> {
        self.oscillations.iter().find(|o| o.site == site)
    }
}

/// `(date, r)` per day for one group and site.
type AcfTable = Vec<(String, Vec<f64>)>;

/// Report plus the data behind its CSV artifacts.
#[derive(Debug, Clone)]
pub struct FrameworkOutput {
    pub report: FrameworkReport,
    pub extraction: Extraction,
    histograms: Vec<(String, Histogram)>,
    acf: Vec<(String, AcfTable)>,
    spectra: Vec<(String, Spectrum)>,
}

impl FrameworkOutput {
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
        s.push('\n');
        s
    }

    /// Write `report.json` and the `histograms/`, `acf/` and `spectra/`
    /// directories under `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), PipelineError> {
        let io = |path: &Path| {
            let path = path.display().to_string();
            move |source| PipelineError::Io { path, source }
        };
        for sub in ["histograms", "acf", "spectra"] {
            let p = dir.join(sub);
            fs::create_dir_all(&p).map_err(io(&p))?;
        }
        let create = |p: &Path| fs::File::create(p).map(BufWriter::new).map_err(io(p));
        for (name, h) in &self.histograms {
            let p = dir.join("histograms").join(name);
            write_histogram_csv(create(&p)?, h).map_err(io(&p))?;
        }
        for (name, rows) in &self.acf {
            let p = dir.join("acf").join(name);
            write_acf_csv(create(&p)?, rows).map_err(io(&p))?;
        }
        for (name, s) in &self.spectra {
            let p = dir.join("spectra").join(name);
            write_spectrum_csv(create(&p)?, s).map_err(io(&p))?;
        }
        let p = dir.join("report.json");
        fs::write(&p, self.report_json()).map_err(io(&p))
    }
}

type HourKey = (Region, NaiveDate, u8);

/// Run penetration, critical-week selection, fluctuation extraction and
/// dynamic evaluation in order.
pub fn evaluate_framework(inputs: &FrameworkInputs, cfg: &FrameworkConfig) -> Result<FrameworkOutput, PipelineError> {
    cfg.validate()?;
    if inputs.pmu.is_empty() {
        return Err(PipelineError::Ingest("no PMU series supplied".into()));
    }
    let mut warnings = Vec::new();

    let mut penetration: HashMap<HourKey, f64> = HashMap::with_capacity(inputs.balance.len());
    let mut inertia: HashMap<HourKey, f64> = HashMap::new();
    for r in &inputs.balance {
        let p = ibr_penetration(r).map_err(PipelineError::Penetration)?;
        penetration.insert((r.region, r.date, r.hour), p);
        if let Some(h) = r.inertia_mws {
            inertia.insert((r.region, r.date, r.hour), h);
        }
    }

    let week = select_critical_week(&inputs.balance, cfg.region)?;
    let penetration_summary = Region::ALL
        .iter()
        .map(|&region| summarize_penetration(region, &week, &penetration))
        .collect();

    let extraction = form_groups(&inputs.pmu, &week, cfg)?;
    for d in &extraction.skipped {
        warnings.push(format!("site {} skipped {}: {}", d.site, d.date, d.reason));
    }
    if extraction.unconverged_windows > 0 {
        warnings.push(format!(
            "{} of {} VMD windows stopped at max_iters",
            extraction.unconverged_windows, extraction.windows
        ));
    }

    let mut histograms = Vec::new();
    let mut acf_tables = Vec::new();
    let mut groups = Vec::new();
    for label in GroupLabel::ALL {
        let dataset = extraction.group(label);
        let mut sites = Vec::new();
        for s in &dataset.sites {
            let values = s.dynamic_values();
            let mut stats = GroupSiteStats {
                site: s.site,
                region: s.site.region(),
                segments: s.segments.len(),
                samples: values.len(),
                sigma_f_hz: None,
                sigma_f_normalized: None,
                skewness: None,
                histogram_csv: None,
                acf: Vec::new(),
            };
            if values.len() >= 2 {
                stats.sigma_f_hz = Some(std_dev_values(&values).map_err(|e| PipelineError::Stats(e.to_string()))?);
                let h = histogram_values(&values, cfg.histogram_bin_hz).map_err(|e| PipelineError::Stats(e.to_string()))?;
                stats.skewness = h.skewness;
                let name = format!("{}_{}.csv", label.code(), s.site);
                stats.histogram_csv = Some(format!("histograms/{name}"));
                histograms.push((name, h.histogram));
            } else {
                warnings.push(format!("site {} has no {} data", s.site, label.code()));
            }
            let mut rows = Vec::new();
            for seg in &s.segments {
                match acf_values(seg.dynamic.values(), cfg.acf_max_lag) {
                    Ok(r) => {
                        rows.push((seg.date.to_string(), r.clone()));
                        stats.acf.push(AcfWindow { date: seg.date, r });
                    }
                    Err(e) => warnings.push(format!(
                        "site {} {} {}: acf skipped: {e}",
                        s.site,
                        label.code(),
                        seg.date
                    )),
                }
            }
            if !rows.is_empty() {
                acf_tables.push((format!("{}_{}.csv", label.code(), s.site), rows));
            }
            sites.push(stats);
        }
        groups.push(GroupSummary {
            label,
            hour_range: dataset.hour_range,
            sites,
        });
    }
    if groups.iter().all(|g| g.sites.iter().all(|s| s.sigma_f_hz.is_none())) {
        return Err(PipelineError::Stats("no group data for any site".into()));
    }
    normalize_sigmas(&mut groups);

    let correlations = correlate(&extraction, &penetration, &inertia, inputs.inertia_supplied, &mut warnings);
    if !inputs.inertia_supplied {
        warnings.push("inertia not supplied; r_inertia omitted".into());
    }

    let mut spectra = Vec::new();
    let oscillations = extraction
        .spectra
        .iter()
        .map(|(site, spectrum)| {
            let Some(s) = spectrum else {
                return OscillationReport {
                    site: *site,
                    resolution_hz: None,
                    median_amplitude: None,
                    peaks: Vec::new(),
                    oscillation_flagged: false,
                };
            };
            let median = s.median_amplitude();
            let mut peaks = find_peaks(s, cfg.oscillation_snr * median);
            peaks.retain(|p| p.amplitude > 0.0);
            peaks.truncate(cfg.max_peaks);
            let (b0, b1) = cfg.oscillation_band_hz;
            let flagged = peaks.iter().any(|p| p.freq_hz >= b0 && p.freq_hz <= b1);
            spectra.push((format!("{site}.csv"), s.clone()));
            OscillationReport {
                site: *site,
                resolution_hz: Some(s.resolution_hz),
                median_amplitude: Some(median),
                peaks,
                oscillation_flagged: flagged,
            }
        })
        .collect();

    let report = FrameworkReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: cfg.clone(),
        penetration: penetration_summary,
        critical_week: week,
        extraction: ExtractionSummary {
            windows: extraction.windows,
            unconverged_windows: extraction.unconverged_windows,
            skipped_days: extraction.skipped.clone(),
        },
        groups,
        correlations,
        oscillations,
        warnings,
    };
    Ok(FrameworkOutput {
        report,
        extraction,
        histograms,
        acf: acf_tables,
        spectra,
    })
}

fn summarize_penetration(region: Region, week: &CriticalWeek, pen: &HashMap<HourKey, f64>) -> RegionPenetration {
    let mut slots = vec![(0.0, 0usize); 24];
    for date in week.days() {
        for hour in 0..24u8 {
            if let Some(p) = pen.get(&(region, date, hour)) {
                slots[hour as usize].0 += p;
                slots[hour as usize].1 += 1;
            }
        }
    }
    let total: f64 = slots.iter().map(|s| s.0).sum();
    let count: usize = slots.iter().map(|s| s.1).sum();
    RegionPenetration {
        region,
        week_mean_pct: (count > 0).then(|| total / count as f64),
        hourly_mean_pct: slots.iter().map(|&(s, n)| (n > 0).then(|| s / n as f64)).collect(),
    }
}

fn normalize_sigmas(groups: &mut [GroupSummary]) {
    let sigmas: Vec<f64> = groups
        .iter()
        .flat_map(|g| g.sites.iter().filter_map(|s| s.sigma_f_hz))
        .collect();
    let normalized = normalize_across_groups(&sigmas);
    let mut it = normalized.values.into_iter();
    for s in groups.iter_mut().flat_map(|g| g.sites.iter_mut()) {
        if s.sigma_f_hz.is_some() {
            s.sigma_f_normalized = it.next();
        }
    }
}

fn correlate(
    extraction: &Extraction,
    penetration: &HashMap<HourKey, f64>,
    inertia: &HashMap<HourKey, f64>,
    inertia_supplied: bool,
    warnings: &mut Vec<String>,
) -> CorrelationSection {
    let sites = extraction
        .hourly_sigma
        .iter()
        .map(|(site, hours)| {
            let region = site.region();
            let mut sigma = Vec::new();
            let mut pen = Vec::new();
            let mut h = Vec::new();
            for hs in hours {
                let key = (region, hs.date, hs.hour);
                let Some(&p) = penetration.get(&key) else { continue };
                if inertia_supplied {
                    let Some(&i) = inertia.get(&key) else { continue };
                    h.push(i);
                }
                sigma.push(hs.sigma_hz);
                pen.push(p);
            }
            let mut corr = |what: &str, y: &[f64]| match pearson(&sigma, y) {
                Ok(r) if sigma.len() >= 3 => Some(r),
                Ok(_) => {
                    warnings.push(format!("site {site}: {what} correlation needs 3 hours, got {}", sigma.len()));
                    None
                }
                Err(e) => {
                    warnings.push(format!("site {site}: {what} correlation undefined: {e}"));
                    None
                }
            };
            let r_ibr = corr("ibr", &pen);
            let r_inertia = if inertia_supplied { corr("inertia", &h) } else { None };
            SiteCorrelation {
                site: *site,
                region,
                hours: sigma.len(),
                r_inertia,
                r_ibr,
            }
        })
        .collect();
    CorrelationSection {
        inertia_available: inertia_supplied,
        sites,
    }
}
