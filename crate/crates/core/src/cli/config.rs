use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::gridmetrics::{Region, DEFAULT_RAMP_HORIZONS};
use crate::pipeline::FrameworkConfig;
use crate::vmd::{InitScheme, VmdConfig};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Max iterations per window for the framework unless configured.
pub const FRAMEWORK_MAX_ITERS: usize = 100;

/// Flat TOML run configuration. Relative paths resolve against the file's
/// directory; command-line flags override file values.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    /// Directory holding one `<SITE>.csv` per PMU.
    pub pmu_dir: Option<PathBuf>,
    pub pmu_rate_hz: u32,
    pub balance: Option<PathBuf>,
    pub inertia: Option<PathBuf>,
    pub curtailment: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Balance tables whose solar column already includes DER.
    pub combined_solar: bool,
    pub region: String,
    pub utc_offset_minutes: i32,
    pub vmd_modes: usize,
    pub vmd_alpha: f64,
    pub vmd_tau: f64,
    pub vmd_tol: f64,
    /// Unset: 500 for `decompose` and `stats`, 100 per framework window.
    pub vmd_max_iters: Option<usize>,
    pub vmd_init: String,
    pub window_hours: u8,
    pub group_i_start: u8,
    pub group_i_end: u8,
    pub group_ii_start: u8,
    pub group_ii_end: u8,
    pub max_gap_samples: usize,
    pub decimate_to_hz: Option<u32>,
    pub histogram_bin_hz: f64,
    pub ramp_bin_mw: f64,
    pub ramp_horizons: Vec<usize>,
    pub acf_max_lag: usize,
    pub spectrum_segment_s: u32,
    pub oscillation_band_low_hz: f64,
    pub oscillation_band_high_hz: f64,
    pub oscillation_snr: f64,
    pub max_peaks: usize,
    pub curtailment_hour_start: u8,
    pub curtailment_hour_end: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fw = FrameworkConfig::default();
        let vmd = VmdConfig::default();
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            pmu_dir: None,
            pmu_rate_hz: 30,
            balance: None,
            inertia: None,
            curtailment: None,
            out: None,
            seed: None,
            combined_solar: false,
            region: fw.region.code().to_string(),
            utc_offset_minutes: fw.utc_offset_minutes,
            vmd_modes: vmd.n_modes,
            vmd_alpha: vmd.alpha,
            vmd_tau: vmd.tau,
            vmd_tol: vmd.tol,
            vmd_max_iters: None,
            vmd_init: vmd.init.to_string(),
            window_hours: fw.window_hours,
            group_i_start: fw.group_i_hours.0,
            group_i_end: fw.group_i_hours.1,
            group_ii_start: fw.group_ii_hours.0,
            group_ii_end: fw.group_ii_hours.1,
            max_gap_samples: fw.max_gap_samples,
            decimate_to_hz: fw.decimate_to_hz,
            histogram_bin_hz: fw.histogram_bin_hz,
            ramp_bin_mw: 100.0,
            ramp_horizons: DEFAULT_RAMP_HORIZONS.to_vec(),
            acf_max_lag: fw.acf_max_lag,
            spectrum_segment_s: fw.spectrum_segment_s,
            oscillation_band_low_hz: fw.oscillation_band_hz.0,
            oscillation_band_high_hz: fw.oscillation_band_hz.1,
            oscillation_snr: fw.oscillation_snr,
            max_peaks: fw.max_peaks,
            curtailment_hour_start: 8,
            curtailment_hour_end: 11,
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        if cfg.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(format!(
                "unsupported schema_version {} (expected {CONFIG_SCHEMA_VERSION})",
                cfg.schema_version
            ));
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut cfg = Self::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.pmu_dir, &mut cfg.balance, &mut cfg.inertia, &mut cfg.curtailment, &mut cfg.out]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn region(&self) -> Result<Region, String> {
        self.region.parse()
    }

    /// VMD settings; `default_iters` applies when `vmd_max_iters` is unset.
    pub fn vmd(&self, default_iters: usize) -> Result<VmdConfig, String> {
        let mut init: InitScheme = self.vmd_init.parse()?;
        if let (InitScheme::Random(_), Some(seed)) = (init, self.seed) {
            init = InitScheme::Random(seed);
        }
        let cfg = VmdConfig {
            n_modes: self.vmd_modes,
            alpha: self.vmd_alpha,
            tau: self.vmd_tau,
            tol: self.vmd_tol,
            max_iters: self.vmd_max_iters.unwrap_or(default_iters),
            init,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn framework(&self) -> Result<FrameworkConfig, String> {
        let cfg = FrameworkConfig {
            region: self.region()?,
            utc_offset_minutes: self.utc_offset_minutes,
            vmd: self.vmd(FRAMEWORK_MAX_ITERS)?,
            window_hours: self.window_hours,
            group_i_hours: (self.group_i_start, self.group_i_end),
            group_ii_hours: (self.group_ii_start, self.group_ii_end),
            max_gap_samples: self.max_gap_samples,
            decimate_to_hz: self.decimate_to_hz,
            histogram_bin_hz: self.histogram_bin_hz,
            acf_max_lag: self.acf_max_lag,
            spectrum_segment_s: self.spectrum_segment_s,
            oscillation_band_hz: (self.oscillation_band_low_hz, self.oscillation_band_high_hz),
            oscillation_snr: self.oscillation_snr,
            max_peaks: self.max_peaks,
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}
