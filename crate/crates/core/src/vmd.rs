//! Variational mode decomposition solved with ADMM in the spectral domain.
//!
//! The signal is mirror-extended to twice its length, transformed once, and
//! the modes are updated on the non-negative half of the spectrum:
//!
//! ```text
//! u_k(v)  <- (f(v) - sum_{i != k} u_i(v) + lambda(v) / 2) / (1 + 2 alpha (v - w_k)^2)
//! w_k     <- sum v |u_k(v)|^2 / sum |u_k(v)|^2
//! lambda  <- lambda + tau (f - sum_k u_k)
//! ```
//!
//! Frequencies `v` and `w_k` are in cycles per sample, so `alpha` does not
//! depend on the sampling rate. The sample mean is removed before the
//! transform and returned inside the lowest-frequency mode; the ADMM loop
//! only sees the zero-mean signal.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::FftPlanner;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::timeseries::{TimeSeries, TimeSeriesError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VmdError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("input has {0} masked samples; fill gaps first")]
    Gaps(usize),
    #[error("input of {len} samples is too short for {modes} modes (need at least {need})")]
    TooShort { len: usize, modes: usize, need: usize },
    #[error("input is identically zero; center frequencies are undefined")]
    ZeroInput,
    #[error(transparent)]
    Series(#[from] TimeSeriesError),
}

/// How the center frequencies are seeded before the first sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitScheme {
    /// `w_k = k / (4n)` cycles per sample: evenly spaced over `[0, Nyquist/2)`.
    Uniform,
    /// All center frequencies start at DC.
    Zero,
    /// Sorted log-uniform draws over `[1/N, 1/2)` cycles per sample.
    Random(u64),
}

impl std::str::FromStr for InitScheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "zero" => Ok(Self::Zero),
            other => {
                let seed = other
                    .strip_prefix("random:")
                    .or_else(|| other.strip_prefix("random"))
                    .ok_or_else(|| format!("unknown init scheme `{other}`"))?;
                if seed.is_empty() {
                    return Ok(Self::Random(0));
                }
                seed.parse()
                    .map(Self::Random)
                    .map_err(|_| format!("invalid random seed `{seed}`"))
            }
        }
    }
}

impl std::fmt::Display for InitScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Uniform => f.write_str("uniform"),
            Self::Zero => f.write_str("zero"),
            Self::Random(seed) => write!(f, "random:{seed}"),
        }
    }
}

impl Serialize for InitScheme {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VmdConfig {
    pub n_modes: usize,
    /// Bandwidth penalty; larger values give narrower modes.
    pub alpha: f64,
    /// Dual ascent step. Zero lets the residual absorb noise.
    pub tau: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub init: InitScheme,
}

impl Default for VmdConfig {
    fn default() -> Self {
        Self {
            n_modes: 3,
            alpha: 2000.0,
            tau: 0.0,
            tol: 1e-7,
            max_iters: 500,
            init: InitScheme::Uniform,
        }
    }
}

impl VmdConfig {
    pub fn validate(&self) -> Result<(), VmdError> {
        if self.n_modes < 1 {
            return Err(VmdError::Config("n_modes must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(VmdError::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if !(self.tau >= 0.0 && self.tau.is_finite()) {
            return Err(VmdError::Config(format!("tau must be non-negative, got {}", self.tau)));
        }
        if !(self.tol > 0.0) {
            return Err(VmdError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VmdResult {
    /// Modes in ascending order of center frequency.
    pub modes: Vec<TimeSeries>,
    pub center_freqs_hz: Vec<f64>,
    /// `input - sum(modes)`.
    pub residual: TimeSeries,
    pub iterations: usize,
    pub converged: bool,
    pub final_delta: f64,
}

/// Quasi-steady-state component and the local fluctuation around it.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionSplit {
    pub qss: TimeSeries,
    pub dynamic: TimeSeries,
}

/// Decompose a gap-free series into `config.n_modes` band-limited modes.
///
/// Non-convergence is reported through [`VmdResult::converged`], never as an
/// error.
pub fn vmd_decompose(series: &TimeSeries, config: &VmdConfig) -> Result<VmdResult, VmdError> {
    config.validate()?;
    let gaps = series.gap_count();
    if gaps > 0 {
        return Err(VmdError::Gaps(gaps));
    }
    let need = 8 * config.n_modes;
    if series.len() < need {
        return Err(VmdError::TooShort {
            len: series.len(),
            modes: config.n_modes,
            need,
        });
    }
    let x = series.values();
    if x.iter().all(|&v| v == 0.0) {
        return Err(VmdError::ZeroInput);
    }

    let raw = admm(x, config);
    let fs = series.rate().as_f64();
    let modes = raw
        .modes
        .into_iter()
        .map(|m| series.with_values(m))
        .collect::<Result<Vec<_>, _>>()?;
    let mut residual = x.to_vec();
    for m in &modes {
        for (r, v) in residual.iter_mut().zip(m.values()) {
            *r -= v;
        }
    }
    Ok(VmdResult {
        modes,
        center_freqs_hz: raw.omega.iter().map(|w| w * fs).collect(),
        residual: series.with_values(residual)?,
        iterations: raw.iterations,
        converged: raw.converged,
        final_delta: raw.delta,
    })
}

/// QSS = lowest-frequency mode; dynamic = input - QSS.
pub fn split_qss_dynamic(
    series: &TimeSeries,
    config: &VmdConfig,
) -> Result<DecompositionSplit, VmdError> {
    let result = vmd_decompose(series, config)?;
    split_from_result(series, &result)
}

/// Build the split from an existing decomposition of `series`.
pub fn split_from_result(
    series: &TimeSeries,
    result: &VmdResult,
) -> Result<DecompositionSplit, VmdError> {
    let qss = result.modes[0].clone();
    let dynamic: Vec<f64> = series
        .values()
        .iter()
        .zip(qss.values())
        .map(|(s, q)| s - q)
        .collect();
    Ok(DecompositionSplit {
        dynamic: series.with_values(dynamic)?,
        qss,
    })
}

struct RawDecomposition {
    modes: Vec<Vec<f64>>,
    /// Cycles per sample, ascending.
    omega: Vec<f64>,
    iterations: usize,
    converged: bool,
    delta: f64,
}

fn initial_omega(init: InitScheme, n_modes: usize, len: usize) -> Vec<f64> {
    match init {
        InitScheme::Uniform => (0..n_modes).map(|k| 0.25 * k as f64 / n_modes as f64).collect(),
        InitScheme::Zero => vec![0.0; n_modes],
        InitScheme::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lo = (1.0 / len as f64).ln();
            let hi = 0.5f64.ln();
            let mut w: Vec<f64> = (0..n_modes)
                .map(|_| (lo + (hi - lo) * rng.gen::<f64>()).exp())
                .collect();
            w.sort_by(f64::total_cmp);
            w
        }
    }
}

fn admm(x: &[f64], config: &VmdConfig) -> RawDecomposition {
    let n = x.len();
    let k_modes = config.n_modes;
    let mean = x.iter().sum::<f64>() / n as f64;

    // Mirror extension: reversed first half, signal, reversed second half.
    let half = n.div_ceil(2);
    let m = 2 * n;
    let mut ext: Vec<Complex64> = Vec::with_capacity(m);
    ext.extend(x[..half].iter().rev().map(|v| Complex64::new(v - mean, 0.0)));
    ext.extend(x.iter().map(|v| Complex64::new(v - mean, 0.0)));
    ext.extend(x[half..].iter().rev().map(|v| Complex64::new(v - mean, 0.0)));

    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(m).process(&mut ext);
    // One-sided spectrum, bins 0..=n; bin j sits at j / m cycles per sample.
    let bins = n + 1;
    let f_hat: Vec<Complex64> = ext[..bins].to_vec();
    let inv_m = 1.0 / m as f64;
    let energy: f64 = f_hat.iter().map(|c| c.norm_sqr()).sum();

    let mut omega = initial_omega(config.init, k_modes, n);
    // Mode-major, split re/im: u_re[k * bins + j] is mode k at bin j.
    let mut u_re = vec![0.0; bins * k_modes];
    let mut u_im = vec![0.0; bins * k_modes];
    let mut iterations = 0;
    let mut converged = false;
    let mut delta = 0.0;

    if energy > 0.0 {
        let floor = f64::EPSILON * energy;
        // F + lambda / 2; equals F while tau = 0.
        let mut t_re: Vec<f64> = f_hat.iter().map(|c| c.re).collect();
        let mut t_im: Vec<f64> = f_hat.iter().map(|c| c.im).collect();
        let two_alpha = 2.0 * config.alpha;
        while iterations < config.max_iters {
            iterations += 1;
            let stats = sweep(&mut u_re, &mut u_im, &t_re, &t_im, &omega, two_alpha, inv_m);
            delta = 0.0;
            for (k, st) in stats.iter().enumerate() {
                if st.den > 0.0 {
                    omega[k] = st.num / st.den;
                }
                delta += st.diff / st.old_norm.max(floor);
            }
            if config.tau > 0.0 {
                let half_tau = 0.5 * config.tau;
                for j in 0..bins {
                    let (mut sr, mut si) = (0.0, 0.0);
                    for k in 0..k_modes {
                        sr += u_re[k * bins + j];
                        si += u_im[k * bins + j];
                    }
                    t_re[j] += (f_hat[j].re - sr) * half_tau;
                    t_im[j] += (f_hat[j].im - si) * half_tau;
                }
            }
            if delta < config.tol {
                converged = true;
                break;
            }
        }
    } else {
        converged = true;
    }

    let mut order: Vec<usize> = (0..k_modes).collect();
    order.sort_by(|&a, &b| omega[a].total_cmp(&omega[b]).then(a.cmp(&b)));

    let inverse = planner.plan_fft_inverse(m);
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let modes = order
        .iter()
        .enumerate()
        .map(|(rank, &k)| {
            let at = |j: usize| Complex64::new(u_re[k * bins + j], u_im[k * bins + j]);
            buf[0] = Complex64::new(at(0).re, 0.0);
            buf[n] = Complex64::new(at(n).re, 0.0);
            for j in 1..n {
                buf[j] = at(j);
                buf[m - j] = at(j).conj();
            }
            inverse.process(&mut buf);
            let scale = 1.0 / m as f64;
            let offset = if rank == 0 { mean } else { 0.0 };
            buf[half..half + n]
                .iter()
                .map(|c| c.re * scale + offset)
                .collect()
        })
        .collect();

    RawDecomposition {
        modes,
        omega: order.iter().map(|&k| omega[k]).collect(),
        iterations,
        converged,
        delta,
    }
}

#[derive(Default, Clone, Copy)]
struct SweepStats {
    diff: f64,
    old_norm: f64,
    num: f64,
    den: f64,
}

const LANES: usize = 8;

#[derive(Default, Clone, Copy)]
struct LaneStats {
    diff: [f64; LANES],
    old_norm: [f64; LANES],
    num: [f64; LANES],
    den: [f64; LANES],
}

/// One Gauss-Seidel pass over all modes. Mode k's filter depends only on its
/// own center frequency, and center frequencies change only after a full
/// sweep, so updating every mode bin by bin is the same pass as updating them
/// one whole mode at a time. Bins go in blocks of `LANES` with per-lane
/// accumulators so the loop vectorizes.
fn sweep(
    u_re: &mut [f64],
    u_im: &mut [f64],
    t_re: &[f64],
    t_im: &[f64],
    omega: &[f64],
    two_alpha: f64,
    inv_m: f64,
) -> Vec<SweepStats> {
    let bins = t_re.len();
    let k_modes = omega.len();
    let mut lanes = vec![LaneStats::default(); k_modes];
    let blocks = bins / LANES;
    for b in 0..blocks {
        let j0 = b * LANES;
        let mut nu = [0.0; LANES];
        let mut tot_re = [0.0; LANES];
        let mut tot_im = [0.0; LANES];
        for l in 0..LANES {
            nu[l] = (j0 + l) as f64 * inv_m;
        }
        for k in 0..k_modes {
            let r = &u_re[k * bins + j0..k * bins + j0 + LANES];
            let i = &u_im[k * bins + j0..k * bins + j0 + LANES];
            for l in 0..LANES {
                tot_re[l] += r[l];
                tot_im[l] += i[l];
            }
        }
        let tr = &t_re[j0..j0 + LANES];
        let ti = &t_im[j0..j0 + LANES];
        for (k, (&om, st)) in omega.iter().zip(lanes.iter_mut()).enumerate() {
            let r = &mut u_re[k * bins + j0..k * bins + j0 + LANES];
            let i = &mut u_im[k * bins + j0..k * bins + j0 + LANES];
            for l in 0..LANES {
                let dv = nu[l] - om;
                let w = 1.0 / (1.0 + two_alpha * dv * dv);
                let (old_re, old_im) = (r[l], i[l]);
                let oth_re = tot_re[l] - old_re;
                let oth_im = tot_im[l] - old_im;
                let new_re = (tr[l] - oth_re) * w;
                let new_im = (ti[l] - oth_im) * w;
                let p = new_re * new_re + new_im * new_im;
                let (d_re, d_im) = (new_re - old_re, new_im - old_im);
                st.diff[l] += d_re * d_re + d_im * d_im;
                st.old_norm[l] += old_re * old_re + old_im * old_im;
                st.num[l] += nu[l] * p;
                st.den[l] += p;
                tot_re[l] = oth_re + new_re;
                tot_im[l] = oth_im + new_im;
                r[l] = new_re;
                i[l] = new_im;
            }
        }
    }
    let mut out: Vec<SweepStats> = lanes
        .iter()
        .map(|st| SweepStats {
            diff: st.diff.iter().sum(),
            old_norm: st.old_norm.iter().sum(),
            num: st.num.iter().sum(),
            den: st.den.iter().sum(),
        })
        .collect();
    for j in blocks * LANES..bins {
        let nu = j as f64 * inv_m;
        let mut tot_re: f64 = (0..k_modes).map(|k| u_re[k * bins + j]).sum();
        let mut tot_im: f64 = (0..k_modes).map(|k| u_im[k * bins + j]).sum();
        for (k, (&om, st)) in omega.iter().zip(out.iter_mut()).enumerate() {
            let dv = nu - om;
            let w = 1.0 / (1.0 + two_alpha * dv * dv);
            let (old_re, old_im) = (u_re[k * bins + j], u_im[k * bins + j]);
            let oth_re = tot_re - old_re;
            let oth_im = tot_im - old_im;
            let new_re = (t_re[j] - oth_re) * w;
            let new_im = (t_im[j] - oth_im) * w;
            let p = new_re * new_re + new_im * new_im;
            st.diff += (new_re - old_re).powi(2) + (new_im - old_im).powi(2);
            st.old_norm += old_re * old_re + old_im * old_im;
            st.num += nu * p;
            st.den += p;
            tot_re = oth_re + new_re;
            tot_im = oth_im + new_im;
            u_re[k * bins + j] = new_re;
            u_im[k * bins + j] = new_im;
        }
    }
    out
}
