use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;

use super::config::RunConfig;
use super::{
    BalanceArgs, Cli, CliError, Command, CriticalWeekArgs, CurtailmentArgs, DecomposeArgs, FrameworkArgs, Metric,
    PmuArgs, RampsArgs, StatsArgs, SynthArgs, VmdArgs, EXIT_INGEST, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_OK,
    EXIT_STATS, EXIT_VMD, OUTPUT_SCHEMA_VERSION,
};
use crate::gridmetrics::csv_io::{load_balance_csv, load_curtailment_csv, load_inertia_csv, BalanceTable};
use crate::gridmetrics::{
    attach_inertia, curtailment_breakdown, hourly_curtailment_profile, ibr_penetration, net_load, ramp_histogram,
    ramps_over_runs, system_aggregate, system_penetration, CurtailReason, Region,
};
use crate::pipeline::{
    evaluate_framework, generate_synthetic, select_critical_week, FrameworkInputs, GroupLabel, Site,
    SyntheticScenario,
};
use crate::stats::export::{write_acf_csv, write_histogram_csv, write_spectrum_csv};
use crate::stats::{acf, amplitude_spectrum, histogram, spectrum_peaks, std_dev, StatReport, StatsError};
use crate::timeseries::pmu_csv::load_pmu_csv;
use crate::timeseries::{fill_gaps, SampleRate, TimeSeries};
use crate::vmd::{split_qss_dynamic, vmd_decompose, VmdError};

/// Iteration limit for single-series decompositions unless configured.
const SINGLE_SERIES_MAX_ITERS: usize = 500;

struct Ctx {
    cfg: RunConfig,
    quiet: bool,
}

impl Ctx {
    fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", msg.as_ref());
        }
    }

    fn warn(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("warning: {}", msg.as_ref());
        }
    }

    fn out_dir(&self) -> Result<PathBuf, CliError> {
        let dir = self.cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
        Ok(dir)
    }
}

pub(super) fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(CliError::input)?,
        None => RunConfig::default(),
    };
    if cli.out.is_some() {
        cfg.out = cli.out;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    let ctx = Ctx { cfg, quiet: cli.quiet };
    match cli.command {
        Command::Decompose(a) => decompose(&ctx, a),
        Command::Penetration(a) => penetration(&ctx, a),
        Command::Netload(a) => netload(&ctx, a),
        Command::Ramps(a) => ramps(&ctx, a),
        Command::Curtailment(a) => curtailment(&ctx, a),
        Command::Stats(a) => stats(&ctx, a),
        Command::CriticalWeek(a) => critical_week(&ctx, a),
        Command::Framework(a) => framework(&ctx, a),
        Command::Synth(a) => synth(&ctx, a),
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::input(format!("{}: {e}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    fs::File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("json value serializes");
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn rate_of(ctx: &Ctx, rate: Option<u32>) -> Result<SampleRate, CliError> {
    SampleRate::hz(rate.unwrap_or(ctx.cfg.pmu_rate_hz)).map_err(|e| CliError::input(e.to_string()))
}

fn load_series(path: &Path, rate: SampleRate, code: i32) -> Result<TimeSeries, CliError> {
    load_pmu_csv(path, rate).map_err(|e| CliError {
        code,
        message: format!("{}: {e}", path.display()),
    })
}

/// Interpolate short gaps; any run left masked is an input error.
fn gap_free(series: &TimeSeries, max_gap: usize, path: &Path) -> Result<TimeSeries, CliError> {
    let filled = fill_gaps(series, max_gap);
    if let Some(run) = filled.unfilled.first() {
        return Err(CliError::input(format!(
            "{}: line {}: gap of {} samples at timestamp {} ms cannot be interpolated (limit {max_gap})",
            path.display(),
            run.start + 2,
            run.len,
            series.timestamp_ms(run.start)
        )));
    }
    Ok(filled.series)
}

fn load_pmu_args(ctx: &Ctx, a: &PmuArgs) -> Result<TimeSeries, CliError> {
    let rate = rate_of(ctx, a.rate)?;
    let raw = load_series(&a.input, rate, EXIT_INPUT)?;
    gap_free(&raw, a.max_gap.unwrap_or(ctx.cfg.max_gap_samples), &a.input)
}

fn vmd_config(ctx: &Ctx, a: &VmdArgs) -> Result<crate::vmd::VmdConfig, CliError> {
    let mut cfg = ctx.cfg.clone();
    cfg.vmd_modes = a.modes.unwrap_or(cfg.vmd_modes);
    cfg.vmd_alpha = a.alpha.unwrap_or(cfg.vmd_alpha);
    cfg.vmd_tau = a.tau.unwrap_or(cfg.vmd_tau);
    cfg.vmd_tol = a.tol.unwrap_or(cfg.vmd_tol);
    cfg.vmd_max_iters = a.max_iters.or(cfg.vmd_max_iters);
    if let Some(init) = &a.init {
        cfg.vmd_init = init.clone();
    }
    cfg.vmd(SINGLE_SERIES_MAX_ITERS).map_err(CliError::input)
}

fn vmd_input_err(path: &Path) -> impl Fn(VmdError) -> CliError + '_ {
    move |e| CliError::input(format!("{}: {e}", path.display()))
}

fn decompose(ctx: &Ctx, a: DecomposeArgs) -> Result<i32, CliError> {
    let vmd = vmd_config(ctx, &a.vmd)?;
    let series = load_pmu_args(ctx, &a.pmu)?;
    let result = vmd_decompose(&series, &vmd).map_err(vmd_input_err(&a.pmu.input))?;
    let dir = ctx.out_dir()?;

    let path = dir.join("modes.csv");
    let mut w = create(&path)?;
    let mut header = vec!["timestamp_ms".to_string()];
    header.extend((0..result.modes.len()).map(|k| format!("mode_{k}")));
    header.push("residual".into());
    let io = io_err(&path);
    writeln!(w, "{}", header.join(",")).map_err(&io)?;
    for i in 0..series.len() {
        write!(w, "{}", series.timestamp_ms(i)).map_err(&io)?;
        for m in &result.modes {
            write!(w, ",{}", m.values()[i]).map_err(&io)?;
        }
        writeln!(w, ",{}", result.residual.values()[i]).map_err(&io)?;
    }
    w.flush().map_err(&io)?;

    write_json(
        &dir.join("centers.json"),
        &json!({
            "schema_version": OUTPUT_SCHEMA_VERSION,
            "center_freqs_hz": result.center_freqs_hz,
            "iterations": result.iterations,
            "converged": result.converged,
            "final_delta": result.final_delta,
            "samples": series.len(),
            "rate_hz": series.rate().as_f64(),
            "vmd": vmd,
        }),
    )?;
    let centers: Vec<String> = result.center_freqs_hz.iter().map(|f| format!("{f:.4}")).collect();
    ctx.say(format!(
        "decompose: {} modes at [{}] Hz after {} iterations ({})",
        result.modes.len(),
        centers.join(", "),
        result.iterations,
        if result.converged { "converged" } else { "not converged" }
    ));
    if !result.converged && a.strict {
        eprintln!(
            "error: no convergence within {} iterations (last change {:.3e})",
            result.iterations, result.final_delta
        );
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(EXIT_OK)
}

fn balance_path(ctx: &Ctx, flag: &Option<PathBuf>) -> Result<PathBuf, CliError> {
    flag.clone()
        .or_else(|| ctx.cfg.balance.clone())
        .ok_or_else(|| CliError::input("no balance file given (use --balance or `balance` in the config)"))
}

fn load_balance(ctx: &Ctx, a: &BalanceArgs, code: i32) -> Result<(PathBuf, BalanceTable), CliError> {
    let path = balance_path(ctx, &a.balance)?;
    let table = load_balance_csv(&path, a.combined_solar || ctx.cfg.combined_solar).map_err(|e| CliError {
        code,
        message: format!("{}: {e}", path.display()),
    })?;
    Ok((path, table))
}

fn penetration(ctx: &Ctx, a: BalanceArgs) -> Result<i32, CliError> {
    let (path, table) = load_balance(ctx, &a, EXIT_INPUT)?;
    let dir = ctx.out_dir()?;
    let out = dir.join("penetration.csv");
    let mut w = create(&out)?;
    let io = io_err(&out);
    writeln!(w, "date,hour,region,penetration_pct").map_err(&io)?;
    for (r, line) in table.records.iter().zip(&table.lines) {
        let p = ibr_penetration(r).map_err(|e| CliError::input(format!("{}: line {line}: {e}", path.display())))?;
        writeln!(w, "{},{},{},{}", r.date, r.hour, r.region, p).map_err(&io)?;
    }
    let system = system_aggregate(&table.records);
    for h in &system {
        if let Some(p) = system_penetration(h) {
            writeln!(w, "{},{},SYSTEM,{}", h.date, h.hour, p).map_err(&io)?;
        }
    }
    w.flush().map_err(&io)?;
    ctx.say(format!(
        "penetration: {} regional hours, {} system hours -> {}",
        table.records.len(),
        system.len(),
        out.display()
    ));
    Ok(EXIT_OK)
}

fn netload(ctx: &Ctx, a: BalanceArgs) -> Result<i32, CliError> {
    let (_, table) = load_balance(ctx, &a, EXIT_INPUT)?;
    let dir = ctx.out_dir()?;
    let out = dir.join("netload.csv");
    let mut w = create(&out)?;
    let io = io_err(&out);
    writeln!(w, "date,hour,region,net_load_mw").map_err(&io)?;
    for r in &table.records {
        writeln!(w, "{},{},{},{}", r.date, r.hour, r.region, net_load(r)).map_err(&io)?;
    }
    let system = system_aggregate(&table.records);
    for h in &system {
        writeln!(w, "{},{},SYSTEM,{}", h.date, h.hour, net_load(h)).map_err(&io)?;
    }
    w.flush().map_err(&io)?;
    ctx.say(format!(
        "netload: {} regional hours, {} system hours -> {}",
        table.records.len(),
        system.len(),
        out.display()
    ));
    Ok(EXIT_OK)
}

fn ramps(ctx: &Ctx, a: RampsArgs) -> Result<i32, CliError> {
    let horizons = a.horizons.clone().unwrap_or_else(|| ctx.cfg.ramp_horizons.clone());
    if horizons.is_empty() || horizons.contains(&0) {
        return Err(CliError::input("horizons must be positive hour counts"));
    }
    let bin = a.bin_mw.unwrap_or(ctx.cfg.ramp_bin_mw);
    if !(bin > 0.0 && bin.is_finite()) {
        return Err(CliError::input(format!("histogram bin width must be positive, got {bin}")));
    }
    let (path, table) = load_balance(ctx, &a.balance, EXIT_INPUT)?;

    let mut scopes: Vec<(String, Vec<(chrono::NaiveDateTime, f64)>)> = Vec::new();
    for region in Region::ALL {
        let mut pts: Vec<_> = table
            .records
            .iter()
            .zip(&table.lines)
            .filter(|(r, _)| r.region == region)
            .map(|(r, line)| (r.timestamp(), net_load(r), *line))
            .collect();
        if pts.is_empty() {
            continue;
        }
        pts.sort_by_key(|p| p.0);
        if let Some(d) = pts.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(CliError::input(format!(
                "{}: line {}: duplicate hour {} for region {region}",
                path.display(),
                d[1].2,
                d[1].0
            )));
        }
        scopes.push((region.code().to_string(), pts.into_iter().map(|(t, v, _)| (t, v)).collect()));
    }
    let system: Vec<_> = system_aggregate(&table.records)
        .iter()
        .map(|h| (h.timestamp(), net_load(h)))
        .collect();
    if !system.is_empty() {
        scopes.push(("SYSTEM".into(), system));
    }

    let dir = ctx.out_dir()?;
    let hist_dir = dir.join("ramp_histograms");
    fs::create_dir_all(&hist_dir).map_err(io_err(&hist_dir))?;
    let out = dir.join("ramps.csv");
    let mut w = create(&out)?;
    let io = io_err(&out);
    writeln!(w, "scope,horizon_h,start_date,start_hour,ramp_mw").map_err(&io)?;
    let mut total = 0;
    for (scope, pts) in &scopes {
        for &h in &horizons {
            let ramps = ramps_over_runs(pts, h);
            if ramps.is_empty() {
                ctx.warn(format!("{scope}: no contiguous run longer than {h} h"));
                continue;
            }
            for r in &ramps {
                writeln!(
                    w,
                    "{scope},{h},{},{},{}",
                    r.start.date(),
                    chrono::Timelike::hour(&r.start),
                    r.ramp_mw
                )
                .map_err(&io)?;
            }
            let values: Vec<f64> = ramps.iter().map(|r| r.ramp_mw).collect();
            let hist = ramp_histogram(&values, bin).map_err(|e| CliError::input(e.to_string()))?;
            let hp = hist_dir.join(format!("{scope}_h{h}.csv"));
            write_histogram_csv(create(&hp)?, &hist).map_err(io_err(&hp))?;
            total += ramps.len();
        }
    }
    w.flush().map_err(&io)?;
    ctx.say(format!(
        "ramps: {total} ramps over {} scopes and horizons {:?} -> {}",
        scopes.len(),
        horizons,
        out.display()
    ));
    Ok(EXIT_OK)
}

fn parse_hours(s: &str) -> Result<(u8, u8), CliError> {
    let bad = || CliError::input(format!("invalid hour range `{s}` (expected start-end with start < end <= 24)"));
    let (a, b) = s.split_once('-').ok_or_else(bad)?;
    let (a, b): (u8, u8) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a >= b || b > 24 {
        return Err(bad());
    }
    Ok((a, b))
}

fn curtailment(ctx: &Ctx, a: CurtailmentArgs) -> Result<i32, CliError> {
    let hours = match &a.hours {
        Some(s) => parse_hours(s)?,
        None => {
            let h = (ctx.cfg.curtailment_hour_start, ctx.cfg.curtailment_hour_end);
            parse_hours(&format!("{}-{}", h.0, h.1))?
        }
    };
    let path = a
        .curtailment
        .clone()
        .or_else(|| ctx.cfg.curtailment.clone())
        .ok_or_else(|| CliError::input("no curtailment file given (use --curtailment or `curtailment` in the config)"))?;
    let events = load_curtailment_csv(&path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let breakdown = curtailment_breakdown(&events, hours);
    let dir = ctx.out_dir()?;

    let out = dir.join("curtailment_breakdown.csv");
    let mut w = create(&out)?;
    let io = io_err(&out);
    writeln!(w, "reason,count,percentage").map_err(&io)?;
    if breakdown.total > 0 {
        for reason in CurtailReason::ALL {
            let share = breakdown.shares.iter().find(|s| s.reason == reason);
            let (count, pct) = share.map_or((0, 0.0), |s| (s.count, s.percentage));
            writeln!(w, "{},{count},{pct}", reason.code()).map_err(&io)?;
            ctx.say(format!("curtailment: {:<20} {count:>8} {pct:>7.2}%", reason.code()));
        }
    } else {
        ctx.warn(format!("no curtailment events in hours [{}, {})", hours.0, hours.1));
    }
    w.flush().map_err(&io)?;

    let out = dir.join("curtailment_profile.csv");
    let mut w = create(&out)?;
    let io = io_err(&out);
    writeln!(w, "hour,curtailed_wind_mw").map_err(&io)?;
    for (h, mw) in hourly_curtailment_profile(&events).iter().enumerate() {
        writeln!(w, "{h},{mw}").map_err(&io)?;
    }
    w.flush().map_err(&io)?;
    ctx.say(format!(
        "curtailment: {} events, {} in hours [{}, {})",
        events.len(),
        breakdown.total,
        hours.0,
        hours.1
    ));
    Ok(EXIT_OK)
}

fn stats(ctx: &Ctx, a: StatsArgs) -> Result<i32, CliError> {
    let stats_err = |e: StatsError| CliError {
        code: EXIT_STATS,
        message: e.to_string(),
    };
    let mut series = load_pmu_args(ctx, &a.pmu)?;
    if a.dynamic {
        let vmd = ctx.cfg.vmd(SINGLE_SERIES_MAX_ITERS).map_err(CliError::input)?;
        let split = split_qss_dynamic(&series, &vmd).map_err(|e| CliError {
            code: EXIT_VMD,
            message: e.to_string(),
        })?;
        series = split.dynamic;
    }
    let source = a.pmu.input.display().to_string();
    let window = (series.timestamp_ms(0), series.end_ms_exact().round().to_integer() as i64);
    let dir = ctx.out_dir()?;
    match a.metric {
        Metric::Std => {
            let sigma = std_dev(&series).map_err(stats_err)?;
            let report = StatReport::new("std_dev_hz", sigma, window, source).map_err(stats_err)?;
            write_json(
                &dir.join("stats.json"),
                &json!({"schema_version": OUTPUT_SCHEMA_VERSION, "reports": [report]}),
            )?;
            ctx.say(format!("std: {sigma:.6} Hz over {} samples", series.len()));
        }
        Metric::Hist => {
            let bin = a.bin.unwrap_or(ctx.cfg.histogram_bin_hz);
            let h = histogram(&series, bin).map_err(stats_err)?;
            let p = dir.join("histogram.csv");
            write_histogram_csv(create(&p)?, &h.histogram).map_err(io_err(&p))?;
            let mut reports = vec![];
            if let Some(s) = h.skewness {
                reports.push(StatReport::new("skewness", s, window, source.clone()).map_err(stats_err)?);
            }
            write_json(
                &dir.join("stats.json"),
                &json!({
                    "schema_version": OUTPUT_SCHEMA_VERSION,
                    "samples": h.samples,
                    "bin_width_hz": bin,
                    "reports": reports,
                }),
            )?;
            ctx.say(format!(
                "hist: {} bins, skewness {}",
                h.histogram.counts.len(),
                h.skewness.map_or("undefined".into(), |s| format!("{s:.4}"))
            ));
        }
        Metric::Acf => {
            let lag = a.max_lag.unwrap_or(ctx.cfg.acf_max_lag);
            let r = acf(&series, lag).map_err(stats_err)?;
            let p = dir.join("acf.csv");
            write_acf_csv(create(&p)?, &[("all".to_string(), r.clone())]).map_err(io_err(&p))?;
            ctx.say(format!("acf: lags 0..={lag}, r(1) = {:.4}", r.get(1).copied().unwrap_or(1.0)));
        }
        Metric::Spectrum => {
            let peaks = spectrum_peaks(&series, a.min_prominence).map_err(stats_err)?;
            let s = amplitude_spectrum(series.values(), series.rate().as_f64());
            let p = dir.join("spectrum.csv");
            write_spectrum_csv(create(&p)?, &s).map_err(io_err(&p))?;
            write_json(
                &dir.join("peaks.json"),
                &json!({
                    "schema_version": OUTPUT_SCHEMA_VERSION,
                    "source": source,
                    "resolution_hz": peaks.resolution_hz,
                    "peaks": peaks.peaks,
                }),
            )?;
            let top = peaks.peaks.first().map_or("none".into(), |p| format!("{:.4} Hz", p.freq_hz));
            ctx.say(format!("spectrum: {} peaks, top {top}", peaks.peaks.len()));
        }
    }
    Ok(EXIT_OK)
}

fn critical_week(ctx: &Ctx, a: CriticalWeekArgs) -> Result<i32, CliError> {
    let region: Region = a
        .region
        .as_deref()
        .unwrap_or(&ctx.cfg.region)
        .parse()
        .map_err(CliError::input)?;
    let (path, table) = load_balance(ctx, &a.balance, EXIT_INPUT)?;
    let week = select_critical_week(&table.records, region).map_err(|e| {
        let at = match &e {
            crate::pipeline::PipelineError::Penetration(crate::gridmetrics::GridError::ZeroDemand { date, hour, region }) => table
                .records
                .iter()
                .zip(&table.lines)
                .find(|(r, _)| r.date == *date && r.hour == *hour && r.region == *region)
                .map(|(_, l)| format!(" (line {l})"))
                .unwrap_or_default(),
            _ => String::new(),
        };
        CliError::input(format!("{}: {e}{at}", path.display()))
    })?;
    let dir = ctx.out_dir()?;
    write_json(
        &dir.join("critical_week.json"),
        &json!({"schema_version": OUTPUT_SCHEMA_VERSION, "critical_week": week}),
    )?;
    ctx.say(format!(
        "critical week: {} .. {} ({}, mean {:.2}%)",
        week.start_date, week.end_date, week.region, week.mean_penetration_pct
    ));
    Ok(EXIT_OK)
}

fn require_path(flag: &Option<PathBuf>, cfg: &Option<PathBuf>, what: &str) -> Result<PathBuf, CliError> {
    let p = flag
        .clone()
        .or_else(|| cfg.clone())
        .ok_or_else(|| CliError::input(format!("no {what} given (flag or config key `{what}`)")))?;
    if !p.exists() {
        return Err(CliError::input(format!("{what}: {} does not exist", p.display())));
    }
    Ok(p)
}

fn framework(ctx: &Ctx, a: FrameworkArgs) -> Result<i32, CliError> {
    let fw = ctx.cfg.framework().map_err(CliError::input)?;
    let rate = rate_of(ctx, a.rate)?;
    let pmu_dir = require_path(&a.pmu_dir, &ctx.cfg.pmu_dir, "pmu_dir")?;
    let balance_path = require_path(&a.balance, &ctx.cfg.balance, "balance")?;
    let inertia_path = match a.inertia.clone().or_else(|| ctx.cfg.inertia.clone()) {
        Some(p) if !p.exists() => {
            return Err(CliError::input(format!("inertia: {} does not exist", p.display())))
        }
        other => other,
    };
    let dir = ctx.out_dir()?;
    let ingest = |e: String| CliError {
        code: EXIT_INGEST,
        message: format!("ingest: {e}"),
    };

    let mut balance = load_balance_csv(&balance_path, ctx.cfg.combined_solar)
        .map_err(|e| ingest(format!("{}: {e}", balance_path.display())))?
        .records;
    let inertia_supplied = match &inertia_path {
        Some(p) => {
            let rows = load_inertia_csv(p).map_err(|e| ingest(format!("{}: {e}", p.display())))?;
            attach_inertia(&mut balance, &rows);
            true
        }
        None => {
            ctx.warn("no inertia file configured; correlations with inertia will be absent");
            false
        }
    };
    let mut pmu = Vec::new();
    for site in Site::ALL {
        let p = pmu_dir.join(format!("{site}.csv"));
        if !p.exists() {
            ctx.warn(format!("no PMU file for site {site} ({})", p.display()));
            continue;
        }
        pmu.push((site, load_series(&p, rate, EXIT_INGEST).map_err(|e| ingest(e.message))?));
    }
    if pmu.is_empty() {
        return Err(ingest(format!("no <SITE>.csv files in {}", pmu_dir.display())));
    }
    ctx.say(format!(
        "ingest: {} balance rows, inertia {}, {} PMU series",
        balance.len(),
        if inertia_supplied { "attached" } else { "absent" },
        pmu.len()
    ));

    let inputs = FrameworkInputs {
        balance,
        inertia_supplied,
        pmu,
    };
    let output = evaluate_framework(&inputs, &fw)?;
    let r = &output.report;
    if let Some(p) = r.penetration.iter().find(|p| p.region == fw.region) {
        ctx.say(format!(
            "penetration: {} week mean {:.2}%",
            p.region,
            p.week_mean_pct.unwrap_or(f64::NAN)
        ));
    }
    ctx.say(format!(
        "critical week: {} .. {} ({}, mean {:.2}%)",
        r.critical_week.start_date,
        r.critical_week.end_date,
        r.critical_week.region,
        r.critical_week.mean_penetration_pct
    ));
    ctx.say(format!(
        "extraction: {} windows, {} at max_iters, {} site-days skipped",
        r.extraction.windows,
        r.extraction.unconverged_windows,
        r.extraction.skipped_days.len()
    ));
    let sigma = |label: GroupLabel| {
        r.group(label)
            .map(|g| {
                g.sites
                    .iter()
                    .map(|s| format!("{}={}", s.site, s.sigma_f_hz.map_or("-".into(), |v| format!("{v:.5}"))))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .unwrap_or_default()
    };
    let flagged: Vec<String> = r
        .oscillations
        .iter()
        .filter(|o| o.oscillation_flagged)
        .map(|o| o.site.to_string())
        .collect();
    ctx.say(format!(
        "evaluation: sigma_f group_i [{}] group_ii [{}]; oscillation at [{}]",
        sigma(GroupLabel::GroupI),
        sigma(GroupLabel::GroupII),
        flagged.join(" ")
    ));
    for w in &r.warnings {
        ctx.warn(w);
    }
    output.write_to(&dir)?;
    ctx.say(format!("output: {}", dir.join("report.json").display()));
    Ok(EXIT_OK)
}

fn synth(ctx: &Ctx, a: SynthArgs) -> Result<i32, CliError> {
    let mut scenario = match &a.scenario {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            toml::from_str::<SyntheticScenario>(&text)
                .map_err(|e| CliError::input(format!("{}: {e}", p.display())))?
        }
        None => SyntheticScenario::default(),
    };
    if let Some(seed) = ctx.cfg.seed {
        scenario.seed = seed;
    }
    if let Some(rate) = a.rate {
        scenario.pmu_rate_hz = rate;
    }
    scenario.validate().map_err(|e| CliError::input(format!("invalid scenario: {e}")))?;
    let data = generate_synthetic(&scenario).map_err(CliError::input)?;
    let dir = ctx.out_dir()?;
    data.write_to(&dir).map_err(io_err(&dir))?;

    let scenario_path = dir.join("scenario.toml");
    let text = toml::to_string(&scenario).expect("scenario serializes");
    fs::write(&scenario_path, text).map_err(io_err(&scenario_path))?;
    let run_path = dir.join("framework.toml");
    let run = format!(
        "schema_version = {}\npmu_dir = \"pmu\"\npmu_rate_hz = {}\nbalance = \"balance.csv\"\ninertia = \"inertia.csv\"\ncurtailment = \"curtailment.csv\"\nutc_offset_minutes = {}\nseed = {}\n",
        super::CONFIG_SCHEMA_VERSION,
        scenario.pmu_rate_hz,
        scenario.utc_offset_minutes,
        scenario.seed
    );
    fs::write(&run_path, run).map_err(io_err(&run_path))?;
    ctx.say(format!(
        "synth: seed {}, {} balance rows, {} curtailment events, {} PMU series at {} Hz, peak week from {} -> {}",
        scenario.seed,
        data.balance.len(),
        data.curtailment.len(),
        data.pmu.len(),
        scenario.pmu_rate_hz,
        scenario.peak_week_start(),
        dir.display()
    ));
    Ok(EXIT_OK)
}
