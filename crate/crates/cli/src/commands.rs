//! Subcommand implementations.
//!
//! Every command follows the same shape: resolve configuration (flag values
//! override file values, which override built-in defaults), load inputs,
//! call into the library, write CSV/SVG artifacts into `--out-dir`, and
//! print a short human summary to stdout. All file output is deterministic:
//! rerunning a command on the same inputs produces byte-identical files.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use chrono::{Duration, NaiveDate};
use pvcsd::clearsky::SiteConfig;
use pvcsd::datagen::{self, DayType};
use pvcsd::estimator::{self, AdaptOutcome, EstimationConfig, ParamTrajectory, RunResult};
use pvcsd::forecast::{
    self, ForecastKind, ForecastSeries, WeatherSet, DAY_AHEAD_ISSUE_HOUR, HOUR_AHEAD_LEAD_MINUTES,
};
use pvcsd::io::{self, ConfigFile, Dataset};
use pvcsd::metrics;
use pvcsd::series::SampleSeries;
use pvcsd::{Error, Result};
use rayon::prelude::*;

use crate::svg::Chart;

/// Environment variable consulted when `--config` is not given.
pub const CONFIG_ENV: &str = "PVCSD_CONFIG";

pub fn resolve_config(flag: Option<PathBuf>) -> Result<ConfigFile> {
    let path = match flag {
        Some(p) => p,
        None => match std::env::var(CONFIG_ENV) {
            Ok(v) if !v.is_empty() => PathBuf::from(v),
            _ => {
                return Err(Error::invalid(format!(
                    "no configuration file: pass --config or set {CONFIG_ENV}"
                )))
            }
        },
    };
    io::load_config(&path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Shortest f64 text that parses back to the same value (file output).
fn f(v: f64) -> String {
    format!("{v}")
}

fn light_sample_count(series: &SampleSeries) -> usize {
    series.samples().iter().filter(|s| s.i_cs_wm2 > 0.0).count()
}

/// Share of light samples covered by accepted (adapted) windows, percent.
/// Accepted windows never overlap, so the ratio is at most 100.
fn detected_pct(run: &RunResult, series: &SampleSeries) -> f64 {
    let light = light_sample_count(series);
    if light == 0 {
        return 0.0;
    }
    let covered: usize = run
        .records
        .iter()
        .filter(|r| r.adapted == AdaptOutcome::Yes)
        .map(|r| r.len)
        .sum();
    covered as f64 / light as f64 * 100.0
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

pub struct EstimateArgs {
    pub dataset: PathBuf,
    pub config: Option<PathBuf>,
    pub beta0: Option<f64>,
    pub l_min: Option<usize>,
    pub forgetting: Option<f64>,
    pub out_dir: PathBuf,
}

fn estimation_config(cfg: &ConfigFile, args: &EstimateArgs) -> Result<EstimationConfig> {
    let p_nom = cfg.p_nom_kw()?;
    let mut est = cfg.estimation(p_nom)?;
    if let Some(b) = args.beta0 {
        est.beta0 = b;
    }
    if let Some(l) = args.l_min {
        est.l_min = l;
    }
    if let Some(lambda) = args.forgetting {
        est.forgetting = lambda;
    }
    est.validate()?;
    Ok(est)
}

pub fn cmd_estimate(args: EstimateArgs) -> Result<()> {
    let cfg = resolve_config(args.config.clone())?;
    let site = cfg.site()?;
    let est = estimation_config(&cfg, &args)?;
    let dataset = io::load_dataset(&args.dataset, &site)?;
    let series = &dataset.series;

    if light_sample_count(series) == 0 {
        eprintln!("warning: dataset has no light samples; nothing to estimate");
    }
    let run = estimator::run(series, &site, &est, None)?;

    ensure_dir(&args.out_dir)?;
    let traj_path = args.out_dir.join("trajectory.csv");
    let log_path = args.out_dir.join("detection_log.csv");
    let svg_path = args.out_dir.join("estimate.svg");
    io::save_trajectory(&traj_path, &run.trajectory)?;
    io::save_detection_log(&log_path, &run.records)?;
    fs::write(&svg_path, trajectory_chart(&run.trajectory).render())?;

    let adapted = run
        .records
        .iter()
        .filter(|r| r.adapted == AdaptOutcome::Yes)
        .count();
    let rolled = run
        .records
        .iter()
        .filter(|r| r.adapted == AdaptOutcome::RolledBack)
        .count();
    let p = run.final_params;
    println!(
        "samples: {} ({} light)",
        series.len(),
        light_sample_count(series)
    );
    println!(
        "windows evaluated: {}, adapted: {}, rolled back: {}",
        run.records.len(),
        adapted,
        rolled
    );
    println!(
        "detected clear samples: {:.1}% of light samples",
        detected_pct(&run, series)
    );
    println!(
        "final estimate: mu1={:.6} mu2={:.4e} mu3={:.4e}",
        p.mu1, p.mu2, p.mu3
    );
    println!(
        "wrote {}, {}, {}",
        traj_path.display(),
        log_path.display(),
        svg_path.display()
    );
    Ok(())
}

/// Coefficient trajectories on a shared axis; the second and third
/// coefficients are upscaled to comparable magnitude (see legend).
fn trajectory_chart(traj: &ParamTrajectory) -> Chart {
    let t0 = traj.entries()[0].0;
    let day = |t: chrono::DateTime<chrono::Utc>| (t - t0).num_seconds() as f64 / 86_400.0;
    let mu1: Vec<(f64, f64)> = traj
        .entries()
        .iter()
        .map(|(t, p)| (day(*t), p.mu1))
        .collect();
    let mu2: Vec<(f64, f64)> = traj
        .entries()
        .iter()
        .map(|(t, p)| (day(*t), p.mu2 * 1e3))
        .collect();
    let mu3: Vec<(f64, f64)> = traj
        .entries()
        .iter()
        .map(|(t, p)| (day(*t), p.mu3 * 1e2))
        .collect();
    Chart::new(
        "Parameter estimate over time",
        "days since start",
        "coefficient (scaled)",
    )
    .line("mu1", mu1)
    .line("mu2 x1e3", mu2)
    .line("mu3 x1e2", mu3)
}

// ---------------------------------------------------------------------------
// forecast
// ---------------------------------------------------------------------------

pub struct ForecastArgs {
    pub dataset: PathBuf,
    pub trajectory: PathBuf,
    pub kind: String,
    pub config: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub out_dir: PathBuf,
}

pub fn cmd_forecast(args: ForecastArgs) -> Result<()> {
    let cfg = resolve_config(args.config.clone())?;
    let site = cfg.site()?;
    let kind = ForecastKind::parse(&args.kind)?;
    let dataset = io::load_dataset(&args.dataset, &site)?;
    let traj = io::load_trajectory(&args.trajectory)?;
    let series = &dataset.series;
    let step = series.step();

    let mut out = ForecastSeries::default();
    let mut skipped = 0usize;
    match kind {
        ForecastKind::DayAhead => {
            let weather = dataset.weather(&site)?;
            for day in series.days(&site) {
                let prev = day
                    .date
                    .pred_opt()
                    .ok_or_else(|| Error::invalid("date underflow before first day"))?;
                let issued = site.local_midnight_utc(prev) + Duration::hours(DAY_AHEAD_ISSUE_HOUR);
                if traj.latest_at(issued).is_none() {
                    skipped += 1;
                    continue;
                }
                out.extend(forecast::da_series(&traj, &weather, &site, day.date, step)?);
            }
        }
        ForecastKind::HourAhead => {
            let weather = dataset.weather(&site)?;
            for day in series.days(&site) {
                let Some((lo, hi)) = series.light_bounds(day.range.clone()) else {
                    continue;
                };
                for k in lo..=hi {
                    let start = series.samples()[k].timestamp;
                    let issued = start - Duration::minutes(HOUR_AHEAD_LEAD_MINUTES);
                    if traj.latest_at(issued).is_none() {
                        skipped += 1;
                        continue;
                    }
                    out.extend(forecast::ha_series(&traj, &weather, &site, start, step)?);
                }
            }
        }
        ForecastKind::ClearSky => {
            let per_day = (Duration::days(1).num_seconds() / step.num_seconds()) as usize;
            for day in series.days(&site) {
                if day.range.len() != per_day {
                    eprintln!(
                        "warning: skipping partial day {} ({} of {} samples)",
                        day.date,
                        day.range.len(),
                        per_day
                    );
                    skipped += 1;
                    continue;
                }
                if traj.latest_at(site.local_midnight_utc(day.date)).is_none() {
                    skipped += 1;
                    continue;
                }
                // Forecast temperature where the dataset provides one, the
                // measured air temperature otherwise.
                let temps: Vec<f64> = day
                    .range
                    .clone()
                    .map(|i| {
                        dataset
                            .t_fc_c
                            .as_ref()
                            .and_then(|col| col[i])
                            .unwrap_or(series.samples()[i].t_c)
                    })
                    .collect();
                out.extend(forecast::cs_series(&traj, &site, day.date, step, &temps)?);
            }
        }
        ForecastKind::Persistence => {
            let days = series.days(&site);
            for day in days.iter().skip(1) {
                out.extend(forecast::odnp_series(series, &site, day.date)?);
            }
            skipped = 1; // the first day has no predecessor by construction
        }
    }

    if out.entries.is_empty() {
        return Err(Error::invalid(format!(
            "no {} forecasts could be issued for this dataset",
            kind.as_str()
        )));
    }
    ensure_dir(&args.out_dir)?;
    let out_path = args
        .out
        .clone()
        .unwrap_or_else(|| args.out_dir.join(format!("forecast_{}.csv", kind.as_str())));
    io::save_forecasts(&out_path, &out.entries)?;

    println!(
        "{} forecasts: {} entries, {} gaps, {} skipped issuances",
        kind.as_str(),
        out.entries.len(),
        out.gaps.len(),
        skipped
    );
    println!("wrote {}", out_path.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

pub struct EvaluateArgs {
    pub forecast: PathBuf,
    pub dataset: PathBuf,
    pub config: Option<PathBuf>,
    pub start_day: usize,
    pub out_dir: PathBuf,
}

/// Pairs forecast entries with measured samples on the evaluation mask
/// (light samples from `start_day` on, 1-based). Returns date-sorted rows.
fn aligned_rows(
    entries: &[forecast::ForecastEntry],
    series: &SampleSeries,
    site: &SiteConfig,
    start_day: usize,
) -> Vec<(NaiveDate, f64, f64)> {
    let mask = metrics::evaluation_mask(series, site, start_day);
    let mut rows: Vec<(NaiveDate, f64, f64)> = entries
        .iter()
        .filter_map(|e| {
            let idx = series.index_of(e.target)?;
            if !mask[idx] {
                return None;
            }
            Some((
                site.local_date(e.target),
                e.p_hat_kw,
                series.samples()[idx].p_m_kw,
            ))
        })
        .collect();
    rows.sort_by_key(|r| r.0);
    rows
}

pub fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let cfg = resolve_config(args.config.clone())?;
    let site = cfg.site()?;
    let p_nom = cfg.p_nom_kw()?;
    let dataset = io::load_dataset(&args.dataset, &site)?;
    let entries = io::load_forecasts(&args.forecast)?;

    let rows = aligned_rows(&entries, &dataset.series, &site, args.start_day);
    if rows.is_empty() {
        return Err(Error::invalid(format!(
            "no forecast entries fall on light samples from day {} on",
            args.start_day
        )));
    }
    let preds: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let meas: Vec<f64> = rows.iter().map(|r| r.2).collect();
    let report = metrics::evaluate(&preds, &meas, p_nom)?;
    let daily = metrics::daily_rmse(&rows)?;

    ensure_dir(&args.out_dir)?;
    let metrics_path = args.out_dir.join("metrics.csv");
    let daily_path = args.out_dir.join("daily_rmse.csv");
    let svg_path = args.out_dir.join("evaluate.svg");
    io::save_metrics(&metrics_path, &report)?;
    io::save_daily_rmse(&daily_path, &daily)?;

    let first_date = site.local_date(dataset.series.samples()[0].timestamp);
    let day_no = |d: NaiveDate| (d - first_date).num_days() as f64 + 1.0;
    let rmse_pts: Vec<(f64, f64)> = daily.iter().map(|r| (day_no(r.date), r.rmse_kw)).collect();
    let std_pts: Vec<(f64, f64)> = daily
        .iter()
        .map(|r| (day_no(r.date), r.measured_std_kw))
        .collect();
    let chart = Chart::new("Daily forecast error", "day", "kW")
        .line("rmse", rmse_pts)
        .line("measured std", std_pts);
    fs::write(&svg_path, chart.render())?;

    let opt = |v: Option<f64>| {
        v.map(|x| format!("{x:.6}"))
            .unwrap_or_else(|| "n/a".to_string())
    };
    println!(
        "evaluated {} forecast/measurement pairs from day {} on",
        report.n_samples, args.start_day
    );
    println!("rmse_kw: {:.4}", report.rmse_kw);
    println!("mbe_kw: {:.4}", report.mbe_kw);
    println!("mape_pct: {}", opt(report.mape_pct));
    println!("nrmse: {}", opt(report.nrmse));
    println!("r2: {}", opt(report.r2));
    println!("rmse_np: {:.6}", report.rmse_np);
    println!("mape_np_pct: {:.4}", report.mape_np_pct);
    println!(
        "wrote {}, {}, {}",
        metrics_path.display(),
        daily_path.display(),
        svg_path.display()
    );
    Ok(())
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

pub struct SimulateArgs {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<()> {
    let cfg = resolve_config(args.config.clone())?;
    let scenario = cfg.scenario()?;
    let seed = args.seed.unwrap_or(scenario.seed);
    let data = datagen::generate(&scenario.config, seed)?;
    let site = scenario.config.site;

    let (data, derated) = if scenario.pod_fraction > 0.0 {
        // The derating overlay draws from its own stream so that toggling it
        // does not reshuffle the base scenario.
        datagen::scale_clear_days(
            &data,
            &site,
            scenario.pod_fraction,
            scenario.pod_beta_range,
            seed.wrapping_add(1),
        )?
    } else {
        (data, Vec::new())
    };

    ensure_dir(&args.out_dir)?;
    let truth_path = args.out_dir.join("dataset_truth.csv");
    let observed_path = args.out_dir.join("dataset_observed.csv");
    let days_path = args.out_dir.join("scenario_days.csv");
    let truth = Dataset::from_generated(&data);
    io::save_dataset(&truth_path, &truth)?;
    io::save_dataset(&observed_path, &truth.without_benchmark())?;
    write_scenario_days(&days_path, &site, &data, &derated)?;

    let count = |want: fn(&DayType) -> bool| data.day_types.iter().filter(|t| want(t)).count();
    println!(
        "generated {} days (seed {}): {} clear, {} uniform, {} stochastic; {} derated",
        data.day_types.len(),
        seed,
        count(|t| matches!(t, DayType::Clear)),
        count(|t| matches!(t, DayType::Uniform(_))),
        count(|t| matches!(t, DayType::Stochastic(_))),
        derated.len()
    );
    println!(
        "wrote {}, {}, {}",
        truth_path.display(),
        observed_path.display(),
        days_path.display()
    );
    Ok(())
}

/// One row per scenario day: index, date, sky condition, and the derating
/// factor when the power-only overlay touched that day.
fn write_scenario_days(
    path: &Path,
    site: &SiteConfig,
    data: &datagen::GeneratedData,
    derated: &[datagen::ScaledDay],
) -> Result<()> {
    let days = data.series.days(site);
    let mut text = String::from("day,date,sky,derated_beta\n");
    for (idx, day) in days.iter().enumerate() {
        let beta = derated
            .iter()
            .find(|s| s.day_index == idx)
            .map(|s| f(s.beta))
            .unwrap_or_default();
        text.push_str(&format!(
            "{},{},{},{}\n",
            idx + 1,
            day.date,
            data.day_types[idx].encode(),
            beta
        ));
    }
    let mut file = fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

// ---------------------------------------------------------------------------
// sweep-beta0
// ---------------------------------------------------------------------------

pub struct SweepArgs {
    pub dataset: PathBuf,
    pub config: Option<PathBuf>,
    pub grid: String,
    pub start_day: usize,
    pub out_dir: PathBuf,
}

/// `start:end:step`, endpoints inclusive; values rounded to 10 decimals so
/// accumulated binary error does not leak into file output.
fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::invalid(format!(
            "grid must be start:end:step, got '{s}'"
        )));
    }
    let num = |p: &str| -> Result<f64> {
        p.parse::<f64>()
            .map_err(|_| Error::invalid(format!("bad grid number '{p}'")))
    };
    let (start, end, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if !(step > 0.0 && start <= end && start.is_finite() && end.is_finite()) {
        return Err(Error::invalid(format!(
            "grid needs start <= end and step > 0, got '{s}'"
        )));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..n)
        .map(|k| ((start + step * k as f64) * 1e10).round() / 1e10)
        .collect())
}

struct SweepRow {
    beta0: f64,
    detected_pct: f64,
    adapted_windows: usize,
    da_mape_np_pct: Option<f64>,
    mu_mean: [f64; 3],
    mu_std: [f64; 3],
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// End-of-day estimates (value after the last light sample of each day)
/// for days numbered `start_day` and later.
fn end_of_day_estimates(
    run: &RunResult,
    series: &SampleSeries,
    site: &SiteConfig,
    start_day: usize,
) -> Vec<pvcsd::pvusa::PvusaParams> {
    series
        .days(site)
        .iter()
        .enumerate()
        .filter(|(d, _)| d + 1 >= start_day)
        .filter_map(|(_, day)| {
            let (_, hi) = series.light_bounds(day.range.clone())?;
            Some(run.trajectory.entries()[hi].1)
        })
        .collect()
}

fn da_mape_for_run(
    run: &RunResult,
    series: &SampleSeries,
    site: &SiteConfig,
    weather: &WeatherSet,
    p_nom: f64,
    start_day: usize,
) -> Result<Option<f64>> {
    let mut entries = Vec::new();
    for (d, day) in series.days(site).iter().enumerate() {
        if d + 1 < start_day {
            continue;
        }
        let Some(prev) = day.date.pred_opt() else {
            continue;
        };
        let issued = site.local_midnight_utc(prev) + Duration::hours(DAY_AHEAD_ISSUE_HOUR);
        if run.trajectory.latest_at(issued).is_none() {
            continue;
        }
        let fs = forecast::da_series(&run.trajectory, weather, site, day.date, series.step())?;
        entries.extend(fs.entries);
    }
    let rows = aligned_rows(&entries, series, site, start_day);
    if rows.is_empty() {
        return Ok(None);
    }
    let preds: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let meas: Vec<f64> = rows.iter().map(|r| r.2).collect();
    Ok(Some(metrics::evaluate(&preds, &meas, p_nom)?.mape_np_pct))
}

pub fn cmd_sweep_beta0(args: SweepArgs) -> Result<()> {
    let cfg = resolve_config(args.config.clone())?;
    let site = cfg.site()?;
    let p_nom = cfg.p_nom_kw()?;
    let base = cfg.estimation(p_nom)?;
    let dataset = io::load_dataset(&args.dataset, &site)?;
    let series = &dataset.series;
    let grid = parse_grid(&args.grid)?;
    // Weather channels are optional for a sweep; without them the forecast
    // column stays empty.
    let weather = dataset.weather(&site).ok().filter(|w| !w.is_empty());

    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&beta0| -> Result<SweepRow> {
            let mut est = base.clone();
            est.beta0 = beta0;
            est.validate()?;
            let run = estimator::run(series, &site, &est, None)?;
            let eods = end_of_day_estimates(&run, series, &site, args.start_day);
            let col = |pick: fn(&pvcsd::pvusa::PvusaParams) -> f64| -> Vec<f64> {
                eods.iter().map(pick).collect()
            };
            let (m1, s1) = mean_std(&col(|p| p.mu1));
            let (m2, s2) = mean_std(&col(|p| p.mu2));
            let (m3, s3) = mean_std(&col(|p| p.mu3));
            let mape = match &weather {
                Some(w) => da_mape_for_run(&run, series, &site, w, p_nom, args.start_day)?,
                None => None,
            };
            Ok(SweepRow {
                beta0,
                detected_pct: detected_pct(&run, series),
                adapted_windows: run
                    .records
                    .iter()
                    .filter(|r| r.adapted == AdaptOutcome::Yes)
                    .count(),
                da_mape_np_pct: mape,
                mu_mean: [m1, m2, m3],
                mu_std: [s1, s2, s3],
            })
        })
        .collect::<Result<Vec<_>>>()?;

    ensure_dir(&args.out_dir)?;
    let csv_path = args.out_dir.join("sweep.csv");
    let svg_path = args.out_dir.join("sweep.svg");
    let mut text = String::from(
        "beta0,detected_pct,adapted_windows,da_mape_np_pct,\
         mu1_mean,mu1_std,mu2_mean,mu2_std,mu3_mean,mu3_std\n",
    );
    for r in &rows {
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            f(r.beta0),
            f(r.detected_pct),
            r.adapted_windows,
            r.da_mape_np_pct.map(f).unwrap_or_default(),
            f(r.mu_mean[0]),
            f(r.mu_std[0]),
            f(r.mu_mean[1]),
            f(r.mu_std[1]),
            f(r.mu_mean[2]),
            f(r.mu_std[2]),
        ));
    }
    fs::write(&csv_path, &text)?;

    let mut chart = Chart::new("Screening selectivity vs beta0", "beta0", "percent").line(
        "detected clear samples %",
        rows.iter().map(|r| (r.beta0, r.detected_pct)).collect(),
    );
    if rows.iter().any(|r| r.da_mape_np_pct.is_some()) {
        chart = chart.line(
            "DA MAPE_NP %",
            rows.iter()
                .map(|r| (r.beta0, r.da_mape_np_pct.unwrap_or(f64::NAN)))
                .collect(),
        );
    }
    fs::write(&svg_path, chart.render())?;

    println!("beta0   detected%  windows  da_mape_np%     mu1_mean");
    for r in &rows {
        println!(
            "{:<7.2} {:>9.2} {:>8} {:>12} {:>12.6}",
            r.beta0,
            r.detected_pct,
            r.adapted_windows,
            r.da_mape_np_pct
                .map(|v| format!("{v:.2}"))
                .unwrap_or_else(|| "n/a".to_string()),
            r.mu_mean[0]
        );
    }
    println!("wrote {}, {}", csv_path.display(), svg_path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints_are_inclusive_and_clean() {
        let g = parse_grid("0.40:0.95:0.05").unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(g[0], 0.40);
        assert_eq!(g[11], 0.95);
        assert_eq!(g[9], 0.85, "accumulated step error must be rounded away");
        let single = parse_grid("0.9:0.9:0.1").unwrap();
        assert_eq!(single, vec![0.9]);
    }

    #[test]
    fn grid_rejects_malformed_input() {
        for bad in [
            "0.4:0.9",
            "a:b:c",
            "0.9:0.4:0.05",
            "0.4:0.9:0",
            "0.4:0.9:-0.1",
        ] {
            assert!(parse_grid(bad).is_err(), "{bad} should be rejected");
        }
    }

    #[test]
    fn mean_std_matches_hand_computation() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - 1.118033988749895).abs() < 1e-15);
        let (m1, s1) = mean_std(&[5.0]);
        assert_eq!((m1, s1), (5.0, 0.0));
        assert!(mean_std(&[]).0.is_nan());
    }
}
