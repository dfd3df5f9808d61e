//! Whole-pipeline exercise: generate a scenario, estimate from power alone,
//! produce every forecast kind, score them, and push all artifacts through
//! their file formats.

use chrono::{Duration, NaiveDate};
use pvcsd::clearsky::SiteConfig;
use pvcsd::datagen::{self, DayType, ForecastNoise, ScenarioConfig};
use pvcsd::estimator::{self, EstimationConfig};
use pvcsd::forecast::{self, ForecastKind};
use pvcsd::io::{self, Dataset};
use pvcsd::metrics;
use pvcsd::pvusa::PvusaParams;

fn site() -> SiteConfig {
    SiteConfig {
        latitude_deg: 40.42,
        longitude_deg: -3.70,
        tilt_deg: 30.0,
        azimuth_deg: 0.0,
        timezone_offset_hours: 0.0,
    }
}

fn scenario(n_days: usize) -> ScenarioConfig {
    let truth = PvusaParams::new(0.78, 0.78 * -1.345e-4, 0.78 * -3.25e-3);
    let mut cfg = ScenarioConfig::new(
        site(),
        truth,
        960.0,
        NaiveDate::from_ymd_opt(2012, 5, 1).unwrap(),
        n_days,
    );
    // Deterministic mixed schedule: two clear days, one uniform, one broken.
    cfg.schedule = Some(
        (0..n_days)
            .map(|d| match d % 4 {
                0 | 1 => DayType::Clear,
                2 => DayType::Uniform(0.75),
                _ => DayType::Stochastic(0.6),
            })
            .collect(),
    );
    cfg.noise_sd_frac = 0.002;
    cfg.forecast_noise = Some(ForecastNoise::default());
    cfg
}

#[test]
fn estimate_forecast_evaluate_chain_holds_together() {
    let cfg = scenario(32);
    let data = datagen::generate(&cfg, 20).unwrap();
    let est_cfg = EstimationConfig::new(960.0);
    let run = estimator::run(&data.series, &site(), &est_cfg, None).unwrap();

    // The estimate converges to the hidden plant from power alone.
    let err = (run.final_params.mu1 - cfg.truth.mu1).abs() / cfg.truth.mu1;
    assert!(err < 0.02, "mu1 relative error {err} after 32 mixed days");

    // Day-ahead forecasts for the last four days, driven by the synthetic
    // weather channel exactly as a CLI run would reconstruct it.
    let dataset = Dataset::from_generated(&data);
    let weather = dataset.weather(&site()).unwrap();
    let mut fc = forecast::ForecastSeries::default();
    for d in 28..32 {
        let date = cfg.start_date + Duration::days(d);
        fc.extend(
            forecast::da_series(&run.trajectory, &weather, &site(), date, data.series.step())
                .unwrap(),
        );
    }
    assert!(!fc.entries.is_empty());
    for e in &fc.entries {
        assert_eq!(e.kind, ForecastKind::DayAhead);
        assert!(e.p_hat_kw >= 0.0);
        let version = e.params_version.expect("model forecasts carry a version");
        assert!(version <= e.issued_at, "no estimate from the future");
        assert!(e.issued_at < e.target);
    }

    // Score them over light hours against the measured series.
    let mut pred = Vec::new();
    let mut meas = Vec::new();
    for e in &fc.entries {
        if let Some(i) = data.series.index_of(e.target) {
            let s = &data.series.samples()[i];
            if s.i_cs_wm2 > 0.0 {
                pred.push(e.p_hat_kw);
                meas.push(s.p_m_kw);
            }
        }
    }
    assert!(pred.len() > 30);
    let report = metrics::evaluate(&pred, &meas, 960.0).unwrap();
    assert!(report.rmse_kw >= report.mbe_kw.abs());
    if let (Some(nrmse), Some(r2)) = (report.nrmse, report.r2) {
        assert_eq!(r2, 1.0 - nrmse * nrmse);
    }
    assert!(
        report.mape_np_pct < 25.0,
        "day-ahead error should be loosely bounded, got {}",
        report.mape_np_pct
    );

    // Hour-ahead: same machinery, shorter horizon, fresher parameters.
    let noon = site().local_midnight_utc(cfg.start_date + Duration::days(30)) + Duration::hours(12);
    let ha =
        forecast::ha_series(&run.trajectory, &weather, &site(), noon, data.series.step()).unwrap();
    assert!(!ha.entries.is_empty() && ha.entries.len() <= 7);
    assert_eq!(ha.entries[0].issued_at, noon - Duration::minutes(105));

    // Persistence baseline is a bitwise copy of the previous day.
    let odnp =
        forecast::odnp_series(&data.series, &site(), cfg.start_date + Duration::days(30)).unwrap();
    for e in &odnp.entries {
        let src = data.series.index_of(e.target - Duration::days(1)).unwrap();
        assert!(e.p_hat_kw == data.series.samples()[src].p_m_kw);
    }

    // All artifacts survive their file formats unchanged.
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name);
    io::save_dataset(&p("data.csv"), &dataset).unwrap();
    assert_eq!(io::load_dataset(&p("data.csv"), &site()).unwrap(), dataset);
    io::save_trajectory(&p("traj.csv"), &run.trajectory).unwrap();
    assert_eq!(
        io::load_trajectory(&p("traj.csv")).unwrap().entries(),
        run.trajectory.entries()
    );
    io::save_detection_log(&p("log.csv"), &run.records).unwrap();
    assert_eq!(io::load_detection_log(&p("log.csv")).unwrap(), run.records);
    io::save_forecasts(&p("fc.csv"), &fc.entries).unwrap();
    assert_eq!(io::load_forecasts(&p("fc.csv")).unwrap(), fc.entries);
    io::save_metrics(&p("metrics.csv"), &report).unwrap();
    assert_eq!(io::load_metrics(&p("metrics.csv")).unwrap(), report);

    // Daily error rows group by date and cover the evaluated days.
    let rows: Vec<(NaiveDate, f64, f64)> = fc
        .entries
        .iter()
        .filter_map(|e| {
            data.series.index_of(e.target).and_then(|i| {
                let s = &data.series.samples()[i];
                (s.i_cs_wm2 > 0.0).then(|| (site().local_date(e.target), e.p_hat_kw, s.p_m_kw))
            })
        })
        .collect();
    let daily = metrics::daily_rmse(&rows).unwrap();
    assert_eq!(daily.len(), 4);
    io::save_daily_rmse(&p("daily.csv"), &daily).unwrap();
    assert_eq!(io::load_daily_rmse(&p("daily.csv")).unwrap(), daily);
}

#[test]
fn screened_estimator_tracks_truth_while_naive_fit_drifts_under_clouds() {
    // Heavily clouded scenario: the screened estimator keeps its accuracy by
    // refusing the bad windows, while the naive per-sample fit driven by the
    // clear-sky channel (what you would do without a sensor and without
    // screening) is pulled far off.
    let truth = PvusaParams::new(0.78, 0.78 * -1.345e-4, 0.78 * -3.25e-3);
    let mut cfg = ScenarioConfig::new(
        site(),
        truth,
        960.0,
        NaiveDate::from_ymd_opt(2012, 5, 1).unwrap(),
        24,
    );
    cfg.schedule = Some(
        (0..24)
            .map(|d| {
                if d % 3 == 0 {
                    DayType::Clear
                } else {
                    DayType::Stochastic(0.7)
                }
            })
            .collect(),
    );
    cfg.noise_sd_frac = 0.002;
    let data = datagen::generate(&cfg, 77).unwrap();
    let est_cfg = EstimationConfig::new(960.0);

    let screened = estimator::run(&data.series, &site(), &est_cfg, None).unwrap();
    let screened_err = (screened.final_params.mu1 - truth.mu1).abs() / truth.mu1;

    // Naive fit: feed every light sample with the clear-sky irradiance as if
    // the sky were always clear.
    let i_cs: Vec<f64> = data.series.samples().iter().map(|s| s.i_cs_wm2).collect();
    let naive = forecast::srls_fit(&data.series, &i_cs, &est_cfg, None).unwrap();
    let naive_err = (naive.final_params.mu1 - truth.mu1).abs() / truth.mu1;

    println!("screened mu1 err {screened_err:.4}, naive mu1 err {naive_err:.4}");
    assert!(screened_err < 0.02);
    assert!(
        naive_err > 0.10,
        "clouded samples must drag the unscreened fit away"
    );

    // Given the true irradiance (a real sensor), the same recursive core
    // recovers the truth too — the screening only matters without one.
    let with_sensor = forecast::srls_fit(&data.series, &data.i_true_wm2, &est_cfg, None).unwrap();
    let sensor_err = (with_sensor.final_params.mu1 - truth.mu1).abs() / truth.mu1;
    assert!(sensor_err < 0.02, "sensor-driven fit error {sensor_err}");
}
