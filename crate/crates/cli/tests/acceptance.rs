//! Acceptance gate for the whole toolkit. Ten independent checks, one test
//! per criterion, each printing a single PASS line with its measured
//! evidence (visible with `--nocapture`); a failed criterion fails its test.
//!
//!  1. interval bounds contain randomized ground truth (soundness)
//!  2. recursive update matches the normal-equations solution at lambda = 1
//!  3. noiseless mixed-sky recovery: mu1 within 2% of truth by day 30
//!  4. screening soundness: clear windows pass, uniform(0.7) fails the peak test
//!  5. beta0 sweep selectivity is non-increasing on a power-only-derated set
//!  6. day-ahead MAPE_NP < 10% under realistic weather-forecast noise
//!  7. persistence forecast is a bitwise previous-day copy
//!  8. metric identities (r2 vs nrmse, rmse vs bias, perfect forecast)
//!  9. clear-sky normal irradiance spot values
//! 10. CLI reruns are byte-identical; flag overrides take effect

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use chrono::{Duration, NaiveDate};
use pvcsd::clearsky::{normal_clearsky_irradiance, SiteConfig};
use pvcsd::datagen::{self, DayType, ForecastNoise, ScenarioConfig};
use pvcsd::estimator::{self, EstimationConfig, EstimatorState};
use pvcsd::forecast::{self, DAY_AHEAD_ISSUE_HOUR};
use pvcsd::metrics;
use pvcsd::pvusa::{
    self, alpha_bounds, delta_alpha_bounds, delta_power_bounds, EtaBox, PvusaParams, ETA2_MAX,
    ETA2_MIN, ETA3_MAX, ETA3_MIN,
};
use pvcsd::series::SampleSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn site() -> SiteConfig {
    SiteConfig {
        latitude_deg: 40.42,
        longitude_deg: -3.70,
        tilt_deg: 30.0,
        azimuth_deg: 0.0,
        timezone_offset_hours: 0.0,
    }
}

fn truth() -> PvusaParams {
    // mu1 above the estimator's built-in starting guess (0.75 * P_nom/1000)
    // so the peak-level test accepts genuine clear windows from the start.
    PvusaParams::new(0.78, 0.78 * -1.345e-4, 0.78 * -3.25e-3)
}

const P_NOM_KW: f64 = 960.0;

fn scenario(n_days: usize, schedule: Option<Vec<DayType>>, noise: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::new(
        site(),
        truth(),
        P_NOM_KW,
        NaiveDate::from_ymd_opt(2023, 4, 1).unwrap(),
        n_days,
    );
    cfg.schedule = schedule;
    cfg.noise_sd_frac = noise;
    cfg
}

// ---------------------------------------------------------------------------
// 1. bound containment
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_interval_bounds_contain_randomized_truth() {
    let t0 = Instant::now();
    let eta = EtaBox::default();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let n = 10_000;
    let mut violations = 0usize;
    for _ in 0..n {
        let e2 = rng.gen_range(ETA2_MIN..ETA2_MAX);
        let e3 = rng.gen_range(ETA3_MIN..ETA3_MAX);
        // mu1 = 1 makes the stored coefficients the normalized ones exactly.
        let p = PvusaParams::new(1.0, e2, e3);
        let i1 = rng.gen_range(0.0..1200.0);
        let i2 = rng.gen_range(0.0..1200.0);
        let t2 = rng.gen_range(-10.0..45.0);
        let d_t = rng.gen_range(-8.0..8.0);
        let t1 = t2 - d_t;
        let d_i = i2 - i1;
        let i_new = i1 + d_i;

        let a1 = pvusa::alpha(&p, i1, t1).unwrap();
        let a2 = pvusa::alpha(&p, i_new.max(0.0), t2).unwrap();
        if !alpha_bounds(i1, t1, &eta).contains(a1) {
            violations += 1;
        }
        if !delta_alpha_bounds(d_i, d_t, &eta).contains(a2 - a1) {
            violations += 1;
        }
        let dp_over_mu1 = a2 * i_new.max(0.0) - a1 * i1;
        if !delta_power_bounds(i1, d_i, t2, d_t, &eta).contains(dp_over_mu1) {
            violations += 1;
        }
    }
    let dt = t0.elapsed();
    assert_eq!(
        violations, 0,
        "bound containment violated {violations} times"
    );
    assert!(dt.as_secs_f64() < 5.0, "took {dt:?}, budget 5 s");
    println!(
        "PASS criterion 1: alpha, delta-alpha and delta-power bounds contained the truth in \
         {n} randomized cases (0 violations, {:.2} s)",
        dt.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// 2. recursive update vs normal equations
// ---------------------------------------------------------------------------

/// Solves A x = b for 3x3 A by Gaussian elimination with partial pivoting.
#[allow(clippy::needless_range_loop)] // index arithmetic is the clearest form here
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        assert!(a[col][col] != 0.0, "singular system");
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let mut s = b[row];
        for k in row + 1..3 {
            s -= a[row][k] * x[k];
        }
        x[row] = s / a[row][row];
    }
    x
}

#[test]
fn criterion_02_recursive_update_matches_normal_equations() {
    let t0 = Instant::now();
    // Column scaling keeps the hand-solved normal equations well conditioned;
    // the solution is mapped back to raw coefficients afterwards.
    const SCALE: [f64; 3] = [1e-3, 1e-6, 4e-5];
    let mut worst: f64 = 0.0;
    for trial in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + trial);
        let n = rng.gen_range(40..200);
        let plant = truth();
        let rows: Vec<(f64, f64, f64)> = (0..n)
            .map(|_| {
                let i = rng.gen_range(50.0..1100.0);
                let t = rng.gen_range(-5.0..40.0);
                let noise: f64 = rng.gen_range(-2.0..2.0);
                (i, t, pvusa::power(&plant, i, t) + noise)
            })
            .collect();

        let start = PvusaParams::new(0.9, -1e-4, -3e-3);
        let state = EstimatorState::new(&start, 1e12).unwrap();
        let fitted = state.update_window(&rows, 1.0).unwrap().params().as_array();

        let mut ata = [[0.0; 3]; 3];
        let mut atb = [0.0; 3];
        for &(i, t, p) in &rows {
            let phi = pvusa::regressor(i, t);
            let phis = [phi[0] * SCALE[0], phi[1] * SCALE[1], phi[2] * SCALE[2]];
            for r in 0..3 {
                for c in 0..3 {
                    ata[r][c] += phis[r] * phis[c];
                }
                atb[r] += phis[r] * p;
            }
        }
        let theta_s = solve3(ata, atb);
        let batch = [
            theta_s[0] * SCALE[0],
            theta_s[1] * SCALE[1],
            theta_s[2] * SCALE[2],
        ];

        for k in 0..3 {
            let rel = (fitted[k] - batch[k]).abs() / batch[k].abs().max(1e-12);
            worst = worst.max(rel);
            assert!(
                rel < 1e-9,
                "trial {trial} component {k}: recursive {} vs batch {} (rel {rel:.3e})",
                fitted[k],
                batch[k]
            );
        }
    }
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 1.0, "took {dt:?}, budget 1 s");
    println!(
        "PASS criterion 2: recursive fit at lambda=1 matched the normal-equations solution on \
         20 randomized row sets (worst relative difference {worst:.2e}, {:.2} s)",
        dt.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// 3. noiseless recovery by day 30
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_noiseless_mixed_recovery_within_2pct_by_day_30() {
    let t0 = Instant::now();
    let schedule: Vec<DayType> = (0..60)
        .map(|d| match d % 3 {
            0 => DayType::Clear,
            1 => DayType::Uniform(0.75),
            _ => DayType::Stochastic(0.6),
        })
        .collect();
    let cfg = scenario(60, Some(schedule), 0.0);
    let data = datagen::generate(&cfg, 301).unwrap();
    let est = EstimationConfig::new(P_NOM_KW);
    assert_eq!(est.beta0, 0.9);
    let run = estimator::run(&data.series, &site(), &est, None).unwrap();

    let days = data.series.days(&site());
    let (_, eod30) = data.series.light_bounds(days[29].range.clone()).unwrap();
    let mu1_day30 = run.trajectory.entries()[eod30].1.mu1;
    let err30 = (mu1_day30 - truth().mu1).abs() / truth().mu1;
    let err_final = (run.final_params.mu1 - truth().mu1).abs() / truth().mu1;
    let dt = t0.elapsed();
    assert!(
        err30 < 0.02,
        "relative mu1 error at day 30 is {err30:.4}, gate 0.02"
    );
    assert!(
        err_final < 0.02,
        "relative mu1 error at day 60 is {err_final:.4}, gate 0.02"
    );
    assert!(dt.as_secs_f64() < 30.0, "took {dt:?}, budget 30 s");
    println!(
        "PASS criterion 3: noiseless 60-day mixed-sky run reached |mu1 error| {:.3}% by day 30 \
         ({:.3}% at day 60; gate 2%, {:.2} s)",
        err30 * 100.0,
        err_final * 100.0,
        dt.as_secs_f64()
    );
}

// ---------------------------------------------------------------------------
// 4. screening soundness on clear and uniformly clouded days
// ---------------------------------------------------------------------------

/// Every in-day window of at least `l_min` samples inside the light span.
fn for_each_light_window(
    series: &SampleSeries,
    l_min: usize,
    mut f: impl FnMut(&[pvcsd::series::Sample]),
) -> usize {
    let mut count = 0;
    for day in series.days(&site()) {
        let Some((lo, hi)) = series.light_bounds(day.range.clone()) else {
            continue;
        };
        for a in lo..=hi {
            for b in a + l_min - 1..=hi {
                f(&series.samples()[a..=b]);
                count += 1;
            }
        }
    }
    count
}

#[test]
fn criterion_04_screening_soundness_on_clear_and_uniform_days() {
    let eta = EtaBox::default();

    let clear = datagen::generate(&scenario(30, Some(vec![DayType::Clear; 30]), 0.0), 401).unwrap();
    let mut clear_windows = 0;
    let n_clear = for_each_light_window(&clear.series, 3, |samples| {
        let w = pvcsd::csdetect::Window::new(samples).unwrap();
        assert!(
            pvcsd::csdetect::cs_test1(&w, &eta).unwrap().passed(),
            "false rejection (test 1)"
        );
        assert!(
            pvcsd::csdetect::cs_test2(&w, &eta).unwrap().passed(),
            "false rejection (test 2)"
        );
        let eps =
            pvcsd::csdetect::epsilon_from_beta0(P_NOM_KW, truth().mu1, 0.9, 0.01, 0.5).unwrap();
        assert!(
            pvcsd::csdetect::cs_test3(&w, &truth(), eps)
                .unwrap()
                .passed(),
            "clear peak rejected by the level test"
        );
        clear_windows += 1;
    });

    let uniform = datagen::generate(
        &scenario(30, Some(vec![DayType::Uniform(0.7); 30]), 0.0),
        402,
    )
    .unwrap();
    // "Converged estimate" means anywhere within 5% of the plant; probe the
    // exact value and a 4%-low one.
    let estimates = [
        truth(),
        PvusaParams::new(0.96 * 0.78, 0.78 * -1.345e-4, 0.78 * -3.25e-3),
    ];
    let n_uniform = for_each_light_window(&uniform.series, 3, |samples| {
        let w = pvcsd::csdetect::Window::new(samples).unwrap();
        assert!(
            pvcsd::csdetect::cs_test1(&w, &eta).unwrap().passed(),
            "uniform day failed test 1"
        );
        assert!(
            pvcsd::csdetect::cs_test2(&w, &eta).unwrap().passed(),
            "uniform day failed test 2"
        );
        for est in &estimates {
            let eps =
                pvcsd::csdetect::epsilon_from_beta0(P_NOM_KW, est.mu1, 0.9, 0.01, 0.5).unwrap();
            assert!(
                !pvcsd::csdetect::cs_test3(&w, est, eps).unwrap().passed(),
                "uniform(0.7) window slipped past the peak-level test"
            );
        }
    });

    println!(
        "PASS criterion 4: {n_clear} clear windows all passed tests 1-3 (0 false rejections); \
         {n_uniform} uniform(0.7) windows all passed tests 1-2 and failed the peak test with a \
         converged estimate"
    );
}

// ---------------------------------------------------------------------------
// CLI helpers (criteria 5 and 10)
// ---------------------------------------------------------------------------

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_pvcsd")
}

fn run_cli(dir: &Path, args: &[&str]) -> (String, String) {
    let out = Command::new(bin())
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn pvcsd");
    assert!(
        out.status.success(),
        "pvcsd {args:?} exited with {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    (
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

const SWEEP_CONFIG: &str = r#"
[site]
latitude_deg = 40.42
longitude_deg = -3.70
tilt_deg = 30.0
azimuth_deg = 0.0
timezone_offset_hours = 0.0

[plant]
p_nom_kw = 960.0
mu1 = 0.78
mu2 = -1.0491e-4
mu3 = -2.535e-3

[scenario]
start_date = "2023-04-01"
n_days = 45
seed = 11
noise_sd_frac = 0.005
pod_fraction = 0.14

[scenario.forecast_noise]
"#;

// ---------------------------------------------------------------------------
// 5. sweep monotonicity with the power-only-degradation overlay
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_beta0_sweep_monotonicity_with_pod_overlay() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plant.toml"), SWEEP_CONFIG).unwrap();
    run_cli(
        dir.path(),
        &["simulate", "--config", "plant.toml", "--out-dir", "sim"],
    );
    run_cli(
        dir.path(),
        &[
            "sweep-beta0",
            "--dataset",
            "sim/dataset_observed.csv",
            "--config",
            "plant.toml",
            "--grid",
            "0.40:0.95:0.05",
            "--out-dir",
            "sweep",
        ],
    );
    let text = fs::read_to_string(dir.path().join("sweep/sweep.csv")).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',');
            let b: f64 = it.next().unwrap().parse().unwrap();
            let d: f64 = it.next().unwrap().parse().unwrap();
            (b, d)
        })
        .collect();
    assert_eq!(rows.len(), 12, "expected 12 inclusive grid points");
    assert_eq!(rows[0].0, 0.40);
    assert_eq!(rows[11].0, 0.95);
    for pair in rows.windows(2) {
        assert!(
            pair[1].1 <= pair[0].1 + 1e-12,
            "detected share rose from {:.3}% at beta0={} to {:.3}% at beta0={}",
            pair[0].1,
            pair[0].0,
            pair[1].1,
            pair[1].0
        );
    }
    println!(
        "PASS criterion 5: detected-clear share fell monotonically from {:.1}% (beta0=0.40) to \
         {:.1}% (beta0=0.95) across 12 grid points on a 14%-derated dataset",
        rows[0].1, rows[11].1
    );
}

// ---------------------------------------------------------------------------
// 6. day-ahead forecast quality under noisy weather
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_day_ahead_mape_np_below_10pct_with_noisy_weather() {
    let mut cfg = scenario(40, None, 0.005);
    cfg.forecast_noise = Some(ForecastNoise::default());
    let data = datagen::generate(&cfg, 11).unwrap();
    let site = site();

    // The synthetic weather service must be realistically wrong: its
    // irradiance channel should sit near the documented benchmark error
    // level (normalized RMSE around 0.44), not be secretly clean.
    let i_fc = data.i_fc_wm2.as_ref().unwrap();
    let light: Vec<usize> = (0..data.series.len())
        .filter(|&k| data.series.samples()[k].i_cs_wm2 > 0.0)
        .collect();
    let mean_i = light.iter().map(|&k| data.i_true_wm2[k]).sum::<f64>() / light.len() as f64;
    let sse: f64 = light
        .iter()
        .map(|&k| (i_fc[k] - data.i_true_wm2[k]).powi(2))
        .sum();
    let sst: f64 = light
        .iter()
        .map(|&k| (data.i_true_wm2[k] - mean_i).powi(2))
        .sum();
    let irr_nrmse = (sse / sst).sqrt();
    assert!(
        (0.30..=0.60).contains(&irr_nrmse),
        "irradiance forecast NRMSE {irr_nrmse:.3} is outside the realistic band around 0.44"
    );

    let est = EstimationConfig::new(P_NOM_KW);
    let run = estimator::run(&data.series, &site, &est, None).unwrap();
    let dataset = pvcsd::io::Dataset::from_generated(&data);
    let weather = dataset.weather(&site).unwrap();

    let mut entries = Vec::new();
    for (d, day) in data.series.days(&site).iter().enumerate() {
        if d + 1 < 28 {
            continue;
        }
        let issued = site.local_midnight_utc(day.date.pred_opt().unwrap())
            + Duration::hours(DAY_AHEAD_ISSUE_HOUR);
        assert!(run.trajectory.latest_at(issued).is_some());
        let fs = forecast::da_series(
            &run.trajectory,
            &weather,
            &site,
            day.date,
            data.series.step(),
        )
        .unwrap();
        assert!(fs.gaps.is_empty(), "unexpected forecast gaps");
        entries.extend(fs.entries);
    }
    let mask = metrics::evaluation_mask(&data.series, &site, 28);
    let mut preds = Vec::new();
    let mut meas = Vec::new();
    for e in &entries {
        let idx = data.series.index_of(e.target).unwrap();
        if mask[idx] {
            preds.push(e.p_hat_kw);
            meas.push(data.series.samples()[idx].p_m_kw);
        }
    }
    let report = metrics::evaluate(&preds, &meas, P_NOM_KW).unwrap();
    assert!(
        report.mape_np_pct < 10.0,
        "day-ahead MAPE_NP {:.2}% breaches the 10% gate",
        report.mape_np_pct
    );
    println!(
        "PASS criterion 6: day-ahead MAPE_NP {:.2}% < 10% over {} samples from day 28 on \
         (irradiance forecast NRMSE {:.2})",
        report.mape_np_pct, report.n_samples, irr_nrmse
    );
}

// ---------------------------------------------------------------------------
// 7. persistence forecast bit-identity
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_persistence_forecast_is_bitwise_previous_day() {
    let data = datagen::generate(&scenario(10, None, 0.01), 701).unwrap();
    let site = site();
    let days = data.series.days(&site);
    let mut checked = 0usize;
    for day in days.iter().skip(1) {
        let fs = forecast::odnp_series(&data.series, &site, day.date).unwrap();
        assert!(fs.gaps.is_empty());
        assert_eq!(fs.entries.len(), day.range.len(), "a target was skipped");
        for e in &fs.entries {
            let src = data.series.index_of(e.target - Duration::days(1)).unwrap();
            assert_eq!(
                e.p_hat_kw.to_bits(),
                data.series.samples()[src].p_m_kw.to_bits(),
                "persistence value differs from the previous day at {}",
                e.target
            );
            assert!(e.params_version.is_none());
            checked += 1;
        }
    }
    println!(
        "PASS criterion 7: persistence forecast reproduced the previous day bit-for-bit at \
         {checked} targets over 9 days"
    );
}

// ---------------------------------------------------------------------------
// 8. metric identities
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_metric_identities_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(801);
    let mut r2_checked = 0usize;
    for _ in 0..1000 {
        let n = rng.gen_range(5..200);
        let meas: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1000.0)).collect();
        let pred: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1000.0)).collect();
        let rep = metrics::evaluate(&pred, &meas, P_NOM_KW).unwrap();
        assert!(
            rep.rmse_kw >= rep.mbe_kw.abs() - 1e-12 * (1.0 + rep.mbe_kw.abs()),
            "rmse {} < |mbe| {}",
            rep.rmse_kw,
            rep.mbe_kw
        );
        if let (Some(nrmse), Some(r2)) = (rep.nrmse, rep.r2) {
            assert_eq!(
                r2.to_bits(),
                (1.0 - nrmse * nrmse).to_bits(),
                "r2 is not exactly 1 - nrmse^2"
            );
            r2_checked += 1;
        }
    }

    let meas = vec![0.0, 120.0, 540.0, 310.0];
    let rep = metrics::evaluate(&meas.clone(), &meas, P_NOM_KW).unwrap();
    assert_eq!(rep.rmse_kw, 0.0);
    assert_eq!(rep.mbe_kw, 0.0);
    assert_eq!(rep.mape_pct, Some(0.0));
    assert_eq!(rep.nrmse, Some(0.0));
    assert_eq!(rep.r2, Some(1.0));
    assert_eq!(rep.rmse_np, 0.0);
    assert_eq!(rep.mape_np_pct, 0.0);

    println!(
        "PASS criterion 8: rmse >= |mbe| on 1000 random series, r2 == 1 - nrmse^2 bit-exactly \
         on {r2_checked} of them, and a perfect forecast scored all-zeros with r2 = 1"
    );
}

// ---------------------------------------------------------------------------
// 9. clear-sky model spot values
// ---------------------------------------------------------------------------

#[test]
fn criterion_09_clearsky_normal_irradiance_spot_values() {
    let zenith = normal_clearsky_irradiance(std::f64::consts::FRAC_PI_2);
    assert!(
        (zenith - 947.1).abs() <= 0.1,
        "overhead-sun normal irradiance {zenith} outside 947.1 +/- 0.1"
    );
    for h in [0.0, -1e-9, -0.01, -0.5, -1.5, -std::f64::consts::FRAC_PI_2] {
        assert_eq!(
            normal_clearsky_irradiance(h),
            0.0,
            "nonzero irradiance at altitude {h}"
        );
    }
    println!(
        "PASS criterion 9: normal clear-sky irradiance is {zenith:.2} W/m^2 at the zenith \
         (947.1 +/- 0.1) and exactly 0 for sun at or below the horizon"
    );
}

// ---------------------------------------------------------------------------
// 10. CLI determinism and flag precedence
// ---------------------------------------------------------------------------

fn assert_same_bytes(dir: &Path, a: &str, b: &str) {
    let fa = fs::read(dir.join(a)).unwrap();
    let fb = fs::read(dir.join(b)).unwrap();
    assert_eq!(fa, fb, "{a} and {b} differ");
}

#[test]
fn criterion_10_cli_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("plant.toml"), SWEEP_CONFIG).unwrap();

    for out in ["sim1", "sim2"] {
        run_cli(d, &["simulate", "--config", "plant.toml", "--out-dir", out]);
    }
    for f in [
        "dataset_truth.csv",
        "dataset_observed.csv",
        "scenario_days.csv",
    ] {
        assert_same_bytes(d, &format!("sim1/{f}"), &format!("sim2/{f}"));
    }

    let est = [
        "estimate",
        "--dataset",
        "sim1/dataset_observed.csv",
        "--config",
        "plant.toml",
    ];
    run_cli(d, &[&est[..], &["--out-dir", "est1"]].concat());
    run_cli(d, &[&est[..], &["--out-dir", "est2"]].concat());
    for f in ["trajectory.csv", "detection_log.csv", "estimate.svg"] {
        assert_same_bytes(d, &format!("est1/{f}"), &format!("est2/{f}"));
    }

    let sweep = [
        "sweep-beta0",
        "--dataset",
        "sim1/dataset_observed.csv",
        "--config",
        "plant.toml",
    ];
    run_cli(d, &[&sweep[..], &["--out-dir", "sw1"]].concat());
    run_cli(d, &[&sweep[..], &["--out-dir", "sw2"]].concat());
    assert_same_bytes(d, "sw1/sweep.csv", "sw2/sweep.csv");
    assert_same_bytes(d, "sw1/sweep.svg", "sw2/sweep.svg");

    // Flag precedence: a command-line beta0 must actually change the run.
    run_cli(
        d,
        &[&est[..], &["--beta0", "0.45", "--out-dir", "est_flag"]].concat(),
    );
    let default_log = fs::read(d.join("est1/detection_log.csv")).unwrap();
    let flag_log = fs::read(d.join("est_flag/detection_log.csv")).unwrap();
    assert_ne!(
        default_log, flag_log,
        "--beta0 0.45 did not change the detection log"
    );

    // A dataset with no daylight is reported, not crashed on: polar night.
    let mut csv = String::from("timestamp,p_m_kw,t_c\n");
    for day in 21..23 {
        for h in 0..24 {
            csv.push_str(&format!("2023-12-{day:02}T{h:02}:00:00Z,0,-5\n"));
        }
    }
    fs::write(d.join("polar.csv"), &csv).unwrap();
    let polar_cfg = "[site]\nlatitude_deg = 78.0\nlongitude_deg = 15.0\n\
                     [plant]\np_nom_kw = 960.0\n";
    fs::write(d.join("polar.toml"), polar_cfg).unwrap();
    let (_, stderr) = run_cli(
        d,
        &[
            "estimate",
            "--dataset",
            "polar.csv",
            "--config",
            "polar.toml",
            "--out-dir",
            "polar_out",
        ],
    );
    assert!(
        stderr.contains("no light samples"),
        "missing polar-night warning: {stderr}"
    );
    assert!(d.join("polar_out/trajectory.csv").exists());

    println!(
        "PASS criterion 10: simulate/estimate/sweep-beta0 reruns were byte-identical across 8 \
         artifacts, --beta0 overrode the config value, and a zero-daylight dataset exited \
         cleanly with a warning"
    );
}
