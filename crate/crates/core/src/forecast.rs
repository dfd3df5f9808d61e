//! Power forecasts built on the running parameter estimate.
//!
//! Four forecast kinds share one entry format:
//!
//! * day-ahead (`da`): issued at 06:00 local time on the day before the
//!   operating day, one entry per sample of the operating day, driven by
//!   externally supplied weather forecasts;
//! * hour-ahead (`ha`): issued 105 minutes before the operating hour,
//!   covering at most seven hours ahead and never past the last light hour;
//! * clear-sky (`cs`): the model evaluated on the deterministic clear-sky
//!   irradiance, a best-case production profile;
//! * observed-day persistence (`odnp`): yesterday's measured power copied
//!   forward unchanged, the classical reference baseline.
//!
//! Every entry records which parameter-trajectory version produced it, and
//! issuance times are checked against the trajectory so no forecast ever
//! uses an estimate from the future.

use std::collections::BTreeMap;

use chrono::{DateTime, Duration, NaiveDate, Utc};

use crate::clearsky::{self, SiteConfig};
use crate::error::Error;
use crate::estimator::{
    initial_params, light_hours, EstimationConfig, EstimatorState, ParamTrajectory,
};
use crate::pvusa::{power, PvusaParams};
use crate::series::SampleSeries;
use crate::Result;

/// Local clock hour (on the previous day) at which day-ahead forecasts are
/// issued.
pub const DAY_AHEAD_ISSUE_HOUR: i64 = 6;
/// Lead time of an hour-ahead forecast before its first target.
pub const HOUR_AHEAD_LEAD_MINUTES: i64 = 105;
/// Longest hour-ahead horizon, in hours.
pub const HOUR_AHEAD_MAX_HORIZON_HOURS: i64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForecastKind {
    DayAhead,
    HourAhead,
    ClearSky,
    Persistence,
}

impl ForecastKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ForecastKind::DayAhead => "da",
            ForecastKind::HourAhead => "ha",
            ForecastKind::ClearSky => "cs",
            ForecastKind::Persistence => "odnp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "da" => Ok(ForecastKind::DayAhead),
            "ha" => Ok(ForecastKind::HourAhead),
            "cs" => Ok(ForecastKind::ClearSky),
            "odnp" => Ok(ForecastKind::Persistence),
            other => Err(Error::invalid(format!("unknown forecast kind: {other}"))),
        }
    }
}

/// One point forecast.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForecastEntry {
    pub issued_at: DateTime<Utc>,
    pub target: DateTime<Utc>,
    pub kind: ForecastKind,
    pub p_hat_kw: f64,
    /// Timestamp of the parameter-trajectory entry used; `None` for the
    /// persistence baseline, which uses no model.
    pub params_version: Option<DateTime<Utc>>,
}

/// A target instant that could not be forecast (missing input data). Gaps
/// are reported, never silently interpolated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForecastGap {
    pub issued_at: DateTime<Utc>,
    pub target: DateTime<Utc>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ForecastSeries {
    pub entries: Vec<ForecastEntry>,
    pub gaps: Vec<ForecastGap>,
}

impl ForecastSeries {
    pub fn extend(&mut self, other: ForecastSeries) {
        self.entries.extend(other.entries);
        self.gaps.extend(other.gaps);
    }
}

/// One external weather forecast: irradiance and temperature predicted at
/// `issued_at` for the instant `target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeatherForecast {
    pub issued_at: DateTime<Utc>,
    pub target: DateTime<Utc>,
    pub i_hat_wm2: f64,
    pub t_hat_c: f64,
}

/// Issuances known for one target instant: `(issued_at, irradiance, temperature)`.
type Issuances = Vec<(DateTime<Utc>, f64, f64)>;

/// Lookup structure over weather forecasts: for each target instant, the
/// issuances are kept sorted so the freshest one available at a given time
/// can be found.
#[derive(Debug, Clone, Default)]
pub struct WeatherSet {
    by_target: BTreeMap<DateTime<Utc>, Issuances>,
}

impl WeatherSet {
    pub fn new(entries: Vec<WeatherForecast>) -> Result<Self> {
        let mut by_target: BTreeMap<DateTime<Utc>, Issuances> = BTreeMap::new();
        for e in entries {
            if !(e.i_hat_wm2.is_finite() && e.t_hat_c.is_finite()) {
                return Err(Error::invalid(format!(
                    "non-finite weather forecast for {}",
                    e.target
                )));
            }
            if e.i_hat_wm2 < 0.0 {
                return Err(Error::invalid(format!(
                    "negative forecast irradiance {} for {}",
                    e.i_hat_wm2, e.target
                )));
            }
            if e.issued_at > e.target {
                return Err(Error::invalid(format!(
                    "weather forecast for {} issued after its target",
                    e.target
                )));
            }
            by_target
                .entry(e.target)
                .or_default()
                .push((e.issued_at, e.i_hat_wm2, e.t_hat_c));
        }
        for v in by_target.values_mut() {
            v.sort_by_key(|e| e.0);
        }
        Ok(WeatherSet { by_target })
    }

    pub fn is_empty(&self) -> bool {
        self.by_target.is_empty()
    }

    /// Freshest `(irradiance, temperature)` forecast for `target` whose
    /// issuance is not after `not_after`.
    pub fn best_available(
        &self,
        target: DateTime<Utc>,
        not_after: DateTime<Utc>,
    ) -> Option<(f64, f64)> {
        self.by_target
            .get(&target)?
            .iter()
            .rev()
            .find(|e| e.0 <= not_after)
            .map(|e| (e.1, e.2))
    }
}

/// Model power for forecast weather, clamped at zero: the plant never
/// produces negative power, so neither does a point forecast.
pub fn point_forecast(params: &PvusaParams, i_hat_wm2: f64, t_hat_c: f64) -> Result<f64> {
    if !(i_hat_wm2.is_finite() && i_hat_wm2 >= 0.0) {
        return Err(Error::invalid(format!(
            "forecast irradiance must be >= 0, got {i_hat_wm2}"
        )));
    }
    if !t_hat_c.is_finite() {
        return Err(Error::invalid(format!(
            "non-finite forecast temperature {t_hat_c}"
        )));
    }
    Ok(power(params, i_hat_wm2, t_hat_c).max(0.0))
}

/// Best-case production at instant `t`: the model driven by the
/// deterministic clear-sky irradiance and a temperature forecast.
pub fn clearsky_forecast(
    params: &PvusaParams,
    site: &SiteConfig,
    t: DateTime<Utc>,
    t_hat_c: f64,
) -> Result<f64> {
    point_forecast(params, clearsky::tilted_irradiance(site, t), t_hat_c)
}

/// Day-ahead forecast for every sample of the local day `date`, issued at
/// 06:00 local time the day before, using the freshest weather available at
/// issuance and the parameter estimate in effect then. Targets without
/// weather become gaps.
pub fn da_series(
    trajectory: &ParamTrajectory,
    weather: &WeatherSet,
    site: &SiteConfig,
    date: NaiveDate,
    step: Duration,
) -> Result<ForecastSeries> {
    validate_step(step)?;
    let prev = date
        .pred_opt()
        .ok_or_else(|| Error::invalid(format!("no previous day before {date}")))?;
    let issued_at = site.local_midnight_utc(prev) + Duration::hours(DAY_AHEAD_ISSUE_HOUR);
    let (version, params) = trajectory
        .latest_at(issued_at)
        .ok_or_else(|| Error::invalid(format!("no parameter estimate available at {issued_at}")))?;
    let midnight = site.local_midnight_utc(date);
    let per_day = (Duration::days(1).num_seconds() / step.num_seconds()) as usize;
    let mut out = ForecastSeries::default();
    for k in 0..per_day {
        let target = midnight + step * k as i32;
        match weather.best_available(target, issued_at) {
            Some((i_hat, t_hat)) => out.entries.push(ForecastEntry {
                issued_at,
                target,
                kind: ForecastKind::DayAhead,
                p_hat_kw: point_forecast(&params, i_hat, t_hat)?,
                params_version: Some(version),
            }),
            None => out.gaps.push(ForecastGap { issued_at, target }),
        }
    }
    Ok(out)
}

/// Hour-ahead forecast issued 105 minutes before `start`: targets run from
/// `start` through at most seven hours, truncated at the day's last light
/// sample, skipping dark samples. `start` must lie on the sample grid.
pub fn ha_series(
    trajectory: &ParamTrajectory,
    weather: &WeatherSet,
    site: &SiteConfig,
    start: DateTime<Utc>,
    step: Duration,
) -> Result<ForecastSeries> {
    validate_step(step)?;
    let issued_at = start - Duration::minutes(HOUR_AHEAD_LEAD_MINUTES);
    let (version, params) = trajectory
        .latest_at(issued_at)
        .ok_or_else(|| Error::invalid(format!("no parameter estimate available at {issued_at}")))?;
    let date = site.local_date(start);
    let midnight = site.local_midnight_utc(date);
    let offset = (start - midnight).num_seconds();
    if offset % step.num_seconds() != 0 {
        return Err(Error::invalid(format!(
            "forecast start {start} is not on the sample grid"
        )));
    }
    let k_start = (offset / step.num_seconds()) as usize;
    let mut out = ForecastSeries::default();
    let (first, last) = match light_hours(site, date, step)? {
        Some(bounds) => bounds,
        None => return Ok(out),
    };
    if k_start > last {
        return Ok(out);
    }
    let horizon = ((HOUR_AHEAD_MAX_HORIZON_HOURS * 3600 / step.num_seconds()) as usize).max(1);
    let k_end = last.min(k_start + horizon - 1);
    for k in k_start.max(first)..=k_end {
        let target = midnight + step * k as i32;
        match weather.best_available(target, issued_at) {
            Some((i_hat, t_hat)) => out.entries.push(ForecastEntry {
                issued_at,
                target,
                kind: ForecastKind::HourAhead,
                p_hat_kw: point_forecast(&params, i_hat, t_hat)?,
                params_version: Some(version),
            }),
            None => out.gaps.push(ForecastGap { issued_at, target }),
        }
    }
    Ok(out)
}

/// Clear-sky forecast for every light sample of the local day `date`,
/// issued at local midnight of that day. Temperature comes from `temps`,
/// one value per sample of the day starting at midnight.
pub fn cs_series(
    trajectory: &ParamTrajectory,
    site: &SiteConfig,
    date: NaiveDate,
    step: Duration,
    temps: &[f64],
) -> Result<ForecastSeries> {
    validate_step(step)?;
    let midnight = site.local_midnight_utc(date);
    let issued_at = midnight;
    let (version, params) = trajectory
        .latest_at(issued_at)
        .ok_or_else(|| Error::invalid(format!("no parameter estimate available at {issued_at}")))?;
    let per_day = (Duration::days(1).num_seconds() / step.num_seconds()) as usize;
    if temps.len() != per_day {
        return Err(Error::invalid(format!(
            "expected {per_day} temperature values for {date}, got {}",
            temps.len()
        )));
    }
    let mut out = ForecastSeries::default();
    for (k, &t_hat) in temps.iter().enumerate() {
        let target = midnight + step * k as i32;
        let i_cs = clearsky::tilted_irradiance(site, target);
        if i_cs <= 0.0 {
            continue;
        }
        out.entries.push(ForecastEntry {
            issued_at,
            target,
            kind: ForecastKind::ClearSky,
            p_hat_kw: point_forecast(&params, i_cs, t_hat)?,
            params_version: Some(version),
        });
    }
    Ok(out)
}

/// Observed-day persistence for the local day `date`: yesterday's measured
/// power at the same clock time, copied bit for bit. Issued at local
/// midnight of `date`; targets whose source sample is missing become gaps,
/// and a day with no source data at all is an error.
pub fn odnp_series(
    series: &SampleSeries,
    site: &SiteConfig,
    date: NaiveDate,
) -> Result<ForecastSeries> {
    let day = series
        .days(site)
        .into_iter()
        .find(|d| d.date == date)
        .ok_or_else(|| Error::invalid(format!("day {date} is not in the series")))?;
    let issued_at = site.local_midnight_utc(date);
    let mut out = ForecastSeries::default();
    for idx in day.range {
        let target = series.samples()[idx].timestamp;
        match series.index_of(target - Duration::days(1)) {
            Some(src) => out.entries.push(ForecastEntry {
                issued_at,
                target,
                kind: ForecastKind::Persistence,
                p_hat_kw: series.samples()[src].p_m_kw,
                params_version: None,
            }),
            None => out.gaps.push(ForecastGap { issued_at, target }),
        }
    }
    if out.entries.is_empty() {
        return Err(Error::invalid(format!(
            "persistence forecast for {date} has no previous-day data"
        )));
    }
    Ok(out)
}

/// Result of the naive recursive fit on measured irradiance.
#[derive(Debug, Clone)]
pub struct BaselineFit {
    /// Estimate in effect after each sample, one entry per input sample.
    pub trajectory: ParamTrajectory,
    pub final_params: PvusaParams,
    /// Sample indices whose update failed numerically and was skipped.
    pub skipped: Vec<usize>,
}

/// Plain recursive least squares on measured plane-of-array irradiance:
/// every light-hour sample updates the estimate, with no sky-condition
/// screening and no physical-sign guard. This is the reference an
/// irradiance sensor would enable; the screened estimator is compared
/// against it.
pub fn srls_fit(
    series: &SampleSeries,
    i_m_wm2: &[f64],
    cfg: &EstimationConfig,
    initial: Option<PvusaParams>,
) -> Result<BaselineFit> {
    cfg.validate()?;
    if i_m_wm2.len() != series.len() {
        return Err(Error::invalid(format!(
            "measured irradiance has {} values for {} samples",
            i_m_wm2.len(),
            series.len()
        )));
    }
    for (k, &i) in i_m_wm2.iter().enumerate() {
        if !(i.is_finite() && i >= 0.0) {
            return Err(Error::invalid(format!(
                "measured irradiance {i} at sample {k}"
            )));
        }
    }
    let start = initial.unwrap_or_else(|| initial_params(cfg.p_nom_kw, &cfg.eta));
    let mut state = EstimatorState::new(&start, cfg.init_cov_scale)?;
    let mut skipped = Vec::new();
    let mut entries = Vec::with_capacity(series.len());
    for (k, s) in series.samples().iter().enumerate() {
        if s.i_cs_wm2 > 0.0 {
            match state.update_window(&[(i_m_wm2[k], s.t_c, s.p_m_kw)], cfg.forgetting) {
                Ok(next) => state = next,
                Err(_) => skipped.push(k),
            }
        }
        entries.push((s.timestamp, state.params()));
    }
    Ok(BaselineFit {
        final_params: state.params(),
        trajectory: ParamTrajectory::new(entries)?,
        skipped,
    })
}

fn validate_step(step: Duration) -> Result<()> {
    let secs = step.num_seconds();
    if secs <= 0 || 86400 % secs != 0 {
        return Err(Error::invalid(format!(
            "step must positively divide one day, got {secs} s"
        )));
    }
    Ok(())
}
