//! Dataset ingestion, TOML configuration, and CSV result serialization.
//!
//! ## Dataset CSV schema
//!
//! Column order is fixed; optional columns may be omitted entirely, and
//! individual cells of optional columns may be empty (a missing value):
//!
//! | column     | required | meaning                                        |
//! |------------|----------|------------------------------------------------|
//! | timestamp  | yes      | ISO-8601 UTC instant, e.g. `2012-06-21T12:00:00Z` |
//! | p_m_kw     | yes      | measured generated power, kW (>= 0)            |
//! | t_c        | yes      | outdoor air temperature, degC                  |
//! | i_m_wm2    | no       | measured plane-of-array irradiance, W/m^2 (benchmark only) |
//! | i_fc_wm2   | no       | day-ahead forecast irradiance, W/m^2           |
//! | t_fc_c     | no       | day-ahead forecast temperature, degC           |
//!
//! Rows must be strictly increasing in time with a constant step. The
//! clear-sky channel is never stored; it is recomputed from the site on
//! load, so a dataset file carries only what a real plant logs.
//!
//! All numbers are written with the shortest decimal text that parses back
//! to the identical binary value, so every `save`/`load` pair round-trips
//! losslessly and files stay diffable.
//!
//! ## Result CSV schemas
//!
//! * parameter trajectory: `timestamp,mu1,mu2,mu3`
//! * detection log: `day,start,len,test1,test2,test3,adapted,mu1_after,mu2_after,mu3_after`
//! * forecasts: `issued_at,target,kind,p_hat_kw,params_version`
//! * metrics: `metric,value` (fixed row order, absent values empty)
//! * daily error: `date,rmse_kw,measured_std_kw,n_samples`
//!
//! ## Config file (TOML)
//!
//! Sections `[site]`, `[plant]`, `[estimator]`, `[scenario]`; every field is
//! documented on the corresponding section struct below. Unknown keys are
//! rejected so typos fail loudly.

use std::path::Path;

use chrono::{DateTime, Duration, NaiveDate, SecondsFormat, Utc};
use serde::Deserialize;

use crate::clearsky::{self, SiteConfig};
use crate::datagen::{
    DayType, DayWeights, ForecastNoise, GeneratedData, ScenarioConfig, TemperatureProfile,
};
use crate::error::Error;
use crate::estimator::{AdaptOutcome, DetectionRecord, EstimationConfig, ParamTrajectory, Verdict};
use crate::forecast::{
    ForecastEntry, ForecastKind, WeatherForecast, WeatherSet, DAY_AHEAD_ISSUE_HOUR,
};
use crate::metrics::{DailyRmse, MetricsReport};
use crate::pvusa::PvusaParams;
use crate::series::{Sample, SampleSeries};
use crate::Result;

/// Shortest decimal text that parses back to the identical value.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn fmt_ts(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Secs, true)
}

fn parse_ts(s: &str, line: usize) -> Result<DateTime<Utc>> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| Error::parse(line, format!("bad timestamp {s:?}: {e}")))
}

fn parse_field_f64(s: &str, line: usize, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::parse(line, format!("bad {what}: {s:?}")))
}

fn parse_opt_f64(s: &str, line: usize, what: &str) -> Result<Option<f64>> {
    if s.trim().is_empty() {
        Ok(None)
    } else {
        parse_field_f64(s, line, what).map(Some)
    }
}

/// A loaded dataset: the validated series plus whatever optional channels
/// the file carried, index-aligned with the series.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub series: SampleSeries,
    /// Measured plane-of-array irradiance (benchmark channel).
    pub i_m_wm2: Option<Vec<Option<f64>>>,
    /// Day-ahead forecast irradiance.
    pub i_fc_wm2: Option<Vec<Option<f64>>>,
    /// Day-ahead forecast temperature.
    pub t_fc_c: Option<Vec<Option<f64>>>,
}

impl Dataset {
    pub fn from_series(series: SampleSeries) -> Dataset {
        Dataset {
            series,
            i_m_wm2: None,
            i_fc_wm2: None,
            t_fc_c: None,
        }
    }

    /// Packages generated data with every channel it produced.
    pub fn from_generated(data: &GeneratedData) -> Dataset {
        Dataset {
            series: data.series.clone(),
            i_m_wm2: Some(data.i_true_wm2.iter().map(|&v| Some(v)).collect()),
            i_fc_wm2: data
                .i_fc_wm2
                .as_ref()
                .map(|v| v.iter().map(|&x| Some(x)).collect()),
            t_fc_c: data
                .t_fc_c
                .as_ref()
                .map(|v| v.iter().map(|&x| Some(x)).collect()),
        }
    }

    /// The operator's view: same data without the benchmark irradiance.
    pub fn without_benchmark(&self) -> Dataset {
        Dataset {
            i_m_wm2: None,
            ..self.clone()
        }
    }

    /// Complete benchmark irradiance, or an error naming the first gap.
    pub fn benchmark_irradiance(&self) -> Result<Vec<f64>> {
        let chan = self
            .i_m_wm2
            .as_ref()
            .ok_or_else(|| Error::invalid("dataset has no measured-irradiance column"))?;
        chan.iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| {
                    Error::invalid(format!(
                        "measured irradiance missing at {}",
                        self.series.samples()[k].timestamp
                    ))
                })
            })
            .collect()
    }

    /// Day-ahead weather forecasts reconstructed from the forecast channels:
    /// the value stored at a sample is the forecast for that instant, issued
    /// at 06:00 local time the previous day. Samples missing either channel
    /// are skipped (they surface later as forecast gaps).
    pub fn weather(&self, site: &SiteConfig) -> Result<WeatherSet> {
        let (i_fc, t_fc) = match (&self.i_fc_wm2, &self.t_fc_c) {
            (Some(i), Some(t)) => (i, t),
            _ => {
                return Err(Error::invalid(
                    "dataset has no forecast weather columns (i_fc_wm2, t_fc_c)",
                ))
            }
        };
        let mut entries = Vec::new();
        for (k, s) in self.series.samples().iter().enumerate() {
            if let (Some(i), Some(t)) = (i_fc[k], t_fc[k]) {
                let date = site.local_date(s.timestamp);
                let prev = date
                    .pred_opt()
                    .ok_or_else(|| Error::invalid(format!("no previous day before {date}")))?;
                entries.push(WeatherForecast {
                    issued_at: site.local_midnight_utc(prev)
                        + Duration::hours(DAY_AHEAD_ISSUE_HOUR),
                    target: s.timestamp,
                    i_hat_wm2: i,
                    t_hat_c: t,
                });
            }
        }
        WeatherSet::new(entries)
    }
}

/// Loads and validates a dataset CSV; the clear-sky channel is computed from
/// `site` for every timestamp. All structural problems are reported with
/// 1-based line numbers (the header is line 1).
pub fn load_dataset(path: &Path, site: &SiteConfig) -> Result<Dataset> {
    site.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(1, format!("unreadable header: {e}")))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let required = |name: &str| {
        col(name).ok_or_else(|| Error::parse(1, format!("missing required column {name:?}")))
    };
    let c_ts = required("timestamp")?;
    let c_p = required("p_m_kw")?;
    let c_t = required("t_c")?;
    let c_im = col("i_m_wm2");
    let c_ifc = col("i_fc_wm2");
    let c_tfc = col("t_fc_c");
    for h in headers.iter() {
        if ![
            "timestamp",
            "p_m_kw",
            "t_c",
            "i_m_wm2",
            "i_fc_wm2",
            "t_fc_c",
        ]
        .contains(&h)
        {
            return Err(Error::parse(1, format!("unknown column {h:?}")));
        }
    }

    let mut samples = Vec::new();
    let mut i_m = Vec::new();
    let mut i_fc = Vec::new();
    let mut t_fc = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::parse(line, format!("malformed CSV record: {e}"))
        })?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        let field = |i: usize| rec.get(i).unwrap_or("");
        let ts = parse_ts(field(c_ts), line)?;
        let p = parse_field_f64(field(c_p), line, "p_m_kw")?;
        let t = parse_field_f64(field(c_t), line, "t_c")?;
        if !p.is_finite() || p < 0.0 {
            return Err(Error::parse(
                line,
                format!("p_m_kw must be finite and >= 0, got {p}"),
            ));
        }
        if !t.is_finite() {
            return Err(Error::parse(line, format!("t_c must be finite, got {t}")));
        }
        if let Some(c) = c_im {
            let v = parse_opt_f64(field(c), line, "i_m_wm2")?;
            if let Some(x) = v {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::parse(
                        line,
                        format!("i_m_wm2 must be finite and >= 0, got {x}"),
                    ));
                }
            }
            i_m.push(v);
        }
        if let Some(c) = c_ifc {
            let v = parse_opt_f64(field(c), line, "i_fc_wm2")?;
            if let Some(x) = v {
                if !x.is_finite() || x < 0.0 {
                    return Err(Error::parse(
                        line,
                        format!("i_fc_wm2 must be finite and >= 0, got {x}"),
                    ));
                }
            }
            i_fc.push(v);
        }
        if let Some(c) = c_tfc {
            let v = parse_opt_f64(field(c), line, "t_fc_c")?;
            if let Some(x) = v {
                if !x.is_finite() {
                    return Err(Error::parse(
                        line,
                        format!("t_fc_c must be finite, got {x}"),
                    ));
                }
            }
            t_fc.push(v);
        }
        samples.push(Sample {
            timestamp: ts,
            p_m_kw: p,
            t_c: t,
            i_cs_wm2: clearsky::tilted_irradiance(site, ts),
        });
    }
    if samples.is_empty() {
        return Err(Error::invalid(format!("empty dataset: {}", path.display())));
    }
    let series = SampleSeries::from_samples(samples)?;
    Ok(Dataset {
        series,
        i_m_wm2: c_im.map(|_| i_m),
        i_fc_wm2: c_ifc.map(|_| i_fc),
        t_fc_c: c_tfc.map(|_| t_fc),
    })
}

/// Writes a dataset back out; only the optional columns the dataset carries
/// appear in the file.
pub fn save_dataset(path: &Path, data: &Dataset) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["timestamp", "p_m_kw", "t_c"];
    if data.i_m_wm2.is_some() {
        header.push("i_m_wm2");
    }
    if data.i_fc_wm2.is_some() {
        header.push("i_fc_wm2");
    }
    if data.t_fc_c.is_some() {
        header.push("t_fc_c");
    }
    w.write_record(&header)?;
    let opt = |chan: &Option<Vec<Option<f64>>>, k: usize| -> Option<String> {
        chan.as_ref().map(|v| v[k].map(fmt_f64).unwrap_or_default())
    };
    for (k, s) in data.series.samples().iter().enumerate() {
        let mut row = vec![fmt_ts(s.timestamp), fmt_f64(s.p_m_kw), fmt_f64(s.t_c)];
        for chan in [&data.i_m_wm2, &data.i_fc_wm2, &data.t_fc_c] {
            if let Some(cell) = opt(chan, k) {
                row.push(cell);
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_trajectory(path: &Path, traj: &ParamTrajectory) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["timestamp", "mu1", "mu2", "mu3"])?;
    for (t, p) in traj.entries() {
        w.write_record([fmt_ts(*t), fmt_f64(p.mu1), fmt_f64(p.mu2), fmt_f64(p.mu3)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_trajectory(path: &Path) -> Result<ParamTrajectory> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    expect_header(&mut rdr, &["timestamp", "mu1", "mu2", "mu3"])?;
    let mut entries = Vec::new();
    for rec in rdr.records() {
        let (rec, line) = unwrap_record(rec)?;
        entries.push((
            parse_ts(rec.get(0).unwrap_or(""), line)?,
            PvusaParams::new(
                parse_field_f64(rec.get(1).unwrap_or(""), line, "mu1")?,
                parse_field_f64(rec.get(2).unwrap_or(""), line, "mu2")?,
                parse_field_f64(rec.get(3).unwrap_or(""), line, "mu3")?,
            ),
        ));
    }
    ParamTrajectory::new(entries)
}

pub fn save_detection_log(path: &Path, records: &[DetectionRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "day",
        "start",
        "len",
        "test1",
        "test2",
        "test3",
        "adapted",
        "mu1_after",
        "mu2_after",
        "mu3_after",
    ])?;
    for r in records {
        w.write_record([
            r.day.format("%Y-%m-%d").to_string(),
            r.start.to_string(),
            r.len.to_string(),
            r.test1.as_str().to_string(),
            r.test2.as_str().to_string(),
            r.test3.as_str().to_string(),
            r.adapted.as_str().to_string(),
            fmt_f64(r.params_after.mu1),
            fmt_f64(r.params_after.mu2),
            fmt_f64(r.params_after.mu3),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_detection_log(path: &Path) -> Result<Vec<DetectionRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    expect_header(
        &mut rdr,
        &[
            "day",
            "start",
            "len",
            "test1",
            "test2",
            "test3",
            "adapted",
            "mu1_after",
            "mu2_after",
            "mu3_after",
        ],
    )?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let (rec, line) = unwrap_record(rec)?;
        let day = NaiveDate::parse_from_str(rec.get(0).unwrap_or(""), "%Y-%m-%d")
            .map_err(|e| Error::parse(line, format!("bad day: {e}")))?;
        let parse_usize = |i: usize, what: &str| -> Result<usize> {
            rec.get(i).unwrap_or("").parse::<usize>().map_err(|_| {
                Error::parse(line, format!("bad {what}: {:?}", rec.get(i).unwrap_or("")))
            })
        };
        out.push(DetectionRecord {
            day,
            start: parse_usize(1, "start")?,
            len: parse_usize(2, "len")?,
            test1: Verdict::parse(rec.get(3).unwrap_or(""))
                .map_err(|e| Error::parse(line, e.to_string()))?,
            test2: Verdict::parse(rec.get(4).unwrap_or(""))
                .map_err(|e| Error::parse(line, e.to_string()))?,
            test3: Verdict::parse(rec.get(5).unwrap_or(""))
                .map_err(|e| Error::parse(line, e.to_string()))?,
            adapted: AdaptOutcome::parse(rec.get(6).unwrap_or(""))
                .map_err(|e| Error::parse(line, e.to_string()))?,
            params_after: PvusaParams::new(
                parse_field_f64(rec.get(7).unwrap_or(""), line, "mu1_after")?,
                parse_field_f64(rec.get(8).unwrap_or(""), line, "mu2_after")?,
                parse_field_f64(rec.get(9).unwrap_or(""), line, "mu3_after")?,
            ),
        });
    }
    Ok(out)
}

pub fn save_forecasts(path: &Path, entries: &[ForecastEntry]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["issued_at", "target", "kind", "p_hat_kw", "params_version"])?;
    for e in entries {
        w.write_record([
            fmt_ts(e.issued_at),
            fmt_ts(e.target),
            e.kind.as_str().to_string(),
            fmt_f64(e.p_hat_kw),
            e.params_version.map(fmt_ts).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_forecasts(path: &Path) -> Result<Vec<ForecastEntry>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    expect_header(
        &mut rdr,
        &["issued_at", "target", "kind", "p_hat_kw", "params_version"],
    )?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let (rec, line) = unwrap_record(rec)?;
        let version = rec.get(4).unwrap_or("");
        out.push(ForecastEntry {
            issued_at: parse_ts(rec.get(0).unwrap_or(""), line)?,
            target: parse_ts(rec.get(1).unwrap_or(""), line)?,
            kind: ForecastKind::parse(rec.get(2).unwrap_or(""))
                .map_err(|e| Error::parse(line, e.to_string()))?,
            p_hat_kw: parse_field_f64(rec.get(3).unwrap_or(""), line, "p_hat_kw")?,
            params_version: if version.is_empty() {
                None
            } else {
                Some(parse_ts(version, line)?)
            },
        });
    }
    Ok(out)
}

const METRIC_ROWS: [&str; 8] = [
    "n_samples",
    "rmse_kw",
    "mbe_kw",
    "mape_pct",
    "nrmse",
    "r2",
    "rmse_np",
    "mape_np_pct",
];

pub fn save_metrics(path: &Path, report: &MetricsReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["metric", "value"])?;
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let values = [
        report.n_samples.to_string(),
        fmt_f64(report.rmse_kw),
        fmt_f64(report.mbe_kw),
        opt(report.mape_pct),
        opt(report.nrmse),
        opt(report.r2),
        fmt_f64(report.rmse_np),
        fmt_f64(report.mape_np_pct),
    ];
    for (name, value) in METRIC_ROWS.iter().zip(values) {
        w.write_record([name.to_string(), value])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_metrics(path: &Path) -> Result<MetricsReport> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    expect_header(&mut rdr, &["metric", "value"])?;
    let mut values: Vec<(String, String, usize)> = Vec::new();
    for rec in rdr.records() {
        let (rec, line) = unwrap_record(rec)?;
        values.push((
            rec.get(0).unwrap_or("").to_string(),
            rec.get(1).unwrap_or("").to_string(),
            line,
        ));
    }
    if values.len() != METRIC_ROWS.len()
        || values
            .iter()
            .zip(METRIC_ROWS)
            .any(|((name, _, _), want)| name != want)
    {
        return Err(Error::invalid(
            "metrics file does not list the expected rows in order",
        ));
    }
    let num =
        |i: usize| -> Result<f64> { parse_field_f64(&values[i].1, values[i].2, METRIC_ROWS[i]) };
    let opt_num = |i: usize| -> Result<Option<f64>> {
        if values[i].1.is_empty() {
            Ok(None)
        } else {
            num(i).map(Some)
        }
    };
    Ok(MetricsReport {
        n_samples: values[0]
            .1
            .parse::<usize>()
            .map_err(|_| Error::parse(values[0].2, format!("bad n_samples: {:?}", values[0].1)))?,
        rmse_kw: num(1)?,
        mbe_kw: num(2)?,
        mape_pct: opt_num(3)?,
        nrmse: opt_num(4)?,
        r2: opt_num(5)?,
        rmse_np: num(6)?,
        mape_np_pct: num(7)?,
    })
}

pub fn save_daily_rmse(path: &Path, rows: &[DailyRmse]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["date", "rmse_kw", "measured_std_kw", "n_samples"])?;
    for r in rows {
        w.write_record([
            r.date.format("%Y-%m-%d").to_string(),
            fmt_f64(r.rmse_kw),
            fmt_f64(r.measured_std_kw),
            r.n_samples.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_daily_rmse(path: &Path) -> Result<Vec<DailyRmse>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    expect_header(
        &mut rdr,
        &["date", "rmse_kw", "measured_std_kw", "n_samples"],
    )?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let (rec, line) = unwrap_record(rec)?;
        out.push(DailyRmse {
            date: NaiveDate::parse_from_str(rec.get(0).unwrap_or(""), "%Y-%m-%d")
                .map_err(|e| Error::parse(line, format!("bad date: {e}")))?,
            rmse_kw: parse_field_f64(rec.get(1).unwrap_or(""), line, "rmse_kw")?,
            measured_std_kw: parse_field_f64(rec.get(2).unwrap_or(""), line, "measured_std_kw")?,
            n_samples: rec.get(3).unwrap_or("").parse::<usize>().map_err(|_| {
                Error::parse(
                    line,
                    format!("bad n_samples: {:?}", rec.get(3).unwrap_or("")),
                )
            })?,
        });
    }
    Ok(out)
}

fn unwrap_record(rec: csv::Result<csv::StringRecord>) -> Result<(csv::StringRecord, usize)> {
    let rec = rec.map_err(|e| {
        let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
        Error::parse(line, format!("malformed CSV record: {e}"))
    })?;
    let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
    Ok((rec, line))
}

fn expect_header(rdr: &mut csv::Reader<std::fs::File>, want: &[&str]) -> Result<()> {
    let headers = rdr
        .headers()
        .map_err(|e| Error::parse(1, format!("unreadable header: {e}")))?;
    let got: Vec<&str> = headers.iter().collect();
    if got != want {
        return Err(Error::parse(
            1,
            format!("expected columns {want:?}, found {got:?}"),
        ));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Configuration file
// ---------------------------------------------------------------------------

/// `[site]` section: plant location and panel orientation.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteSection {
    /// Degrees north.
    pub latitude_deg: f64,
    /// Degrees east.
    pub longitude_deg: f64,
    /// Panel tilt from horizontal, degrees; defaults to a latitude rule.
    pub tilt_deg: Option<f64>,
    /// Panel azimuth from due south, degrees, positive west; default 0
    /// (equator-facing).
    pub azimuth_deg: Option<f64>,
    /// Fixed local-time offset from UTC, hours; default 0.
    pub timezone_offset_hours: Option<f64>,
}

/// `[plant]` section: ratings and (for simulation) true coefficients.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlantSection {
    /// Nominal power, kW.
    pub p_nom_kw: f64,
    /// True model coefficients; required only to simulate data. All three
    /// must be given together.
    pub mu1: Option<f64>,
    pub mu2: Option<f64>,
    pub mu3: Option<f64>,
}

/// `[estimator]` section: every field optional, falling back to defaults.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorSection {
    /// Smallest window length the screening accepts; default 3.
    pub l_min: Option<usize>,
    /// Clear-sky production threshold factor; default 0.9.
    pub beta0: Option<f64>,
    /// Exponential forgetting factor; default 0.995.
    pub forgetting: Option<f64>,
    /// Initial covariance scale of the recursive fit; default 1000.
    pub init_cov_scale: Option<f64>,
    /// Clamp bounds for the adaptive peak-test tolerance; defaults 0.01/0.5.
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
}

/// `[scenario.temperature]` subsection.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemperatureSection {
    /// Daily mean, degC; default 18.
    pub mean_c: Option<f64>,
    /// Half peak-to-trough swing, degC; default 6.
    pub amplitude_c: Option<f64>,
    /// Gaussian jitter sd, degC; default 0.
    pub noise_sd_c: Option<f64>,
}

/// `[scenario.forecast_noise]` subsection; its presence enables synthetic
/// weather forecasts.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForecastNoiseSection {
    /// Log-sd of the per-day multiplicative irradiance bias; default 0.22.
    pub irr_day_bias_sd: Option<f64>,
    /// Log-sd of the per-sample multiplicative irradiance noise; default 0.12.
    pub irr_within_sd: Option<f64>,
    /// Additive temperature error sd, degC; default 1.5.
    pub temp_sd_c: Option<f64>,
}

/// `[scenario]` section: synthetic-data experiment description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    /// First simulated local date, `YYYY-MM-DD`.
    pub start_date: String,
    pub n_days: usize,
    /// Sampling step, minutes; must divide a day; default 60.
    pub step_minutes: Option<i64>,
    /// Random seed; default 0.
    pub seed: Option<u64>,
    /// Explicit day schedule (`clear`, `uniform:<f>`, `stochastic:<q>`);
    /// when omitted, days are drawn from the weights below.
    pub schedule: Option<Vec<String>>,
    /// Relative day-type frequencies; defaults 0.45 / 0.15 / 0.40.
    pub clear_weight: Option<f64>,
    pub uniform_weight: Option<f64>,
    pub stochastic_weight: Option<f64>,
    /// Attenuation range of drawn uniform days; default [0.5, 0.9].
    pub beta_min: Option<f64>,
    pub beta_max: Option<f64>,
    /// Intensity range of drawn stochastic days; default [0.3, 0.9].
    pub intensity_min: Option<f64>,
    pub intensity_max: Option<f64>,
    /// Measurement noise sd as a fraction of nominal power; default 0.005.
    pub noise_sd_frac: Option<f64>,
    /// Fraction of clear days whose measured power is derated; default 0.
    pub pod_fraction: Option<f64>,
    /// Derating factor range; default [0.5, 0.9].
    pub pod_beta_min: Option<f64>,
    pub pod_beta_max: Option<f64>,
    pub temperature: Option<TemperatureSection>,
    pub forecast_noise: Option<ForecastNoiseSection>,
}

/// Parsed configuration file; sections stay optional so each command can
/// demand exactly what it needs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub site: Option<SiteSection>,
    pub plant: Option<PlantSection>,
    pub estimator: Option<EstimatorSection>,
    pub scenario: Option<ScenarioSection>,
}

/// A scenario ready to run: generator config plus the protocol knobs that
/// wrap it.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedScenario {
    pub config: ScenarioConfig,
    pub seed: u64,
    /// Fraction of clear days to derate after generation.
    pub pod_fraction: f64,
    pub pod_beta_range: (f64, f64),
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))
}

impl ConfigFile {
    /// Site with orientation defaults applied, validated.
    pub fn site(&self) -> Result<SiteConfig> {
        let s = self
            .site
            .as_ref()
            .ok_or_else(|| Error::invalid("config is missing the [site] section"))?;
        let (tilt_default, az_default) = clearsky::default_orientation(s.latitude_deg);
        let site = SiteConfig {
            latitude_deg: s.latitude_deg,
            longitude_deg: s.longitude_deg,
            tilt_deg: s.tilt_deg.unwrap_or(tilt_default),
            azimuth_deg: s.azimuth_deg.unwrap_or(az_default),
            timezone_offset_hours: s.timezone_offset_hours.unwrap_or(0.0),
        };
        site.validate()?;
        Ok(site)
    }

    pub fn p_nom_kw(&self) -> Result<f64> {
        let p = self
            .plant
            .as_ref()
            .ok_or_else(|| Error::invalid("config is missing the [plant] section"))?;
        if !(p.p_nom_kw > 0.0 && p.p_nom_kw.is_finite()) {
            return Err(Error::invalid(format!(
                "p_nom_kw must be positive, got {}",
                p.p_nom_kw
            )));
        }
        Ok(p.p_nom_kw)
    }

    /// True coefficients if the plant section carries them.
    pub fn truth(&self) -> Result<Option<PvusaParams>> {
        let p = match &self.plant {
            Some(p) => p,
            None => return Ok(None),
        };
        match (p.mu1, p.mu2, p.mu3) {
            (Some(m1), Some(m2), Some(m3)) => Ok(Some(PvusaParams::new(m1, m2, m3))),
            (None, None, None) => Ok(None),
            _ => Err(Error::invalid(
                "plant coefficients mu1, mu2, mu3 must be given together",
            )),
        }
    }

    /// Estimation settings with file overrides applied; validated.
    pub fn estimation(&self, p_nom_kw: f64) -> Result<EstimationConfig> {
        let mut cfg = EstimationConfig::new(p_nom_kw);
        if let Some(e) = &self.estimator {
            if let Some(v) = e.l_min {
                cfg.l_min = v;
            }
            if let Some(v) = e.beta0 {
                cfg.beta0 = v;
            }
            if let Some(v) = e.forgetting {
                cfg.forgetting = v;
            }
            if let Some(v) = e.init_cov_scale {
                cfg.init_cov_scale = v;
            }
            if let Some(v) = e.eps_min {
                cfg.eps_min = v;
            }
            if let Some(v) = e.eps_max {
                cfg.eps_max = v;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Full scenario; requires the site section, a plant section with true
    /// coefficients, and the scenario section.
    pub fn scenario(&self) -> Result<ResolvedScenario> {
        let sc = self
            .scenario
            .as_ref()
            .ok_or_else(|| Error::invalid("config is missing the [scenario] section"))?;
        let site = self.site()?;
        let p_nom = self.p_nom_kw()?;
        let truth = self.truth()?.ok_or_else(|| {
            Error::invalid("simulation needs true coefficients mu1, mu2, mu3 in [plant]")
        })?;
        let start_date = NaiveDate::parse_from_str(&sc.start_date, "%Y-%m-%d").map_err(|e| {
            Error::invalid(format!("bad scenario start_date {:?}: {e}", sc.start_date))
        })?;
        let mut cfg = ScenarioConfig::new(site, truth, p_nom, start_date, sc.n_days);
        cfg.step = Duration::minutes(sc.step_minutes.unwrap_or(60));
        if let Some(schedule) = &sc.schedule {
            let days: Result<Vec<DayType>> = schedule.iter().map(|s| DayType::parse(s)).collect();
            cfg.schedule = Some(days?);
        }
        let w = DayWeights::default();
        cfg.weights = DayWeights {
            clear: sc.clear_weight.unwrap_or(w.clear),
            uniform: sc.uniform_weight.unwrap_or(w.uniform),
            stochastic: sc.stochastic_weight.unwrap_or(w.stochastic),
        };
        cfg.beta_range = (sc.beta_min.unwrap_or(0.5), sc.beta_max.unwrap_or(0.9));
        cfg.intensity_range = (
            sc.intensity_min.unwrap_or(0.3),
            sc.intensity_max.unwrap_or(0.9),
        );
        if let Some(v) = sc.noise_sd_frac {
            cfg.noise_sd_frac = v;
        }
        if let Some(t) = &sc.temperature {
            let d = TemperatureProfile::default();
            cfg.temperature = TemperatureProfile {
                mean_c: t.mean_c.unwrap_or(d.mean_c),
                amplitude_c: t.amplitude_c.unwrap_or(d.amplitude_c),
                noise_sd_c: t.noise_sd_c.unwrap_or(d.noise_sd_c),
            };
        }
        if let Some(f) = &sc.forecast_noise {
            let d = ForecastNoise::default();
            cfg.forecast_noise = Some(ForecastNoise {
                irr_day_bias_sd: f.irr_day_bias_sd.unwrap_or(d.irr_day_bias_sd),
                irr_within_sd: f.irr_within_sd.unwrap_or(d.irr_within_sd),
                temp_sd_c: f.temp_sd_c.unwrap_or(d.temp_sd_c),
            });
        }
        cfg.validate()?;
        let pod_fraction = sc.pod_fraction.unwrap_or(0.0);
        if !(0.0..=1.0).contains(&pod_fraction) {
            return Err(Error::invalid(format!(
                "pod_fraction must be in [0, 1], got {pod_fraction}"
            )));
        }
        Ok(ResolvedScenario {
            config: cfg,
            seed: sc.seed.unwrap_or(0),
            pod_fraction,
            pod_beta_range: (
                sc.pod_beta_min.unwrap_or(0.5),
                sc.pod_beta_max.unwrap_or(0.9),
            ),
        })
    }
}
