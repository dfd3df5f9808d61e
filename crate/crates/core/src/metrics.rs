//! Forecast error measures.
//!
//! All measures compare a forecast series against measured power over an
//! aligned set of samples. Conventions: errors are `measured - forecast`, so
//! a positive mean bias means the forecast underestimates production.

use chrono::NaiveDate;

use crate::clearsky::SiteConfig;
use crate::error::Error;
use crate::series::SampleSeries;
use crate::Result;

/// Summary error measures over one evaluation set.
///
/// `mape_pct` is absent when every measured sample is zero (all terms are
/// skipped); `nrmse` and `r2` are absent when the measured series is constant
/// (the normalizing variance is zero). Absent is expressed as `None`, never
/// as NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub n_samples: usize,
    /// Root mean square error, kW.
    pub rmse_kw: f64,
    /// Mean bias error `mean(measured - forecast)`, kW.
    pub mbe_kw: f64,
    /// Mean absolute percentage error, percent; samples with zero measured
    /// power are excluded from both the sum and its divisor.
    pub mape_pct: Option<f64>,
    /// RMSE normalized by the centered energy of the measured signal.
    pub nrmse: Option<f64>,
    /// Coefficient of determination, `1 - nrmse^2`.
    pub r2: Option<f64>,
    /// RMSE divided by nominal power.
    pub rmse_np: f64,
    /// Mean absolute error relative to nominal power, percent.
    pub mape_np_pct: f64,
}

/// Computes all error measures for aligned forecast/measured slices.
pub fn evaluate(forecast: &[f64], measured: &[f64], p_nom_kw: f64) -> Result<MetricsReport> {
    if forecast.len() != measured.len() {
        return Err(Error::invalid(format!(
            "length mismatch: {} forecast vs {} measured samples",
            forecast.len(),
            measured.len()
        )));
    }
    if forecast.is_empty() {
        return Err(Error::invalid("empty evaluation set"));
    }
    if !(p_nom_kw > 0.0 && p_nom_kw.is_finite()) {
        return Err(Error::invalid(format!(
            "nominal power must be positive, got {p_nom_kw}"
        )));
    }
    for (k, (&f, &m)) in forecast.iter().zip(measured).enumerate() {
        if !(f.is_finite() && m.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at evaluation sample {k}"
            )));
        }
    }
    let n = forecast.len() as f64;
    let mut sq_sum = 0.0;
    let mut bias_sum = 0.0;
    let mut abs_sum = 0.0;
    let mut mape_sum = 0.0;
    let mut mape_n = 0usize;
    for (&f, &m) in forecast.iter().zip(measured) {
        let e = m - f;
        sq_sum += e * e;
        bias_sum += e;
        abs_sum += e.abs();
        if m != 0.0 {
            mape_sum += (e / m).abs();
            mape_n += 1;
        }
    }
    let rmse = (sq_sum / n).sqrt();
    let mbe = bias_sum / n;
    let mape = if mape_n > 0 {
        Some(mape_sum / mape_n as f64 * 100.0)
    } else {
        None
    };

    let mean_m: f64 = measured.iter().sum::<f64>() / n;
    let centered: f64 = measured.iter().map(|&m| (m - mean_m) * (m - mean_m)).sum();
    let (nrmse, r2) = if centered > 0.0 {
        let v = (sq_sum / centered).sqrt();
        (Some(v), Some(1.0 - v * v))
    } else {
        (None, None)
    };

    Ok(MetricsReport {
        n_samples: forecast.len(),
        rmse_kw: rmse,
        mbe_kw: mbe,
        mape_pct: mape,
        nrmse,
        r2,
        rmse_np: rmse / p_nom_kw,
        mape_np_pct: abs_sum / n / p_nom_kw * 100.0,
    })
}

/// Per-day RMSE next to the spread of the measured signal that day.
#[derive(Debug, Clone, PartialEq)]
pub struct DailyRmse {
    pub date: NaiveDate,
    pub rmse_kw: f64,
    /// Population standard deviation of the measured power, kW; a reference
    /// scale for how variable the day was.
    pub measured_std_kw: f64,
    pub n_samples: usize,
}

/// Groups aligned `(date, forecast, measured)` rows by date (rows must come
/// date-ordered) and computes the per-day measures.
pub fn daily_rmse(rows: &[(NaiveDate, f64, f64)]) -> Result<Vec<DailyRmse>> {
    if rows.is_empty() {
        return Err(Error::invalid("empty evaluation set"));
    }
    let mut out: Vec<DailyRmse> = Vec::new();
    let mut i = 0usize;
    while i < rows.len() {
        let date = rows[i].0;
        let mut j = i;
        while j < rows.len() && rows[j].0 == date {
            j += 1;
        }
        let day = &rows[i..j];
        let n = day.len() as f64;
        let sq: f64 = day.iter().map(|&(_, f, m)| (m - f) * (m - f)).sum();
        let mean_m: f64 = day.iter().map(|&(_, _, m)| m).sum::<f64>() / n;
        let var_m: f64 = day
            .iter()
            .map(|&(_, _, m)| (m - mean_m) * (m - mean_m))
            .sum::<f64>()
            / n;
        out.push(DailyRmse {
            date,
            rmse_kw: (sq / n).sqrt(),
            measured_std_kw: var_m.sqrt(),
            n_samples: day.len(),
        });
        i = j;
    }
    Ok(out)
}

/// Default evaluation mask: light-hour samples from a given 1-based day
/// index onward. Day indices count distinct local dates from the series
/// start.
pub fn evaluation_mask(series: &SampleSeries, site: &SiteConfig, start_day: usize) -> Vec<bool> {
    let days = series.days(site);
    let mut mask = vec![false; series.len()];
    for (d_idx, day) in days.iter().enumerate() {
        if d_idx + 1 < start_day {
            continue;
        }
        for i in day.range.clone() {
            mask[i] = series.samples()[i].i_cs_wm2 > 0.0;
        }
    }
    mask
}
