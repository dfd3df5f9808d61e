//! Time-stamped measurement series and local-day partitioning.

use chrono::{DateTime, Duration, NaiveDate, Utc};

use crate::clearsky::SiteConfig;
use crate::error::Error;
use crate::Result;

/// One measurement instant.
///
/// `i_cs_wm2` is the panel-plane clear-sky irradiance computed for the
/// sample's timestamp and the plant's site; it is derived data, attached here
/// because every consumer of a sample needs it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub timestamp: DateTime<Utc>,
    /// Measured generated power, kW.
    pub p_m_kw: f64,
    /// Outdoor air temperature, degC.
    pub t_c: f64,
    /// Clear-sky plane-of-array irradiance at this instant, W/m^2.
    pub i_cs_wm2: f64,
}

impl Sample {
    fn validate(&self) -> Result<()> {
        if !(self.p_m_kw.is_finite() && self.t_c.is_finite() && self.i_cs_wm2.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite sample at {}",
                self.timestamp
            )));
        }
        if self.p_m_kw < 0.0 {
            return Err(Error::invalid(format!(
                "negative measured power {} kW at {}",
                self.p_m_kw, self.timestamp
            )));
        }
        if self.i_cs_wm2 < 0.0 {
            return Err(Error::invalid(format!(
                "negative clear-sky irradiance {} at {}",
                self.i_cs_wm2, self.timestamp
            )));
        }
        Ok(())
    }
}

/// Uniformly sampled series; timestamps strictly increase by a constant step.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSeries {
    samples: Vec<Sample>,
    step: Duration,
}

/// Contiguous index range of one local calendar day inside a series.
#[derive(Debug, Clone, PartialEq)]
pub struct DaySlice {
    pub date: NaiveDate,
    pub range: std::ops::Range<usize>,
}

impl SampleSeries {
    /// Builds a series, checking the uniform-step invariant and per-sample
    /// value ranges.
    pub fn new(samples: Vec<Sample>, step: Duration) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empty sample series"));
        }
        if step <= Duration::zero() {
            return Err(Error::invalid("sampling step must be positive"));
        }
        for (i, s) in samples.iter().enumerate() {
            s.validate()
                .map_err(|e| Error::invalid(format!("sample {i}: {e}")))?;
        }
        for (i, pair) in samples.windows(2).enumerate() {
            let dt = pair[1].timestamp - pair[0].timestamp;
            if dt != step {
                return Err(Error::invalid(format!(
                    "non-uniform step between samples {i} and {}: {} s, expected {} s",
                    i + 1,
                    dt.num_seconds(),
                    step.num_seconds()
                )));
            }
        }
        Ok(SampleSeries { samples, step })
    }

    /// Builds a series inferring the step from the first two samples.
    pub fn from_samples(samples: Vec<Sample>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::invalid(
                "need at least two samples to infer the step",
            ));
        }
        let step = samples[1].timestamp - samples[0].timestamp;
        SampleSeries::new(samples, step)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn step(&self) -> Duration {
        self.step
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Index of the sample at exactly `t`, if present.
    pub fn index_of(&self, t: DateTime<Utc>) -> Option<usize> {
        self.samples.binary_search_by_key(&t, |s| s.timestamp).ok()
    }

    /// Splits the series into runs of equal local calendar date. Days come
    /// back in order; the first and last may be partial.
    pub fn days(&self, site: &SiteConfig) -> Vec<DaySlice> {
        let mut out: Vec<DaySlice> = Vec::new();
        for (i, s) in self.samples.iter().enumerate() {
            let date = site.local_date(s.timestamp);
            match out.last_mut() {
                Some(d) if d.date == date => d.range.end = i + 1,
                _ => out.push(DaySlice {
                    date,
                    range: i..i + 1,
                }),
            }
        }
        out
    }

    /// First and last index with positive clear-sky irradiance inside
    /// `range`, or `None` if the range is fully dark.
    pub fn light_bounds(&self, range: std::ops::Range<usize>) -> Option<(usize, usize)> {
        let first = self.samples[range.clone()]
            .iter()
            .position(|s| s.i_cs_wm2 > 0.0)?;
        let last = self.samples[range.clone()]
            .iter()
            .rposition(|s| s.i_cs_wm2 > 0.0)?;
        Some((range.start + first, range.start + last))
    }
}
