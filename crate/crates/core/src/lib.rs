//! Estimation and forecasting of photovoltaic plant production from
//! generated-power measurements alone.
//!
//! The library identifies the parameters of a quadratic plant model without
//! any on-site irradiance sensor. Measured power is screened by three
//! clear-sky tests built on interval bounds that hold for commercial silicon
//! plants; samples that pass are fed to a recursive least-squares estimator.
//! The fitted parameters then drive day-ahead and hour-ahead power forecasts
//! from forecast weather, plus reference baselines and a full set of error
//! measures.
//!
//! Modules:
//! - [`pvusa`]: plant model, normalized correction factor and interval bounds
//! - [`clearsky`]: solar geometry and clear-sky irradiance on a tilted panel
//! - [`series`]: time-stamped sample series and day partitioning
//! - [`csdetect`]: the three clear-sky tests on sliding windows
//! - [`estimator`]: dynamic-window harvesting plus recursive least squares
//! - [`forecast`]: day-ahead, hour-ahead, clear-sky and persistence forecasts
//! - [`metrics`]: forecast error measures
//! - [`datagen`]: synthetic scenario generation for validation
//! - [`io`]: CSV dataset/result schemas and TOML configuration

pub mod clearsky;
pub mod csdetect;
pub mod datagen;
pub mod error;
pub mod estimator;
pub mod forecast;
pub mod io;
pub mod metrics;
pub mod pvusa;
pub mod series;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
